fn main() { std::process::exit(ddghz_cli::run(std::env::args())) }
