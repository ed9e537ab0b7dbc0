//! `ddghz` command-line driver.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use ddghz_core::io::{fmt12, to_json, write_archive, PlanFile, ResolvedConfig, RunConfig};
use ddghz_core::metrics::{g1, metrics_report, one_tangle_scaled};
use ddghz_core::mixed::{analyze_plan, bell_mixture_concurrence, min_tangle_over_chi, p_grid};
use ddghz_core::num::sig12;
use ddghz_core::oracle::run_suite;
use ddghz_core::search::{rank_cases, search_multispin, search_sequential};
use ddghz_core::spin::compose_register;
use ddghz_core::{Error, Register, Scheme, SequencePlan};

#[derive(Parser, Debug)]
#[command(name = "ddghz", version, about = "GHZ-state sequence design on a nuclear spin register")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Conditional rotations of every spin under a plan.
    Evolve(PlanArgs),
    /// Entangling power, one-tangles and gate error of a plan.
    Metrics(PlanArgs),
    /// Sequential-scheme search; writes a case archive.
    SearchSequential(ConfigArgs),
    /// Multi-spin-scheme search; writes a case archive.
    SearchMultispin(ConfigArgs),
    /// Reduced-state three-tangle of a two-target plan.
    MixedState(PlanArgs),
    /// Cross-checks closed forms against brute-force oracles.
    Verify(ConfigArgs),
}

#[derive(clap::Args, Debug)]
struct ConfigArgs {
    #[arg(long)]
    config: PathBuf,
}

#[derive(clap::Args, Debug)]
struct PlanArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    plan: PathBuf,
}

/// Exit codes: 0 success, 1 usage or configuration error, 2 internal
/// invariant violation or failed verification.
pub fn run<I: IntoIterator<Item = String>>(argv: I) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Invariant(_) | Error::OutOfRange { .. } | Error::NotUnitary(_) | Error::Unnormalized(_) => 2,
        _ => 1,
    }
}

fn load_config(path: &Path, scheme: Option<Scheme>) -> Result<ResolvedConfig, Error> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
    let mut raw = RunConfig::from_json(&text)?;
    if scheme.is_some() {
        raw.scheme = scheme;
    }
    raw.resolve(path.parent().unwrap_or(Path::new(".")))
}

fn load_plan(path: &Path, register: &Register) -> Result<(SequencePlan, Vec<usize>, PlanFile), Error> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read plan {}: {e}", path.display())))?;
    let file: PlanFile =
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("plan {}: {e}", path.display())))?;
    let plan = file.to_plan().map_err(|e| Error::Config(e.to_string()))?;
    let targets = file
        .targets
        .iter()
        .map(|l| register.index_of(l))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Error::Config(e.to_string()))?;
    Ok((plan, targets, file))
}

fn write(dir: &Path, name: &str, body: &str) -> Result<(), Error> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), body)?;
    Ok(())
}

fn dispatch(cmd: Command) -> Result<i32, Error> {
    match cmd {
        Command::Evolve(a) => evolve(&a),
        Command::Metrics(a) => metrics(&a),
        Command::SearchSequential(a) => search(&a, Scheme::Sequential),
        Command::SearchMultispin(a) => search(&a, Scheme::Multispin),
        Command::MixedState(a) => mixed_state(&a),
        Command::Verify(a) => verify(&a),
    }
}

fn evolve(a: &PlanArgs) -> Result<i32, Error> {
    let cfg = load_config(&a.config, None)?;
    let (plan, _, file) = load_plan(&a.plan, &cfg.register)?;
    let rot = compose_register(&cfg.register, &plan)?;
    let mut csv = String::from("label,phi0,n0x,n0y,n0z,phi1,n1x,n1y,n1z,relative_sign,g1,one_tangle_scaled\n");
    let mut spins = Vec::new();
    for (s, r) in cfg.register.spins().iter().zip(&rot) {
        let g = g1(r);
        let row: Vec<String> = [r.phi0, r.n0[0], r.n0[1], r.n0[2], r.phi1, r.n1[0], r.n1[1], r.n1[2], r.relative_sign, g, one_tangle_scaled(g)]
            .iter()
            .map(|v| fmt12(*v))
            .collect();
        csv.push_str(&format!("{},{}\n", s.label, row.join(",")));
        spins.push(serde_json::json!({
            "label": s.label,
            "phi0": sig12(r.phi0),
            "n0": r.n0.map(sig12),
            "phi1": sig12(r.phi1),
            "n1": r.n1.map(sig12),
            "relative_sign": r.relative_sign,
            "g1": sig12(g),
        }));
    }
    let doc = serde_json::json!({ "plan": file, "spins": spins });
    write(&cfg.output_dir, "evolve.json", &to_json(&doc)?)?;
    write(&cfg.output_dir, "evolve.csv", &csv)?;
    println!("wrote {}", cfg.output_dir.join("evolve.json").display());
    Ok(0)
}

fn metrics(a: &PlanArgs) -> Result<i32, Error> {
    let cfg = load_config(&a.config, None)?;
    let (plan, targets, _) = load_plan(&a.plan, &cfg.register)?;
    let rep = metrics_report(&cfg.register, &plan, &targets)?.rounded();
    let mut csv = String::from("label,target,g1,one_tangle_scaled\n");
    for (i, l) in rep.spins.iter().enumerate() {
        csv.push_str(&format!(
            "{l},{},{},{}\n",
            targets.contains(&i) as u8,
            fmt12(rep.g1[i]),
            fmt12(rep.one_tangles_scaled[i])
        ));
    }
    let json = to_json(&rep)?;
    write(&cfg.output_dir, "metrics.json", &json)?;
    write(&cfg.output_dir, "metrics.csv", &csv)?;
    print!("{json}");
    Ok(0)
}

fn search(a: &ConfigArgs, scheme: Scheme) -> Result<i32, Error> {
    let cfg = load_config(&a.config, Some(scheme))?;
    let cases = match scheme {
        Scheme::Sequential => search_sequential(&cfg.register, &cfg.unit, &cfg.tolerances)?,
        Scheme::Multispin => search_multispin(&cfg.register, &cfg.unit, &cfg.tolerances)?,
    };
    for c in &cases {
        if !c.satisfies(&cfg.tolerances) {
            return Err(Error::Invariant(format!("case {:?} violates its tolerances", c.spin_labels)));
        }
    }
    let ranked = rank_cases(cases, cfg.rank_weights, &cfg.tolerances)?;
    let records = write_archive(&cfg.output_dir, &cfg, &ranked)?;
    println!(
        "{} {} cases for GHZ{} written to {}",
        records.len(),
        scheme.as_str(),
        cfg.tolerances.ghz_size,
        cfg.output_dir.display()
    );
    Ok(0)
}

fn mixed_state(a: &PlanArgs) -> Result<i32, Error> {
    let cfg = load_config(&a.config, None)?;
    let (plan, targets, _) = load_plan(&a.plan, &cfg.register)?;
    if targets.len() != 2 {
        return Err(Error::Config(format!("mixed-state needs exactly two targets, got {}", targets.len())));
    }
    let grid = p_grid(cfg.p_points);
    let rep = analyze_plan(&cfg.register, &plan, &targets, &grid, cfg.chi_samples)?;
    if (rep.tau_v_plus - rep.tau_v_minus).abs() > 1e-3 {
        eprintln!(
            "note: eigenvector three-tangles differ ({} vs {})",
            fmt12(rep.tau_v_plus),
            fmt12(rep.tau_v_minus)
        );
    }
    let mut roof = String::from("p,tau_min,tau_hull,chi_argmin\n");
    let r = &rep.roof;
    for i in 0..r.p_grid.len() {
        roof.push_str(&format!(
            "{},{},{},{}\n",
            fmt12(r.p_grid[i]),
            fmt12(r.tau_min[i]),
            fmt12(r.tau_hull[i]),
            fmt12(r.chi_argmin[i])
        ));
    }
    // reference curves for GHZ± and Bell mixtures
    let ghz_p = ddghz_core::metrics::tangle::ghz(3);
    let mut ghz_m = ghz_p.clone();
    ghz_m[7] = -ghz_m[7];
    let bell = bell_mixture_concurrence(&grid, cfg.chi_samples);
    let mut refs = String::from("p,tau_ghz_mixture,concurrence_bell_mixture\n");
    for (p, c) in grid.iter().zip(&bell) {
        let (t, _) = min_tangle_over_chi(&ghz_p, &ghz_m, *p, cfg.chi_samples)?;
        refs.push_str(&format!("{},{},{}\n", fmt12(*p), fmt12(t), fmt12(*c)));
    }
    write(&cfg.output_dir, "mixed_state.json", &to_json(&rep)?)?;
    write(&cfg.output_dir, "convex_roof.csv", &roof)?;
    write(&cfg.output_dir, "mixture_reference.csv", &refs)?;
    println!(
        "tau_pure = {}, lambda_plus = {}, tau_mixed = {}",
        fmt12(rep.tau_pure),
        fmt12(rep.lambda_plus),
        fmt12(rep.tau_mixed)
    );
    Ok(0)
}

fn verify(a: &ConfigArgs) -> Result<i32, Error> {
    let cfg = load_config(&a.config, None)?;
    let rep = run_suite(&cfg.register, cfg.verify_trials, cfg.mc_samples, cfg.rng_seed)?;
    write(&cfg.output_dir, "verify.json", &to_json(&rep)?)?;
    for c in &rep.checks {
        println!(
            "{} {} (max deviation {:.3e}, tolerance {:.1e})",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.max_deviation,
            c.tolerance
        );
    }
    Ok(if rep.passed { 0 } else { 2 })
}
