//! Monte-Carlo estimate of the M-way entangling power: the mean M-tangle
//! over Haar-random product inputs.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::projectors::MAX_PROJECTOR_M;
use crate::error::{Error, Result};
use crate::metrics::mtangle_pure;
use crate::metrics::tangle::kron;
use crate::spin::ConditionalRotation;

/// Samples drawn from one RNG substream.
pub const CHUNK: usize = 1024;

/// Haar-random single-qubit state from a normalized complex Gaussian pair.
pub fn haar_qubit<R: Rng + ?Sized>(rng: &mut R) -> [C64; 2] {
    loop {
        let mut g = || C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        let v = [g(), g()];
        let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        if n > 1e-300 {
            return [v[0] / n, v[1] / n];
        }
    }
}

/// RNG for chunk `chunk` of a run seeded with `seed`.
pub fn substream(seed: u64, chunk: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Output state of the CR evolution on the product input `qubits`
/// (qubit 0 is the control).
pub fn evolve_product(targets: &[ConditionalRotation], qubits: &[[C64; 2]]) -> Vec<C64> {
    let mut branches = [vec![qubits[0][0]], vec![qubits[0][1]]];
    for (j, b) in branches.iter_mut().enumerate() {
        for (cr, q) in targets.iter().zip(&qubits[1..]) {
            let r = cr.branch(j).apply(*q);
            *b = kron(b, &r);
        }
    }
    let mut out = branches[0].clone();
    out.extend_from_slice(&branches[1]);
    out
}

/// (mean, standard error) of τ_M over `samples` Haar product states.
/// Deterministic in `seed` regardless of thread count.
pub fn mc_entangling_power(targets: &[ConditionalRotation], samples: usize, seed: u64) -> Result<(f64, f64)> {
    let m = targets.len() + 1;
    if targets.is_empty() {
        return Err(Error::NoTargets);
    }
    if m > MAX_PROJECTOR_M {
        return Err(Error::CapExceeded {
            what: "Monte-Carlo qubit count",
            value: m,
            cap: MAX_PROJECTOR_M,
            hint: "use the closed form",
        });
    }
    if samples < 2 {
        return Err(Error::Config("need at least two samples".into()));
    }
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<Result<(f64, f64)>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = substream(seed, c as u64);
            let n = CHUNK.min(samples - c * CHUNK);
            let mut s = 0.0;
            let mut s2 = 0.0;
            for _ in 0..n {
                let q: Vec<[C64; 2]> = (0..m).map(|_| haar_qubit(&mut rng)).collect();
                let psi = evolve_product(targets, &q);
                let t = mtangle_pure(&psi, m, true)?;
                s += t;
                s2 += t * t;
            }
            Ok((s, s2))
        })
        .collect();
    let mut s = 0.0;
    let mut s2 = 0.0;
    for p in parts {
        let (a, b) = p?;
        s += a;
        s2 += b;
    }
    let n = samples as f64;
    let mean = s / n;
    let var = ((s2 - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok((mean, (var / n).sqrt()))
}
