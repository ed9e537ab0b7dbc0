//! Seeded cross-checks of the closed forms against the brute-force
//! backends, as run by the `verify` command.

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::dense::{compose_bruteforce, cr_unitary, evolve_dense, partial_trace, DenseState};
use super::kraus_enum::{completeness_defect, ep_nonunitary_enumerated};
use super::montecarlo::{evolve_product, haar_qubit, mc_entangling_power, substream};
use super::projectors::{ep_trace_form, tangle_via_projectors};
use crate::error::Result;
use crate::metrics::{mway_ep_nonunitary, mway_ep_unitary, three_tangle_ckw};
use crate::mixed::reduced_decomposition;
use crate::spin::{compose_matrices, ConditionalRotation, Register, SequenceBlock, SequencePlan, SequenceUnit};
use crate::su2::Mat2;

/// Haar-random SU(2) element from a normalized Gaussian quaternion.
pub fn random_su2<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
    let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let a = C64::new(q[0], q[3]) / n;
    let b = C64::new(q[2], q[1]) / n;
    Mat2::new(a, -b.conj(), b, a.conj())
}

/// Conditional rotation with independent Haar branches.
pub fn random_cr<R: Rng + ?Sized>(rng: &mut R) -> ConditionalRotation {
    let (a, b) = (random_su2(rng), random_su2(rng));
    ConditionalRotation::from_matrices(&a, &b).expect("Haar samples are unitary")
}

pub fn random_crs<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<ConditionalRotation> {
    (0..n).map(|_| random_cr(rng)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Largest deviation observed (in standard errors for the Monte-Carlo
    /// check).
    pub max_deviation: f64,
    pub tolerance: f64,
    pub trials: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

fn check(name: &str, devs: impl IntoIterator<Item = f64>, tolerance: f64) -> CheckResult {
    let devs: Vec<f64> = devs.into_iter().collect();
    let max = devs.iter().cloned().fold(0.0, f64::max);
    CheckResult {
        name: name.into(),
        passed: devs.iter().all(|d| d.is_finite() && *d <= tolerance),
        max_deviation: max,
        tolerance,
        trials: devs.len(),
    }
}

fn random_plan<R: Rng + ?Sized>(rng: &mut R, blocks: usize) -> Result<SequencePlan> {
    let units = [SequenceUnit::cpmg(), SequenceUnit::udd(3)?, SequenceUnit::udd(4)?];
    let b = (0..blocks)
        .map(|_| {
            let u = units[rng.random_range(0..units.len())].clone();
            SequenceBlock::new(u, rng.random_range(1e-6..20e-6), rng.random_range(1..6))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SequencePlan::new(b))
}

/// Runs every cross-check with `trials` random instances each.
pub fn run_suite(register: &Register, trials: usize, mc_samples: usize, seed: u64) -> Result<VerifyReport> {
    let mut rng = substream(seed, u64::MAX);
    let mut checks = Vec::new();

    let mut devs = Vec::new();
    for i in 0..trials {
        let m = 3 + i % 2;
        let t = random_crs(&mut rng, m - 1);
        devs.push((mway_ep_unitary(&t)? - ep_trace_form(&cr_unitary(&t)?, m)?).abs());
    }
    checks.push(check("entangling_power_closed_vs_trace_form", devs, 1e-10));

    let mut devs = Vec::new();
    for i in 0..trials {
        let t = random_crs(&mut rng, 2 + i % 2);
        let (mean, se) = mc_entangling_power(&t, mc_samples, seed.wrapping_add(i as u64))?;
        devs.push((mean - mway_ep_unitary(&t)?).abs() / se.max(1e-300));
    }
    checks.push(check("entangling_power_monte_carlo_z", devs, 4.0));

    let mut devs = Vec::new();
    for _ in 0..trials {
        let t = random_crs(&mut rng, 2);
        let q: Vec<[C64; 2]> = (0..3).map(|_| haar_qubit(&mut rng)).collect();
        let s = evolve_product(&t, &q);
        devs.push((tangle_via_projectors(&s, 3)? - three_tangle_ckw(&s)).abs());
    }
    checks.push(check("three_tangle_projector_vs_ckw", devs, 1e-10));

    let mut devs = Vec::new();
    let mut complete = Vec::new();
    for i in 0..trials {
        let t = random_crs(&mut rng, 2);
        let u = random_crs(&mut rng, 1 + i % 6);
        devs.push((mway_ep_nonunitary(&t, &u)? - ep_nonunitary_enumerated(&t, &u)?).abs());
        complete.push(completeness_defect(&t, &u)?);
    }
    checks.push(check("nonunitary_ep_factorized_vs_enumerated", devs, 1e-12));
    checks.push(check("kraus_completeness", complete, 1e-10));

    let mut devs = Vec::new();
    for i in 0..trials {
        let t = random_crs(&mut rng, 2);
        let u = random_crs(&mut rng, 1 + i % 5);
        let e = haar_qubit(&mut rng);
        let ti: Vec<[C64; 2]> = (0..2).map(|_| haar_qubit(&mut rng)).collect();
        let ui: Vec<[C64; 2]> = (0..u.len()).map(|_| haar_qubit(&mut rng)).collect();
        let dec = reduced_decomposition((e[0], e[1]), &t, &ti, &u, &ui)?;
        let mut all = vec![e];
        all.extend(&ti);
        all.extend(&ui);
        let mut st = DenseState::product(&all)?;
        let mut rot = t.clone();
        rot.extend(&u);
        st.apply_cr(&rot)?;
        let rho = partial_trace(&st, &[0, 1, 2])?;
        devs.push((rho - dec.density_matrix()).camax());
    }
    checks.push(check("reduced_state_decomposition_vs_partial_trace", devs, 1e-10));

    // composed propagators and dense evolution on a small sub-register
    let sub: Vec<usize> = (0..register.len().min(4)).collect();
    let small = register.subset(&sub)?;
    let mut devs = Vec::new();
    for _ in 0..trials {
        let plan = random_plan(&mut rng, 2)?;
        for s in small.spins() {
            let (a0, a1) = compose_matrices(s, small.omega_larmor(), &plan)?;
            let (b0, b1) = compose_bruteforce(s, small.omega_larmor(), &plan);
            devs.push(a0.max_abs_diff(&b0).max(a1.max_abs_diff(&b1)));
        }
        let q: Vec<[C64; 2]> = (0..=small.len()).map(|_| haar_qubit(&mut rng)).collect();
        let init = DenseState::product(&q)?;
        let dense = evolve_dense(&small, &plan, &init)?;
        let rot = crate::spin::compose_register(&small, &plan)?;
        let mut cr = init.clone();
        cr.apply_cr(&rot)?;
        // equal up to a global phase
        let ov: C64 = dense
            .amplitudes()
            .iter()
            .zip(cr.amplitudes())
            .map(|(a, b)| a.conj() * b)
            .sum();
        devs.push((1.0 - ov.norm()).abs());
    }
    checks.push(check("composed_vs_pulse_level_evolution", devs, 1e-10));

    Ok(VerifyReport {
        passed: checks.iter().all(|c| c.passed),
        seed,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{khz_to_rad, DEFAULT_LARMOR_KHZ};

    #[test]
    fn suite_passes_on_bundled_register() {
        let r = Register::bundled(khz_to_rad(DEFAULT_LARMOR_KHZ)).unwrap();
        let rep = run_suite(&r, 4, 2000, 7).unwrap();
        for c in &rep.checks {
            assert!(c.passed, "{c:?}");
        }
    }

    #[test]
    fn haar_su2_is_special_unitary() {
        let mut rng = substream(1, 0);
        for _ in 0..50 {
            let u = random_su2(&mut rng);
            assert!(u.unitarity_defect() < 1e-12);
            assert!((u.det() - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }
}
