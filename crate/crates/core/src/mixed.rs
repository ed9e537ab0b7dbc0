//! Rank-2 reduced states of the target register after spectators are traced
//! out, and their convex-roof three-tangle.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::tangle::kron;
use crate::metrics::{mtangle_pure, pure_concurrence};
use crate::num::golden_min;
use crate::oracle::dense::CMatrix;
use crate::spin::ConditionalRotation;

/// Default number of uniform χ samples before refinement.
pub const CHI_SAMPLES: usize = 720;
const GOLDEN_ITERS: usize = 100;
/// Electron coherence below which the degenerate (diagonal) branch is used.
const COHERENCE_EPS: f64 = 1e-14;

pub type Qubit = [C64; 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedDecomposition {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub v_plus: Vec<C64>,
    pub v_minus: Vec<C64>,
    pub f01: C64,
}

impl ReducedDecomposition {
    pub fn n_qubits(&self) -> usize {
        self.v_plus.len().trailing_zeros() as usize
    }

    /// λ₊ v₊v₊† + λ₋ v₋v₋†
    pub fn density_matrix(&self) -> CMatrix {
        let d = self.v_plus.len();
        CMatrix::from_fn(d, d, |r, c| {
            self.v_plus[r] * self.v_plus[c].conj() * self.lambda_plus
                + self.v_minus[r] * self.v_minus[c].conj() * self.lambda_minus
        })
    }
}

fn check_qubit(q: &Qubit) -> Result<()> {
    let n2 = q[0].norm_sqr() + q[1].norm_sqr();
    if (n2 - 1.0).abs() > 1e-10 {
        return Err(Error::Unnormalized(n2));
    }
    Ok(())
}

/// f01 = Π_l ⟨ψ_l|R1^{(l)†} R0^{(l)}|ψ_l⟩ over the spectators.
pub fn environment_coherence(unwanted: &[ConditionalRotation], initials: &[Qubit]) -> C64 {
    unwanted
        .iter()
        .zip(initials)
        .map(|(cr, psi)| {
            let a = cr.r0().apply(*psi);
            let b = cr.r1().apply(*psi);
            b[0].conj() * a[0] + b[1].conj() * a[1]
        })
        .product()
}

/// Normalized eigenvector of [[a, z], [z*, b]] for eigenvalue λ, taking the
/// better conditioned of the two null-space candidates.
fn eigvec2(a: f64, b: f64, z: C64, lambda: f64) -> [C64; 2] {
    let u = [z, C64::new(lambda - a, 0.0)];
    let w = [C64::new(lambda - b, 0.0), z.conj()];
    let nu = (u[0].norm_sqr() + u[1].norm_sqr()).sqrt();
    let nw = (w[0].norm_sqr() + w[1].norm_sqr()).sqrt();
    if nu >= nw {
        [u[0] / nu, u[1] / nu]
    } else {
        [w[0] / nw, w[1] / nw]
    }
}

/// (Σ_j σ_jj ⊗_l R_j^{(l)}) (e ⊗_l ψ_l)
fn dress(electron: Qubit, targets: &[ConditionalRotation], target_initials: &[Qubit]) -> Vec<C64> {
    let mut out = Vec::with_capacity(2 << targets.len());
    for (j, amp) in electron.iter().enumerate() {
        let mut branch = vec![*amp];
        for (cr, psi) in targets.iter().zip(target_initials) {
            branch = kron(&branch, &cr.branch(j).apply(*psi));
        }
        out.extend(branch);
    }
    out
}

/// Eigendecomposition of the target-register state after the spectators
/// are traced out, for the product input (α|0⟩ + β|1⟩) ⊗ targets ⊗ bath.
pub fn reduced_decomposition(
    electron: (C64, C64),
    targets: &[ConditionalRotation],
    target_initials: &[Qubit],
    unwanted: &[ConditionalRotation],
    unwanted_initials: &[Qubit],
) -> Result<ReducedDecomposition> {
    let (alpha, beta) = electron;
    let n2 = alpha.norm_sqr() + beta.norm_sqr();
    if (n2 - 1.0).abs() > 1e-10 {
        return Err(Error::Unnormalized(n2));
    }
    if targets.len() != target_initials.len() {
        return Err(Error::DimensionMismatch {
            expected: targets.len(),
            got: target_initials.len(),
        });
    }
    if unwanted.len() != unwanted_initials.len() {
        return Err(Error::DimensionMismatch {
            expected: unwanted.len(),
            got: unwanted_initials.len(),
        });
    }
    for q in target_initials.iter().chain(unwanted_initials) {
        check_qubit(q)?;
    }
    let f01 = environment_coherence(unwanted, unwanted_initials);
    let a = alpha.norm_sqr();
    let b = beta.norm_sqr();
    let z = alpha * beta.conj() * f01;
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let (lp, lm, ep, em) = if b == 0.0 || a == 0.0 || z.norm() < COHERENCE_EPS {
        // diagonal in the electron basis
        if a >= b {
            (a, b, [one, zero], [zero, one])
        } else {
            (b, a, [zero, one], [one, zero])
        }
    } else {
        let disc = ((a - b).powi(2) + 4.0 * z.norm_sqr()).sqrt();
        let lp = 0.5 * (1.0 + disc);
        let lm = 0.5 * (1.0 - disc);
        (lp, lm.max(0.0), eigvec2(a, b, z, lp), eigvec2(a, b, z, lm))
    };
    Ok(ReducedDecomposition {
        lambda_plus: lp,
        lambda_minus: lm,
        v_plus: dress(ep, targets, target_initials),
        v_minus: dress(em, targets, target_initials),
        f01,
    })
}

/// Minimizes `f` over χ ∈ [0, 2π): uniform samples, then golden-section
/// refinement around the best sample. Returns (min, argmin).
pub fn minimize_phase(f: impl Fn(f64) -> f64, samples: usize) -> (f64, f64) {
    let samples = samples.max(8);
    let h = TAU / samples as f64;
    let (mut best_x, mut best) = (0.0, f(0.0));
    for i in 1..samples {
        let x = i as f64 * h;
        let v = f(x);
        if v < best {
            best = v;
            best_x = x;
        }
    }
    let (x, v) = golden_min(&f, best_x - h, best_x + h, GOLDEN_ITERS);
    if v < best {
        (v, x.rem_euclid(TAU))
    } else {
        (best, best_x)
    }
}

/// √p v₊ − e^{iχ} √(1−p) v₋
pub fn trial_state(v_plus: &[C64], v_minus: &[C64], p: f64, chi: f64) -> Vec<C64> {
    let a = p.sqrt();
    let b = C64::from_polar((1.0 - p).max(0.0).sqrt(), chi);
    v_plus.iter().zip(v_minus).map(|(x, y)| x * a - y * b).collect()
}

fn tau3(state: &[C64]) -> f64 {
    // trial states are normalized by construction; renormalize roundoff
    let n = state.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let s: Vec<C64> = state.iter().map(|z| z / n).collect();
    mtangle_pure(&s, 3, false).unwrap_or(f64::NAN)
}

/// min_χ τ₃ of the trial state with weight p on v₊.
pub fn min_tangle_over_chi(v_plus: &[C64], v_minus: &[C64], p: f64, samples: usize) -> Result<(f64, f64)> {
    if v_plus.len() != 8 || v_minus.len() != 8 {
        return Err(Error::UnsupportedQubits(format!(
            "convex roof implemented for three qubits, got {} amplitudes",
            v_plus.len()
        )));
    }
    if p >= 1.0 || p <= 0.0 {
        let v = if p >= 1.0 { v_plus } else { v_minus };
        return Ok((tau3(v), 0.0));
    }
    Ok(minimize_phase(|chi| tau3(&trial_state(v_plus, v_minus, p, chi)), samples))
}

/// (τ_min, χ_argmin) for a rank-2 decomposition.
pub fn trial_state_minimize(dec: &ReducedDecomposition, chi_resolution: usize) -> Result<(f64, f64)> {
    if dec.lambda_minus <= 1e-15 {
        if dec.v_plus.len() != 8 {
            return Err(Error::UnsupportedQubits("convex roof implemented for three qubits".into()));
        }
        return Ok((tau3(&dec.v_plus), 0.0));
    }
    min_tangle_over_chi(&dec.v_plus, &dec.v_minus, dec.lambda_plus, chi_resolution)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexRoofResult {
    pub p_grid: Vec<f64>,
    pub tau_min: Vec<f64>,
    pub tau_hull: Vec<f64>,
    pub chi_argmin: Vec<f64>,
}

/// Trial-state minima over a grid of weights p, with their convex hull.
pub fn convex_roof(v_plus: &[C64], v_minus: &[C64], p_grid: &[f64], chi_resolution: usize) -> Result<ConvexRoofResult> {
    let rows: Vec<(f64, f64)> = p_grid
        .par_iter()
        .map(|&p| min_tangle_over_chi(v_plus, v_minus, p, chi_resolution))
        .collect::<Result<_>>()?;
    let tau_min: Vec<f64> = rows.iter().map(|r| r.0).collect();
    Ok(ConvexRoofResult {
        p_grid: p_grid.to_vec(),
        tau_hull: convex_hull(p_grid, &tau_min),
        chi_argmin: rows.iter().map(|r| r.1).collect(),
        tau_min,
    })
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Lower convex envelope of (p, τ), evaluated back on `p_grid`.
pub fn convex_hull(p_grid: &[f64], tau: &[f64]) -> Vec<f64> {
    if p_grid.len() < 2 || p_grid.len() != tau.len() {
        return tau.to_vec();
    }
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(p_grid.len());
    for (&p, &t) in p_grid.iter().zip(tau) {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], (p, t)) <= 0.0 {
            hull.pop();
        }
        hull.push((p, t));
    }
    let mut seg = 0;
    p_grid
        .iter()
        .zip(tau)
        .map(|(&p, &t)| {
            while seg + 1 < hull.len() - 1 && hull[seg + 1].0 <= p {
                seg += 1;
            }
            let (a, b) = (hull[seg], hull[(seg + 1).min(hull.len() - 1)]);
            let v = if b.0 > a.0 {
                a.1 + (b.1 - a.1) * (p - a.0) / (b.0 - a.0)
            } else {
                a.1
            };
            v.min(t)
        })
        .collect()
}

/// min_χ C of √p|Φ⁺⟩ + e^{iχ}√(1−p)|Φ⁻⟩ for each p.
pub fn bell_mixture_concurrence(p_grid: &[f64], chi_resolution: usize) -> Vec<f64> {
    let s = FRAC_1_SQRT_2;
    p_grid
        .iter()
        .map(|&p| {
            let f = |chi: f64| {
                let a = C64::new(p.sqrt() * s, 0.0);
                let b = C64::from_polar((1.0 - p).max(0.0).sqrt() * s, chi);
                let zero = C64::new(0.0, 0.0);
                pure_concurrence(&[a + b, zero, zero, a - b])
            };
            minimize_phase(f, chi_resolution).0
        })
        .collect()
}

/// cos(θ/2)|0⟩ + e^{iγ} sin(θ/2)|1⟩
pub fn bloch_state(theta: f64, gamma: f64) -> Qubit {
    [C64::new((0.5 * theta).cos(), 0.0), C64::from_polar((0.5 * theta).sin(), gamma)]
}

/// τ₃ of the CR output for a product input e ⊗ ψ₁ ⊗ ψ₂:
/// 4|α|²|β|² Π_l (1 − |⟨R0ψ_l|R1ψ_l⟩|²).
pub fn product_input_tangle(targets: &[ConditionalRotation], input: &[Qubit]) -> f64 {
    let e = input[0];
    let mut v = 4.0 * e[0].norm_sqr() * e[1].norm_sqr();
    for (cr, psi) in targets.iter().zip(&input[1..]) {
        v *= nuclear_factor(cr, psi);
    }
    v
}

fn nuclear_factor(cr: &ConditionalRotation, psi: &Qubit) -> f64 {
    let a = cr.r0().apply(*psi);
    let b = cr.r1().apply(*psi);
    1.0 - (a[0].conj() * b[0] + a[1].conj() * b[1]).norm_sqr()
}

/// Bloch-grid resolutions: θ step 0.05π on [0, π], γ step 0.1π on [0, 2π).
pub fn bloch_grid() -> Vec<Qubit> {
    let mut out = Vec::with_capacity(21 * 20);
    for i in 0..=20 {
        for k in 0..20 {
            out.push(bloch_state(i as f64 * 0.05 * PI, k as f64 * 0.1 * PI));
        }
    }
    out
}

/// Threshold at which the default input |+⟩|0⟩|0⟩ is accepted.
pub const DEFAULT_INPUT_TANGLE: f64 = 0.95;

/// Best product input for a three-qubit CR evolution: the default
/// |+⟩|0⟩|0⟩ when it reaches τ₃ ≥ 0.95, else the Bloch-grid maximizer.
///
/// The tangle factorizes over qubits, so each qubit is maximized on its own
/// grid; the first maximizer in grid order wins ties.
pub fn initial_state_search(targets: &[ConditionalRotation]) -> Result<(Vec<Qubit>, f64)> {
    if targets.len() != 2 {
        return Err(Error::UnsupportedQubits(format!(
            "input search is for three qubits, got {}",
            targets.len() + 1
        )));
    }
    let plus = bloch_state(PI / 2.0, 0.0);
    let zero = bloch_state(0.0, 0.0);
    let default = vec![plus, zero, zero];
    let t = product_input_tangle(targets, &default);
    if t >= DEFAULT_INPUT_TANGLE {
        return Ok((default, t));
    }
    let grid = bloch_grid();
    let argmax = |f: &dyn Fn(&Qubit) -> f64| -> Qubit {
        let mut best = grid[0];
        let mut bv = f(&grid[0]);
        for q in &grid[1..] {
            let v = f(q);
            if v > bv {
                bv = v;
                best = *q;
            }
        }
        best
    };
    let e = argmax(&|q: &Qubit| q[0].norm_sqr() * q[1].norm_sqr());
    let n1 = argmax(&|q: &Qubit| nuclear_factor(&targets[0], q));
    let n2 = argmax(&|q: &Qubit| nuclear_factor(&targets[1], q));
    let best = vec![e, n1, n2];
    let v = product_input_tangle(targets, &best);
    if v > t {
        Ok((best, v))
    } else {
        Ok((default, t))
    }
}

/// Mixed-state analysis of a three-qubit plan with the bath in |0⟩.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixedStateReport {
    pub targets: Vec<String>,
    /// Product input (electron first) as [[re, im], [re, im]] per qubit.
    pub initial_state: Vec<[[f64; 2]; 2]>,
    /// τ₃ of the pure target-register state with spectators ignored.
    pub tau_pure: f64,
    pub lambda_plus: f64,
    pub f01_abs: f64,
    pub tau_v_plus: f64,
    pub tau_v_minus: f64,
    /// Trial-state minimum at p = λ₊.
    pub tau_mixed: f64,
    pub chi_argmin: f64,
    pub roof: ConvexRoofResult,
}

/// Runs the input search, the reduced decomposition and the convex roof for
/// a plan with two target spins.
pub fn analyze_plan(
    register: &crate::spin::Register,
    plan: &crate::spin::SequencePlan,
    targets: &[usize],
    p_grid: &[f64],
    chi_resolution: usize,
) -> Result<MixedStateReport> {
    let rot = crate::spin::compose_register(register, plan)?;
    let (tgt, unw) = crate::metrics::split_rotations(&rot, targets)?;
    let (input, tau_pure) = initial_state_search(&tgt)?;
    let zero = bloch_state(0.0, 0.0);
    let bath = vec![zero; unw.len()];
    let dec = reduced_decomposition((input[0][0], input[0][1]), &tgt, &input[1..], &unw, &bath)?;
    let (tau_mixed, chi_argmin) = trial_state_minimize(&dec, chi_resolution)?;
    let roof = convex_roof(&dec.v_plus, &dec.v_minus, p_grid, chi_resolution)?;
    Ok(MixedStateReport {
        targets: targets.iter().map(|&i| register.spins()[i].label.clone()).collect(),
        initial_state: input.iter().map(|q| [[q[0].re, q[0].im], [q[1].re, q[1].im]]).collect(),
        tau_pure,
        lambda_plus: dec.lambda_plus,
        f01_abs: dec.f01.norm(),
        tau_v_plus: tau3(&dec.v_plus),
        tau_v_minus: tau3(&dec.v_minus),
        tau_mixed,
        chi_argmin,
        roof,
    })
}

/// Evenly spaced weights on [0, 1].
pub fn p_grid(points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.5],
        n => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}
