//! Channel seen by the target register once spectator nuclei (initially
//! |0⟩) are traced out. Its Kraus operators are
//! E_i = Σ_j σ_jj ⊗ R_j^{targets} · f_j^{(i)}, with
//! f_j^{(i)} = Π_l ⟨i_l|R_j^{(l)}|0⟩.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::invariants::{clamp_range, mway_ep_unitary};
use crate::error::{Error, Result};
use crate::spin::ConditionalRotation;

/// Default cap on L − K for enumerated Kraus coefficients.
pub const ENUM_CAP: usize = 20;

/// Per spectator: [[a0, b0], [a1, b1]] with a_j = ⟨0|R_j|0⟩, b_j = ⟨1|R_j|0⟩.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KrausFactorSet {
    pub overlaps: Vec<[[C64; 2]; 2]>,
}

pub fn kraus_factors(unwanted: &[ConditionalRotation]) -> KrausFactorSet {
    KrausFactorSet {
        overlaps: unwanted
            .iter()
            .map(|cr| {
                let r0 = cr.r0();
                let r1 = cr.r1();
                [[r0.get(0, 0), r0.get(1, 0)], [r1.get(0, 0), r1.get(1, 0)]]
            })
            .collect(),
    }
}

impl KrausFactorSet {
    pub fn len(&self) -> usize {
        self.overlaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.overlaps.is_empty()
    }

    /// g = Π_l ⟨0|R0^{(l)†} R1^{(l)}|0⟩ = Σ_i f0^{(i)*} f1^{(i)}.
    pub fn cross_overlap(&self) -> C64 {
        self.overlaps
            .iter()
            .map(|[[a0, b0], [a1, b1]]| a0.conj() * a1 + b0.conj() * b1)
            .product()
    }

    /// Max deviation of |a_j|² + |b_j|² from 1 over all spins.
    pub fn normalization_defect(&self) -> f64 {
        self.overlaps
            .iter()
            .flat_map(|p| p.iter().map(|[a, b]| (a.norm_sqr() + b.norm_sqr() - 1.0).abs()))
            .fold(0.0, f64::max)
    }

    /// All coefficients (f0^{(i)}, f1^{(i)}); bit string i is read with the
    /// first spectator as the most significant bit.
    pub fn enumerate(&self, cap: usize) -> Result<Vec<[C64; 2]>> {
        let n = self.overlaps.len();
        if n > cap {
            return Err(Error::CapExceeded {
                what: "spectator count for enumerated Kraus operators",
                value: n,
                cap,
                hint: "use the factorized cross overlap instead",
            });
        }
        let mut out = vec![[C64::new(1.0, 0.0); 2]];
        for p in &self.overlaps {
            let mut next = Vec::with_capacity(out.len() * 2);
            for f in &out {
                for bit in 0..2 {
                    next.push([f[0] * p[0][bit], f[1] * p[1][bit]]);
                }
            }
            out = next;
        }
        Ok(out)
    }
}

/// ε_{p,M}(E) = ε_{p,M}(U)·(1 + |g|²)/2.
pub fn mway_ep_nonunitary(targets: &[ConditionalRotation], unwanted: &[ConditionalRotation]) -> Result<f64> {
    let ep_u = mway_ep_unitary(targets)?;
    let g = kraus_factors(unwanted).cross_overlap();
    let v = ep_u * 0.5 * (1.0 + g.norm_sqr());
    clamp_range(v.min(ep_u), ep_u.max(0.0), "non-unitary entangling power")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateErrorReport {
    pub infidelity: f64,
    pub target_unitary_dim: usize,
}

/// Tr[ideal† (σ_jj ⊗ R_j^{targets})] for j = 0, 1.
fn branch_traces(targets: &[ConditionalRotation], ideal: &DMatrix<C64>) -> Result<[C64; 2]> {
    let m = targets.len() + 1;
    let d = 1usize << m;
    if ideal.nrows() != d || ideal.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: ideal.nrows().max(ideal.ncols()),
        });
    }
    let mats: Vec<[crate::su2::Mat2; 2]> = targets.iter().map(|cr| [cr.r0(), cr.r1()]).collect();
    let half = d / 2;
    let mut out = [C64::new(0.0, 0.0); 2];
    for (j, slot) in out.iter_mut().enumerate() {
        for r in 0..half {
            for c in 0..half {
                let mut v = C64::new(1.0, 0.0);
                for (l, pair) in mats.iter().enumerate() {
                    let shift = m - 2 - l;
                    v *= pair[j].get((r >> shift) & 1, (c >> shift) & 1);
                }
                *slot += ideal[(j * half + r, j * half + c)].conj() * v;
            }
        }
    }
    Ok(out)
}

/// 1 − F̄ for the traced-out channel against `ideal` (the target-only CR
/// unitary when `None`), with F̄ = (Σ_k |Tr[ideal† E_k]|² + d)/(d² + d).
pub fn gate_error(
    targets: &[ConditionalRotation],
    unwanted: &[ConditionalRotation],
    ideal: Option<&DMatrix<C64>>,
) -> Result<GateErrorReport> {
    if targets.is_empty() {
        return Err(Error::NoTargets);
    }
    let m = targets.len() + 1;
    let d = (1usize << m) as f64;
    let g = kraus_factors(unwanted).cross_overlap();
    let sum_sq = match ideal {
        None => 0.5 * d * d * (1.0 + g.re),
        Some(u) => {
            let [t0, t1] = branch_traces(targets, u)?;
            t0.norm_sqr() + t1.norm_sqr() + 2.0 * (t0.conj() * t1 * g).re
        }
    };
    let fid = (sum_sq + d) / (d * d + d);
    let infidelity = clamp_range(1.0 - fid, 1.0, "gate error")?;
    Ok(GateErrorReport {
        infidelity,
        target_unitary_dim: 1 << m,
    })
}
