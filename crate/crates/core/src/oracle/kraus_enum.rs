//! Enumerated Kraus operators and double sums, for checking the factorized
//! closed forms.

use num_complex::Complex64 as C64;

use super::dense::{cr_unitary, CMatrix};
use crate::error::{Error, Result};
use crate::metrics::{kraus_factors, mway_ep_unitary};
use crate::spin::ConditionalRotation;

/// Largest spectator count for explicit Kraus matrices.
pub const MAX_ENUM_SPECTATORS: usize = 10;

fn check(unwanted: &[ConditionalRotation], cap: usize) -> Result<()> {
    if unwanted.len() > cap {
        return Err(Error::CapExceeded {
            what: "enumerated spectator count",
            value: unwanted.len(),
            cap,
            hint: "use the factorized forms",
        });
    }
    Ok(())
}

/// E_i = Σ_j f_j^{(i)} σ_jj ⊗ R_j^{targets}.
pub fn kraus_operators(targets: &[ConditionalRotation], unwanted: &[ConditionalRotation]) -> Result<Vec<CMatrix>> {
    check(unwanted, MAX_ENUM_SPECTATORS)?;
    let u = cr_unitary(targets)?;
    let d = u.nrows();
    let half = d / 2;
    let f = kraus_factors(unwanted).enumerate(MAX_ENUM_SPECTATORS)?;
    Ok(f
        .iter()
        .map(|fi| {
            let mut e = u.clone();
            for r in 0..d {
                let j = usize::from(r >= half);
                for c in 0..d {
                    e[(r, c)] *= fi[j];
                }
            }
            e
        })
        .collect())
}

/// E(ρ) = Σ_k E_k ρ E_k†.
pub fn enumerate_kraus_channel(
    targets: &[ConditionalRotation],
    unwanted: &[ConditionalRotation],
    rho: &CMatrix,
) -> Result<CMatrix> {
    let ops = kraus_operators(targets, unwanted)?;
    let d = ops[0].nrows();
    if rho.nrows() != d || rho.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: rho.nrows(),
        });
    }
    let mut out = CMatrix::zeros(d, d);
    for e in &ops {
        out += e * rho * e.adjoint();
    }
    Ok(out)
}

/// max |Σ_k E_k†E_k − I|
pub fn completeness_defect(targets: &[ConditionalRotation], unwanted: &[ConditionalRotation]) -> Result<f64> {
    let ops = kraus_operators(targets, unwanted)?;
    let d = ops[0].nrows();
    let mut acc = CMatrix::zeros(d, d);
    for e in &ops {
        acc += e.adjoint() * e;
    }
    Ok((acc - CMatrix::identity(d, d)).camax())
}

/// ε(U)·(1 + Σ_{r,s} Re[f0^{(r)*} f1^{(s)*} f1^{(r)} f0^{(s)}])/2 as an
/// explicit double sum.
pub fn ep_nonunitary_enumerated(targets: &[ConditionalRotation], unwanted: &[ConditionalRotation]) -> Result<f64> {
    check(unwanted, 8)?;
    let ep_u = mway_ep_unitary(targets)?;
    let f = kraus_factors(unwanted).enumerate(8)?;
    let mut acc = 0.0;
    for r in &f {
        for s in &f {
            acc += (r[0].conj() * s[1].conj() * r[1] * s[0]).re;
        }
    }
    Ok(ep_u * 0.5 * (1.0 + acc))
}

/// Average gate fidelity from explicit Kraus matrices, 1 − F̄.
pub fn gate_error_enumerated(
    targets: &[ConditionalRotation],
    unwanted: &[ConditionalRotation],
    ideal: &CMatrix,
) -> Result<f64> {
    let ops = kraus_operators(targets, unwanted)?;
    let d = ideal.nrows() as f64;
    let s: f64 = ops
        .iter()
        .map(|e| (ideal.adjoint() * e).trace())
        .map(|t: C64| t.norm_sqr())
        .sum();
    Ok(1.0 - (s + d) / (d * d + d))
}
