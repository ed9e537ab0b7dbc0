use crate::error::{Error, Result};
use crate::spin::ConditionalRotation;

/// Slack allowed outside [0, 1] before a value is treated as a bug.
pub const CLAMP_TOL: f64 = 1e-12;

/// Clamps roundoff just outside [0, hi]; larger violations are errors.
pub fn clamp_range(value: f64, hi: f64, what: &'static str) -> Result<f64> {
    if !value.is_finite() || value < -CLAMP_TOL || value > hi + CLAMP_TOL {
        return Err(Error::OutOfRange { what, value });
    }
    Ok(value.clamp(0.0, hi))
}

/// Makhlin invariant G1 of a conditional rotation.
pub fn g1(cr: &ConditionalRotation) -> f64 {
    let (s0, c0) = (0.5 * cr.phi0).sin_cos();
    let (s1, c1) = (0.5 * cr.phi1).sin_cos();
    let x = c0 * c1 + cr.axis_dot() * s0 * s1;
    (x * x).min(1.0)
}

/// Nuclear one-tangle (2/9)(1 − G1).
pub fn one_tangle(g1: f64) -> f64 {
    2.0 / 9.0 * (1.0 - g1)
}

/// One-tangle in units of its maximum 2/9.
pub fn one_tangle_scaled(g1: f64) -> f64 {
    1.0 - g1
}

/// Maximum M-way entangling power (2/3)^M.
pub fn ep_max(m: usize) -> f64 {
    // explicit loop: `powi` may fold differently at compile time
    (0..m).fold(1.0, |acc, _| acc * (2.0 / 3.0))
}

/// (2/3)^M Π_k (1 − G1_k) over the M − 1 target nuclei.
pub fn mway_ep_unitary(targets: &[ConditionalRotation]) -> Result<f64> {
    if targets.is_empty() {
        return Err(Error::NoTargets);
    }
    let m = targets.len() + 1;
    let prod: f64 = targets.iter().map(|cr| 1.0 - g1(cr)).product();
    clamp_range(ep_max(m) * prod, ep_max(m), "unitary entangling power")
}

/// Same product from precomputed G1 values.
pub fn mway_ep_from_g1(g1s: &[f64]) -> f64 {
    ep_max(g1s.len() + 1) * g1s.iter().map(|g| 1.0 - g).product::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::su2::AxisAngle;
    use std::f64::consts::PI;

    fn cr(phi0: f64, n0: [f64; 3], phi1: f64, n1: [f64; 3]) -> ConditionalRotation {
        ConditionalRotation::new(AxisAngle { phi: phi0, axis: n0 }, AxisAngle { phi: phi1, axis: n1 })
    }

    #[test]
    fn spot_values() {
        assert_eq!(g1(&ConditionalRotation::identity()), 1.0);
        let anti = cr(PI / 2.0, [1.0, 0.0, 0.0], PI / 2.0, [-1.0, 0.0, 0.0]);
        assert!(g1(&anti) < 1e-15);
        let perp = cr(PI, [1.0, 0.0, 0.0], PI, [0.0, 1.0, 0.0]);
        assert!(g1(&perp) < 1e-15);
        assert_eq!(one_tangle(1.0), 0.0);
        assert!((one_tangle(0.0) - 2.0 / 9.0).abs() < 1e-16);
        assert!((one_tangle(0.5) - 1.0 / 9.0).abs() < 1e-16);
    }

    #[test]
    fn ep_products() {
        let anti = cr(PI / 2.0, [1.0, 0.0, 0.0], PI / 2.0, [-1.0, 0.0, 0.0]);
        let ep = mway_ep_unitary(&[anti, anti]).unwrap();
        assert!((ep - 8.0 / 27.0).abs() < 1e-15);
        assert_eq!(mway_ep_unitary(&[anti, ConditionalRotation::identity()]).unwrap(), 0.0);
        assert!(matches!(mway_ep_unitary(&[]), Err(Error::NoTargets)));
        let v = mway_ep_from_g1(&[0.0, 0.19, 0.19]);
        assert!((v - (2.0f64 / 3.0).powi(4) * 0.81 * 0.81).abs() < 1e-15);
    }

    #[test]
    fn clamp_rejects_large_violations() {
        assert_eq!(clamp_range(1.0 + 1e-13, 1.0, "x").unwrap(), 1.0);
        assert!(clamp_range(1.0 + 1e-9, 1.0, "x").is_err());
    }
}
