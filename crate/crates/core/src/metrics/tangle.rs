//! Pure-state M-tangles. Qubit 0 is the most significant bit of the basis
//! index; for CR-generated states it is the control (electron).

use num_complex::Complex64 as C64;

use super::invariants::clamp_range;
use crate::error::{Error, Result};

/// Normalization slack accepted on input states.
pub const NORM_TOL: f64 = 1e-10;

pub fn check_state(state: &[C64], m: usize) -> Result<()> {
    if m == 0 || m > 30 || state.len() != 1usize << m {
        return Err(Error::StateLength {
            len: state.len(),
            qubits: m,
        });
    }
    let n2: f64 = state.iter().map(|z| z.norm_sqr()).sum();
    if (n2 - 1.0).abs() > NORM_TOL {
        return Err(Error::Unnormalized(n2));
    }
    Ok(())
}

/// τ_M of a pure M-qubit state.
///
/// Even M uses the spin-flip overlap, M = 3 the Coffman–Kundu–Wootters
/// combination, odd M > 3 the linearized projector form which requires a
/// CR-generated state (`cr_generated`).
pub fn mtangle_pure(state: &[C64], m: usize, cr_generated: bool) -> Result<f64> {
    check_state(state, m)?;
    if m < 2 {
        return Err(Error::UnsupportedQubits(format!("tangle needs at least 2 qubits, got {m}")));
    }
    let raw = if m % 2 == 0 {
        spin_flip_overlap(state, m).norm_sqr()
    } else if m == 3 {
        three_tangle_ckw(state)
    } else if cr_generated {
        odd_projector_tangle(state, m)
    } else {
        return Err(Error::OddTangleUnsupported(m));
    };
    clamp_range(raw, 1.0, "M-tangle")
}

/// Σ_x (−1)^{|x|} ψ_x ψ_{x̄}, the modulus of ⟨ψ|σ_y^{⊗M}|ψ*⟩.
fn spin_flip_overlap(state: &[C64], m: usize) -> C64 {
    let mask = (1usize << m) - 1;
    state
        .iter()
        .enumerate()
        .map(|(x, a)| {
            let s = if x.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            a * state[x ^ mask] * s
        })
        .sum()
}

/// Σ_{P ∈ {I, X, Z}} |⟨ψ|P ⊗ σ_y^{⊗(M−1)}|ψ*⟩|² with P on qubit 0.
pub fn odd_projector_tangle(state: &[C64], m: usize) -> f64 {
    let top = 1usize << (m - 1);
    let low_mask = top - 1;
    // σ_y^{⊗(M−1)} on the low qubits of ψ*: |x⟩ ↦ i^{M−1} (−1)^{|x|} |x̄⟩
    let phase = C64::i().powi((m - 1) as i32);
    let flipped: Vec<C64> = {
        let mut out = vec![C64::new(0.0, 0.0); state.len()];
        for (x, a) in state.iter().enumerate() {
            let low = x & low_mask;
            let s = if low.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            out[(x & top) | (low ^ low_mask)] = a.conj() * phase * s;
        }
        out
    };
    let mut total = 0.0;
    // P = I, X, Z on the control
    for p in 0..3 {
        let mut acc = C64::new(0.0, 0.0);
        for (x, a) in state.iter().enumerate() {
            let (src, sign) = match p {
                0 => (x, 1.0),
                1 => (x ^ top, 1.0),
                _ => (x, if x & top == 0 { 1.0 } else { -1.0 }),
            };
            acc += a.conj() * flipped[src] * sign;
        }
        total += acc.norm_sqr();
    }
    total
}

/// |⟨ψ|σ_x ⊗ σ_y ⊗ σ_y|ψ*⟩|², the three-tangle for CR-generated states.
pub fn three_tangle_xyy(state: &[C64]) -> f64 {
    let mut acc = C64::new(0.0, 0.0);
    for (x, a) in state.iter().enumerate() {
        // σ_x⊗σ_y⊗σ_y|x⟩* = (i)² (−1)^{b1+b2} |x̄⟩
        let b = x & 3;
        let s = if b.count_ones() % 2 == 0 { -1.0 } else { 1.0 };
        acc += a * state[x ^ 7] * s;
    }
    acc.norm_sqr()
}

/// τ_{A|BC} − C²_{AB} − C²_{AC} with A = qubit 0.
pub fn three_tangle_ckw(state: &[C64]) -> f64 {
    // ρ_A
    let mut r00 = 0.0;
    let mut r11 = 0.0;
    let mut r01 = C64::new(0.0, 0.0);
    for bc in 0..4 {
        let a0 = state[bc];
        let a1 = state[4 | bc];
        r00 += a0.norm_sqr();
        r11 += a1.norm_sqr();
        r01 += a0 * a1.conj();
    }
    let tau_a_bc = 4.0 * (r00 * r11 - r01.norm_sqr());
    let c_ab = pair_concurrence_sq(state, 0);
    let c_ac = pair_concurrence_sq(state, 1);
    tau_a_bc - c_ab - c_ac
}

/// Squared concurrence of qubits (0, other) after tracing the remaining
/// qubit of a 3-qubit pure state. `traced` = 0 traces qubit 2, 1 traces
/// qubit 1.
///
/// ρ = Σ_c |φ_c⟩⟨φ_c| has rank ≤ 2, so with T_ij = ⟨φ_i|σ_y⊗σ_y|φ_j*⟩ the
/// Wootters values are the singular values of T and
/// C² = (s1 − s2)² = ‖T‖² − 2|det T|, which avoids square roots of tiny
/// eigenvalues.
fn pair_concurrence_sq(state: &[C64], traced: usize) -> f64 {
    let phi = |c: usize| -> [C64; 4] {
        let mut out = [C64::new(0.0, 0.0); 4];
        for a in 0..2 {
            for b in 0..2 {
                let idx = if traced == 0 { (a << 2) | (b << 1) | c } else { (a << 2) | (c << 1) | b };
                out[(a << 1) | b] = state[idx];
            }
        }
        out
    };
    let ph = [phi(0), phi(1)];
    // ⟨u|σy⊗σy|v*⟩ = Σ u*_{ab} (−1)^{a+b} (−1)·… ; σy⊗σy|ab⟩ = −(−1)^{a+b}|āb̄⟩
    let yy = |u: &[C64; 4], v: &[C64; 4]| -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for ab in 0..4 {
            let s = if (ab as u32).count_ones() % 2 == 0 { -1.0 } else { 1.0 };
            acc += u[ab ^ 3].conj() * v[ab].conj() * s;
        }
        acc
    };
    let t00 = yy(&ph[0], &ph[0]);
    let t01 = yy(&ph[0], &ph[1]);
    let t10 = yy(&ph[1], &ph[0]);
    let t11 = yy(&ph[1], &ph[1]);
    let fro = t00.norm_sqr() + t01.norm_sqr() + t10.norm_sqr() + t11.norm_sqr();
    let det = (t00 * t11 - t01 * t10).norm();
    (fro - 2.0 * det).max(0.0)
}

/// Concurrence of a pure two-qubit state, √(2(1 − Tr ρ_A²)).
pub fn pure_concurrence(state: &[C64; 4]) -> f64 {
    let r00 = state[0].norm_sqr() + state[1].norm_sqr();
    let r11 = state[2].norm_sqr() + state[3].norm_sqr();
    let r01 = state[0] * state[2].conj() + state[1] * state[3].conj();
    let purity = r00 * r00 + r11 * r11 + 2.0 * r01.norm_sqr();
    (2.0 * (1.0 - purity)).max(0.0).sqrt()
}

pub fn ghz(m: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); 1 << m];
    let s = std::f64::consts::FRAC_1_SQRT_2;
    v[0] = C64::new(s, 0.0);
    v[(1 << m) - 1] = C64::new(s, 0.0);
    v
}

pub fn w_state() -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); 8];
    let s = 1.0 / 3f64.sqrt();
    for i in [1, 2, 4] {
        v[i] = C64::new(s, 0.0);
    }
    v
}

/// Kronecker product of state vectors (first argument on the high bits).
pub fn kron(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

/// Reorders qubits: new qubit q is old qubit `perm[q]`.
pub fn permute_qubits(state: &[C64], m: usize, perm: &[usize]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); state.len()];
    for (x, a) in state.iter().enumerate() {
        let mut y = 0usize;
        for (q, &src) in perm.iter().enumerate() {
            let bit = (x >> (m - 1 - src)) & 1;
            y |= bit << (m - 1 - q);
        }
        out[y] = *a;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ghz_is_one() {
        for m in 2..=7 {
            let t = mtangle_pure(&ghz(m), m, true).unwrap();
            assert!((t - 1.0).abs() < 1e-12, "M = {m}: {t}");
        }
    }

    #[test]
    fn w_is_zero() {
        assert!(mtangle_pure(&w_state(), 3, false).unwrap().abs() < 1e-12);
    }

    #[test]
    fn bell_pairs() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = vec![C64::new(s, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(s, 0.0)];
        let psi = kron(&phi, &phi);
        assert!((mtangle_pure(&psi, 4, false).unwrap() - 1.0).abs() < 1e-12);
        let g = kron(&ghz(3), &ghz(3));
        assert!(mtangle_pure(&g, 6, false).unwrap().abs() < 1e-12);
    }

    #[test]
    fn odd_generic_needs_flag() {
        assert!(matches!(mtangle_pure(&ghz(5), 5, false), Err(Error::OddTangleUnsupported(5))));
    }

    #[test]
    fn unnormalized_rejected() {
        let mut g = ghz(3);
        g[0] *= 2.0;
        assert!(matches!(mtangle_pure(&g, 3, false), Err(Error::Unnormalized(_))));
    }

    #[test]
    fn three_tangle_forms_agree_on_ghz() {
        assert!((three_tangle_xyy(&ghz(3)) - 1.0).abs() < 1e-12);
        assert!((odd_projector_tangle(&ghz(3), 3) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn permutation_reorders_bits() {
        let mut v = vec![C64::new(0.0, 0.0); 8];
        v[0b100] = C64::new(1.0, 0.0);
        let p = permute_qubits(&v, 3, &[2, 0, 1]);
        assert_eq!(p[0b010].re, 1.0);
    }
}
