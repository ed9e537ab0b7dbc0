//! Explicit swap/projector constructions on two copies of an M-qubit
//! register. Doubled-space index = (x << M) | y with x the first copy and y
//! the second; qubit j of either copy is bit (M − 1 − j) of its half.

use num_complex::Complex64 as C64;

use super::dense::CMatrix;
use crate::error::{Error, Result};

/// Largest M for projector-vector operations (doubled space 2^{2M}).
pub const MAX_PROJECTOR_M: usize = 7;
/// Largest M for which full matrices are materialized.
pub const MAX_DENSE_PROJECTOR_M: usize = 4;

#[derive(Clone, Copy, Debug)]
pub struct ProjectorPair {
    m: usize,
}

impl ProjectorPair {
    pub fn new(m: usize) -> Result<Self> {
        if m < 2 || m > MAX_PROJECTOR_M {
            return Err(Error::CapExceeded {
                what: "projector qubit count",
                value: m,
                cap: MAX_PROJECTOR_M,
                hint: "use the closed forms",
            });
        }
        Ok(ProjectorPair { m })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        1 << (2 * self.m)
    }

    /// Index image of basis state i under SWAP_{j, j+M}.
    pub fn swap_index(&self, j: usize, i: usize) -> usize {
        let hi = 1usize << (2 * self.m - 1 - j);
        let lo = 1usize << (self.m - 1 - j);
        let a = i & hi != 0;
        let b = i & lo != 0;
        if a == b {
            i
        } else {
            i ^ hi ^ lo
        }
    }

    /// v ← ½(v ± SWAP_j v)
    fn project(&self, j: usize, sign: f64, v: &mut [C64]) {
        let hi = 1usize << (2 * self.m - 1 - j);
        let lo = 1usize << (self.m - 1 - j);
        for i in 0..v.len() {
            // visit each swapped pair once, from the (hi = 0, lo = 1) side
            if i & hi == 0 && i & lo != 0 {
                let k = i ^ hi ^ lo;
                let a = v[i];
                let b = v[k];
                v[i] = 0.5 * (a + sign * b);
                v[k] = 0.5 * (b + sign * a);
            }
        }
        if sign < 0.0 {
            for (i, x) in v.iter_mut().enumerate() {
                if (i & hi != 0) == (i & lo != 0) {
                    *x = C64::new(0.0, 0.0);
                }
            }
        }
    }

    /// Applies P̃: antisymmetric projectors on every pair for even M; the
    /// symmetric projector on pair 0 and antisymmetric on the rest for odd M.
    pub fn apply_ptilde(&self, v: &mut [C64]) {
        for j in 0..self.m {
            let sign = if self.m % 2 == 1 && j == 0 { 1.0 } else { -1.0 };
            self.project(j, sign, v);
        }
    }

    fn check_dense(&self) -> Result<()> {
        if self.m > MAX_DENSE_PROJECTOR_M {
            return Err(Error::CapExceeded {
                what: "dense projector qubit count",
                value: self.m,
                cap: MAX_DENSE_PROJECTOR_M,
                hint: "use the vector forms",
            });
        }
        Ok(())
    }

    pub fn swap_matrix(&self, j: usize) -> Result<CMatrix> {
        self.check_dense()?;
        let d = self.dim();
        let mut s = CMatrix::zeros(d, d);
        for i in 0..d {
            s[(self.swap_index(j, i), i)] = C64::new(1.0, 0.0);
        }
        Ok(s)
    }

    /// P^{(±)}_{j, j+M} = ½(1 ± SWAP_{j, j+M}).
    pub fn pair_projector(&self, j: usize, plus: bool) -> Result<CMatrix> {
        let s = self.swap_matrix(j)?;
        let id = CMatrix::identity(self.dim(), self.dim());
        let sign = if plus { 1.0 } else { -1.0 };
        Ok((id + s * C64::new(sign, 0.0)) * C64::new(0.5, 0.0))
    }

    pub fn ptilde_matrix(&self) -> Result<CMatrix> {
        let mut p = CMatrix::identity(self.dim(), self.dim());
        for j in 0..self.m {
            let plus = self.m % 2 == 1 && j == 0;
            p = p * self.pair_projector(j, plus)?;
        }
        Ok(p)
    }

    /// Ω_{p0} = 3^{−M} Π_j P^{(+)}_{j, j+M}.
    pub fn omega_p0_matrix(&self) -> Result<CMatrix> {
        let mut p = CMatrix::identity(self.dim(), self.dim());
        for j in 0..self.m {
            p = p * self.pair_projector(j, true)?;
        }
        Ok(p * C64::new(3f64.powi(-(self.m as i32)), 0.0))
    }
}

/// 2^M ⟨ψψ|P̃|ψψ⟩ = 2^M ‖P̃(ψ ⊗ ψ)‖².
pub fn tangle_via_projectors(state: &[C64], m: usize) -> Result<f64> {
    let pp = ProjectorPair::new(m)?;
    if state.len() != 1 << m {
        return Err(Error::StateLength {
            len: state.len(),
            qubits: m,
        });
    }
    let mut v: Vec<C64> = state.iter().flat_map(|a| state.iter().map(move |b| a * b)).collect();
    pp.apply_ptilde(&mut v);
    let n2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    Ok((1u64 << m) as f64 * n2)
}

/// Trace form 2^M Tr[U^{⊗2} Ω_{p0} U^{†⊗2} P̃].
///
/// Ω_{p0} is 3^{−M} times the projector onto ⊗_j Sym(j, j+M), so the trace
/// is 3^{−M} Σ_w ‖P̃ U^{⊗2} w‖² over a product basis w of that subspace.
/// Each w is held as a 2^M × 2^M matrix W with (U⊗U)w ↔ U W Uᵀ.
pub fn ep_trace_form(u: &CMatrix, m: usize) -> Result<f64> {
    let pp = ProjectorPair::new(m)?;
    let d = 1usize << m;
    if u.nrows() != d || u.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: u.nrows(),
        });
    }
    let ut = u.transpose();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut total = 0.0;
    let count = 3usize.pow(m as u32);
    for code in 0..count {
        // per pair: 0 → |00⟩, 1 → |11⟩, 2 → (|01⟩ + |10⟩)/√2
        let mut entries: Vec<(usize, usize, f64)> = vec![(0, 0, 1.0)];
        let mut c = code;
        for j in 0..m {
            let kind = c % 3;
            c /= 3;
            let bit = 1usize << (m - 1 - j);
            let mut next = Vec::with_capacity(entries.len() * 2);
            for &(x, y, a) in &entries {
                match kind {
                    0 => next.push((x, y, a)),
                    1 => next.push((x | bit, y | bit, a)),
                    _ => {
                        next.push((x, y | bit, a * s));
                        next.push((x | bit, y, a * s));
                    }
                }
            }
            entries = next;
        }
        let mut w = CMatrix::zeros(d, d);
        for (x, y, a) in entries {
            w[(x, y)] += C64::new(a, 0.0);
        }
        let out = u * w * &ut;
        let mut v: Vec<C64> = (0..d).flat_map(|x| (0..d).map(move |y| (x, y))).map(|(x, y)| out[(x, y)]).collect();
        pp.apply_ptilde(&mut v);
        total += v.iter().map(|z| z.norm_sqr()).sum::<f64>();
    }
    Ok((1u64 << m) as f64 * total / count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::tangle::{ghz, kron};

    #[test]
    fn projectors_are_idempotent() {
        for m in 2..=3 {
            let pp = ProjectorPair::new(m).unwrap();
            for j in 0..m {
                for plus in [true, false] {
                    let p = pp.pair_projector(j, plus).unwrap();
                    assert!((&p * &p - &p).camax() < 1e-12);
                }
            }
            let pt = pp.ptilde_matrix().unwrap();
            assert!((&pt * &pt - &pt).camax() < 1e-12);
        }
    }

    #[test]
    fn vector_and_matrix_ptilde_agree() {
        let pp = ProjectorPair::new(3).unwrap();
        let pt = pp.ptilde_matrix().unwrap();
        let v: Vec<C64> = (0..64).map(|i| C64::new((i as f64).sin(), (i as f64 * 0.3).cos())).collect();
        let dense = &pt * nalgebra::DVector::from_column_slice(&v);
        let mut w = v.clone();
        pp.apply_ptilde(&mut w);
        for i in 0..64 {
            assert!((dense[i] - w[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn ghz_and_product() {
        assert!((tangle_via_projectors(&ghz(4), 4).unwrap() - 1.0).abs() < 1e-12);
        assert!((tangle_via_projectors(&ghz(3), 3).unwrap() - 1.0).abs() < 1e-12);
        let zero = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let p = kron(&kron(&zero, &zero), &kron(&zero, &zero));
        assert!(tangle_via_projectors(&p, 4).unwrap().abs() < 1e-15);
    }

    #[test]
    fn identity_has_no_power() {
        let id = CMatrix::identity(8, 8);
        assert!(ep_trace_form(&id, 3).unwrap().abs() < 1e-14);
    }

    #[test]
    fn trace_form_matches_dense_omega() {
        // U = CZ ⊗ I on three qubits, checked against materialized Ω_{p0}
        let m = 3;
        let pp = ProjectorPair::new(m).unwrap();
        let mut u = CMatrix::identity(8, 8);
        for i in 0..8 {
            if i & 0b110 == 0b110 {
                u[(i, i)] = C64::new(-1.0, 0.0);
            }
        }
        let uu = u.kronecker(&u);
        let dense = (&uu * pp.omega_p0_matrix().unwrap() * uu.adjoint() * pp.ptilde_matrix().unwrap()).trace().re * 8.0;
        let fast = ep_trace_form(&u, m).unwrap();
        assert!((dense - fast).abs() < 1e-12);
    }
}
