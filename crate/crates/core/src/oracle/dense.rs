//! Dense statevector backend. Qubit 0 (the electron) is the most
//! significant bit; nucleus l of the register is qubit l + 1.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::spin::propagator::conditional_fields;
use crate::spin::{ConditionalRotation, Register, SequencePlan};
use crate::su2::{expm, Mat2};

/// Largest total qubit count handled densely.
pub const MAX_QUBITS: usize = 14;

pub type CMatrix = DMatrix<C64>;

#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    n: usize,
    amps: Vec<C64>,
}

fn check_cap(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::CapExceeded {
            what: "dense qubit count",
            value: n,
            cap: MAX_QUBITS,
            hint: "reduce the register",
        });
    }
    Ok(())
}

impl DenseState {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        let n = amps.len().trailing_zeros() as usize;
        if !amps.len().is_power_of_two() {
            return Err(Error::StateLength {
                len: amps.len(),
                qubits: n,
            });
        }
        check_cap(n)?;
        let n2: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if (n2 - 1.0).abs() > 1e-10 {
            return Err(Error::Unnormalized(n2));
        }
        Ok(DenseState { n, amps })
    }

    /// ⊗_q states[q], first entry on qubit 0.
    pub fn product(states: &[[C64; 2]]) -> Result<Self> {
        check_cap(states.len())?;
        let mut amps = vec![C64::new(1.0, 0.0)];
        for s in states {
            let n2 = s[0].norm_sqr() + s[1].norm_sqr();
            if (n2 - 1.0).abs() > 1e-10 {
                return Err(Error::Unnormalized(n2));
            }
            amps = amps.iter().flat_map(|a| [a * s[0], a * s[1]]).collect();
        }
        Ok(DenseState {
            n: states.len(),
            amps,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    fn bit(&self, q: usize) -> usize {
        1 << (self.n - 1 - q)
    }

    pub fn apply_single(&mut self, q: usize, u: &Mat2) {
        let b = self.bit(q);
        for i in 0..self.amps.len() {
            if i & b == 0 {
                let [x, y] = u.apply([self.amps[i], self.amps[i | b]]);
                self.amps[i] = x;
                self.amps[i | b] = y;
            }
        }
    }

    /// Applies kernels[e] to qubit `q`, where e is the state of qubit 0.
    pub fn apply_conditional(&mut self, q: usize, kernels: &[Mat2; 2]) {
        let b = self.bit(q);
        let top = self.bit(0);
        for i in 0..self.amps.len() {
            if i & b == 0 {
                let e = usize::from(i & top != 0);
                let [x, y] = kernels[e].apply([self.amps[i], self.amps[i | b]]);
                self.amps[i] = x;
                self.amps[i | b] = y;
            }
        }
    }

    /// Applies Σ_j σ_jj ⊗_l R_j^{(l)} with nucleus l on qubit l + 1.
    pub fn apply_cr(&mut self, rotations: &[ConditionalRotation]) -> Result<()> {
        if rotations.len() + 1 != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n - 1,
                got: rotations.len(),
            });
        }
        for (l, cr) in rotations.iter().enumerate() {
            self.apply_conditional(l + 1, &[cr.r0(), cr.r1()]);
        }
        Ok(())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn density_matrix(&self) -> CMatrix {
        let v = nalgebra::DVector::from_column_slice(&self.amps);
        &v * v.adjoint()
    }
}

/// Literal pulse-by-pulse simulation of `plan` on the electron + register
/// state, with segment exponentials from the Taylor `expm`. A final X on the
/// electron undoes an odd total pulse count.
pub fn evolve_dense(register: &Register, plan: &SequencePlan, initial: &DenseState) -> Result<DenseState> {
    let l = register.len();
    if initial.n_qubits() != l + 1 {
        return Err(Error::DimensionMismatch {
            expected: l + 1,
            got: initial.n_qubits(),
        });
    }
    check_cap(l + 1)?;
    let w = register.omega_larmor();
    let fields: Vec<_> = register.spins().iter().map(|s| conditional_fields(s, w)).collect();
    let mut state = initial.clone();
    let x = Mat2::pauli_x();
    let mut pulses = 0usize;
    for block in &plan.blocks {
        let segs = block.unit.segments();
        // per segment, per nucleus: [exp(−iH0τ), exp(−iH1τ)]
        let kernels: Vec<Vec<[Mat2; 2]>> = segs
            .iter()
            .map(|f| {
                let tau = f * block.t;
                fields
                    .iter()
                    .map(|(h0, h1)| {
                        let k = |h: &[f64; 3]| expm(&Mat2::pauli_dot(h).scale(C64::new(0.0, -tau)));
                        [k(h0), k(h1)]
                    })
                    .collect()
            })
            .collect();
        for _ in 0..block.n {
            for (si, seg) in kernels.iter().enumerate() {
                if si > 0 {
                    state.apply_single(0, &x);
                    pulses += 1;
                }
                for (q, k) in seg.iter().enumerate() {
                    state.apply_conditional(q + 1, k);
                }
            }
        }
    }
    if pulses % 2 == 1 {
        state.apply_single(0, &x);
    }
    Ok(state)
}

/// Branch propagators of one nucleus from literal segment exponentials,
/// iterating every unit (no powers, no closed forms).
pub fn compose_bruteforce(spin: &crate::spin::NuclearSpin, omega_larmor: f64, plan: &SequencePlan) -> (Mat2, Mat2) {
    let (h0, h1) = conditional_fields(spin, omega_larmor);
    let h = [h0, h1];
    let mut w = [Mat2::identity(), Mat2::identity()];
    let mut e = [0usize, 1usize];
    for block in &plan.blocks {
        let segs = block.unit.segments();
        let kern: Vec<[Mat2; 2]> = segs
            .iter()
            .map(|f| {
                let tau = f * block.t;
                [0, 1].map(|j| expm(&Mat2::pauli_dot(&h[j]).scale(C64::new(0.0, -tau))))
            })
            .collect();
        for _ in 0..block.n {
            for (si, k) in kern.iter().enumerate() {
                if si > 0 {
                    e = [1 - e[0], 1 - e[1]];
                }
                for j in 0..2 {
                    w[j] = k[e[j]] * w[j];
                }
            }
        }
    }
    (w[0], w[1])
}

/// Dense 2^M matrix of Σ_j σ_jj ⊗_l R_j^{(l)}.
pub fn cr_unitary(targets: &[ConditionalRotation]) -> Result<CMatrix> {
    let m = targets.len() + 1;
    check_cap(m)?;
    let d = 1usize << m;
    let half = d / 2;
    let mut u = CMatrix::zeros(d, d);
    for j in 0..2 {
        let mats: Vec<Mat2> = targets.iter().map(|cr| cr.branch(j)).collect();
        for r in 0..half {
            for c in 0..half {
                let mut v = C64::new(1.0, 0.0);
                for (l, mm) in mats.iter().enumerate() {
                    let s = m - 2 - l;
                    v *= mm.get((r >> s) & 1, (c >> s) & 1);
                }
                u[(j * half + r, j * half + c)] = v;
            }
        }
    }
    Ok(u)
}

/// Reduced density matrix over `keep` (in the given order).
pub fn partial_trace(state: &DenseState, keep: &[usize]) -> Result<CMatrix> {
    let n = state.n_qubits();
    let mut seen = vec![false; n];
    for &k in keep {
        if k >= n || seen[k] {
            return Err(Error::InvalidIndices(format!("cannot keep qubit {k} of {n}")));
        }
        seen[k] = true;
    }
    let env: Vec<usize> = (0..n).filter(|q| !seen[*q]).collect();
    let kd = 1usize << keep.len();
    let ed = 1usize << env.len();
    let index = |a: usize, e: usize| -> usize {
        let mut i = 0usize;
        for (p, &q) in keep.iter().enumerate() {
            i |= ((a >> (keep.len() - 1 - p)) & 1) << (n - 1 - q);
        }
        for (p, &q) in env.iter().enumerate() {
            i |= ((e >> (env.len() - 1 - p)) & 1) << (n - 1 - q);
        }
        i
    };
    let amps = state.amplitudes();
    let mut rho = CMatrix::zeros(kd, kd);
    for e in 0..ed {
        let col: Vec<C64> = (0..kd).map(|a| amps[index(a, e)]).collect();
        for a in 0..kd {
            if col[a] == C64::new(0.0, 0.0) {
                continue;
            }
            for b in 0..kd {
                rho[(a, b)] += col[a] * col[b].conj();
            }
        }
    }
    Ok(rho)
}
