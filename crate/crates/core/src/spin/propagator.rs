use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::register::{NuclearSpin, Register};
use super::sequence::{SequencePlan, SequenceUnit};
use crate::error::{Error, Result};
use crate::su2::{dot, extract_signed, norm, AxisAngle, HalfAngle, Mat2, Vec3};

/// Pauli vectors h0, h1 of the electron-conditioned nuclear Hamiltonians
/// H_j = h_j·σ (rad/s).
pub fn conditional_fields(spin: &NuclearSpin, omega_larmor: f64) -> (Vec3, Vec3) {
    let h0 = [0.0, 0.0, 0.5 * omega_larmor];
    let h1 = [0.5 * spin.b, 0.0, 0.5 * (omega_larmor + spin.a)];
    (h0, h1)
}

/// (H0, H1) as 2×2 Hermitian matrices.
pub fn conditional_hamiltonians(spin: &NuclearSpin, register: &Register) -> (Mat2, Mat2) {
    let (h0, h1) = conditional_fields(spin, register.omega_larmor());
    (Mat2::pauli_dot(&h0), Mat2::pauli_dot(&h1))
}

/// exp(−i h·σ τ)
pub fn free_evolution(h: &Vec3, tau: f64) -> Mat2 {
    let m = norm(h);
    if m == 0.0 {
        return Mat2::identity();
    }
    let axis = [h[0] / m, h[1] / m, h[2] / m];
    Mat2::rotation(2.0 * m * tau, &axis)
}

/// Nuclear propagators of one unit for each initial electron state.
#[derive(Clone, Copy, Debug)]
pub struct UnitPropagators {
    pub v0: Mat2,
    pub v1: Mat2,
    /// The unit has an odd pulse count and leaves the electron flipped.
    pub flips: bool,
}

pub fn unit_propagators_raw(
    spin: &NuclearSpin,
    omega_larmor: f64,
    unit: &SequenceUnit,
    t: f64,
) -> Result<UnitPropagators> {
    unit.validate()?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidSequence(format!("unit time must be non-negative, got {t}")));
    }
    let (h0, h1) = conditional_fields(spin, omega_larmor);
    let mut v0 = Mat2::identity();
    let mut v1 = Mat2::identity();
    for (i, frac) in unit.segments().iter().enumerate() {
        let tau = frac * t;
        let (a, b) = if i % 2 == 0 { (&h0, &h1) } else { (&h1, &h0) };
        v0 = free_evolution(a, tau) * v0;
        v1 = free_evolution(b, tau) * v1;
    }
    Ok(UnitPropagators {
        v0,
        v1,
        flips: unit.flips_electron(),
    })
}

pub fn unit_propagators(
    spin: &NuclearSpin,
    register: &Register,
    unit: &SequenceUnit,
    t: f64,
) -> Result<UnitPropagators> {
    unit_propagators_raw(spin, register.omega_larmor(), unit, t)
}

/// Nuclear rotations R0, R1 applied when the electron starts in |0⟩ or |1⟩.
///
/// `relative_sign` records the SU(2) sign lost when both branches are put in
/// canonical axis-angle form: the evolution is σ00⊗R0 + s·σ11⊗R1 up to a
/// global phase, with s = `relative_sign`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionalRotation {
    pub phi0: f64,
    pub n0: Vec3,
    pub phi1: f64,
    pub n1: Vec3,
    #[serde(default = "one")]
    pub relative_sign: f64,
}

fn one() -> f64 {
    1.0
}

impl ConditionalRotation {
    pub fn new(b0: AxisAngle, b1: AxisAngle) -> Self {
        ConditionalRotation {
            phi0: b0.phi,
            n0: b0.axis,
            phi1: b1.phi,
            n1: b1.axis,
            relative_sign: 1.0,
        }
    }

    pub fn identity() -> Self {
        let id = AxisAngle {
            phi: 0.0,
            axis: [0.0, 0.0, 1.0],
        };
        Self::new(id, id)
    }

    /// Same rotation for both electron states.
    pub fn unconditional(r: AxisAngle) -> Self {
        Self::new(r, r)
    }

    /// From the two branch unitaries (any global phase per branch is
    /// removed, the relative SU(2) sign is kept).
    pub fn from_matrices(v0: &Mat2, v1: &Mat2) -> Result<Self> {
        let (b0, s0) = extract_signed(v0)?;
        let (b1, s1) = extract_signed(v1)?;
        let mut cr = Self::new(b0, b1);
        cr.relative_sign = s0 * s1;
        Ok(cr)
    }

    pub fn r0(&self) -> Mat2 {
        Mat2::rotation(self.phi0, &self.n0)
    }

    /// R1 including the relative sign.
    pub fn r1(&self) -> Mat2 {
        let r = Mat2::rotation(self.phi1, &self.n1);
        if self.relative_sign < 0.0 {
            r.scale(C64::new(-1.0, 0.0))
        } else {
            r
        }
    }

    pub fn branch(&self, j: usize) -> Mat2 {
        if j == 0 {
            self.r0()
        } else {
            self.r1()
        }
    }

    pub fn axis_dot(&self) -> f64 {
        dot(&self.n0, &self.n1)
    }

    pub fn is_unconditional(&self, tol: f64) -> bool {
        self.r0().max_abs_diff(&self.r1()) <= tol
    }
}

/// Branch matrices of a full plan, multiplied block by block. The electron
/// state of each branch is tracked across units with an odd pulse count.
pub fn compose_matrices(spin: &NuclearSpin, omega_larmor: f64, plan: &SequencePlan) -> Result<(Mat2, Mat2)> {
    let mut w = [Mat2::identity(), Mat2::identity()];
    // electron state currently seen by branch j
    let mut state = [0usize, 1usize];
    for block in &plan.blocks {
        if !(block.t > 0.0) || block.n == 0 {
            return Err(Error::InvalidSequence(format!(
                "block with t = {} and N = {}",
                block.t, block.n
            )));
        }
        let up = unit_propagators_raw(spin, omega_larmor, &block.unit, block.t)?;
        let v = [up.v0, up.v1];
        for j in 0..2 {
            let e = state[j];
            if up.flips {
                let pair = v[1 - e] * v[e];
                let mut acc = pair.pow(block.n / 2);
                if block.n % 2 == 1 {
                    acc = v[e] * acc;
                    state[j] = 1 - e;
                }
                w[j] = acc * w[j];
            } else {
                w[j] = v[e].pow(block.n) * w[j];
            }
        }
    }
    Ok((w[0], w[1]))
}

pub fn compose_sequence(spin: &NuclearSpin, register: &Register, plan: &SequencePlan) -> Result<ConditionalRotation> {
    let (w0, w1) = compose_matrices(spin, register.omega_larmor(), plan)?;
    ConditionalRotation::from_matrices(&w0, &w1)
}

/// Composite rotations of every spin of the register under a plan.
pub fn compose_register(register: &Register, plan: &SequencePlan) -> Result<Vec<ConditionalRotation>> {
    register
        .spins()
        .iter()
        .map(|s| compose_sequence(s, register, plan))
        .collect()
}

/// Closed-form G1 of a single block as a function of the iteration count.
///
/// For a non-flipping unit each branch is V_j = cos θ_j − i sin θ_j n_j·σ, so
/// V_j^N only rescales θ_j. Flipping units are handled through the
/// two-unit period.
#[derive(Clone, Copy, Debug)]
pub struct G1Series {
    theta0: f64,
    theta1: f64,
    axis_dot: f64,
    tail: Option<FlipTail>,
}

/// Data for odd iteration counts of a flipping unit.
#[derive(Clone, Copy, Debug)]
struct FlipTail {
    v: [Mat2; 2],
    axes: [Vec3; 2],
}

impl G1Series {
    pub fn new(up: &UnitPropagators) -> Self {
        if up.flips {
            let p0 = HalfAngle::of(&(up.v1 * up.v0));
            let p1 = HalfAngle::of(&(up.v0 * up.v1));
            G1Series {
                theta0: p0.theta,
                theta1: p1.theta,
                axis_dot: dot(&p0.axis, &p1.axis),
                tail: Some(FlipTail {
                    v: [up.v0, up.v1],
                    axes: [p0.axis, p1.axis],
                }),
            }
        } else {
            let a0 = HalfAngle::of(&up.v0);
            let a1 = HalfAngle::of(&up.v1);
            G1Series {
                theta0: a0.theta,
                theta1: a1.theta,
                axis_dot: dot(&a0.axis, &a1.axis),
                tail: None,
            }
        }
    }

    pub fn g1(&self, n: u64) -> f64 {
        let x = match &self.tail {
            None => self.overlap(n as f64),
            Some(tail) => {
                let m = (n / 2) as f64;
                if n % 2 == 0 {
                    self.overlap(m)
                } else {
                    let w0 = tail.v[0] * Mat2::rotation(2.0 * m * self.theta0, &tail.axes[0]);
                    let w1 = tail.v[1] * Mat2::rotation(2.0 * m * self.theta1, &tail.axes[1]);
                    0.5 * (w0 * w1.adjoint()).trace().re
                }
            }
        };
        (x * x).min(1.0)
    }

    /// ½ Re Tr[V0^m (V1^m)†]
    fn overlap(&self, m: f64) -> f64 {
        let (s0, c0) = (m * self.theta0).sin_cos();
        let (s1, c1) = (m * self.theta1).sin_cos();
        c0 * c1 + self.axis_dot * s0 * s1
    }
}
