//! 2×2 complex matrices and the SU(2) axis-angle form used for every
//! nuclear propagator.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Tolerance on ‖V†V − I‖ accepted by [`extract_axis_angle`].
pub const UNITARITY_TOL: f64 = 1e-8;

pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub const fn identity() -> Self {
        Mat2::new(ONE, ZERO, ZERO, ONE)
    }

    pub const fn zero() -> Self {
        Mat2::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub const fn pauli_x() -> Self {
        Mat2::new(ZERO, ONE, ONE, ZERO)
    }

    pub const fn pauli_y() -> Self {
        Mat2::new(ZERO, C64::new(0.0, -1.0), I, ZERO)
    }

    pub const fn pauli_z() -> Self {
        Mat2::new(ONE, ZERO, ZERO, C64::new(-1.0, 0.0))
    }

    /// h·σ for a real 3-vector h.
    pub fn pauli_dot(h: &Vec3) -> Self {
        Mat2::new(
            C64::new(h[2], 0.0),
            C64::new(h[0], -h[1]),
            C64::new(h[0], h[1]),
            C64::new(-h[2], 0.0),
        )
    }

    /// exp(−i φ/2 σ·n) for a unit axis n.
    pub fn rotation(phi: f64, axis: &Vec3) -> Self {
        let (s, c) = (0.5 * phi).sin_cos();
        Mat2::new(
            C64::new(c, -s * axis[2]),
            C64::new(-s * axis[1], -s * axis[0]),
            C64::new(s * axis[1], -s * axis[0]),
            C64::new(c, s * axis[2]),
        )
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.0[r][c]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2::new(m[0][0].conj(), m[1][0].conj(), m[0][1].conj(), m[1][1].conj())
    }

    pub fn conj(&self) -> Self {
        let m = &self.0;
        Mat2::new(m[0][0].conj(), m[0][1].conj(), m[1][0].conj(), m[1][1].conj())
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn scale(&self, s: C64) -> Self {
        let m = &self.0;
        Mat2::new(m[0][0] * s, m[0][1] * s, m[1][0] * s, m[1][1] * s)
    }

    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        let mut d: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                d = d.max((self.0[r][c] - other.0[r][c]).norm());
            }
        }
        d
    }

    /// max |(V†V − I)_{rc}|
    pub fn unitarity_defect(&self) -> f64 {
        (self.adjoint() * *self).max_abs_diff(&Mat2::identity())
    }

    pub fn pow(&self, mut n: u64) -> Self {
        let mut base = *self;
        let mut acc = Mat2::identity();
        while n > 0 {
            if n & 1 == 1 {
                acc = base * acc;
            }
            base = base * base;
            n >>= 1;
        }
        acc
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    #[inline]
    fn mul(self, rhs: Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        Mat2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}

impl Add for Mat2 {
    type Output = Mat2;

    fn add(self, rhs: Mat2) -> Mat2 {
        let mut out = self;
        for r in 0..2 {
            for c in 0..2 {
                out.0[r][c] += rhs.0[r][c];
            }
        }
        out
    }
}

impl Sub for Mat2 {
    type Output = Mat2;

    fn sub(self, rhs: Mat2) -> Mat2 {
        let mut out = self;
        for r in 0..2 {
            for c in 0..2 {
                out.0[r][c] -= rhs.0[r][c];
            }
        }
        out
    }
}

/// A rotation exp(−i φ/2 σ·n) with φ ∈ [0, 2π) and canonical axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisAngle {
    pub phi: f64,
    pub axis: Vec3,
}

impl AxisAngle {
    pub fn matrix(&self) -> Mat2 {
        Mat2::rotation(self.phi, &self.axis)
    }
}

/// Raw SU(2) parameters: V = cos θ I − i sin θ n·σ with θ ∈ [0, π].
///
/// No canonicalization is applied, so V^N = cos Nθ I − i sin Nθ n·σ holds
/// exactly. Only valid for det V = 1.
#[derive(Clone, Copy, Debug)]
pub(crate) struct HalfAngle {
    pub theta: f64,
    pub axis: Vec3,
}

impl HalfAngle {
    pub fn of(v: &Mat2) -> Self {
        let (c, w) = su2_components(v);
        let s = norm(&w);
        if s < 1e-300 {
            return HalfAngle {
                theta: if c >= 0.0 { 0.0 } else { PI },
                axis: [0.0, 0.0, 1.0],
            };
        }
        HalfAngle {
            theta: s.atan2(c),
            axis: [w[0] / s, w[1] / s, w[2] / s],
        }
    }
}

/// (cos θ, sin θ·n) read off an SU(2) matrix, symmetrized over entries.
fn su2_components(v: &Mat2) -> (f64, Vec3) {
    let m = &v.0;
    let c = 0.5 * (m[0][0].re + m[1][1].re);
    let snx = -0.5 * (m[0][1].im + m[1][0].im);
    let sny = 0.5 * (m[1][0].re - m[0][1].re);
    let snz = -0.5 * (m[0][0].im - m[1][1].im);
    (c, [snx, sny, snz])
}

/// Threshold below which an axis component counts as zero when choosing the
/// canonical sign.
const AXIS_SIGN_EPS: f64 = 1e-12;

/// Decomposes a unitary V into (φ, n) and a sign s ∈ {+1, −1} such that
/// V/√det V = s·exp(−i φ/2 σ·n).
pub fn extract_signed(v: &Mat2) -> Result<(AxisAngle, f64)> {
    let defect = v.unitarity_defect();
    if !defect.is_finite() || defect > UNITARITY_TOL {
        return Err(Error::NotUnitary(defect));
    }
    let det = v.det();
    let v = if (det - ONE).norm() > 1e-14 {
        v.scale(det.sqrt().inv())
    } else {
        *v
    };
    let (mut c, mut w) = su2_components(&v);
    let s = norm(&w);
    if s < 1e-15 {
        let sign = if c >= 0.0 { 1.0 } else { -1.0 };
        return Ok((
            AxisAngle {
                phi: 0.0,
                axis: [0.0, 0.0, 1.0],
            },
            sign,
        ));
    }
    for x in &mut w {
        *x /= s;
    }
    let mut sign = 1.0;
    if let Some(lead) = w.iter().find(|x| x.abs() > AXIS_SIGN_EPS) {
        if *lead < 0.0 {
            w = [-w[0], -w[1], -w[2]];
            c = -c;
            sign = -1.0;
        }
    }
    let mut phi = 2.0 * s.atan2(c);
    if phi >= 2.0 * PI {
        phi -= 2.0 * PI;
    }
    Ok((AxisAngle { phi, axis: w }, sign))
}

/// Axis-angle representation of a unitary up to global phase.
///
/// The identity (and −I) map to φ = 0 with the default axis (0, 0, 1).
pub fn extract_axis_angle(v: &Mat2) -> Result<AxisAngle> {
    extract_signed(v).map(|(aa, _)| aa)
}

/// Generic matrix exponential exp(A) by scaling and squaring with a Taylor
/// kernel. Used by the oracles as an independent path to the closed-form
/// propagators.
pub fn expm(a: &Mat2) -> Mat2 {
    let norm: f64 = a.0.iter().flatten().map(|z| z.norm()).sum();
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let x = a.scale(C64::new(scale, 0.0));
    let mut term = Mat2::identity();
    let mut sum = Mat2::identity();
    for k in 1..=18 {
        term = (term * x).scale(C64::new(1.0 / k as f64, 0.0));
        sum = sum + term;
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}
