//! Biquaternions as 2×2 complex matrices, spacetime and spinor coordinates,
//! the Lorentz action, the incidence relation and null vectors.
//!
//! A real point is stored as `X = t·1 + x·σ1 + y·σ2 + z·σ3`, i.e.
//!
//! ```text
//!     X = [[u, w], [w̄, v]],   u = t + z,  v = t − z,  w = x − i·y,  w̄ = x + i·y
//! ```
//!
//! so that `det X = t² − x² − y² − z²`. Four-vector components of any matrix
//! are decoded as `a_μ = tr(σ_μ M) / 2` with `σ_0 = 1`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Copy, PartialEq)]
pub struct Biquaternion(pub Matrix2<C64>);

/// A point of complexified Minkowski space; no Hermiticity constraint.
pub type ComplexPoint = Biquaternion;

impl Biquaternion {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Self(Matrix2::new(a, b, c, d))
    }

    pub fn zero() -> Self {
        Self(Matrix2::zeros())
    }

    pub fn identity() -> Self {
        Self(Matrix2::identity())
    }

    pub fn diag(a: C64, d: C64) -> Self {
        Self::new(a, ZERO, ZERO, d)
    }

    /// `σ_0 = 1` followed by the three Pauli matrices.
    pub fn sigma(mu: usize) -> Self {
        match mu {
            0 => Self::identity(),
            1 => Self::new(ZERO, ONE, ONE, ZERO),
            2 => Self::new(ZERO, -I, I, ZERO),
            3 => Self::new(ONE, ZERO, ZERO, -ONE),
            _ => panic!("sigma index {mu} out of range"),
        }
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.0[(r, c)]
    }

    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        self.0[(r, c)] = v;
    }

    pub fn entries(&self) -> [C64; 4] {
        [self.0[(0, 0)], self.0[(0, 1)], self.0[(1, 0)], self.0[(1, 1)]]
    }

    pub fn from_entries(e: [C64; 4]) -> Self {
        Self::new(e[0], e[1], e[2], e[3])
    }

    pub fn dagger(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0[(0, 0)] + self.0[(1, 1)]
    }

    pub fn scale(&self, k: C64) -> Self {
        Self(self.0 * k)
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (self.0 - self.0.adjoint()).iter().all(|v| v.norm() <= tol)
    }

    pub fn norm_det(&self) -> C64 {
        self.0[(0, 0)] * self.0[(1, 1)] - self.0[(0, 1)] * self.0[(1, 0)]
    }

    /// Fails on null divisors, i.e. when `|det| ≤ 1e-13·‖a‖²`.
    pub fn inverse(&self) -> Result<Self> {
        let det = self.norm_det();
        let n = self.norm();
        if det.norm() <= 1e-13 * n * n || n == 0.0 {
            return Err(Error::NullDivisor);
        }
        let m = &self.0;
        Ok(Self::new(m[(1, 1)] / det, -m[(0, 1)] / det, -m[(1, 0)] / det, m[(0, 0)] / det))
    }

    pub fn apply(&self, s: &Spinor) -> Spinor {
        let m = &self.0;
        Spinor::new(m[(0, 0)] * s.s0 + m[(0, 1)] * s.s1, m[(1, 0)] * s.s0 + m[(1, 1)] * s.s1)
    }

    /// Complex four-vector `a_μ = tr(σ_μ M) / 2`.
    pub fn components(&self) -> [C64; 4] {
        std::array::from_fn(|mu| (Self::sigma(mu) * *self).trace() * 0.5)
    }

    /// Inverse of [`components`](Self::components): `M = a_μ σ_μ`.
    pub fn from_components(a: [C64; 4]) -> Self {
        (0..4).fold(Self::zero(), |acc, mu| acc + Self::sigma(mu).scale(a[mu]))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl Default for Biquaternion {
    fn default() -> Self {
        Self::zero()
    }
}

impl fmt::Debug for Biquaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = self.entries();
        write!(f, "[[{}, {}], [{}, {}]]", e[0], e[1], e[2], e[3])
    }
}

impl Mul for Biquaternion {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self(self.0 * rhs.0)
    }
}

impl Add for Biquaternion {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl Sub for Biquaternion {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(self.0 - rhs.0)
    }
}

impl Neg for Biquaternion {
    type Output = Self;
    fn neg(self) -> Self {
        Self(-self.0)
    }
}

pub fn mul(a: &Biquaternion, b: &Biquaternion) -> Biquaternion {
    *a * *b
}

pub fn norm_det(a: &Biquaternion) -> C64 {
    a.norm_det()
}

pub fn inverse(a: &Biquaternion) -> Result<Biquaternion> {
    a.inverse()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacetimePoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl SpacetimePoint {
    pub fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        Self { t, x, y, z }
    }

    pub fn from_array(p: [f64; 4]) -> Self {
        Self::new(p[0], p[1], p[2], p[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.t, self.x, self.y, self.z]
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    pub fn spatial_radius(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn interval(&self) -> f64 {
        self.t * self.t - self.x * self.x - self.y * self.y - self.z * self.z
    }

    pub fn spinor_coords(&self) -> SpinorCoords {
        SpinorCoords::of_complex([self.t, self.x, self.y, self.z].map(|v| C64::new(v, 0.0)))
    }
}

/// `(u, v, w, w̄)`; independent complex numbers once the point is complexified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinorCoords {
    pub u: C64,
    pub v: C64,
    pub w: C64,
    pub wbar: C64,
}

impl SpinorCoords {
    /// From complex `(t, x, y, z)`.
    pub fn of_complex(p: [C64; 4]) -> Self {
        let [t, x, y, z] = p;
        Self { u: t + z, v: t - z, w: x - I * y, wbar: x + I * y }
    }

    pub fn of_matrix(m: &Biquaternion) -> Self {
        Self { u: m.get(0, 0), v: m.get(1, 1), w: m.get(0, 1), wbar: m.get(1, 0) }
    }

    pub fn matrix(&self) -> Biquaternion {
        Biquaternion::new(self.u, self.w, self.wbar, self.v)
    }

    /// Complex `(t, x, y, z)`.
    pub fn cartesian(&self) -> [C64; 4] {
        [
            (self.u + self.v) * 0.5,
            (self.w + self.wbar) * 0.5,
            (self.wbar - self.w) * (-I * 0.5),
            (self.u - self.v) * 0.5,
        ]
    }
}

/// Converts Cartesian partials `(∂t, ∂x, ∂y, ∂z)` to spinor-coordinate
/// partials `(∂u, ∂v, ∂w, ∂w̄)`.
pub fn spinor_partials(d: &[C64; 4]) -> [C64; 4] {
    let [dt, dx, dy, dz] = *d;
    [(dt + dz) * 0.5, (dt - dz) * 0.5, (dx + I * dy) * 0.5, (dx - I * dy) * 0.5]
}

/// Inverse of [`spinor_partials`].
pub fn cartesian_partials(d: &[C64; 4]) -> [C64; 4] {
    let [du, dv, dw, dwbar] = *d;
    [du + dv, dw + dwbar, -I * dw + I * dwbar, du - dv]
}

pub fn hermitian_of_point(p: &SpacetimePoint) -> Biquaternion {
    p.spinor_coords().matrix()
}

pub fn point_of_hermitian(m: &Biquaternion, tol: f64) -> Result<SpacetimePoint> {
    if !m.is_hermitian(tol) {
        return Err(Error::NotHermitian);
    }
    let c = SpinorCoords::of_matrix(m).cartesian();
    Ok(SpacetimePoint::new(c[0].re, c[1].re, c[2].re, c[3].re))
}

/// The matrix of a complex point given in Cartesian components.
pub fn complex_point(p: [C64; 4]) -> ComplexPoint {
    SpinorCoords::of_complex(p).matrix()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spinor {
    pub s0: C64,
    pub s1: C64,
}

impl Spinor {
    pub fn new(s0: C64, s1: C64) -> Self {
        Self { s0, s1 }
    }

    /// `(1, G)`.
    pub fn from_ratio(g: C64) -> Self {
        Self::new(ONE, g)
    }

    pub fn norm(&self) -> f64 {
        (self.s0.norm_sqr() + self.s1.norm_sqr()).sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.s0 == ZERO && self.s1 == ZERO
    }

    pub fn scale(&self, k: C64) -> Self {
        Self::new(self.s0 * k, self.s1 * k)
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.s0 - o.s0, self.s1 - o.s1)
    }

    pub fn as_array(&self) -> [C64; 2] {
        [self.s0, self.s1]
    }

    /// Unit norm, phase fixed so the first nonzero component is real positive.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroSpinor);
        }
        let lead = if self.s0.norm() > 1e-14 * n { self.s0 } else { self.s1 };
        let phase = lead.conj() / lead.norm();
        Ok(self.scale(phase / n))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Twistor {
    pub xi: Spinor,
    pub tau: Spinor,
}

impl Twistor {
    /// The twistor of `ξ` at `X`, `τ = Xξ`.
    pub fn at(x: &Biquaternion, xi: Spinor) -> Self {
        Self { xi, tau: incidence(x, &xi) }
    }

    pub fn incidence_residual(&self, x: &Biquaternion) -> f64 {
        incidence(x, &self.xi).sub(&self.tau).norm()
    }
}

/// `τ = Xξ`.
pub fn incidence(x: &Biquaternion, xi: &Spinor) -> Spinor {
    x.apply(xi)
}

fn unimodular(s: &Biquaternion, tol: f64) -> Result<()> {
    let det = s.norm_det();
    if (det - ONE).norm() >= tol {
        return Err(Error::NotUnimodular(format!("{det}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LorentzObject {
    Point(Biquaternion),
    Spinor(Spinor),
    /// A covector-valued matrix such as the potential Φ.
    Covector(Biquaternion),
}

/// `X ↦ S†XS`, `ξ ↦ S⁻¹ξ`, `Φ ↦ S⁻¹Φ(S†)⁻¹` for unimodular `S`.
pub fn lorentz_act(s: &Biquaternion, obj: &LorentzObject, tol: f64) -> Result<LorentzObject> {
    unimodular(s, tol)?;
    Ok(match obj {
        LorentzObject::Point(x) => LorentzObject::Point(s.dagger() * *x * *s),
        LorentzObject::Spinor(xi) => LorentzObject::Spinor(s.inverse()?.apply(xi)),
        LorentzObject::Covector(phi) => {
            LorentzObject::Covector(s.inverse()? * *phi * s.dagger().inverse()?)
        }
    })
}

/// Boost along `z` with rapidity `lambda`.
pub fn z_boost(lambda: f64) -> Biquaternion {
    Biquaternion::diag(C64::new((0.5 * lambda).exp(), 0.0), C64::new((-0.5 * lambda).exp(), 0.0))
}

/// `k = ξξ†`, a Hermitian rank-one matrix.
pub fn null_vector(xi: &Spinor) -> Result<Biquaternion> {
    if xi.is_zero() {
        return Err(Error::ZeroSpinor);
    }
    Ok(Biquaternion::new(
        xi.s0 * xi.s0.conj(),
        xi.s0 * xi.s1.conj(),
        xi.s1 * xi.s0.conj(),
        xi.s1 * xi.s1.conj(),
    ))
}

/// Real four-vector `(t, x, y, z)` of a Hermitian matrix.
pub fn four_vector(m: &Biquaternion) -> [f64; 4] {
    m.components().map(|c| c.re)
}
