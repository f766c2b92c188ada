//! Generating functions: a projective polynomial `Π(G, τ1, τ2)` and pairs
//! `Π¹, Π²` over full spinor and twistor components.

use serde::Serialize;

use crate::biquat::{complex_point, ComplexPoint, SpinorCoords};
use crate::error::{Error, Result};
use crate::numerics::{CPoly, MPoly, C64};

pub const PROJECTIVE_VARS: [&str; 3] = ["G", "t1", "t2"];
pub const PAIR_VARS: [&str; 4] = ["xi0", "xi1", "tau0", "tau1"];

pub const MAX_DEG_G: u32 = 8;
pub const MAX_TWISTOR_DEGREE: u32 = 6;

/// `Π(G, τ1, τ2)` with `τ1 = wG + u`, `τ2 = vG + w̄` at a point.
///
/// An optional complex offset is added to every evaluation point; the Kerr
/// family is the static function with the offset `z → z + ia`.
#[derive(Debug, Clone, PartialEq)]
pub struct GenFuncProjective {
    poly: MPoly,
    shift: [C64; 4],
}

impl GenFuncProjective {
    pub fn new(poly: MPoly) -> Result<Self> {
        if poly.vars() != PROJECTIVE_VARS {
            return Err(Error::InvalidArgument(format!(
                "projective generating function must be over {PROJECTIVE_VARS:?}"
            )));
        }
        if poly.is_zero() {
            return Err(Error::IdenticallyZero);
        }
        if poly.degree_in(0) > MAX_DEG_G {
            return Err(Error::DegreeCap(format!("degree in G exceeds {MAX_DEG_G}")));
        }
        let twistor = poly.terms().map(|(e, _)| e[1] + e[2]).max().unwrap_or(0);
        if twistor > MAX_TWISTOR_DEGREE {
            return Err(Error::DegreeCap(format!("twistor degree exceeds {MAX_TWISTOR_DEGREE}")));
        }
        Ok(Self { poly, shift: [C64::new(0.0, 0.0); 4] })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::new(MPoly::parse(text, &PROJECTIVE_VARS)?)
    }

    /// `G·τ1 − τ2`, whose branches are the stereographic projections of ±r̂.
    pub fn static_spherical() -> Self {
        Self::parse("G*t1 - t2").expect("static generating function")
    }

    /// The static function displaced to the complex point `z = −ia`.
    pub fn kerr(a: f64) -> Self {
        Self::static_spherical().with_shift([C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, a)])
    }

    /// Adds a constant complex offset to `(t, x, y, z)` before substitution.
    pub fn with_shift(mut self, shift: [C64; 4]) -> Self {
        self.shift = shift;
        self
    }

    pub fn shift(&self) -> [C64; 4] {
        self.shift
    }

    pub fn poly(&self) -> &MPoly {
        &self.poly
    }

    /// Degree in `G` of the reduced polynomial family.
    pub fn nominal_degree(&self) -> usize {
        self.poly.terms().map(|(e, _)| (e[0] + e[1] + e[2]) as usize).max().unwrap_or(0)
    }

    /// Spinor coordinates of the (shifted) point.
    pub fn coords(&self, p: &[f64; 4]) -> SpinorCoords {
        SpinorCoords::of_complex(std::array::from_fn(|k| C64::new(p[k], 0.0) + self.shift[k]))
    }

    pub fn complex_point(&self, p: &[f64; 4]) -> ComplexPoint {
        complex_point(std::array::from_fn(|k| C64::new(p[k], 0.0) + self.shift[k]))
    }

    /// Univariate polynomial in `G` at spinor coordinates `sc`.
    pub fn reduce_coords(&self, sc: &SpinorCoords) -> CPoly {
        let n = self.nominal_degree();
        let one = C64::new(1.0, 0.0);
        let t1 = CPoly::new(vec![sc.u, sc.w]);
        let t2 = CPoly::new(vec![sc.wbar, sc.v]);
        let (mut p1, mut p2) = (vec![CPoly::constant(one)], vec![CPoly::constant(one)]);
        for k in 1..=MAX_TWISTOR_DEGREE as usize {
            p1.push(&p1[k - 1] * &t1);
            p2.push(&p2[k - 1] * &t2);
        }
        let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
        for (e, c) in self.poly.terms() {
            let prod = &p1[e[1] as usize] * &p2[e[2] as usize];
            for (j, v) in prod.coeffs().iter().enumerate() {
                coeffs[j + e[0] as usize] += c * v;
            }
        }
        CPoly::new(coeffs)
    }

    /// Size of the reduced coefficients if nothing cancelled; used to decide
    /// when the reduced polynomial is numerically zero.
    pub(crate) fn reduce_scale(&self, sc: &SpinorCoords) -> f64 {
        let m = 1.0 + sc.u.norm().max(sc.v.norm()).max(sc.w.norm()).max(sc.wbar.norm());
        self.poly.terms().map(|(e, c)| c.norm() * m.powi((e[1] + e[2]) as i32)).sum()
    }

    /// `(Π_G, Π_τ1, Π_τ2)` at `(G, τ1, τ2)`.
    pub fn partials(&self, g: C64, t1: C64, t2: C64) -> [C64; 3] {
        let at = [g, t1, t2];
        std::array::from_fn(|k| self.poly.partial(k).eval(&at))
    }

    pub fn eval(&self, g: C64, t1: C64, t2: C64) -> C64 {
        self.poly.eval(&[g, t1, t2])
    }
}

/// Two polynomials in `(ξ⁰, ξ¹, τ⁰, τ¹)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GenFuncPair {
    polys: [MPoly; 2],
}

/// A named two-function example shipped with the workbench.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BundledPair {
    pub name: &'static str,
    pub pi1: &'static str,
    pub pi2: &'static str,
    /// Ring radius of the singular locus in the `t = 0` slice.
    pub ring_radius: f64,
}

/// Homogeneous lifts of the Kerr function with two different scale-fixing
/// second functions. Both singular loci are the ring `x² + y² = a²`, `z = 0`.
/// On the ring the merging spinor ratio `ξ¹/ξ⁰` sweeps the unit circle, so
/// the second functions are chosen with `∂Π²/∂τ` not proportional to any
/// `(1, −e^{iφ})`; otherwise `∂Π/∂τ` is singular at some ring point and the
/// string is undefined there.
pub const BUNDLED_PAIRS: [BundledPair; 2] = [
    BundledPair {
        name: "kerr-a1",
        pi1: "xi1*tau0 - xi0*tau1 + 2i*xi0*xi1",
        pi2: "tau0 + 2*tau1 - 1",
        ring_radius: 1.0,
    },
    BundledPair {
        name: "kerr-a0.5",
        pi1: "xi1*tau0 - xi0*tau1 + 1i*xi0*xi1",
        pi2: "2*tau0 - tau1 + 0.5*xi0 - 1",
        ring_radius: 0.5,
    },
];

impl GenFuncPair {
    pub fn new(p1: MPoly, p2: MPoly) -> Result<Self> {
        for p in [&p1, &p2] {
            if p.vars() != PAIR_VARS {
                return Err(Error::InvalidArgument(format!("pair functions must be over {PAIR_VARS:?}")));
            }
            if p.is_zero() {
                return Err(Error::IdenticallyZero);
            }
            if p.total_degree() > MAX_TWISTOR_DEGREE {
                return Err(Error::DegreeCap(format!("total degree exceeds {MAX_TWISTOR_DEGREE}")));
            }
        }
        Ok(Self { polys: [p1, p2] })
    }

    pub fn parse(pi1: &str, pi2: &str) -> Result<Self> {
        Self::new(MPoly::parse(pi1, &PAIR_VARS)?, MPoly::parse(pi2, &PAIR_VARS)?)
    }

    pub fn bundled(b: &BundledPair) -> Self {
        Self::parse(b.pi1, b.pi2).expect("bundled pair parses")
    }

    /// `Π^C = τ^C − c^C`.
    pub fn constant_twistor(c: [C64; 2]) -> Self {
        let v = |i| MPoly::var(&PAIR_VARS, i);
        let k = |z| MPoly::constant(&PAIR_VARS, z);
        Self { polys: [v(2).sub(&k(c[0])), v(3).sub(&k(c[1]))] }
    }

    pub fn polys(&self) -> &[MPoly; 2] {
        &self.polys
    }

    /// Both functions with `τ = Zξ` substituted, as polynomials in `(ξ⁰, ξ¹)`.
    pub fn restricted(&self, z: &ComplexPoint) -> [MPoly; 2] {
        let vars = ["xi0", "xi1"];
        let x0 = MPoly::var(&vars, 0);
        let x1 = MPoly::var(&vars, 1);
        let row = |r: usize| x0.scale(z.get(r, 0)).add(&x1.scale(z.get(r, 1)));
        let images = [x0.clone(), x1.clone(), row(0), row(1)];
        [self.polys[0].compose(&images), self.polys[1].compose(&images)]
    }

    pub fn eval(&self, xi: [C64; 2], tau: [C64; 2]) -> [C64; 2] {
        let at = [xi[0], xi[1], tau[0], tau[1]];
        [self.polys[0].eval(&at), self.polys[1].eval(&at)]
    }

    /// `(∂Π^C/∂ξ^A, ∂Π^C/∂τ^B)` as row-major 2×2 arrays indexed `[C][A]`.
    pub fn jacobians(&self, xi: [C64; 2], tau: [C64; 2]) -> ([[C64; 2]; 2], [[C64; 2]; 2]) {
        let at = [xi[0], xi[1], tau[0], tau[1]];
        let d = |c: usize, k: usize| self.polys[c].partial(k).eval(&at);
        ([[d(0, 0), d(0, 1)], [d(1, 0), d(1, 1)]], [[d(0, 2), d(0, 3)], [d(1, 2), d(1, 3)]])
    }
}
