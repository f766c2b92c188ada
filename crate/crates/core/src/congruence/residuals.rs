//! Shear-free, eikonal, wave and rank diagnostics for spinor-ratio fields.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::branches::RatioField;
use crate::biquat::{spinor_partials, SpinorCoords};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::numerics::{fd_gradient, fd_second, C64};

/// `(∂w G − G ∂u G, ∂v G − G ∂w̄ G)` from spinor-coordinate partials
/// `(∂u, ∂v, ∂w, ∂w̄) G`.
pub fn sfc_from_partials(g: C64, d: &[C64; 4]) -> [C64; 2] {
    [d[2] - g * d[0], d[1] - g * d[3]]
}

/// Both shear-free residuals of the congruence `ξ = (1, G)` at `p`.
pub fn sfc_residual(field: &dyn RatioField, p: &[f64; 4]) -> Result<[C64; 2]> {
    let g = field.value(p)?;
    let d = spinor_partials(&field.gradient(p)?);
    Ok(sfc_from_partials(g, &d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PdeKind {
    Eikonal,
    Wave,
}

/// `(∂t f)² − |∇f|²` or `□f = ∂t²f − ∇²f` by central differences.
pub fn scalar_pde_residual<F>(f: F, p: &[f64; 4], kind: PdeKind, h: f64, richardson: bool) -> Result<C64>
where
    F: Fn([f64; 4]) -> Result<C64>,
{
    match kind {
        PdeKind::Eikonal => {
            let g = fd_gradient(f, p, h, richardson)?;
            Ok(g[0] * g[0] - g[1] * g[1] - g[2] * g[2] - g[3] * g[3])
        }
        PdeKind::Wave => {
            let s = fd_second(f, p, h, richardson)?;
            Ok(s[0] - s[1] - s[2] - s[3])
        }
    }
}

/// `G`, `τ1 = wG + u`, `τ2 = vG + w̄` and their Cartesian gradients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwistorJet {
    pub values: [C64; 3],
    pub gradients: [[C64; 4]; 3],
}

/// Cartesian gradients of `u, v, w, w̄`.
const DU: [C64; 4] = [C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
const DV: [C64; 4] = [C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-1.0, 0.0)];
const DW: [C64; 4] = [C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, -1.0), C64::new(0.0, 0.0)];
const DWBAR: [C64; 4] = [C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, 0.0)];

/// The twistor components of `ξ = (1, G)` at a point with spinor
/// coordinates `sc` (which may carry a complex shift).
pub fn twistor_jet(field: &dyn RatioField, p: &[f64; 4], sc: &SpinorCoords) -> Result<TwistorJet> {
    let g = field.value(p)?;
    let dg = field.gradient(p)?;
    let t1 = sc.w * g + sc.u;
    let t2 = sc.v * g + sc.wbar;
    let d1 = std::array::from_fn(|m| DW[m] * g + sc.w * dg[m] + DU[m]);
    let d2 = std::array::from_fn(|m| DV[m] * g + sc.v * dg[m] + DWBAR[m]);
    Ok(TwistorJet { values: [g, t1, t2], gradients: [dg, d1, d2] })
}

/// Rank of the 3×4 Jacobian of `(G, τ1, τ2)`.
pub fn twistor_rank(jet: &TwistorJet, tol: &Tolerances) -> Result<usize> {
    let m = DMatrix::from_fn(3, 4, |r, c| jet.gradients[r][c]);
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::CausticPoint("non-finite twistor gradient".into()));
    }
    let sv = m.singular_values();
    let top = sv.max();
    if top == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > tol.rank_rel * top).count())
}

pub fn twistor_rank_check(field: &dyn RatioField, p: &[f64; 4], sc: &SpinorCoords, tol: &Tolerances) -> Result<usize> {
    twistor_rank(&twistor_jet(field, p, sc)?, tol)
}

/// `η^{μν} ∂_μ a ∂_ν b` with signature `(+, −, −, −)`.
pub fn minkowski_dot(a: &[C64; 4], b: &[C64; 4]) -> C64 {
    a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3]
}

/// Largest contracted product of gradients among `G, τ1, τ2`, relative to
/// the product of their magnitudes.
pub fn orthogonality(jet: &TwistorJet) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in i..3 {
            let (a, b) = (&jet.gradients[i], &jet.gradients[j]);
            let mag = |v: &[C64; 4]| v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            let scale = (mag(a) * mag(b)).max(f64::MIN_POSITIVE);
            worst = worst.max(minkowski_dot(a, b).norm() / scale);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::congruence::branches::{ConstantRatio, KerrBranch, SampledRatio};
    use crate::biquat::SpacetimePoint;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn stereo_is_shear_free() {
        for sign in [1.0, -1.0] {
            let r = sfc_residual(&KerrBranch::stereo(sign), &[0.0, 1.0, 2.0, 2.0]).unwrap();
            assert!(r[0].norm() < 1e-12 && r[1].norm() < 1e-12);
        }
    }

    #[test]
    fn constant_is_shear_free() {
        let r = sfc_residual(&ConstantRatio(c(0.3, -2.0)), &[0.0, 1.0, 2.0, 2.0]).unwrap();
        assert_eq!(r, [c(0.0, 0.0); 2]);
    }

    #[test]
    fn wbar_is_not_a_congruence() {
        let f = SampledRatio { f: |p: &[f64; 4]| Ok(c(p[1], p[2])), fd_rel: 1e-3 };
        let r = sfc_residual(&f, &[0.0, 0.7, -0.4, 1.3]).unwrap();
        assert!(r[0].norm().max(r[1].norm()) > 0.1);
    }

    #[test]
    fn outgoing_phase_is_eikonal() {
        let f = |p: [f64; 4]| Ok(c(p[0] - (p[1] * p[1] + p[2] * p[2] + p[3] * p[3]).sqrt(), 0.0));
        let r = scalar_pde_residual(f, &[0.5, 1.0, 2.0, 2.0], PdeKind::Eikonal, 1e-3, true).unwrap();
        assert!(r.norm() < 1e-9);
        let t = |p: [f64; 4]| Ok(c(p[0], 0.0));
        let r = scalar_pde_residual(t, &[0.5, 1.0, 2.0, 2.0], PdeKind::Eikonal, 1e-3, false).unwrap();
        assert!((r - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn static_rank_is_two() {
        let p = [0.0, 1.0, 2.0, 2.0];
        let sc = SpacetimePoint::from_array(p).spinor_coords();
        let tol = Tolerances::default();
        assert_eq!(twistor_rank_check(&KerrBranch::stereo(1.0), &p, &sc, &tol).unwrap(), 2);
        assert_eq!(twistor_rank_check(&ConstantRatio(c(0.5, 0.5)), &p, &sc, &tol).unwrap(), 2);
        let jet = twistor_jet(&KerrBranch::stereo(1.0), &p, &sc).unwrap();
        assert!(orthogonality(&jet) < 1e-12);
    }
}
