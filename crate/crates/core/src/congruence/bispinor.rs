//! Full-spinor solutions of a generating pair and their analytic gradient.

use serde::{Deserialize, Serialize};

use super::genfunc::GenFuncPair;
use crate::biquat::{ComplexPoint, Spinor};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::numerics::{solve_system, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BispinorSolution {
    pub xi: Spinor,
    pub residual: f64,
    pub multiplicity: usize,
}

/// Every isolated `ξ` with `Π^C(ξ, Zξ) = 0`.
pub fn solve_bispinor(pair: &GenFuncPair, z: &ComplexPoint, tol: &Tolerances) -> Result<Vec<BispinorSolution>> {
    let restricted = pair.restricted(z);
    if restricted.iter().any(|p| p.max_abs_coeff() == 0.0) {
        return Err(Error::NonIsolated);
    }
    // A nonzero constant equation has no solutions at all.
    if restricted.iter().any(|p| p.total_degree() == 0) {
        return Ok(Vec::new());
    }
    let sols = match solve_system(&restricted, 1e-9, tol) {
        Err(Error::NonGenericSystem) => return Err(Error::NonIsolated),
        other => other?,
    };
    Ok(sols
        .into_iter()
        .map(|s| BispinorSolution {
            xi: Spinor::new(s.point[0], s.point[1]),
            residual: s.residual,
            multiplicity: s.multiplicity,
        })
        .collect())
}

/// `P^C_A = ∂Π^C/∂ξ^A + (∂Π^C/∂τ^E) Z^E_A` and `M^C_B = ∂Π^C/∂τ^B`.
pub fn total_derivative(pair: &GenFuncPair, z: &ComplexPoint, xi: &Spinor) -> ([[C64; 2]; 2], [[C64; 2]; 2]) {
    let tau = z.apply(xi);
    let (j, m) = pair.jacobians(xi.as_array(), tau.as_array());
    let p = std::array::from_fn(|c| std::array::from_fn(|a| j[c][a] + m[c][0] * z.get(0, a) + m[c][1] * z.get(1, a)));
    (p, m)
}

fn det2(m: &[[C64; 2]; 2]) -> C64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

fn norm2(m: &[[C64; 2]; 2]) -> f64 {
    m.iter().flatten().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn inverse2(m: &[[C64; 2]; 2]) -> [[C64; 2]; 2] {
    let d = det2(m);
    [[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]]
}

/// `det P`, which vanishes where two solutions of the pair merge.
pub fn caustic_determinant(pair: &GenFuncPair, z: &ComplexPoint, xi: &Spinor) -> C64 {
    det2(&total_derivative(pair, z, xi).0)
}

/// `∂ξ^E / ∂Z^B_D = −(∂Π^C/∂τ^B) Q^E_C ξ^D` with `Q = P⁻¹`, indexed
/// `[E][B][D]`.
pub fn spinor_gradient(pair: &GenFuncPair, z: &ComplexPoint, xi: &Spinor) -> Result<[[[C64; 2]; 2]; 2]> {
    let (p, m) = total_derivative(pair, z, xi);
    let n = norm2(&p);
    if det2(&p).norm() <= 1e-10 * n * n {
        return Err(Error::CausticPoint("total derivative matrix of the pair is singular".into()));
    }
    let q = inverse2(&p);
    let x = xi.as_array();
    Ok(std::array::from_fn(|e| {
        std::array::from_fn(|b| {
            let phi = -(q[e][0] * m[0][b] + q[e][1] * m[1][b]);
            std::array::from_fn(|d| phi * x[d])
        })
    }))
}
