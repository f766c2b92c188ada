//! Isolated solutions of square polynomial systems in two or three variables
//! by iterated resultant elimination and back-substitution.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::mpoly::MPoly;
use super::poly::{CPoly, C64};
use super::resultant::eliminate;
use super::roots::poly_roots_with;
use crate::config::Tolerances;
use crate::error::{Error, Result};

/// Largest univariate eliminant degree accepted.
pub const MAX_ELIMINANT_DEGREE: usize = 128;

#[derive(Debug, Clone, PartialEq)]
pub struct SystemSolution {
    pub point: Vec<C64>,
    /// Largest `|F_a|` at the point, relative to each polynomial's largest coefficient.
    pub residual: f64,
    /// Multiplicity inherited from the univariate eliminant.
    pub multiplicity: usize,
}

/// A real, well-conditioned change of coordinates `x = M x'`. Real so that
/// real systems stay real and complex solutions keep conjugate symmetry.
fn generic_transform(n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_e11a);
    loop {
        let m = DMatrix::from_fn(n, n, |i, j| {
            let jitter: f64 = rng.random_range(-0.45..0.45);
            if i == j { 1.0 + jitter } else { jitter }
        });
        let det = m.determinant();
        if det.abs() > 0.3 {
            return m;
        }
    }
}

fn transformed(polys: &[MPoly], m: &DMatrix<f64>) -> Vec<MPoly> {
    let names: Vec<&str> = polys[0].vars().iter().map(String::as_str).collect();
    let n = names.len();
    let images: Vec<MPoly> = (0..n)
        .map(|i| {
            let mut row = MPoly::zero(&names);
            for j in 0..n {
                row = row.add(&MPoly::var(&names, j).scale(C64::new(m[(i, j)], 0.0)));
            }
            row
        })
        .collect();
    polys.iter().map(|p| p.compose(&images)).collect()
}

fn residual(polys: &[MPoly], x: &[C64]) -> f64 {
    polys
        .iter()
        .map(|p| p.eval(x).norm() / p.max_abs_coeff().max(1.0))
        .fold(0.0, f64::max)
}

fn newton(polys: &[MPoly], grads: &[Vec<MPoly>], x0: Vec<C64>) -> Vec<C64> {
    let n = x0.len();
    let mut x = x0;
    let mut best = residual(polys, &x);
    for _ in 0..30 {
        if best == 0.0 {
            break;
        }
        let f = DVector::from_fn(n, |i, _| polys[i].eval(&x));
        let j = DMatrix::from_fn(n, n, |i, k| grads[i][k].eval(&x));
        let Some(step) = j.lu().solve(&f) else { break };
        let cand: Vec<C64> = x.iter().zip(step.iter()).map(|(a, s)| a - s).collect();
        let r = residual(polys, &cand);
        if !(r < best) {
            break;
        }
        let small = step.iter().map(|s| s.norm()).fold(0.0, f64::max)
            <= 1e-15 * (1.0 + x.iter().map(|v| v.norm()).fold(0.0, f64::max));
        x = cand;
        best = r;
        if small {
            break;
        }
    }
    x
}

fn finite_roots(p: &CPoly, tol: &Tolerances) -> Result<Vec<C64>> {
    if p.max_abs_coeff() == 0.0 {
        return Err(Error::NonGenericSystem);
    }
    if p.effective_degree(tol.infinity_rel) == Some(0) {
        return Ok(Vec::new());
    }
    Ok(poly_roots_with(p, tol)?.values())
}

fn finite_roots_expanded(p: &CPoly, tol: &Tolerances) -> Result<Vec<C64>> {
    if p.max_abs_coeff() == 0.0 {
        return Err(Error::NonGenericSystem);
    }
    if p.effective_degree(tol.infinity_rel) == Some(0) {
        return Ok(Vec::new());
    }
    Ok(poly_roots_with(p, tol)?.expanded())
}

struct Reduction {
    m: DMatrix<f64>,
    tp: Vec<MPoly>,
    /// Eliminant of the first two equations in the last variable (three
    /// variables only); used for back-substitution.
    r1: Option<MPoly>,
    uni: CPoly,
}

fn reduce(polys: &[MPoly], tol: &Tolerances) -> Result<Reduction> {
    let n = polys.len();
    if !(2..=3).contains(&n) || polys.iter().any(|p| p.nvars() != n) {
        return Err(Error::InvalidArgument("expected a square system in 2 or 3 variables".into()));
    }
    if polys.iter().any(MPoly::is_zero) {
        return Err(Error::NonGenericSystem);
    }
    let m = generic_transform(n, tol.seed);
    let tp = transformed(polys, &m);
    let zero = vec![C64::new(0.0, 0.0); n];
    let (u, r1) = if n == 2 {
        (eliminate(&tp[0], &tp[1], 1)?, None)
    } else {
        let r1 = eliminate(&tp[0], &tp[1], 2)?;
        let r2 = eliminate(&tp[0], &tp[2], 2)?;
        if !r1.nontrivial || !r2.nontrivial {
            return Err(Error::NonGenericSystem);
        }
        (eliminate(&r1.poly, &r2.poly, 1)?, Some(r1.poly))
    };
    if !u.nontrivial {
        return Err(Error::NonGenericSystem);
    }
    let uni = u.poly.to_univariate(0, &zero);
    check_cap(uni.nominal_degree())?;
    Ok(Reduction { m, tp, r1, uni })
}

/// Univariate eliminant of a square system in a generic real coordinate
/// (seeded by `tol.seed`). Its roots are the first transformed coordinates
/// of all solutions, so its discriminant vanishes exactly where two solutions
/// merge; real solutions stay real.
pub fn system_eliminant(polys: &[MPoly], tol: &Tolerances) -> Result<CPoly> {
    Ok(reduce(polys, tol)?.uni)
}

/// All isolated solutions of `polys` (two or three equations in as many
/// variables), each verified against `verify_tol` after Newton polishing.
pub fn solve_system(polys: &[MPoly], verify_tol: f64, tol: &Tolerances) -> Result<Vec<SystemSolution>> {
    let n = polys.len();
    let Reduction { m, tp, r1, uni } = reduce(polys, tol)?;
    let zero = C64::new(0.0, 0.0);
    let mut candidates: Vec<Vec<C64>> = Vec::new();
    for a in finite_roots_expanded(&uni, tol)? {
        if let Some(r1) = &r1 {
            let ry = r1.to_univariate(1, &[a, zero, zero]);
            for b in finite_roots(&ry, tol).unwrap_or_default() {
                let pz = tp[0].to_univariate(2, &[a, b, zero]);
                for c in finite_roots(&pz, tol).unwrap_or_default() {
                    candidates.push(vec![a, b, c]);
                }
            }
        } else {
            let mut pick = tp[0].to_univariate(1, &[a, zero]);
            if pick.effective_degree(1e-10).unwrap_or(0) == 0 {
                pick = tp[1].to_univariate(1, &[a, zero]);
            }
            for b in finite_roots(&pick, tol).unwrap_or_default() {
                candidates.push(vec![a, b]);
            }
        }
    }

    let grads: Vec<Vec<MPoly>> = polys.iter().map(|p| (0..n).map(|k| p.partial(k)).collect()).collect();
    let mut out: Vec<SystemSolution> = Vec::new();
    for cand in candidates {
        let x: Vec<C64> = (0..n).map(|i| (0..n).map(|j| cand[j] * m[(i, j)]).sum()).collect();
        let polished = newton(polys, &grads, x.clone());
        let res = residual(polys, &polished);
        let scale = 1.0 + polished.iter().map(|v| v.norm()).fold(0.0, f64::max);
        // Extraneous back-substitution candidates can be pulled into a true
        // solution by Newton; only candidates already close to it count.
        let moved = x.iter().zip(&polished).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        if res > verify_tol || moved > 1e-4 * scale {
            continue;
        }
        let x = polished;
        let same = out.iter_mut().find(|s| {
            s.point.iter().zip(&x).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) <= 1e-10 * scale
        });
        match same {
            Some(s) => s.multiplicity += 1,
            None => out.push(SystemSolution { point: x, residual: res, multiplicity: 1 }),
        }
    }
    Ok(out)
}

fn check_cap(degree: usize) -> Result<()> {
    if degree > MAX_ELIMINANT_DEGREE {
        return Err(Error::DegreeCap(format!("eliminant degree {degree} exceeds {MAX_ELIMINANT_DEGREE}")));
    }
    Ok(())
}
