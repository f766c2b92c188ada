//! Singular loci of congruences: where branches merge, the generating
//! complex string, and the null-cone membership test.

use nalgebra::{Matrix2x3, Vector2, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::biquat::{ComplexPoint, Spinor};
use crate::config::Tolerances;
use crate::congruence::bispinor::inverse2;
use crate::congruence::{
    caustic_determinant, reduce_at_point, solve_bispinor, solve_branches, GenFuncPair, GenFuncProjective,
};
use crate::error::{Error, Result};
use crate::numerics::{discriminant, Grid4, C64};

/// Discriminant of the reduced polynomial. Zero where two branches merge and,
/// by convention, at points where the generating function vanishes
/// identically (every `G` is then a root).
pub fn caustic_value(pi: &GenFuncProjective, p: &[f64; 4]) -> Result<C64> {
    match reduce_at_point(pi, p) {
        Ok(reduced) => discriminant(&reduced),
        Err(Error::DegeneratePoint) => Ok(C64::new(0.0, 0.0)),
        Err(e) => Err(e),
    }
}

/// `∏ det P` over all solutions of the pair at the point `X`, with
/// multiplicity. Symmetric in the solutions, hence single valued.
pub fn pair_caustic_value(pair: &GenFuncPair, z: &ComplexPoint, tol: &Tolerances) -> Result<C64> {
    let sols = solve_bispinor(pair, z, tol)?;
    Ok(sols
        .iter()
        .map(|s| caustic_determinant(pair, z, &s.xi).powu(s.multiplicity as u32))
        .product())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocusPoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// `|caustic value|` after refinement.
    pub residual: f64,
}

impl LocusPoint {
    pub fn array(&self) -> [f64; 4] {
        [self.t, self.x, self.y, self.z]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocusFrame {
    pub t: f64,
    pub points: Vec<LocusPoint>,
}

fn brackets(vals: &[f64]) -> bool {
    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    lo <= 0.0 && hi >= 0.0
}

/// Gauss–Newton on `(Re f, Im f)` over the three spatial coordinates with
/// the SVD pseudo-inverse, so that steps are orthogonal to the locus.
fn refine<F>(f: &F, start: [f64; 4], h0: f64, tol: &Tolerances) -> Option<([f64; 4], f64)>
where
    F: Fn(&[f64; 4]) -> Result<C64>,
{
    let mut x = start;
    let mut fx = f(&x).ok()?;
    for _ in 0..tol.max_iterations.min(100) {
        if fx.norm() <= 1e-3 * tol.locus_tol {
            break;
        }
        let h = h0 * 1e-4;
        let mut jac = Matrix2x3::<f64>::zeros();
        for a in 0..3 {
            let (mut p, mut m) = (x, x);
            p[a + 1] += h;
            m[a + 1] -= h;
            let d = (f(&p).ok()? - f(&m).ok()?) / (2.0 * h);
            jac[(0, a)] = d.re;
            jac[(1, a)] = d.im;
        }
        let pinv = jac.pseudo_inverse(1e-14 * jac.norm().max(f64::MIN_POSITIVE)).ok()?;
        let step: Vector3<f64> = -(pinv * Vector2::new(fx.re, fx.im));
        let mut scale = 1.0;
        let mut improved = false;
        for _ in 0..12 {
            let cand = [x[0], x[1] + scale * step[0], x[2] + scale * step[1], x[3] + scale * step[2]];
            if let Ok(fc) = f(&cand) {
                if fc.norm() < fx.norm() {
                    x = cand;
                    fx = fc;
                    improved = true;
                    break;
                }
            }
            scale *= 0.5;
        }
        if !improved || step.norm() * scale <= 1e-16 * (1.0 + x[1].abs() + x[2].abs() + x[3].abs()) {
            break;
        }
    }
    Some((x, fx.norm()))
}

/// Zero set of a complex function over a spatial grid slice: grid cells
/// where both `Re f` and `Im f` bracket zero, plus local minima of `|f|`
/// (isolated zeros of a non-negative function never change sign), each
/// refined by Gauss–Newton and kept if `|f| ≤ locus_tol`.
pub fn extract_zero_set<F>(f: F, grid: &Grid4, tol: &Tolerances) -> Result<LocusFrame>
where
    F: Fn(&[f64; 4]) -> Result<C64> + Sync,
{
    if grid.extents[0] != 1 {
        return Err(Error::InvalidArgument("locus extraction expects a single time slice".into()));
    }
    let n = grid.len();
    let vals: Vec<Option<C64>> = (0..n).into_par_iter().map(|k| f(&grid.point(grid.unflat(k))).ok()).collect();
    let ext = grid.extents;
    let inside = |idx: [usize; 4], d: [isize; 3]| -> Option<usize> {
        let mut out = idx;
        for a in 0..3 {
            let v = idx[a + 1] as isize + d[a];
            if v < 0 || v >= ext[a + 1] as isize {
                return None;
            }
            out[a + 1] = v as usize;
        }
        Some(grid.flat(out))
    };

    let candidates: Vec<[f64; 4]> = (0..n)
        .into_par_iter()
        .flat_map_iter(|k| {
            let idx = grid.unflat(k);
            let mut out = Vec::new();
            // Cell with base corner `idx`.
            let corners: Option<Vec<C64>> = (0..8)
                .map(|c| inside(idx, [(c & 1) as isize, ((c >> 1) & 1) as isize, ((c >> 2) & 1) as isize]))
                .map(|j| j.and_then(|j| vals[j]))
                .collect();
            if let Some(cs) = corners {
                let re: Vec<f64> = cs.iter().map(|c| c.re).collect();
                let im: Vec<f64> = cs.iter().map(|c| c.im).collect();
                if brackets(&re) && brackets(&im) {
                    let p = grid.point(idx);
                    let mut c = p;
                    for a in 1..4 {
                        if ext[a] > 1 {
                            c[a] += 0.5 * grid.spacing[a];
                        }
                    }
                    out.push(c);
                }
            }
            // Local minimum of |f| over the 26-neighbourhood.
            if let Some(v) = vals[k] {
                let mut neighbour_max: f64 = 0.0;
                let mut is_min = true;
                let mut count = 0;
                for dx in -1..=1 {
                    for dy in -1..=1 {
                        for dz in -1..=1 {
                            if (dx, dy, dz) == (0, 0, 0) {
                                continue;
                            }
                            if let Some(nv) = inside(idx, [dx, dy, dz]).and_then(|j| vals[j]) {
                                count += 1;
                                neighbour_max = neighbour_max.max(nv.norm());
                                if nv.norm() < v.norm() {
                                    is_min = false;
                                }
                            }
                        }
                    }
                }
                if is_min && count > 0 && v.norm() <= 0.5 * neighbour_max {
                    out.push(grid.point(idx));
                }
            }
            out
        })
        .collect();

    let spacing = grid.max_spatial_spacing().max(f64::MIN_POSITIVE);
    let pad = 1e-9 * spacing;
    let lo: Vec<f64> = (1..4).map(|a| grid.origin[a] - pad).collect();
    let hi: Vec<f64> = (1..4)
        .map(|a| grid.origin[a] + grid.spacing[a] * (ext[a] - 1) as f64 + pad)
        .collect();
    let refined: Vec<LocusPoint> = candidates
        .par_iter()
        .filter_map(|c| {
            let (x, r) = refine(&f, *c, spacing, tol)?;
            let moved = ((1..4).map(|a| (x[a] - c[a]).powi(2)).sum::<f64>()).sqrt();
            let in_box = (0..3).all(|a| x[a + 1] >= lo[a] && x[a + 1] <= hi[a]);
            (r <= tol.locus_tol && in_box && moved <= 3.0 * spacing)
                .then_some(LocusPoint { t: x[0], x: x[1], y: x[2], z: x[3], residual: r })
        })
        .collect();

    Ok(LocusFrame { t: grid.origin[0], points: dedupe(refined, 0.25 * spacing) })
}

fn dedupe(mut pts: Vec<LocusPoint>, radius: f64) -> Vec<LocusPoint> {
    pts.sort_by(|a, b| {
        a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)).then(a.z.total_cmp(&b.z))
    });
    let mut out: Vec<LocusPoint> = Vec::new();
    'outer: for p in pts {
        for q in out.iter_mut().rev() {
            if p.x - q.x > radius {
                break;
            }
            let d = ((p.x - q.x).powi(2) + (p.y - q.y).powi(2) + (p.z - q.z).powi(2)).sqrt();
            if d <= radius {
                if p.residual < q.residual {
                    *q = p;
                }
                continue 'outer;
            }
        }
        out.push(p);
    }
    out
}

/// Caustic locus of a projective generating function on a time slice.
pub fn extract_locus(pi: &GenFuncProjective, grid: &Grid4, tol: &Tolerances) -> Result<LocusFrame> {
    extract_zero_set(|p| caustic_value(pi, p), grid, tol)
}

/// One frame per time sample; the grid's own time is replaced.
pub fn track_locus(pi: &GenFuncProjective, grid: &Grid4, times: &[f64], tol: &Tolerances) -> Result<Vec<LocusFrame>> {
    times
        .iter()
        .map(|&t| {
            let mut g = *grid;
            g.origin[0] = t;
            extract_locus(pi, &g, tol)
        })
        .collect()
}

/// Whether the branches at `p` include a multiple root.
pub fn branches_merge(pi: &GenFuncProjective, p: &[f64; 4], tol: &Tolerances) -> Result<bool> {
    Ok(solve_branches(pi, p, tol)?.has_multiple())
}

/// `Ẑ = −(∂Π/∂τ)⁻¹ (∂Π/∂ξ)`: the complex point whose incidence relation
/// linearises the pair at `(ξ, τ)`, so that `Ẑ − Z = −(∂Π/∂τ)⁻¹ P`.
pub fn generating_string(pair: &GenFuncPair, z: &ComplexPoint, xi: &Spinor) -> Result<ComplexPoint> {
    let tau = z.apply(xi);
    let (j, m) = pair.jacobians(xi.as_array(), tau.as_array());
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let scale: f64 = m.iter().flatten().map(|v| v.norm_sqr()).sum();
    if det.norm() <= 1e-12 * scale || scale == 0.0 {
        return Err(Error::StringUndefined);
    }
    let r = inverse2(&m);
    let mut out = ComplexPoint::zero();
    for a in 0..2 {
        for b in 0..2 {
            out.set(a, b, -(r[a][0] * j[0][b] + r[a][1] * j[1][b]));
        }
    }
    Ok(out)
}

/// `det(Ẑ − Z)`.
pub fn null_cone_check(zhat: &ComplexPoint, z: &ComplexPoint) -> C64 {
    (*zhat - *z).norm_det()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairSingularPoint {
    pub point: LocusPoint,
    pub xi: Spinor,
    /// Entries of `Ẑ` in row-major order; `None` where `∂Π/∂τ` is singular
    /// and the string is undefined.
    pub zhat: Option<[C64; 4]>,
    pub null_cone: Option<C64>,
}

fn real_point(p: &[f64; 4]) -> ComplexPoint {
    crate::biquat::hermitian_of_point(&crate::biquat::SpacetimePoint::from_array(*p))
}

/// `(Π¹, Π², det P)` at spinor `ξ` and real point `p`, split into real parts.
fn pair_fold_residual(pair: &GenFuncPair, u: &[f64; 7], t: f64) -> [f64; 6] {
    let xi = Spinor::new(C64::new(u[0], u[1]), C64::new(u[2], u[3]));
    let z = real_point(&[t, u[4], u[5], u[6]]);
    let [a, b] = pair.eval(xi.as_array(), z.apply(&xi).as_array());
    let d = caustic_determinant(pair, &z, &xi);
    [a.re, a.im, b.re, b.im, d.re, d.im]
}

/// Gauss–Newton with the minimum-norm step on the fold system of a pair:
/// the three complex equations cut a curve out of `(ξ, x, y, z)`, and the
/// iteration lands on the nearest point of it.
fn polish_pair_point(pair: &GenFuncPair, xi: Spinor, p: [f64; 4]) -> Option<(Spinor, [f64; 4], f64)> {
    let t = p[0];
    let mut u = [xi.s0.re, xi.s0.im, xi.s1.re, xi.s1.im, p[1], p[2], p[3]];
    let norm = |r: &[f64; 6]| r.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut r = pair_fold_residual(pair, &u, t);
    for _ in 0..50 {
        let size = 1.0 + u.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let h = 1e-6 * size;
        let mut jac = nalgebra::SMatrix::<f64, 6, 7>::zeros();
        for k in 0..7 {
            let (mut up, mut dn) = (u, u);
            up[k] += h;
            dn[k] -= h;
            let (rp, rm) = (pair_fold_residual(pair, &up, t), pair_fold_residual(pair, &dn, t));
            for i in 0..6 {
                jac[(i, k)] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        let svd = jac.svd(true, true);
        let step = svd.solve(&nalgebra::SVector::<f64, 6>::from(r), 1e-12 * svd.singular_values.max()).ok()?;
        let cand: [f64; 7] = std::array::from_fn(|k| u[k] - step[k]);
        let rc = pair_fold_residual(pair, &cand, t);
        if !(norm(&rc) < norm(&r)) {
            break;
        }
        let small = step.amax() <= 1e-15 * size;
        (u, r) = (cand, rc);
        if small {
            break;
        }
    }
    let xi = Spinor::new(C64::new(u[0], u[1]), C64::new(u[2], u[3]));
    Some((xi, [t, u[4], u[5], u[6]], norm(&r)))
}

/// Singular points of a generating pair on a real time slice, each with the
/// string point of the merging solution and its null-cone value. Points are
/// polished on the fold system of the pair, which fixes the merging spinor
/// far more accurately than solving at a nearly double solution.
pub fn pair_singular_points(pair: &GenFuncPair, grid: &Grid4, tol: &Tolerances) -> Result<Vec<PairSingularPoint>> {
    let frame = extract_zero_set(|p| pair_caustic_value(pair, &real_point(p), tol), grid, tol)?;
    let reach = grid.max_spatial_spacing();
    frame
        .points
        .iter()
        .map(|lp| {
            let z = real_point(&lp.array());
            let sols = solve_bispinor(pair, &z, tol)?;
            let mut best: Option<(Spinor, [f64; 4], f64)> = None;
            for s in &sols {
                if let Some(c) = polish_pair_point(pair, s.xi, lp.array()) {
                    let moved = (1..4).map(|k| (c.1[k] - lp.array()[k]).abs()).fold(0.0, f64::max);
                    if moved <= reach && best.is_none_or(|b| c.2 < b.2) {
                        best = Some(c);
                    }
                }
            }
            let (xi, at, res) = best.ok_or(Error::NoConvergence("no merging solution at singular point".into()))?;
            let point = LocusPoint { t: at[0], x: at[1], y: at[2], z: at[3], residual: res };
            let z = real_point(&at);
            let (zhat, null_cone) = match generating_string(pair, &z, &xi) {
                Ok(zh) => (Some(zh.entries()), Some(null_cone_check(&zh, &z))),
                Err(Error::StringUndefined) => (None, None),
                Err(e) => return Err(e),
            };
            Ok(PairSingularPoint { point, xi, zhat, null_cone })
        })
        .collect()
}
