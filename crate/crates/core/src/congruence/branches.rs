//! Branches `G(X)` of a projective generating function and continuous
//! labelling over spatial grids.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::genfunc::GenFuncProjective;
use crate::biquat::{cartesian_partials, SpinorCoords};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::numerics::{fd_gradient, poly_roots_with, CPoly, Grid4, RootSet, C64};

/// Reduced polynomial in `G` at a real point.
pub fn reduce_at_point(pi: &GenFuncProjective, p: &[f64; 4]) -> Result<CPoly> {
    let sc = pi.coords(p);
    let reduced = pi.reduce_coords(&sc);
    if reduced.max_abs_coeff() <= 1e-14 * pi.reduce_scale(&sc) {
        return Err(Error::DegeneratePoint);
    }
    Ok(reduced)
}

/// Every branch of `G`, including those at projective infinity.
pub fn solve_branches(pi: &GenFuncProjective, p: &[f64; 4], tol: &Tolerances) -> Result<RootSet> {
    let reduced = reduce_at_point(pi, p)?;
    if reduced.nominal_degree() == 0 {
        return Err(Error::DegreeTooLow { needed: 1, got: 0 });
    }
    poly_roots_with(&reduced, tol)
}

/// A spinor-ratio field `G(t, x, y, z)` with its Cartesian gradient.
pub trait RatioField: Send + Sync {
    fn value(&self, p: &[f64; 4]) -> Result<C64>;
    /// `(∂t, ∂x, ∂y, ∂z) G`.
    fn gradient(&self, p: &[f64; 4]) -> Result<[C64; 4]>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantRatio(pub C64);

impl RatioField for ConstantRatio {
    fn value(&self, _: &[f64; 4]) -> Result<C64> {
        Ok(self.0)
    }

    fn gradient(&self, _: &[f64; 4]) -> Result<[C64; 4]> {
        Ok([C64::new(0.0, 0.0); 4])
    }
}

/// Closed-form branches `G = w̄ / (z + ia ± √(x² + y² + (z + ia)²))` of the
/// Kerr family; `a = 0` gives the stereographic branches `w̄ / (z ± r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KerrBranch {
    pub a: f64,
    /// `+1` or `−1`.
    pub sign: f64,
}

impl KerrBranch {
    pub fn stereo(sign: f64) -> Self {
        Self { a: 0.0, sign }
    }

    fn parts(&self, p: &[f64; 4]) -> Result<(C64, C64, C64, C64)> {
        let [_, x, y, z] = *p;
        let zeta = C64::new(z, self.a);
        let root = (zeta * zeta + x * x + y * y).sqrt() * self.sign;
        let denom = zeta + root;
        let scale = 1.0 + (x * x + y * y + z * z).sqrt() + self.a.abs();
        if denom.norm() <= 1e-14 * scale || root.norm() <= 1e-14 * scale {
            return Err(Error::CausticPoint(format!("Kerr branch singular at {p:?}")));
        }
        Ok((C64::new(x, y), zeta, root, denom))
    }
}

impl RatioField for KerrBranch {
    fn value(&self, p: &[f64; 4]) -> Result<C64> {
        let (wbar, _, _, denom) = self.parts(p)?;
        Ok(wbar / denom)
    }

    fn gradient(&self, p: &[f64; 4]) -> Result<[C64; 4]> {
        let (wbar, zeta, root, denom) = self.parts(p)?;
        let [_, x, y, _] = *p;
        let d2 = denom * denom;
        let gx = denom.inv() - wbar * (x / root) / d2;
        let gy = C64::new(0.0, 1.0) / denom - wbar * (y / root) / d2;
        let gz = -wbar * (C64::new(1.0, 0.0) + zeta / root) / d2;
        Ok([C64::new(0.0, 0.0), gx, gy, gz])
    }
}

/// A user-supplied sampler; gradients by Richardson-extrapolated central
/// differences.
pub struct SampledRatio<F> {
    pub f: F,
    pub fd_rel: f64,
}

impl<F> RatioField for SampledRatio<F>
where
    F: Fn(&[f64; 4]) -> Result<C64> + Send + Sync,
{
    fn value(&self, p: &[f64; 4]) -> Result<C64> {
        (self.f)(p)
    }

    fn gradient(&self, p: &[f64; 4]) -> Result<[C64; 4]> {
        let norm = p.iter().map(|v| v * v).sum::<f64>().sqrt();
        fd_gradient(|q| (self.f)(&q), p, self.fd_rel * (1.0 + norm), true)
    }
}

/// `(∂u, ∂v, ∂w, ∂w̄) G` of a root of `Π` by implicit differentiation.
pub fn implicit_spinor_gradient(pi: &GenFuncProjective, sc: &SpinorCoords, g: C64) -> Result<[C64; 4]> {
    let t1 = sc.w * g + sc.u;
    let t2 = sc.v * g + sc.wbar;
    let [pg, p1, p2] = pi.partials(g, t1, t2);
    let total = pg + sc.w * p1 + sc.v * p2;
    let scale = pg.norm() + sc.w.norm() * p1.norm() + sc.v.norm() * p2.norm();
    if total.norm() <= 1e-12 * scale || total.norm() == 0.0 {
        return Err(Error::CausticPoint("total derivative of the generating function vanishes".into()));
    }
    Ok([-p1 / total, -g * p2 / total, -g * p1 / total, -p2 / total])
}

/// One branch of a polynomial generating function, followed from a
/// reference root by straight-line continuation.
#[derive(Debug, Clone)]
pub struct ImplicitBranch {
    pub pi: GenFuncProjective,
    pub anchor: [f64; 4],
    pub anchor_root: C64,
    pub steps: usize,
    pub tol: Tolerances,
}

impl ImplicitBranch {
    pub fn new(pi: GenFuncProjective, anchor: [f64; 4], anchor_root: C64, tol: Tolerances) -> Self {
        Self { pi, anchor, anchor_root, steps: 8, tol }
    }
}

fn nearest(roots: &RootSet, target: C64) -> Option<C64> {
    roots
        .roots
        .iter()
        .map(|r| r.value)
        .min_by(|a, b| (a - target).norm().total_cmp(&(b - target).norm()))
}

impl RatioField for ImplicitBranch {
    fn value(&self, p: &[f64; 4]) -> Result<C64> {
        let mut g = self.anchor_root;
        for k in 1..=self.steps {
            let s = k as f64 / self.steps as f64;
            let q: [f64; 4] = std::array::from_fn(|i| self.anchor[i] + s * (p[i] - self.anchor[i]));
            let roots = solve_branches(&self.pi, &q, &self.tol)?;
            g = nearest(&roots, g).ok_or_else(|| Error::CausticPoint("branch escaped to infinity".into()))?;
        }
        Ok(g)
    }

    fn gradient(&self, p: &[f64; 4]) -> Result<[C64; 4]> {
        let g = self.value(p)?;
        Ok(cartesian_partials(&implicit_spinor_gradient(&self.pi, &self.pi.coords(p), g)?))
    }
}

/// A branch value at a grid point; `None` is the point at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchValue {
    pub g: Option<C64>,
    pub label: usize,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub index: usize,
    /// Empty where the generating function degenerates.
    pub branches: Vec<BranchValue>,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchField {
    pub grid: Grid4,
    pub nominal_degree: usize,
    pub points: Vec<BranchPoint>,
    /// Grid points at the base corner of plaquettes around which the branch
    /// labels are permuted.
    pub monodromy: Vec<usize>,
    /// Points whose branch count disagrees with a neighbour.
    pub unmatched: Vec<usize>,
    pub label_count: usize,
}

impl BranchField {
    /// Rows `(point index, label, G)` with infinity as `None`.
    pub fn rows(&self) -> impl Iterator<Item = (usize, &BranchValue)> {
        self.points.iter().flat_map(|p| p.branches.iter().map(move |b| (p.index, b)))
    }
}

/// Chordal distance on the Riemann sphere.
pub fn chordal(a: Option<C64>, b: Option<C64>) -> f64 {
    match (a, b) {
        (None, None) => 0.0,
        (Some(a), None) | (None, Some(a)) => 1.0 / (1.0 + a.norm_sqr()).sqrt(),
        (Some(a), Some(b)) => (a - b).norm() / ((1.0 + a.norm_sqr()) * (1.0 + b.norm_sqr())).sqrt(),
    }
}

/// Optimal assignment (exhaustive up to 8 entries, greedy beyond) under the
/// chordal metric; `perm[i]` is the index in `b` matched to `a[i]`.
fn assign(a: &[Option<C64>], b: &[Option<C64>]) -> Vec<usize> {
    let n = a.len();
    if n <= 8 {
        let mut best = (f64::INFINITY, (0..n).collect::<Vec<_>>());
        let mut perm: Vec<usize> = (0..n).collect();
        fn rec(k: usize, perm: &mut Vec<usize>, a: &[Option<C64>], b: &[Option<C64>], best: &mut (f64, Vec<usize>)) {
            if k == perm.len() {
                let cost: f64 = perm.iter().enumerate().map(|(i, &j)| chordal(a[i], b[j]).powi(2)).sum();
                if cost < best.0 {
                    *best = (cost, perm.clone());
                }
                return;
            }
            for i in k..perm.len() {
                perm.swap(k, i);
                rec(k + 1, perm, a, b, best);
                perm.swap(k, i);
            }
        }
        rec(0, &mut perm, a, b, &mut best);
        return best.1;
    }
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            pairs.push((chordal(a[i], b[j]), i, j));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut out = vec![usize::MAX; n];
    let mut taken = vec![false; n];
    for (_, i, j) in pairs {
        if out[i] == usize::MAX && !taken[j] {
            out[i] = j;
            taken[j] = true;
        }
    }
    out
}

fn projective_values(roots: &RootSet) -> Vec<Option<C64>> {
    let mut v: Vec<Option<C64>> = roots.expanded().into_iter().map(Some).collect();
    v.extend(std::iter::repeat_n(None, roots.at_infinity));
    v
}

fn neighbours(grid: &Grid4, idx: [usize; 4]) -> impl Iterator<Item = [usize; 4]> + '_ {
    (1..4).flat_map(move |a| {
        let mut out = Vec::with_capacity(2);
        if idx[a] > 0 {
            let mut n = idx;
            n[a] -= 1;
            out.push(n);
        }
        if idx[a] + 1 < grid.extents[a] {
            let mut n = idx;
            n[a] += 1;
            out.push(n);
        }
        out
    })
}

/// Solves every grid point and assigns labels that are continuous along a
/// breadth-first spanning traversal. Plaquettes around which the matching
/// permutes labels are reported as monodromy cells.
pub fn branch_continue(pi: &GenFuncProjective, grid: &Grid4, tol: &Tolerances) -> Result<BranchField> {
    if grid.extents[0] != 1 {
        return Err(Error::InvalidArgument("branch_continue expects a single time slice".into()));
    }
    let n = grid.len();
    let values: Vec<Option<Vec<Option<C64>>>> = (0..n)
        .into_par_iter()
        .map(|k| match solve_branches(pi, &grid.point(grid.unflat(k)), tol) {
            Ok(r) => Ok(Some(projective_values(&r))),
            Err(Error::DegeneratePoint) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;

    // labels[k][i] is the label of the i-th value at point k.
    let mut labels: Vec<Option<Vec<usize>>> = vec![None; n];
    let mut unmatched = Vec::new();
    let mut label_count = 0;
    for seed in 0..n {
        let Some(seed_vals) = &values[seed] else { continue };
        if labels[seed].is_some() {
            continue;
        }
        labels[seed] = Some((label_count..label_count + seed_vals.len()).collect());
        label_count += seed_vals.len();
        let mut queue = std::collections::VecDeque::from([seed]);
        while let Some(k) = queue.pop_front() {
            let here = values[k].as_ref().unwrap();
            let here_labels = labels[k].clone().unwrap();
            for nb in neighbours(grid, grid.unflat(k)) {
                let j = grid.flat(nb);
                if labels[j].is_some() {
                    continue;
                }
                let Some(there) = &values[j] else { continue };
                if there.len() != here.len() {
                    unmatched.push(j);
                    continue;
                }
                let perm = assign(here, there);
                let mut l = vec![0; there.len()];
                for (i, &m) in perm.iter().enumerate() {
                    l[m] = here_labels[i];
                }
                labels[j] = Some(l);
                queue.push_back(j);
            }
        }
    }
    unmatched.sort_unstable();
    unmatched.dedup();

    let monodromy = plaquette_monodromy(grid, &values);

    let points = (0..n)
        .map(|k| match (&values[k], &labels[k]) {
            (Some(vals), Some(ls)) => {
                let mut branches: Vec<BranchValue> = Vec::with_capacity(vals.len());
                for (v, &l) in vals.iter().zip(ls) {
                    branches.push(BranchValue { g: *v, label: l, multiplicity: 1 });
                }
                mark_multiplicities(&mut branches, tol);
                BranchPoint { index: k, branches, degenerate: false }
            }
            _ => BranchPoint { index: k, branches: Vec::new(), degenerate: values[k].is_none() },
        })
        .collect();
    Ok(BranchField { grid: *grid, nominal_degree: pi.nominal_degree(), points, monodromy, unmatched, label_count })
}

fn mark_multiplicities(branches: &mut [BranchValue], tol: &Tolerances) {
    let vals: Vec<Option<C64>> = branches.iter().map(|b| b.g).collect();
    for (i, b) in branches.iter_mut().enumerate() {
        let radius = tol.cluster_rel * (1.0 + b.g.map_or(0.0, |g| g.norm()));
        b.multiplicity = vals
            .iter()
            .filter(|&&v| match (v, vals[i]) {
                (None, None) => true,
                (Some(a), Some(c)) => (a - c).norm() <= radius,
                _ => false,
            })
            .count();
    }
}

fn plaquette_monodromy(grid: &Grid4, values: &[Option<Vec<Option<C64>>>]) -> Vec<usize> {
    let n = grid.len();
    (0..n)
        .into_par_iter()
        .filter(|&k| {
            let idx = grid.unflat(k);
            for (a, b) in [(1, 2), (1, 3), (2, 3)] {
                if idx[a] + 1 >= grid.extents[a] || idx[b] + 1 >= grid.extents[b] {
                    continue;
                }
                let mut corners = [idx; 4];
                corners[1][a] += 1;
                corners[2][a] += 1;
                corners[2][b] += 1;
                corners[3][b] += 1;
                let vals: Option<Vec<&Vec<Option<C64>>>> =
                    corners.iter().map(|c| values[grid.flat(*c)].as_ref()).collect();
                let Some(vals) = vals else { continue };
                if vals.iter().any(|v| v.len() != vals[0].len()) {
                    continue;
                }
                let mut perm: Vec<usize> = (0..vals[0].len()).collect();
                for s in 0..4 {
                    let step = assign(vals[s], vals[(s + 1) % 4]);
                    perm = perm.iter().map(|&i| step[i]).collect();
                }
                if perm.iter().enumerate().any(|(i, &p)| i != p) {
                    return true;
                }
            }
            false
        })
        .collect()
}

/// Carries labels from a previous time slice by pointwise matching.
pub fn relabel_from(prev: &BranchField, cur: &mut BranchField) {
    if prev.grid.extents != cur.grid.extents {
        return;
    }
    for (p, c) in prev.points.iter().zip(cur.points.iter_mut()) {
        if p.branches.len() != c.branches.len() || p.branches.is_empty() {
            continue;
        }
        let a: Vec<Option<C64>> = p.branches.iter().map(|b| b.g).collect();
        let b: Vec<Option<C64>> = c.branches.iter().map(|b| b.g).collect();
        let perm = assign(&a, &b);
        for (i, &m) in perm.iter().enumerate() {
            c.branches[m].label = p.branches[i].label;
        }
    }
    cur.label_count = cur.label_count.max(prev.label_count);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn static_reduction_on_x_axis() {
        let pi = GenFuncProjective::static_spherical();
        let p = reduce_at_point(&pi, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(p.coeffs(), &[c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn static_reduction_on_z_axis_drops_degree() {
        let pi = GenFuncProjective::static_spherical();
        let p = reduce_at_point(&pi, &[0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(p.coeffs(), &[c(0.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)]);
        let roots = solve_branches(&pi, &[0.0, 0.0, 0.0, 1.0], &Tolerances::default()).unwrap();
        assert_eq!(roots.at_infinity, 1);
        assert_eq!(roots.values(), vec![c(0.0, 0.0)]);
    }

    #[test]
    fn linear_function() {
        let pi = GenFuncProjective::parse("t1 - 3").unwrap();
        let p = reduce_at_point(&pi, &[1.0, 0.5, 0.25, 2.0]).unwrap();
        let sc = pi.coords(&[1.0, 0.5, 0.25, 2.0]);
        assert_eq!(p.coeffs(), &[sc.u - 3.0, sc.w]);
    }

    #[test]
    fn origin_is_degenerate_for_static() {
        let pi = GenFuncProjective::static_spherical();
        assert_eq!(reduce_at_point(&pi, &[0.0; 4]), Err(Error::DegeneratePoint));
    }

    #[test]
    fn unit_x_branches() {
        let pi = GenFuncProjective::static_spherical();
        let roots = solve_branches(&pi, &[0.0, 1.0, 0.0, 0.0], &Tolerances::default()).unwrap();
        let mut v: Vec<f64> = roots.values().iter().map(|r| r.re).collect();
        v.sort_by(f64::total_cmp);
        assert_eq!(v, vec![-1.0, 1.0]);
    }

    #[test]
    fn chordal_metric_handles_infinity() {
        assert_eq!(chordal(None, None), 0.0);
        assert!((chordal(Some(c(0.0, 0.0)), None) - 1.0).abs() < 1e-15);
        assert!(chordal(Some(c(1e8, 0.0)), None) < 1e-7);
    }

    #[test]
    fn kerr_branch_gradient_matches_fd() {
        let b = KerrBranch { a: 0.7, sign: 1.0 };
        let p = [0.0, 0.4, -1.1, 0.6];
        let exact = b.gradient(&p).unwrap();
        let fd = fd_gradient(|q| b.value(&q), &p, 1e-3, true).unwrap();
        for k in 0..4 {
            assert!((exact[k] - fd[k]).norm() < 1e-9, "{k}: {} vs {}", exact[k], fd[k]);
        }
    }
}
