//! Root trajectories of a one-parameter polynomial family.

use serde::{Deserialize, Serialize};

use super::poly::{CPoly, C64};
use super::resultant::discriminant;
use super::roots::poly_roots_with;
use crate::config::Tolerances;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrackEventKind {
    /// Two trajectories meet (discriminant zero between or at samples).
    Collision,
    /// Fewer finite roots than at the previous sample.
    DegreeDrop,
    /// More finite roots than at the previous sample.
    DegreeRise,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackEvent {
    pub kind: TrackEventKind,
    pub param: f64,
    pub labels: Vec<usize>,
    pub location: Option<C64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub label: usize,
    /// Aligned with the parameter grid; `None` where the trajectory is not alive.
    pub samples: Vec<Option<C64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tracked {
    pub params: Vec<f64>,
    pub trajectories: Vec<Trajectory>,
    pub events: Vec<TrackEvent>,
    /// Roots at infinity per sample.
    pub at_infinity: Vec<usize>,
}

impl Tracked {
    /// All finite root values alive at sample `k`, in label order.
    pub fn roots_at(&self, k: usize) -> Vec<(usize, C64)> {
        self.trajectories
            .iter()
            .filter_map(|tr| tr.samples[k].map(|v| (tr.label, v)))
            .collect()
    }
}

/// Exhaustive for small sets, greedy by ascending distance otherwise.
/// Returns, for each previous index, the matched current index.
pub(crate) fn match_points(prev: &[C64], cur: &[C64]) -> Vec<Option<usize>> {
    let n = prev.len().min(cur.len());
    if prev.len() == cur.len() && n <= 8 && n > 0 {
        let mut best_cost = f64::INFINITY;
        let mut best: Vec<usize> = (0..n).collect();
        let mut perm: Vec<usize> = (0..n).collect();
        permute(&mut perm, 0, &mut |p| {
            let cost: f64 = p.iter().enumerate().map(|(i, &j)| (prev[i] - cur[j]).norm_sqr()).sum();
            if cost < best_cost {
                best_cost = cost;
                best.copy_from_slice(p);
            }
        });
        return best.into_iter().map(Some).collect();
    }
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(prev.len() * cur.len());
    for (i, a) in prev.iter().enumerate() {
        for (j, b) in cur.iter().enumerate() {
            pairs.push(((a - b).norm(), i, j));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out = vec![None; prev.len()];
    let mut taken = vec![false; cur.len()];
    for (_, i, j) in pairs {
        if out[i].is_none() && !taken[j] {
            out[i] = Some(j);
            taken[j] = true;
        }
    }
    out
}

fn permute(p: &mut [usize], k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        visit(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, visit);
        p.swap(k, i);
    }
}

fn real_disc(p: &CPoly) -> Option<f64> {
    if p.nominal_degree() < 2 {
        return None;
    }
    let d = discriminant(p).ok()?;
    (d.im.abs() <= 1e-9 * d.norm().max(f64::MIN_POSITIVE)).then_some(d.re)
}

/// Parameter in `[a, b]` where the discriminant of the family vanishes:
/// bisection on a real sign change, otherwise golden-section minimisation of
/// `|disc|`.
pub fn refine_collision<F>(family: &F, a: f64, b: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<CPoly>,
{
    let disc = |s: f64| -> Result<C64> { discriminant(&family(s)?) };
    let (da, db) = (disc(a)?, disc(b)?);
    let real = |d: C64| d.im.abs() <= 1e-9 * d.norm().max(f64::MIN_POSITIVE);
    if da.re == 0.0 && real(da) {
        return Ok(a);
    }
    if db.re == 0.0 && real(db) {
        return Ok(b);
    }
    if real(da) && real(db) && da.re.signum() != db.re.signum() {
        let (mut lo, mut hi, mut flo) = (a, b, da.re);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let fm = disc(mid)?.re;
            if fm == 0.0 {
                return Ok(mid);
            }
            if fm.signum() == flo.signum() {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        return Ok(0.5 * (lo + hi));
    }
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (a, b);
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let (mut fc, mut fd) = (disc(c)?.norm(), disc(d)?.norm());
    for _ in 0..200 {
        if hi - lo <= 1e-15 * (1.0 + lo.abs()) {
            break;
        }
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = disc(c)?.norm();
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = disc(d)?.norm();
        }
    }
    Ok(0.5 * (lo + hi))
}

fn closest_pair(points: &[(usize, C64)]) -> Option<(f64, usize, usize, C64)> {
    let mut best: Option<(f64, usize, usize, C64)> = None;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = (points[i].1 - points[j].1).norm();
            if best.is_none_or(|b| d < b.0) {
                best = Some((d, points[i].0, points[j].0, 0.5 * (points[i].1 + points[j].1)));
            }
        }
    }
    best
}

/// Follows every finite root of `family(s)` across `grid`.
pub fn root_track<F>(family: F, grid: &[f64], tol: &Tolerances) -> Result<Tracked>
where
    F: Fn(f64) -> Result<CPoly>,
{
    if grid.len() < 2 {
        return Err(Error::InvalidArgument("parameter grid needs at least two samples".into()));
    }
    let increasing = grid[1] > grid[0];
    if grid.windows(2).any(|w| (w[1] > w[0]) != increasing || w[1] == w[0]) {
        return Err(Error::InvalidArgument("parameter grid must be strictly monotone".into()));
    }
    let n = grid.len();
    let polys: Vec<CPoly> = grid.iter().map(|&s| family(s)).collect::<Result<_>>()?;
    let mut sets = Vec::with_capacity(n);
    for p in &polys {
        sets.push(poly_roots_with(p, tol)?);
    }

    let mut trajectories: Vec<Trajectory> = Vec::new();
    let mut alive: Vec<usize> = Vec::new();
    let mut events = Vec::new();
    for v in sets[0].expanded() {
        let mut samples = vec![None; n];
        samples[0] = Some(v);
        alive.push(trajectories.len());
        trajectories.push(Trajectory { label: trajectories.len(), samples });
    }

    for k in 1..n {
        let cur = sets[k].expanded();
        let prev: Vec<C64> = alive.iter().map(|&l| trajectories[l].samples[k - 1].unwrap()).collect();
        if cur.len() != prev.len() {
            events.push(TrackEvent {
                kind: if cur.len() < prev.len() { TrackEventKind::DegreeDrop } else { TrackEventKind::DegreeRise },
                param: grid[k],
                labels: alive.clone(),
                location: None,
            });
        }
        let assignment = match_points(&prev, &cur);
        let mut used = vec![false; cur.len()];
        let mut next_alive = Vec::with_capacity(cur.len());
        for (slot, m) in alive.iter().zip(&assignment) {
            if let Some(j) = *m {
                trajectories[*slot].samples[k] = Some(cur[j]);
                used[j] = true;
                next_alive.push(*slot);
            }
        }
        for (j, v) in cur.iter().enumerate() {
            if !used[j] {
                let mut samples = vec![None; n];
                samples[k] = Some(*v);
                next_alive.push(trajectories.len());
                trajectories.push(Trajectory { label: trajectories.len(), samples });
            }
        }
        alive = next_alive;

        let same_degree = polys[k].nominal_degree() == polys[k - 1].nominal_degree();
        let (da, db) = (real_disc(&polys[k - 1]), real_disc(&polys[k]));
        let sign_change = matches!((da, db), (Some(a), Some(b)) if a != 0.0 && b != 0.0 && a.signum() != b.signum());
        let here: Vec<(usize, C64)> = alive.iter().map(|&l| (l, trajectories[l].samples[k].unwrap())).collect();
        let near = closest_pair(&here).filter(|c| c.0 <= tol.collision_eps * (1.0 + c.3.norm()));
        if same_degree && sign_change {
            let s = refine_collision(&family, grid[k - 1], grid[k])?;
            let at = poly_roots_with(&family(s)?, tol)?;
            let loc = at.roots.iter().find(|r| r.multiplicity >= 2).map(|r| r.value);
            let labels = closest_pair(&here).map(|c| vec![c.1, c.2]).unwrap_or_default();
            events.push(TrackEvent { kind: TrackEventKind::Collision, param: s, labels, location: loc });
        } else if let Some((_, a, b, loc)) = near {
            let dup = events.iter().any(|e: &TrackEvent| {
                e.kind == TrackEventKind::Collision && (e.param - grid[k]).abs() <= (grid[k] - grid[k - 1]).abs()
            });
            if !dup {
                events.push(TrackEvent {
                    kind: TrackEventKind::Collision,
                    param: grid[k],
                    labels: vec![a, b],
                    location: Some(loc),
                });
            }
        }
    }
    events.sort_by(|a, b| {
        let o = a.param.total_cmp(&b.param);
        if increasing { o } else { o.reverse() }
    });
    let at_infinity = sets.iter().map(|s| s.at_infinity).collect();
    Ok(Tracked { params: grid.to_vec(), trajectories, events, at_infinity })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn square_root_family_collides_at_zero() {
        let fam = |t: f64| Ok(CPoly::from_real(&[-t, 0.0, 1.0]));
        let tr = root_track(fam, &linspace(-1.0, 1.0, 40), &Tolerances::default()).unwrap();
        let hits: Vec<_> = tr.events.iter().filter(|e| e.kind == TrackEventKind::Collision).collect();
        assert_eq!(hits.len(), 1);
        assert!(hits[0].param.abs() < 1e-12);
        let first = tr.roots_at(0);
        assert!(first.iter().all(|(_, v)| v.im.abs() > 0.5));
        let last = tr.roots_at(39);
        assert!(last.iter().all(|(_, v)| v.im.abs() < 1e-12));
    }

    #[test]
    fn constant_family_has_no_events() {
        let fam = |_: f64| Ok(CPoly::from_real(&[1.0, 0.0, 1.0]));
        let tr = root_track(fam, &linspace(0.0, 1.0, 10), &Tolerances::default()).unwrap();
        assert_eq!(tr.trajectories.len(), 2);
        assert!(tr.events.is_empty());
    }

    #[test]
    fn three_separated_roots_stay_labelled() {
        let fam = |t: f64| {
            Ok(CPoly::from_roots(&[C64::new(t, 0.0), C64::new(2.0 * t, 0.0), C64::new(-1.0, 0.0)]))
        };
        let grid = linspace(0.1, 1.0, 30);
        let tr = root_track(fam, &grid, &Tolerances::default()).unwrap();
        assert_eq!(tr.trajectories.len(), 3);
        assert!(tr.events.is_empty());
        for traj in &tr.trajectories {
            let v0 = traj.samples[0].unwrap().re;
            let ratio = v0 / grid[0];
            for (k, s) in traj.samples.iter().enumerate() {
                let expect = if (v0 + 1.0).abs() < 1e-9 { -1.0 } else { ratio * grid[k] };
                assert!((s.unwrap().re - expect).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn non_monotone_grid_rejected() {
        let fam = |_: f64| Ok(CPoly::from_real(&[1.0, 1.0]));
        assert!(root_track(fam, &[0.0, 1.0, 0.5], &Tolerances::default()).is_err());
    }
}
