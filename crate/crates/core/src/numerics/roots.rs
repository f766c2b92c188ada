//! Simultaneous polynomial root finding.
//!
//! Aberth–Ehrlich iteration on the trimmed polynomial, with a companion
//! matrix eigenvalue fallback when it stalls. Roots closer than the cluster
//! radius are merged into a single root with multiplicity.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::poly::{CPoly, C64};
use crate::config::Tolerances;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub value: C64,
    pub multiplicity: usize,
}

/// All roots of a polynomial family member, including those lost to infinity
/// through a vanishing leading coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    pub roots: Vec<Root>,
    pub at_infinity: usize,
    pub nominal_degree: usize,
}

impl RootSet {
    pub fn finite_count(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    pub fn total_count(&self) -> usize {
        self.finite_count() + self.at_infinity
    }

    pub fn has_multiple(&self) -> bool {
        self.at_infinity > 1 || self.roots.iter().any(|r| r.multiplicity > 1)
    }

    /// Finite roots repeated by multiplicity.
    pub fn expanded(&self) -> Vec<C64> {
        self.roots
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.value, r.multiplicity))
            .collect()
    }

    pub fn values(&self) -> Vec<C64> {
        self.roots.iter().map(|r| r.value).collect()
    }
}

/// Roots of `p` using the default tolerances.
pub fn poly_roots(p: &CPoly) -> Result<RootSet> {
    poly_roots_with(p, &Tolerances::default())
}

pub fn poly_roots_with(p: &CPoly, tol: &Tolerances) -> Result<RootSet> {
    p.require_nonzero()?;
    let nominal = p.nominal_degree();
    if nominal == 0 {
        return Err(Error::DegreeTooLow { needed: 1, got: 0 });
    }
    let degree = p.effective_degree(tol.infinity_rel).unwrap_or(0);
    let at_infinity = nominal - degree;
    let trimmed = p.trimmed(tol.infinity_rel);

    // Exact zeros at the origin are split off before iterating.
    let zeros = trimmed.coeffs().iter().take_while(|c| c.norm() == 0.0).count();
    let reduced = CPoly::new(trimmed.coeffs()[zeros..].to_vec());

    let mut raw = vec![C64::new(0.0, 0.0); zeros];
    if reduced.nominal_degree() > 0 {
        raw.extend(simple_roots(&reduced, tol));
    }
    let roots = cluster(&trimmed, raw, tol);
    Ok(RootSet { roots, at_infinity, nominal_degree: nominal })
}

fn simple_roots(p: &CPoly, tol: &Tolerances) -> Vec<C64> {
    let n = p.nominal_degree();
    let lead = p.leading();
    let monic = p.scale(lead.inv());
    match n {
        1 => return vec![-monic.coeffs()[0]],
        2 => {
            let (b, c) = (monic.coeffs()[1], monic.coeffs()[0]);
            let disc = (b * b - c * 4.0).sqrt();
            // Choose the sign that avoids cancellation.
            let q = if (b.conj() * disc).re >= 0.0 { -(b + disc) * 0.5 } else { -(b - disc) * 0.5 };
            let roots = if q.norm() == 0.0 {
                vec![C64::new(0.0, 0.0); 2]
            } else {
                vec![q, c / q]
            };
            return roots.into_iter().map(|r| polish(&monic, r)).collect();
        }
        _ => {}
    }
    let mut z = aberth(&monic, tol).unwrap_or_else(|| companion_eigenvalues(&monic));
    for r in z.iter_mut() {
        *r = polish(&monic, *r);
    }
    z
}

fn initial_guesses(p: &CPoly, seed: u64) -> Vec<C64> {
    let n = p.nominal_degree();
    let a0 = p.coeffs()[0].norm();
    let bound = p.coeffs()[..n]
        .iter()
        .enumerate()
        .map(|(k, c)| c.norm().powf(1.0 / (n - k) as f64))
        .fold(0.0, f64::max);
    let radius = if a0 > 0.0 { a0.powf(1.0 / n as f64) } else { 0.5 * bound.max(1e-3) };
    let offset: f64 = ChaCha8Rng::seed_from_u64(seed).random_range(0.0..std::f64::consts::TAU);
    let centre = -p.coeffs()[n - 1] / n as f64;
    (0..n)
        .map(|k| {
            let angle = std::f64::consts::TAU * k as f64 / n as f64 + offset + 0.4;
            centre + C64::from_polar(radius.max(1e-8), angle)
        })
        .collect()
}

/// Aberth–Ehrlich iteration on a monic polynomial. `None` when it stalls.
fn aberth(p: &CPoly, tol: &Tolerances) -> Option<Vec<C64>> {
    let n = p.nominal_degree();
    let mut z = initial_guesses(p, tol.seed);
    let mut done = vec![false; n];
    for _ in 0..tol.max_iterations {
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (v, dv) = p.eval_with_derivative(z[i]);
            if v.norm() == 0.0 {
                done[i] = true;
                continue;
            }
            let ratio = v / dv;
            let repulsion: C64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d.norm() == 0.0 { C64::new(0.0, 0.0) } else { d.inv() }
                })
                .sum();
            let step = ratio / (C64::new(1.0, 0.0) - ratio * repulsion);
            if !step.is_finite() {
                return None;
            }
            z[i] -= step;
            if step.norm() <= 4.0 * f64::EPSILON * (1.0 + z[i].norm()) {
                done[i] = true;
            }
        }
        if done.iter().all(|&d| d) {
            return Some(z);
        }
    }
    // Slow linear convergence near multiple roots still lands inside the
    // cluster radius; accept if every residual is small.
    let scale: f64 = p.coeffs().iter().map(|c| c.norm()).sum();
    let ok = z.iter().all(|&r| {
        let mag = r.norm().max(1.0).powi(n as i32);
        p.eval(r).norm() <= 1e-6 * scale * mag
    });
    ok.then_some(z)
}

fn companion_eigenvalues(p: &CPoly) -> Vec<C64> {
    let n = p.nominal_degree();
    let mut m = DMatrix::<C64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..n {
        m[(i, n - 1)] = -p.coeffs()[i];
    }
    m.schur().eigenvalues().map(|v| v.iter().copied().collect()).unwrap_or_default()
}

/// Newton refinement, accepted only while the residual keeps shrinking.
fn polish(p: &CPoly, mut r: C64) -> C64 {
    let mut best = p.eval(r).norm();
    for _ in 0..8 {
        let (v, dv) = p.eval_with_derivative(r);
        if dv.norm() == 0.0 || v.norm() == 0.0 {
            break;
        }
        let cand = r - v / dv;
        let res = p.eval(cand).norm();
        if !(res < best) {
            break;
        }
        best = res;
        r = cand;
    }
    r
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut root = i;
    while parent[root] != root {
        root = parent[root];
    }
    let mut cur = i;
    while parent[cur] != root {
        let next = parent[cur];
        parent[cur] = root;
        cur = next;
    }
    root
}

fn group(values: &[C64], radius: impl Fn(C64, C64) -> f64) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= radius(values[i], values[j]) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut index = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if index[r] == usize::MAX {
            index[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[index[r]].push(i);
    }
    groups
}

fn centroid(values: &[C64], members: &[usize]) -> C64 {
    members.iter().map(|&i| values[i]).sum::<C64>() / members.len() as f64
}

/// Taylor coefficients `p^(j)(c) / j!` for `j = 0..=k`.
fn taylor(p: &CPoly, c: C64, k: usize) -> Vec<C64> {
    let shifted = p.shifted(c);
    (0..=k).map(|j| shifted.coeffs().get(j).copied().unwrap_or_default()).collect()
}

/// Rounding-error bound for each Taylor coefficient at `c`, from the same
/// shift applied to the coefficient magnitudes at `|c|`.
fn taylor_noise(p: &CPoly, c: C64, k: usize) -> Vec<f64> {
    let magnitudes = CPoly::new(p.coeffs().iter().map(|a| C64::new(a.norm(), 0.0)).collect());
    let shifted = magnitudes.shifted(C64::new(c.norm(), 0.0));
    (0..=k)
        .map(|j| 64.0 * f64::EPSILON * shifted.coeffs().get(j).map_or(0.0, |v| v.re))
        .collect()
}

fn cluster(p: &CPoly, raw: Vec<C64>, tol: &Tolerances) -> Vec<Root> {
    let rel = tol.cluster_rel;
    let tight = group(&raw, |a, b| rel * (1.0 + a.norm().max(b.norm())));
    let mut merged: Vec<Root> = tight
        .iter()
        .map(|g| Root { value: centroid(&raw, g), multiplicity: g.len() })
        .collect();

    // Higher multiplicities spread as eps^(1/m); confirm looser clusters by
    // checking that the centroid annihilates the low Taylor coefficients.
    let values: Vec<C64> = merged.iter().map(|r| r.value).collect();
    let loose = group(&values, |a, b| 1e3 * rel * (1.0 + a.norm().max(b.norm())));
    let mut out = Vec::new();
    for g in loose {
        if g.len() == 1 {
            out.push(merged[g[0]]);
            continue;
        }
        let k: usize = g.iter().map(|&i| merged[i].multiplicity).sum();
        let c = g.iter().map(|&i| merged[i].value * merged[i].multiplicity as f64).sum::<C64>()
            / k as f64;
        let t = taylor(p, c, k);
        let noise = taylor_noise(p, c, k);
        let top = t[k].norm();
        let radius = rel * (1.0 + c.norm());
        let is_multiple = top > 0.0
            && (0..k).all(|j| {
                let signal = (t[j].norm() - noise[j]).max(0.0);
                (signal / top).powf(1.0 / (k - j) as f64) <= radius
            });
        if is_multiple {
            out.push(Root { value: c, multiplicity: k });
        } else {
            out.extend(g.iter().map(|&i| merged[i]));
        }
    }
    merged.clear();
    out.sort_by(|a, b| {
        a.value.re.partial_cmp(&b.value.re).unwrap().then(a.value.im.partial_cmp(&b.value.im).unwrap())
    });
    out
}
