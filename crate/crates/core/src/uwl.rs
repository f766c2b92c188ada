//! Unique-worldline dynamics: light-cone roots ("duplicons") of a polynomial
//! worldline seen by an observer, roots of implicit polynomial systems, and
//! the events, conservation sums and clustering statistics built on them.

use serde::{Deserialize, Serialize};

use crate::biquat::{complex_point, Spinor};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::numerics::{poly_roots_with, root_track, solve_system, system_eliminant, CPoly, MPoly, TrackEventKind, Tracked, C64};

pub const MAX_WORLDLINE_DEGREE: usize = 6;
pub const MAX_IMPLICIT_DEGREE: u32 = 4;
pub const IMPLICIT_VARS: [&str; 4] = ["t", "x", "y", "z"];

const ETA: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

fn eta_dot(a: &[C64; 4], b: &[C64; 4]) -> C64 {
    (0..4).map(|m| a[m] * b[m] * ETA[m]).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RootClass {
    R,
    C,
}

impl RootClass {
    pub fn of(z: C64, eps_real: f64) -> Self {
        if z.im.abs() <= eps_real * (1.0 + z.norm()) { RootClass::R } else { RootClass::C }
    }
}

/// `x^μ(σ)` with each coordinate a polynomial of degree at most six.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyWorldline {
    coords: [CPoly; 4],
}

impl PolyWorldline {
    pub fn new(coords: [CPoly; 4]) -> Result<Self> {
        let degs: Vec<usize> = coords.iter().map(|c| c.effective_degree(0.0).unwrap_or(0)).collect();
        if degs.iter().any(|&d| d > MAX_WORLDLINE_DEGREE) {
            return Err(Error::DegreeCap(format!("worldline degree exceeds {MAX_WORLDLINE_DEGREE}")));
        }
        if degs.iter().all(|&d| d == 0) {
            return Err(Error::InvalidArgument("worldline has no non-constant coordinate".into()));
        }
        Ok(Self { coords: coords.map(|c| c.trimmed(0.0)) })
    }

    pub fn from_real(coords: [&[f64]; 4]) -> Result<Self> {
        Self::new(coords.map(CPoly::from_real))
    }

    /// Each coordinate in the polynomial grammar over the variable `s`.
    pub fn parse(texts: [&str; 4]) -> Result<Self> {
        let mut out = Vec::with_capacity(4);
        for t in texts {
            out.push(MPoly::parse(t, &["s"])?.to_univariate(0, &[zero()]));
        }
        let coords: [CPoly; 4] = out.try_into().expect("four coordinates");
        Self::new(coords)
    }

    /// `x(σ) = (σ, 0, 0, 0)`.
    pub fn static_particle() -> Self {
        Self::from_real([&[0.0, 1.0], &[0.0], &[0.0], &[0.0]]).expect("static worldline")
    }

    /// `X(τ) = origin + velocity·τ`.
    pub fn inertial(origin: [f64; 4], velocity: [f64; 4]) -> Result<Self> {
        let c: [[f64; 2]; 4] = std::array::from_fn(|m| [origin[m], velocity[m]]);
        Self::from_real([&c[0], &c[1], &c[2], &c[3]])
    }

    pub fn coords(&self) -> &[CPoly; 4] {
        &self.coords
    }

    pub fn degree(&self) -> usize {
        self.coords.iter().map(|c| c.effective_degree(0.0).unwrap_or(0)).max().unwrap_or(0)
    }

    pub fn is_real(&self) -> bool {
        self.coords.iter().all(|c| c.is_real(0.0))
    }

    pub fn position(&self, s: C64) -> [C64; 4] {
        std::array::from_fn(|m| self.coords[m].eval(s))
    }

    /// `dx/dσ`.
    pub fn velocity(&self, s: C64) -> [C64; 4] {
        std::array::from_fn(|m| self.coords[m].eval_with_derivative(s).1)
    }

    pub fn position_real(&self, s: f64) -> [C64; 4] {
        self.position(C64::new(s, 0.0))
    }
}

/// `(X⁰ − x⁰(σ))² − Σ (Xᵃ − xᵃ(σ))²` as a polynomial in `σ`.
pub fn lce_polynomial(wl: &PolyWorldline, x: &[C64; 4]) -> Result<CPoly> {
    let mut p = CPoly::new(vec![zero()]);
    for m in 0..4 {
        let d = &CPoly::constant(x[m]) - &wl.coords[m];
        let sq = &d * &d;
        p = if m == 0 { &p + &sq } else { &p - &sq };
    }
    let n = 2 * wl.degree();
    let mut coeffs = p.coeffs().to_vec();
    coeffs.resize(n + 1, zero());
    let p = CPoly::new(coeffs);
    if p.is_zero() {
        return Err(Error::ObserverOnWorldline);
    }
    Ok(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Duplicon {
    pub sigma: C64,
    pub class: RootClass,
    pub multiplicity: usize,
    pub position: [C64; 4],
    /// `dx/dσ` at the root.
    pub velocity: [C64; 4],
}

fn check_coincident(wl: &PolyWorldline, x: &[C64; 4], s: C64) -> Result<()> {
    let pos = wl.position(s);
    let scale = 1.0 + x.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let gap = (0..4).map(|m| (x[m] - pos[m]).norm()).fold(0.0, f64::max);
    if gap <= 1e-9 * scale {
        return Err(Error::ObserverOnWorldline);
    }
    Ok(())
}

/// Every root of the light-cone equation, classified R or C.
pub fn duplicons(wl: &PolyWorldline, x: &[C64; 4], tol: &Tolerances) -> Result<Vec<Duplicon>> {
    let p = lce_polynomial(wl, x)?;
    let roots = poly_roots_with(&p, tol)?;
    roots
        .roots
        .iter()
        .map(|r| {
            check_coincident(wl, x, r.value)?;
            Ok(Duplicon {
                sigma: r.value,
                class: RootClass::of(r.value, tol.eps_real),
                multiplicity: r.multiplicity,
                position: wl.position(r.value),
                velocity: wl.velocity(r.value),
            })
        })
        .collect()
}

/// Largest distance from a C duplicon to the conjugate of its nearest
/// partner (zero for a real worldline and a real observer).
pub fn conjugate_defect(ds: &[Duplicon]) -> f64 {
    ds.iter()
        .filter(|d| d.class == RootClass::C)
        .map(|d| ds.iter().map(|e| (e.sigma - d.sigma.conj()).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// Kernel spinor of the rank-one matrix `X − x(σ)`.
pub fn twistor_of_duplicon(wl: &PolyWorldline, x: &[C64; 4], sigma: C64, tol: &Tolerances) -> Result<Spinor> {
    let pos = wl.position(sigma);
    let delta = complex_point(std::array::from_fn(|m| x[m] - pos[m]));
    let norm = delta.norm();
    let scale = 1.0 + x.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if norm <= 1e-12 * scale {
        return Err(Error::CoincidentPoint);
    }
    let det = delta.0.determinant();
    if det.norm() > tol.light_cone * norm.max(1.0).powi(2) {
        return Err(Error::NotOnLightCone(det.norm()));
    }
    let rows = [(delta.get(0, 0), delta.get(0, 1)), (delta.get(1, 0), delta.get(1, 1))];
    let (a, b) = if rows[0].0.norm_sqr() + rows[0].1.norm_sqr() >= rows[1].0.norm_sqr() + rows[1].1.norm_sqr() {
        rows[0]
    } else {
        rows[1]
    };
    Spinor::new(-b, a).normalized()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Annihilation,
    Creation,
    Merge,
}

/// Null ray from a merge point on the (possibly complexified) worldline to
/// the observer event that sees it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Photon {
    pub emission: [C64; 4],
    pub reception: [C64; 4],
    pub direction: [C64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UwlEvent {
    pub time: f64,
    pub kind: EventKind,
    /// Trajectory labels of the merging roots.
    pub participants: Vec<usize>,
    /// Root value (σ for worldlines, generic coordinate for implicit systems).
    pub root: Option<C64>,
    pub location: Option<Vec<C64>>,
    pub photon: Option<Photon>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EventLog {
    pub events: Vec<UwlEvent>,
}

impl EventLog {
    pub fn is_time_ordered(&self) -> bool {
        self.events.windows(2).all(|w| w[0].time <= w[1].time)
    }

    pub fn count(&self, kind: EventKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }
}

fn real_count(tracked: &Tracked, k: usize, eps_real: f64) -> usize {
    tracked.roots_at(k).iter().filter(|(_, v)| RootClass::of(*v, eps_real) == RootClass::R).count()
}

/// Classifies each collision by the change in the number of real roots
/// across it.
fn classify(tracked: &Tracked, eps_real: f64) -> Vec<(f64, EventKind, Vec<usize>, Option<C64>)> {
    let grid = &tracked.params;
    let n = grid.len();
    tracked
        .events
        .iter()
        .filter(|e| e.kind == TrackEventKind::Collision)
        .map(|e| {
            let after = grid.iter().position(|&g| (g - e.param) * (grid[1] - grid[0]) > 0.0).unwrap_or(n - 1);
            let before = grid
                .iter()
                .rposition(|&g| (e.param - g) * (grid[1] - grid[0]) > 0.0)
                .unwrap_or(0);
            let (rb, ra) = (real_count(tracked, before, eps_real), real_count(tracked, after, eps_real));
            let kind = if ra + 2 <= rb {
                EventKind::Annihilation
            } else if rb + 2 <= ra {
                EventKind::Creation
            } else {
                EventKind::Merge
            };
            (e.param, kind, e.labels.clone(), e.location)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evolution {
    pub tracked: Tracked,
    pub events: EventLog,
    /// True when the observer moves uniformly (degree ≤ 1); otherwise the
    /// run is diagnostic only.
    pub inertial_observer: bool,
}

/// Follows the duplicons of `wl` along the observer's worldline.
pub fn evolve(wl: &PolyWorldline, observer: &PolyWorldline, taus: &[f64], tol: &Tolerances) -> Result<Evolution> {
    let family = |tau: f64| lce_polynomial(wl, &observer.position_real(tau));
    for &tau in taus {
        duplicons(wl, &observer.position_real(tau), tol)?;
    }
    let tracked = root_track(family, taus, tol)?;
    let mut events = Vec::new();
    for (time, kind, participants, root) in classify(&tracked, tol.eps_real) {
        let reception = observer.position_real(time);
        let (sigma, photon) = match root {
            Some(s) => {
                let emission = wl.position(s);
                let direction = std::array::from_fn(|m| reception[m] - emission[m]);
                (Some(s), Some(Photon { emission, reception, direction }))
            }
            None => (None, None),
        };
        events.push(UwlEvent {
            time,
            kind,
            participants,
            root: sigma,
            location: photon.map(|p| p.emission.to_vec()),
            photon,
        });
    }
    Ok(Evolution { tracked, events: EventLog { events }, inertial_observer: observer.degree() <= 1 })
}

/// Time series of the collective sums over all duplicons, with real-only
/// subtotals. Velocities are `dx/dτ` along the observer's proper parameter,
/// obtained from `dσ/dτ = −∂τP / ∂σP` on the light-cone polynomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    pub times: Vec<f64>,
    /// `Σ ẋ^μ`.
    pub momentum: Vec<[C64; 4]>,
    /// `Σ (ẋ^μ x^ν − ẋ^ν x^μ)`.
    pub angular_momentum: Vec<[[C64; 4]; 4]>,
    /// `Σ ẋ_a ẋ_a / 2` over spatial components. An interpretation: the
    /// name is suggestive, the expression is not derived.
    pub energy_analogue: Vec<C64>,
    pub real_momentum: Vec<[C64; 4]>,
    pub real_angular_momentum: Vec<[[C64; 4]; 4]>,
    pub real_energy_analogue: Vec<C64>,
    pub max_momentum_deviation: f64,
    pub max_angular_momentum_deviation: f64,
    pub max_energy_deviation: f64,
    /// False if some sample had roots at infinity or a multiple root (where
    /// `dσ/dτ` is undefined); such samples are excluded from the deviations.
    pub complete: bool,
    pub inertial_observer: bool,
    pub eps_real: f64,
}

impl ConservationReport {
    /// True when the sums are only diagnostic (accelerated observer).
    pub fn flagged_non_conservative(&self) -> bool {
        !self.inertial_observer
    }
}

#[derive(Default, Clone, Copy)]
struct Sums {
    p: [C64; 4],
    l: [[C64; 4]; 4],
    e: C64,
}

impl Sums {
    fn add(&mut self, x: &[C64; 4], v: &[C64; 4]) {
        for m in 0..4 {
            self.p[m] += v[m];
            for n in 0..4 {
                self.l[m][n] += v[m] * x[n] - v[n] * x[m];
            }
        }
        self.e += (v[1] * v[1] + v[2] * v[2] + v[3] * v[3]) * 0.5;
    }
}

pub fn conservation_report(
    wl: &PolyWorldline,
    observer: &PolyWorldline,
    taus: &[f64],
    tol: &Tolerances,
) -> Result<ConservationReport> {
    if taus.is_empty() {
        return Err(Error::InvalidArgument("empty parameter grid".into()));
    }
    let mut rep = ConservationReport {
        times: taus.to_vec(),
        momentum: Vec::new(),
        angular_momentum: Vec::new(),
        energy_analogue: Vec::new(),
        real_momentum: Vec::new(),
        real_angular_momentum: Vec::new(),
        real_energy_analogue: Vec::new(),
        max_momentum_deviation: 0.0,
        max_angular_momentum_deviation: 0.0,
        max_energy_deviation: 0.0,
        complete: true,
        inertial_observer: observer.degree() <= 1,
        eps_real: tol.eps_real,
    };
    let mut valid = Vec::with_capacity(taus.len());
    for &tau in taus {
        let x = observer.position_real(tau);
        let xdot = observer.velocity(C64::new(tau, 0.0));
        let p = lce_polynomial(wl, &x)?;
        let roots = poly_roots_with(&p, tol)?;
        let mut ok = roots.at_infinity == 0;
        let (mut all, mut real) = (Sums::default(), Sums::default());
        for r in &roots.roots {
            check_coincident(wl, &x, r.value)?;
            if r.multiplicity > 1 {
                ok = false;
                continue;
            }
            let s = newton_polish(&p, r.value);
            let pos = wl.position(s);
            let vel = wl.velocity(s);
            let delta: [C64; 4] = std::array::from_fn(|m| x[m] - pos[m]);
            let sdot = eta_dot(&xdot, &delta) / eta_dot(&vel, &delta);
            let v: [C64; 4] = std::array::from_fn(|m| vel[m] * sdot);
            all.add(&pos, &v);
            if RootClass::of(s, tol.eps_real) == RootClass::R {
                real.add(&pos, &v);
            }
        }
        rep.complete &= ok;
        valid.push(ok);
        rep.momentum.push(all.p);
        rep.angular_momentum.push(all.l);
        rep.energy_analogue.push(all.e);
        rep.real_momentum.push(real.p);
        rep.real_angular_momentum.push(real.l);
        rep.real_energy_analogue.push(real.e);
    }
    if let Some(k0) = valid.iter().position(|&v| v) {
        for k in (0..taus.len()).filter(|&k| valid[k]) {
            let dp = (0..4).map(|m| (rep.momentum[k][m] - rep.momentum[k0][m]).norm()).fold(0.0, f64::max);
            let dl = (0..16)
                .map(|i| (rep.angular_momentum[k][i / 4][i % 4] - rep.angular_momentum[k0][i / 4][i % 4]).norm())
                .fold(0.0, f64::max);
            let de = (rep.energy_analogue[k] - rep.energy_analogue[k0]).norm();
            rep.max_momentum_deviation = rep.max_momentum_deviation.max(dp);
            rep.max_angular_momentum_deviation = rep.max_angular_momentum_deviation.max(dl);
            rep.max_energy_deviation = rep.max_energy_deviation.max(de);
        }
    }
    Ok(rep)
}

fn newton_polish(p: &CPoly, mut s: C64) -> C64 {
    let mut best = p.eval(s).norm();
    for _ in 0..8 {
        let (f, df) = p.eval_with_derivative(s);
        if df.norm() == 0.0 || best == 0.0 {
            break;
        }
        let cand = s - f / df;
        let r = p.eval(cand).norm();
        if !(r < best) {
            break;
        }
        s = cand;
        best = r;
    }
    s
}

/// Three polynomials `F_a(t, x, y, z)` of total degree at most four.
#[derive(Debug, Clone, PartialEq)]
pub struct ImplicitUWL {
    polys: [MPoly; 3],
}

impl ImplicitUWL {
    pub fn new(polys: [MPoly; 3]) -> Result<Self> {
        for p in &polys {
            if p.vars() != IMPLICIT_VARS {
                return Err(Error::InvalidArgument(format!("implicit system must be over {IMPLICIT_VARS:?}")));
            }
            if p.is_zero() {
                return Err(Error::IdenticallyZero);
            }
            if p.total_degree() > MAX_IMPLICIT_DEGREE {
                return Err(Error::DegreeCap(format!("total degree exceeds {MAX_IMPLICIT_DEGREE}")));
            }
        }
        Ok(Self { polys })
    }

    pub fn parse(texts: [&str; 3]) -> Result<Self> {
        let mut out = Vec::with_capacity(3);
        for t in texts {
            out.push(MPoly::parse(t, &IMPLICIT_VARS)?);
        }
        Self::new(out.try_into().expect("three equations"))
    }

    pub fn polys(&self) -> &[MPoly; 3] {
        &self.polys
    }

    /// The system at time `t`, over `(x, y, z)`.
    pub fn at(&self, t: f64) -> Vec<MPoly> {
        let vars = ["x", "y", "z"];
        let images = [
            MPoly::constant(&vars, C64::new(t, 0.0)),
            MPoly::var(&vars, 0),
            MPoly::var(&vars, 1),
            MPoly::var(&vars, 2),
        ];
        self.polys.iter().map(|p| p.compose(&images)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImplicitRoot {
    pub point: [C64; 3],
    pub class: RootClass,
    pub multiplicity: usize,
    pub residual: f64,
}

/// All particle positions at time `t`.
pub fn implicit_roots(sys: &ImplicitUWL, t: f64, tol: &Tolerances) -> Result<Vec<ImplicitRoot>> {
    let sols = solve_system(&sys.at(t), 1e-8, tol)?;
    Ok(sols
        .into_iter()
        .map(|s| {
            let point = [s.point[0], s.point[1], s.point[2]];
            let size = point.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let real = point.iter().all(|v| v.im.abs() <= tol.eps_real * (1.0 + size));
            ImplicitRoot {
                point,
                class: if real { RootClass::R } else { RootClass::C },
                multiplicity: s.multiplicity,
                residual: s.residual,
            }
        })
        .collect())
}

/// Number of distinct non-real solutions at `t`, or `None` when the solver
/// does not return `expected` distinct solutions.
fn complex_count(sys: &ImplicitUWL, t: f64, expected: Option<usize>, tol: &Tolerances) -> Option<(usize, Vec<ImplicitRoot>)> {
    let roots = implicit_roots(sys, t, tol).ok()?;
    if expected.is_some_and(|n| n != roots.len()) {
        return None;
    }
    Some((roots.iter().filter(|r| r.class == RootClass::C).count(), roots))
}

/// `det ∂F/∂(x, y, z)` over `(t, x, y, z)`; it vanishes where solutions merge.
fn fold_polynomial(sys: &ImplicitUWL) -> MPoly {
    let j: Vec<Vec<MPoly>> = sys.polys.iter().map(|p| (1..4).map(|k| p.partial(k)).collect()).collect();
    let minor = |a: usize, b: usize, c: usize, d: usize| j[1][a].mul(&j[2][b]).sub(&j[1][c].mul(&j[2][d]));
    j[0][0].mul(&minor(1, 2, 2, 1)).sub(&j[0][1].mul(&minor(0, 2, 2, 0))).add(&j[0][2].mul(&minor(0, 1, 1, 0)))
}

/// Newton on `F = 0, det ∂F/∂x = 0` in `(t, x, y, z)`: a regular system at
/// a simple fold, so the merge time is found to working precision.
fn locate_fold(sys: &ImplicitUWL, fold: &MPoly, start: [C64; 4]) -> Option<[C64; 4]> {
    let eqs: Vec<&MPoly> = sys.polys.iter().chain(std::iter::once(fold)).collect();
    let grads: Vec<Vec<MPoly>> = eqs.iter().map(|p| (0..4).map(|k| p.partial(k)).collect()).collect();
    let scale: Vec<f64> = eqs.iter().map(|p| p.max_abs_coeff().max(1.0)).collect();
    let resid = |x: &[C64]| eqs.iter().zip(&scale).map(|(p, s)| p.eval(x).norm() / s).fold(0.0, f64::max);
    let mut x = start.to_vec();
    for _ in 0..60 {
        let f = nalgebra::DVector::from_fn(4, |i, _| eqs[i].eval(&x));
        let jac = nalgebra::DMatrix::from_fn(4, 4, |i, k| grads[i][k].eval(&x));
        let step = jac.lu().solve(&f)?;
        x.iter_mut().zip(step.iter()).for_each(|(a, s)| *a -= s);
        let size = 1.0 + x.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if step.iter().map(|s| s.norm()).fold(0.0, f64::max) <= 1e-15 * size {
            break;
        }
    }
    (resid(&x) <= 1e-12).then(|| [x[0], x[1], x[2], x[3]])
}

fn closest_pair(roots: &[ImplicitRoot]) -> Option<[C64; 3]> {
    let mut best: Option<(f64, [C64; 3])> = None;
    for (i, a) in roots.iter().enumerate() {
        for b in &roots[i + 1..] {
            let d = (0..3).map(|k| (a.point[k] - b.point[k]).norm()).fold(0.0, f64::max);
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, std::array::from_fn(|k| 0.5 * (a.point[k] + b.point[k]))));
            }
        }
    }
    best.map(|(_, p)| p)
}

/// Annihilation and creation events of an implicit system. A change in the
/// number of non-real solutions between samples is narrowed by bisection on
/// that count while the solver resolves the system, then the merge time is
/// polished on the fold system `F = 0, det ∂F/∂x = 0`. Collisions of the
/// eliminant that do not change the count are reported as merges.
pub fn implicit_events(sys: &ImplicitUWL, times: &[f64], tol: &Tolerances) -> Result<(Tracked, EventLog)> {
    let family = |t: f64| system_eliminant(&sys.at(t), tol);
    let tracked = root_track(family, times, tol)?;
    let fold = fold_polynomial(sys);
    let counts: Vec<(usize, Vec<ImplicitRoot>)> =
        times.iter().map(|&t| complex_count(sys, t, None, tol).ok_or(Error::NonGenericSystem)).collect::<Result<_>>()?;

    let mut events = Vec::new();
    let mut transition_steps = Vec::new();
    for k in 1..times.len() {
        let (ca, cb) = (counts[k - 1].0, counts[k].0);
        if ca == cb {
            continue;
        }
        transition_steps.push(k);
        let (mut lo, mut hi) = (times[k - 1], times[k]);
        let (mut roots_lo, mut roots_hi) = (counts[k - 1].1.clone(), counts[k].1.clone());
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if (hi - lo).abs() <= 1e-13 * (1.0 + mid.abs()) {
                break;
            }
            match complex_count(sys, mid, Some(roots_lo.len()), tol) {
                Some((c, r)) if c == ca => (lo, roots_lo) = (mid, r),
                Some((c, r)) if c == cb => (hi, roots_hi) = (mid, r),
                _ => break,
            }
        }
        let width = (hi - lo).abs();
        let guess = closest_pair(&roots_lo).or_else(|| closest_pair(&roots_hi)).unwrap_or([C64::new(0.0, 0.0); 3]);
        let mid = 0.5 * (lo + hi);
        let polished = locate_fold(sys, &fold, [C64::new(mid, 0.0), guess[0], guess[1], guess[2]]).filter(|x| {
            x[0].im.abs() <= tol.eps_real * (1.0 + x[0].norm()) && (x[0].re - mid).abs() <= 1.5 * width
        });
        let (time, location) = match polished {
            Some(x) => (x[0].re, vec![x[1], x[2], x[3]]),
            None => (mid, guess.to_vec()),
        };
        let kind = if cb > ca { EventKind::Annihilation } else { EventKind::Creation };
        events.push(UwlEvent { time, kind, participants: Vec::new(), root: None, location: Some(location), photon: None });
    }
    let step = (times[1] - times[0]).abs();
    for (time, kind, participants, root) in classify(&tracked, tol.eps_real) {
        let near_transition = transition_steps.iter().any(|&k| {
            let (a, b) = (times[k - 1].min(times[k]), times[k - 1].max(times[k]));
            time >= a - step && time <= b + step
        });
        if kind == EventKind::Merge && !near_transition {
            let location = implicit_roots(sys, time, tol).ok().and_then(|rs| closest_pair(&rs)).map(|p| p.to_vec());
            events.push(UwlEvent { time, kind, participants, root, location, photon: None });
        }
    }
    let increasing = times[1] > times[0];
    events.sort_by(|a, b| if increasing { a.time.total_cmp(&b.time) } else { b.time.total_cmp(&a.time) });
    Ok((tracked, EventLog { events }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSample {
    /// Distance from each point to its nearest neighbour.
    pub nearest: Vec<f64>,
    pub min_pair_distance: Option<f64>,
    /// Pairs closer than the pair threshold.
    pub pairs: usize,
    /// Single-linkage clusters at the cluster radius.
    pub clusters: usize,
}

/// Pairing and clustering statistics of point sets (one set per time).
/// Distances are Hermitian norms in `C³`, so complex positions are allowed.
pub fn cluster_metrics(frames: &[Vec<[C64; 3]>], pair_threshold: f64, cluster_radius: f64) -> Vec<ClusterSample> {
    frames
        .iter()
        .map(|pts| {
            let n = pts.len();
            let dist = |i: usize, j: usize| {
                (0..3).map(|k| (pts[i][k] - pts[j][k]).norm_sqr()).sum::<f64>().sqrt()
            };
            let mut nearest = vec![f64::INFINITY; n];
            let mut pairs = 0;
            let mut parent: Vec<usize> = (0..n).collect();
            fn find(p: &mut [usize], mut i: usize) -> usize {
                while p[i] != i {
                    p[i] = p[p[i]];
                    i = p[i];
                }
                i
            }
            for i in 0..n {
                for j in i + 1..n {
                    let d = dist(i, j);
                    nearest[i] = nearest[i].min(d);
                    nearest[j] = nearest[j].min(d);
                    if d <= pair_threshold {
                        pairs += 1;
                    }
                    if d <= cluster_radius {
                        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                        parent[a] = b;
                    }
                }
            }
            let clusters = (0..n).filter(|&i| find(&mut parent, i) == i).count();
            let min_pair_distance = nearest.iter().copied().fold(None, |m: Option<f64>, d| {
                if d.is_finite() { Some(m.map_or(d, |m| m.min(d))) } else { m }
            });
            ClusterSample { nearest: if n > 1 { nearest } else { Vec::new() }, min_pair_distance, pairs, clusters }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn real4(p: [f64; 4]) -> [C64; 4] {
        p.map(|v| c(v, 0.0))
    }

    #[test]
    fn static_lce_roots_are_t_plus_minus_r() {
        let tol = Tolerances::default();
        let ds = duplicons(&PolyWorldline::static_particle(), &real4([5.0, 0.0, 0.0, 1.0]), &tol).unwrap();
        let mut s: Vec<f64> = ds.iter().map(|d| d.sigma.re).collect();
        s.sort_by(f64::total_cmp);
        assert!((s[0] - 4.0).abs() < 1e-12 && (s[1] - 6.0).abs() < 1e-12);
        assert!(ds.iter().all(|d| d.class == RootClass::R));
    }

    #[test]
    fn lce_degree_bookkeeping() {
        let wl = PolyWorldline::from_real([&[0.0, 1.0], &[0.0, 0.0, 1.0], &[0.0], &[0.0]]).unwrap();
        assert_eq!(lce_polynomial(&wl, &real4([0.0, 1.0, 0.0, 0.0])).unwrap().nominal_degree(), 4);
    }

    #[test]
    fn null_worldline_through_observer_is_rejected() {
        let wl = PolyWorldline::from_real([&[0.0, 1.0], &[0.0, 1.0], &[0.0], &[0.0]]).unwrap();
        assert_eq!(lce_polynomial(&wl, &real4([0.0; 4])), Err(Error::ObserverOnWorldline));
    }

    #[test]
    fn realness_threshold() {
        assert_eq!(RootClass::of(c(2.0, 1e-12), 1e-9), RootClass::R);
        assert_eq!(RootClass::of(c(2.0, 1e-6), 1e-9), RootClass::C);
    }

    #[test]
    fn twistor_of_static_duplicon() {
        let tol = Tolerances::default();
        let xi = twistor_of_duplicon(&PolyWorldline::static_particle(), &real4([1.0, 0.0, 0.0, 1.0]), c(0.0, 0.0), &tol)
            .unwrap();
        assert!((xi.s0).norm() < 1e-15 && (xi.s1 - c(1.0, 0.0)).norm() < 1e-15);
        let off = twistor_of_duplicon(&PolyWorldline::static_particle(), &real4([1.0, 0.0, 0.0, 0.5]), c(0.0, 0.0), &tol);
        assert!(matches!(off, Err(Error::NotOnLightCone(_))));
        let on = twistor_of_duplicon(&PolyWorldline::static_particle(), &real4([1.0, 0.0, 0.0, 0.0]), c(1.0, 0.0), &tol);
        assert_eq!(on, Err(Error::CoincidentPoint));
    }

    #[test]
    fn clusters_and_pairs() {
        let p = |x: f64| [c(x, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let frame = vec![p(0.0), p(0.1), p(5.0), p(5.1), p(10.0), p(10.05)];
        let m = &cluster_metrics(&[frame, vec![p(1.0)]], 0.2, 1.0);
        assert_eq!(m[0].clusters, 3);
        assert_eq!(m[0].pairs, 3);
        assert_eq!(m[1].pairs, 0);
        assert_eq!(m[1].min_pair_distance, None);
    }
}
