//! Fields carried by a congruence: the potential matrix Φ, the two kinds of
//! Maxwell-like field strengths, the matrix curvature, and their checks.
//!
//! Index conventions: `η = diag(1, −1, −1, −1)`, `ε_{0123} = +1`. The
//! potential is `A_μ = tr(σ_μ Φ)/2` and `F_{μν} = ∂_μ A_ν − ∂_ν A_μ`. The
//! three-vectors are `E_a = F_{a0}` and `H_a = −ε_{abc} F_{bc} / 2`.

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::biquat::{spinor_partials, Biquaternion, Spinor};
use crate::config::Tolerances;
use crate::congruence::{KerrBranch, RatioField};
use crate::error::{Error, Result};
use crate::numerics::{fd_gradient, fd_jacobian, C64};

const ZERO: C64 = C64::new(0.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);
const ETA: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialMatrix {
    pub phi: Biquaternion,
    /// Relative least-squares residual of `∂G = Φ¹ ξ` (zero on congruences).
    pub consistency: f64,
}

impl PotentialMatrix {
    /// `A_μ = tr(σ_μ Φ) / 2`.
    pub fn potential(&self) -> [C64; 4] {
        self.phi.components()
    }

    pub fn from_potential(a: [C64; 4]) -> Self {
        Self { phi: Biquaternion::from_components(a), consistency: 0.0 }
    }
}

/// Φ in the gauge `ξ = (1, G)`: the first row vanishes and the second row
/// `(a, b)` is fitted to `∂u G = a`, `∂w G = aG`, `∂w̄ G = b`, `∂v G = bG`.
pub fn phi_from_branch(field: &dyn RatioField, p: &[f64; 4], tol: &Tolerances) -> Result<PotentialMatrix> {
    let g = field.value(p)?;
    let d = spinor_partials(&field.gradient(p)?);
    let norm = 1.0 + g.norm_sqr();
    let a = (d[0] + g.conj() * d[2]) / norm;
    let b = (d[3] + g.conj() * d[1]) / norm;
    let miss = (d[0] - a).norm_sqr() + (d[2] - a * g).norm_sqr() + (d[3] - b).norm_sqr() + (d[1] - b * g).norm_sqr();
    let size = d.iter().map(|v| v.norm_sqr()).sum::<f64>();
    let consistency = if size == 0.0 { 0.0 } else { (miss / size).sqrt() };
    if consistency > tol.congruence_reject {
        return Err(Error::NotACongruence(consistency));
    }
    Ok(PotentialMatrix { phi: Biquaternion::new(ZERO, ZERO, a, b), consistency })
}

/// Antisymmetric complex 4×4 tensor with lower indices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoForm {
    pub c: [[C64; 4]; 4],
}

pub type FieldStrength = TwoForm;

const LEVI3: [(usize, usize, usize); 3] = [(1, 2, 3), (2, 3, 1), (3, 1, 2)];

impl TwoForm {
    pub fn zero() -> Self {
        Self { c: [[ZERO; 4]; 4] }
    }

    /// Antisymmetrises `f(μ, ν)` over `μ < ν`.
    pub fn from_upper(f: impl Fn(usize, usize) -> C64) -> Self {
        let mut c = [[ZERO; 4]; 4];
        for mu in 0..4 {
            for nu in mu + 1..4 {
                let v = f(mu, nu);
                c[mu][nu] = v;
                c[nu][mu] = -v;
            }
        }
        Self { c }
    }

    /// `∂_μ a ∂_ν b − ∂_ν a ∂_μ b`.
    pub fn wedge(da: &[C64; 4], db: &[C64; 4]) -> Self {
        Self::from_upper(|m, n| da[m] * db[n] - da[n] * db[m])
    }

    pub fn from_eh(e: [C64; 3], h: [C64; 3]) -> Self {
        let mut c = [[ZERO; 4]; 4];
        for a in 0..3 {
            c[a + 1][0] = e[a];
            c[0][a + 1] = -e[a];
        }
        // F_{23} = −H_1 and cyclic.
        for (k, &(_, i, j)) in LEVI3.iter().enumerate() {
            c[i][j] = -h[k];
            c[j][i] = h[k];
        }
        Self { c }
    }

    pub fn e(&self) -> [C64; 3] {
        [self.c[1][0], self.c[2][0], self.c[3][0]]
    }

    pub fn h(&self) -> [C64; 3] {
        [-self.c[2][3], -self.c[3][1], -self.c[1][2]]
    }

    /// `E + iH`.
    pub fn complex_vector(&self) -> [C64; 3] {
        let (e, h) = (self.e(), self.h());
        [e[0] + I * h[0], e[1] + I * h[1], e[2] + I * h[2]]
    }

    pub fn raised(&self) -> Self {
        let mut c = self.c;
        for (mu, row) in c.iter_mut().enumerate() {
            for (nu, v) in row.iter_mut().enumerate() {
                *v *= ETA[mu] * ETA[nu];
            }
        }
        Self { c }
    }

    /// `⋆F_{μν} = ε_{μνρλ} F^{ρλ} / 2`.
    pub fn dual(&self) -> Self {
        let up = self.raised();
        Self::from_upper(|m, n| {
            let (r, l) = complement(m, n);
            up.c[r][l] * levi4(m, n, r, l)
        })
    }

    pub fn scale(&self, k: C64) -> Self {
        let mut c = self.c;
        c.iter_mut().flatten().for_each(|v| *v *= k);
        Self { c }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::from_upper(|m, n| self.c[m][n] + o.c[m][n])
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::from_upper(|m, n| self.c[m][n] - o.c[m][n])
    }

    pub fn norm(&self) -> f64 {
        self.c.iter().flatten().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `F_{μν} G^{μν}`.
    pub fn contract(&self, o: &Self) -> C64 {
        let up = o.raised();
        let mut s = ZERO;
        for m in 0..4 {
            for n in 0..4 {
                s += self.c[m][n] * up.c[m][n];
            }
        }
        s
    }

    /// The six independent components `(01, 02, 03, 12, 13, 23)`.
    pub fn packed(&self) -> [C64; 6] {
        PAIRS.map(|(m, n)| self.c[m][n])
    }

    pub fn from_packed(v: &[C64]) -> Self {
        let mut out = Self::zero();
        for (k, &(m, n)) in PAIRS.iter().enumerate() {
            out.c[m][n] = v[k];
            out.c[n][m] = -v[k];
        }
        out
    }
}

const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

fn complement(m: usize, n: usize) -> (usize, usize) {
    let rest: Vec<usize> = (0..4).filter(|&k| k != m && k != n).collect();
    (rest[0], rest[1])
}

/// Sign of the permutation `(a, b, c, d)` of `(0, 1, 2, 3)`.
fn levi4(a: usize, b: usize, c: usize, d: usize) -> f64 {
    let p = [a, b, c, d];
    let mut inversions = 0;
    for i in 0..4 {
        for j in i + 1..4 {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 { 1.0 } else { -1.0 }
}

fn three_dot(a: &[C64; 3], b: &[C64; 3]) -> C64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// `F_{μν} = ∂_μ A_ν − ∂_ν A_μ` from a sampler of Φ.
pub fn em_field_i<F>(phi: F, p: &[f64; 4], h: f64, richardson: bool) -> Result<FieldStrength>
where
    F: Fn(&[f64; 4]) -> Result<Biquaternion>,
{
    let jac = fd_jacobian(|q| phi(&q).map(|m| m.components().to_vec()), p, h, richardson)?;
    Ok(TwoForm::from_upper(|m, n| jac[m][n] - jac[n][m]))
}

/// `C = dα ∧ dβ` by finite differences.
pub fn em_field_ii<A, B>(alpha: A, beta: B, p: &[f64; 4], h: f64, richardson: bool) -> Result<TwoForm>
where
    A: Fn([f64; 4]) -> Result<C64>,
    B: Fn([f64; 4]) -> Result<C64>,
{
    let da = fd_gradient(alpha, p, h, richardson)?;
    let db = fd_gradient(beta, p, h, richardson)?;
    Ok(TwoForm::wedge(&da, &db))
}

/// `R_{μν} = ∂_μ(Φσ_ν) − ∂_ν(Φσ_μ) − [Φσ_μ, Φσ_ν]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixCurvature {
    pub r: [[Biquaternion; 4]; 4],
}

impl MatrixCurvature {
    /// Largest `‖R_{μν} ξ‖`.
    pub fn annihilation_residual(&self, xi: &Spinor) -> f64 {
        self.r.iter().flatten().map(|m| m.apply(xi).norm()).fold(0.0, f64::max)
    }

    /// `tr R / 2`, which equals `F`.
    pub fn trace_form(&self) -> TwoForm {
        TwoForm::from_upper(|m, n| self.r[m][n].trace() * 0.5)
    }

    /// `R − (tr R / 2)·1`, one two-form per matrix entry.
    pub fn trace_free(&self) -> [[TwoForm; 2]; 2] {
        let tf = |m: usize, n: usize| {
            let r = self.r[m][n];
            r - Biquaternion::identity().scale(r.trace() * 0.5)
        };
        std::array::from_fn(|i| std::array::from_fn(|j| TwoForm::from_upper(|m, n| tf(m, n).get(i, j))))
    }
}

pub fn matrix_curvature<F>(phi: F, p: &[f64; 4], h: f64, richardson: bool) -> Result<MatrixCurvature>
where
    F: Fn(&[f64; 4]) -> Result<Biquaternion>,
{
    let flat = |m: &Biquaternion| -> Vec<C64> {
        (0..4).flat_map(|mu| (*m * Biquaternion::sigma(mu)).entries()).collect()
    };
    let jac = fd_jacobian(|q| phi(&q).map(|m| flat(&m)), p, h, richardson)?;
    let at = phi(p)?;
    let phis: [Biquaternion; 4] = std::array::from_fn(|mu| at * Biquaternion::sigma(mu));
    let d = |mu: usize, nu: usize| {
        let e = &jac[mu][4 * nu..4 * nu + 4];
        Biquaternion::from_entries([e[0], e[1], e[2], e[3]])
    };
    let mut r = [[Biquaternion::zero(); 4]; 4];
    for mu in 0..4 {
        for nu in 0..4 {
            if mu != nu {
                r[mu][nu] = d(mu, nu) - d(nu, mu) - (phis[mu] * phis[nu] - phis[nu] * phis[mu]);
            }
        }
    }
    Ok(MatrixCurvature { r })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    /// `min_± ‖F ∓ i⋆F‖ / ‖F‖`.
    pub selfdual_residual: f64,
    /// The sign achieving the minimum.
    pub sign: f64,
    /// `E·E − H·H`.
    pub i1: C64,
    /// `E·H`.
    pub i2: C64,
    /// `F_{μν} F^{μν}`.
    pub null_scalar: C64,
    /// `F_{μν} ⋆F^{μν}`.
    pub dual_scalar: C64,
}

pub fn duality_invariants(f: &TwoForm) -> DualityReport {
    let dual = f.dual();
    let norm = f.norm();
    let mut best = (f64::INFINITY, 1.0);
    for s in [1.0, -1.0] {
        let res = f.sub(&dual.scale(I * s)).norm();
        let rel = if norm == 0.0 { 0.0 } else { res / norm };
        if rel < best.0 {
            best = (rel, s);
        }
    }
    let (e, h) = (f.e(), f.h());
    DualityReport {
        selfdual_residual: best.0,
        sign: best.1,
        i1: three_dot(&e, &e) - three_dot(&h, &h),
        i2: three_dot(&e, &h),
        null_scalar: f.contract(f),
        dual_scalar: f.contract(&dual),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormResiduals {
    /// `(dC)_{123}, (dC)_{023}, (dC)_{013}, (dC)_{012}`.
    pub dc: [C64; 4],
    /// The same components of `d⋆C`.
    pub d_star_c: [C64; 4],
}

impl FormResiduals {
    pub fn max_dc(&self) -> f64 {
        self.dc.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_d_star_c(&self) -> f64 {
        self.d_star_c.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

const TRIPLES: [(usize, usize, usize); 4] = [(1, 2, 3), (0, 2, 3), (0, 1, 3), (0, 1, 2)];

fn exterior(jac: &[Vec<C64>; 4], offset: usize) -> [C64; 4] {
    let comp = |d: usize, m: usize, n: usize| {
        let (a, b, s) = if m < n { (m, n, 1.0) } else { (n, m, -1.0) };
        let k = PAIRS.iter().position(|&q| q == (a, b)).unwrap();
        jac[d][offset + k] * s
    };
    TRIPLES.map(|(l, m, n)| comp(l, m, n) + comp(m, n, l) + comp(n, l, m))
}

/// Exterior derivatives of a two-form field and of its dual.
pub fn form_residuals<F>(c: F, p: &[f64; 4], h: f64, richardson: bool) -> Result<FormResiduals>
where
    F: Fn(&[f64; 4]) -> Result<TwoForm>,
{
    let jac = fd_jacobian(
        |q| {
            c(&q).map(|f| {
                let mut v = f.packed().to_vec();
                v.extend(f.dual().packed());
                v
            })
        },
        p,
        h,
        richardson,
    )?;
    Ok(FormResiduals { dc: exterior(&jac, 0), d_star_c: exterior(&jac, 6) })
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// `(1/4π) ∮ E·n dS` over the sphere of `radius` about `center` (spatial
/// part; the time is taken from `center[0]`). Gauss–Legendre in `cos θ`
/// times the trapezoid rule in `φ`, with `2·order` azimuthal nodes.
pub fn charge_flux<F>(field: F, center: &[f64; 4], radius: f64, order: usize) -> Result<C64>
where
    F: Fn(&[f64; 4]) -> Result<TwoForm> + Sync,
{
    if !(radius > 0.0) || order == 0 {
        return Err(Error::InvalidArgument("sphere radius and quadrature order must be positive".into()));
    }
    let (nodes, weights) = gauss_legendre(order);
    let nphi = 2 * order;
    let dphi = 2.0 * std::f64::consts::PI / nphi as f64;
    let mut total = ZERO;
    for (ct, wt) in nodes.iter().zip(&weights) {
        let st = (1.0 - ct * ct).sqrt();
        for k in 0..nphi {
            let phi = (k as f64 + 0.5) * dphi;
            let n = [st * phi.cos(), st * phi.sin(), *ct];
            let p = [center[0], center[1] + radius * n[0], center[2] + radius * n[1], center[3] + radius * n[2]];
            let e = field(&p)?.e();
            total += (e[0] * n[0] + e[1] * n[1] + e[2] * n[2]) * (wt * dphi * radius * radius);
        }
    }
    Ok(total / (4.0 * std::f64::consts::PI))
}

/// `(∂w̄ψ1 − ∂uψ2, ∂vψ1 − ∂wψ2)` by finite differences.
pub fn weyl_residual<A, B>(psi1: A, psi2: B, p: &[f64; 4], h: f64, richardson: bool) -> Result<[C64; 2]>
where
    A: Fn([f64; 4]) -> Result<C64>,
    B: Fn([f64; 4]) -> Result<C64>,
{
    let d1 = spinor_partials(&fd_gradient(psi1, p, h, richardson)?);
    let d2 = spinor_partials(&fd_gradient(psi2, p, h, richardson)?);
    Ok([d1[3] - d2[0], d1[1] - d2[2]])
}

/// `ψ1 = −w̄ / (r(z + r))`, `ψ2 = 1/r`.
pub fn weyl_ansatz(p: &[f64; 4]) -> Result<(C64, C64)> {
    let [_, x, y, z] = *p;
    let r = (x * x + y * y + z * z).sqrt();
    if r == 0.0 || z + r <= 1e-14 * r {
        return Err(Error::CausticPoint("Weyl ansatz singular on the negative z half-axis".into()));
    }
    Ok((-C64::new(x, y) / (r * (z + r)), C64::new(1.0 / r, 0.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KerrSchildMetric {
    pub g: [[f64; 4]; 4],
    pub det: f64,
}

/// `g_{μν} = η_{μν} + H k_μ k_ν` for a null covector `k`.
pub fn kerr_schild(h: f64, k: &[f64; 4], tol: &Tolerances) -> Result<KerrSchildMetric> {
    let norm = (0..4).map(|m| ETA[m] * k[m] * k[m]).sum::<f64>();
    let scale = k.iter().map(|v| v * v).sum::<f64>().max(1.0);
    if norm.abs() > tol.null_vector * scale {
        return Err(Error::NotNull(norm));
    }
    let g: [[f64; 4]; 4] = std::array::from_fn(|m| {
        std::array::from_fn(|n| if m == n { ETA[m] } else { 0.0 } + h * k[m] * k[n])
    });
    let det = Matrix4::from_fn(|r, c| g[r][c]).determinant();
    Ok(KerrSchildMetric { g, det })
}

/// Covector `k_μ = η_{μν} k^ν` of the congruence `ξ = (1, G)`, scaled so
/// that `k_0 = 1`.
pub fn congruence_covector(g: C64) -> [f64; 4] {
    let up = crate::biquat::four_vector(
        &crate::biquat::null_vector(&Spinor::from_ratio(g)).expect("nonzero spinor"),
    );
    std::array::from_fn(|m| ETA[m] * up[m] / up[0])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveKind {
    Retarded,
    Advanced,
}

/// Static field promoted to a spherical wave: advanced `C·f(r + t)`;
/// retarded uses the time-reflected field (electric part negated) times
/// `f(r − t)`.
pub fn wave_promote(c: &TwoForm, profile: impl Fn(f64) -> f64, kind: WaveKind, p: &[f64; 4]) -> TwoForm {
    let r = (p[1] * p[1] + p[2] * p[2] + p[3] * p[3]).sqrt();
    match kind {
        WaveKind::Advanced => c.scale(C64::new(profile(r + p[0]), 0.0)),
        WaveKind::Retarded => {
            let mut flipped = *c;
            for a in 1..4 {
                flipped.c[0][a] = -flipped.c[0][a];
                flipped.c[a][0] = -flipped.c[a][0];
            }
            flipped.scale(C64::new(profile(r - p[0]), 0.0))
        }
    }
}

/// Spherical unit vectors `(r̂, θ̂, φ̂)` at a spatial point.
pub fn spherical_frame(p: &[f64; 4]) -> [[f64; 3]; 3] {
    let [_, x, y, z] = *p;
    let rho = (x * x + y * y).sqrt();
    let r = (rho * rho + z * z).sqrt();
    let (st, ct) = (rho / r, z / r);
    let (cp, sp) = if rho > 0.0 { (x / rho, y / rho) } else { (1.0, 0.0) };
    [[st * cp, st * sp, ct], [ct * cp, ct * sp, -st], [-sp, cp, 0.0]]
}

/// `(C_r, C_θ, C_φ)` of the complex vector `E + iH`.
pub fn spherical_components(c: &TwoForm, p: &[f64; 4]) -> [C64; 3] {
    let v = c.complex_vector();
    spherical_frame(p).map(|e| v[0] * e[0] + v[1] * e[1] + v[2] * e[2])
}

/// The second-type field `dG ∧ d(t + r)` of the stereographic branch,
/// with analytic gradients.
pub fn screw_field(p: &[f64; 4]) -> Result<TwoForm> {
    let dg = KerrBranch::stereo(1.0).gradient(p)?;
    let r = (p[1] * p[1] + p[2] * p[2] + p[3] * p[3]).sqrt();
    let one = C64::new(1.0, 0.0);
    let db = [one, one * (p[1] / r), one * (p[2] / r), one * (p[3] / r)];
    Ok(TwoForm::wedge(&dg, &db))
}

/// `C_r = 0`, `C_θ = e^{iφ} / (r cos²(θ/2))`, `C_φ = i C_θ`.
pub fn screw_closed_form(r: f64, theta: f64, phi: f64) -> [C64; 3] {
    let c = (0.5 * theta).cos();
    let ct = C64::from_polar(1.0 / (r * c * c), phi);
    [ZERO, ct, I * ct]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn eh_roundtrip() {
        let e = [c(1.0, 0.5), c(-2.0, 0.0), c(0.0, 3.0)];
        let h = [c(0.1, 0.0), c(0.2, -0.2), c(-0.3, 0.0)];
        let f = TwoForm::from_eh(e, h);
        assert_eq!(f.e(), e);
        assert_eq!(f.h(), h);
    }

    #[test]
    fn double_dual_is_minus_identity() {
        let f = TwoForm::from_upper(|m, n| c((m + 2 * n) as f64, (m * n) as f64 - 1.0));
        let back = f.dual().dual();
        assert!(back.add(&f).norm() < 1e-14);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        let int = |k: i32| x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum::<f64>();
        assert!((int(0) - 2.0).abs() < 1e-14);
        assert!((int(14) - 2.0 / 15.0).abs() < 1e-14);
        assert!(int(7).abs() < 1e-15);
    }

    #[test]
    fn zero_potential_has_zero_field() {
        let f = em_field_i(|_| Ok(Biquaternion::zero()), &[0.0, 1.0, 1.0, 1.0], 1e-3, true).unwrap();
        assert_eq!(f.norm(), 0.0);
        let r = matrix_curvature(|_| Ok(Biquaternion::zero()), &[0.0, 1.0, 1.0, 1.0], 1e-3, true).unwrap();
        assert!(r.r.iter().flatten().all(|m| m.norm() == 0.0));
    }

    #[test]
    fn flat_metric_and_rank_one_update() {
        let tol = Tolerances::default();
        let m = kerr_schild(0.0, &[1.0, 0.0, 0.0, 1.0], &tol).unwrap();
        assert_eq!(m.g, [[1.0, 0.0, 0.0, 0.0], [0.0, -1.0, 0.0, 0.0], [0.0, 0.0, -1.0, 0.0], [0.0, 0.0, 0.0, -1.0]]);
        let m = kerr_schild(1.0, &[1.0, 0.0, 0.0, 1.0], &tol).unwrap();
        assert!((m.det + 1.0).abs() < 1e-14);
        assert!(matches!(kerr_schild(1.0, &[1.0, 1.0, 1.0, 0.0], &tol), Err(Error::NotNull(_))));
    }

    #[test]
    fn screw_example_values() {
        let v = screw_closed_form(1.0, std::f64::consts::FRAC_PI_2, 0.0);
        assert!((v[1] - c(2.0, 0.0)).norm() < 1e-14);
        assert!((v[2] - c(0.0, 2.0)).norm() < 1e-14);
    }

    #[test]
    fn weyl_counterexample_has_unit_residual() {
        let r = weyl_residual(|p| Ok(c(p[1], p[2])), |_| Ok(c(0.0, 0.0)), &[0.0, 0.3, 0.2, 0.1], 1e-3, false).unwrap();
        assert!((r[0] - c(1.0, 0.0)).norm() < 1e-12);
        assert!(r[1].norm() < 1e-12);
    }
}
