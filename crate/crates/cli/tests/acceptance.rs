//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use adw_cli::render::render_polarization;
use adw_core::biquat::Biquaternion;
use adw_core::caustics::{extract_locus, pair_singular_points};
use adw_core::congruence::{
    scalar_pde_residual, sfc_residual, solve_bispinor, solve_branches, spinor_gradient,
    GenFuncPair, GenFuncProjective, KerrBranch, PdeKind, RatioField, BUNDLED_PAIRS,
};
use adw_core::fields::{
    charge_flux, duality_invariants, em_field_i, em_field_ii, phi_from_branch, screw_closed_form, screw_field,
    spherical_components, weyl_ansatz, weyl_residual, FieldStrength,
};
use adw_core::uwl::{conservation_report, implicit_events, ImplicitUWL, PolyWorldline};
use adw_core::{Grid4, Tolerances, C64};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

/// Runs one criterion, enforcing the runtime budget when one is stated.
fn run(id: u32, title: &str, budget: Option<Duration>, f: impl FnOnce() -> Result<Verdict, String>) -> bool {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let (mut pass, mut detail) = match out {
        Ok(v) => (v.pass, v.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    if let Some(b) = budget {
        if elapsed > b {
            pass = false;
            detail.push_str(&format!("; runtime {:.2} s exceeds {:.0} s", elapsed.as_secs_f64(), b.as_secs_f64()));
        }
    }
    println!(
        "{} [{id:>2}] {title}: {detail} ({:.2} s)",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    pass
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

/// A point with `r ∈ [0.3, 3]` at least 0.2 rad away from the z-axis.
fn off_axis(rng: &mut ChaCha8Rng) -> [f64; 4] {
    let r = rng.random_range(0.3..3.0);
    let th: f64 = rng.random_range(0.2..PI - 0.2);
    let ph: f64 = rng.random_range(0.0..2.0 * PI);
    [rng.random_range(-1.0..1.0), r * th.sin() * ph.cos(), r * th.sin() * ph.sin(), r * th.cos()]
}

fn c1_stereographic_branches() -> Result<Verdict, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let pi = GenFuncProjective::static_spherical();
    let tol = Tolerances::default();
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let p = off_axis(&mut rng);
        let [_, x, y, z] = p;
        let r = (x * x + y * y + z * z).sqrt();
        let wbar = C64::new(x, y);
        let want = [wbar / (z + r), wbar / (z - r)];
        let got = solve_branches(&pi, &p, &tol).map_err(e)?.expanded();
        if got.len() != 2 {
            return Ok(verdict(false, format!("{} roots at {p:?}", got.len())));
        }
        for w in want {
            let err = got.iter().map(|g| (g - w).norm() / w.norm()).fold(f64::INFINITY, f64::min);
            worst = worst.max(err);
        }
    }
    Ok(verdict(worst <= 1e-10, format!("1000 points, max relative error {worst:.2e} (≤ 1e-10)")))
}

fn order(r: &[f64]) -> Vec<f64> {
    r.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

fn c2_shear_free_residuals() -> Result<Verdict, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let hs = [1e-2, 5e-3, 2.5e-3];
    let mut sfc = 0.0f64;
    let (mut worst_order, mut best_order) = (f64::INFINITY, f64::NEG_INFINITY);
    for sign in [1.0, -1.0] {
        let branch = KerrBranch::stereo(sign);
        for _ in 0..10 {
            let p = off_axis(&mut rng);
            let s = sfc_residual(&branch, &p).map_err(e)?;
            let scale = branch.gradient(&p).map_err(e)?.iter().map(|v| v.norm()).fold(1.0, f64::max);
            sfc = sfc.max(s[0].norm().max(s[1].norm()) / scale);
            for kind in [PdeKind::Eikonal, PdeKind::Wave] {
                let g = |q: [f64; 4]| branch.value(&q);
                let res: Vec<f64> = hs
                    .iter()
                    .map(|&h| scalar_pde_residual(g, &p, kind, h, false).map(|v| v.norm()))
                    .collect::<Result<_, _>>()
                    .map_err(e)?;
                for o in order(&res) {
                    worst_order = worst_order.min(o);
                    best_order = best_order.max(o);
                }
            }
        }
    }
    let pass = sfc <= 1e-8 && worst_order >= 1.8 && best_order <= 2.2;
    Ok(verdict(
        pass,
        format!(
            "max SFC residual {sfc:.2e} (≤ 1e-8); FD eikonal/wave observed order ∈ [{worst_order:.3}, {best_order:.3}] (expect 2 ± 0.2)"
        ),
    ))
}

fn static_phi(p: &[f64; 4]) -> adw_core::Result<Biquaternion> {
    Ok(phi_from_branch(&KerrBranch::stereo(1.0), p, &Tolerances::default())?.phi)
}

fn static_field(p: &[f64; 4]) -> adw_core::Result<FieldStrength> {
    em_field_i(static_phi, p, 1e-4, true)
}

fn c3_charge_quantization() -> Result<Verdict, String> {
    let origin = [0.0; 4];
    let mut worst = 0.0f64;
    let mut qs = Vec::new();
    for r in [0.5, 1.0, 2.0] {
        let q = charge_flux(static_field, &origin, r, 32).map_err(e)?.norm();
        worst = worst.max((q - 0.25).abs());
        qs.push(format!("{q:.9}"));
    }
    let outside = charge_flux(static_field, &[0.0, 3.0, 0.0, 0.0], 1.0, 32).map_err(e)?.norm();
    Ok(verdict(
        worst <= 1e-3 && outside <= 1e-6,
        format!(
            "|q| at r = 0.5, 1, 2: [{}], max |q − 1/4| {worst:.2e} (≤ 1e-3); off-origin sphere |q| {outside:.2e} (≤ 1e-6)",
            qs.join(", ")
        ),
    ))
}

fn c4_self_duality() -> Result<Verdict, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut f_worst, mut c_worst) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let p = off_axis(&mut rng);
        f_worst = f_worst.max(duality_invariants(&static_field(&p).map_err(e)?).selfdual_residual);
        c_worst = c_worst.max(duality_invariants(&screw_field(&p).map_err(e)?).selfdual_residual);
    }
    Ok(verdict(
        f_worst <= 1e-5 && c_worst <= 1e-5,
        format!("100 points; static F residual {f_worst:.2e}, screw C residual {c_worst:.2e} (each ≤ 1e-5)"),
    ))
}

fn c5_screw_closed_form() -> Result<Verdict, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut comp, mut inv, mut fd) = (0.0f64, 0.0f64, 0.0f64);
    let mut n = 0;
    while n < 100 {
        let r = rng.random_range(0.3..3.0);
        let th: f64 = rng.random_range(0.05..3.0);
        let ph: f64 = rng.random_range(-PI..PI);
        let p = [0.0, r * th.sin() * ph.cos(), r * th.sin() * ph.sin(), r * th.cos()];
        let want = screw_closed_form(r, th, ph);
        let c = screw_field(&p).map_err(e)?;
        let got = spherical_components(&c, &p);
        let scale = want[1].norm();
        comp = comp.max((0..3).map(|k| (got[k] - want[k]).norm() / scale).fold(0.0, f64::max));
        let d = duality_invariants(&c);
        inv = inv.max(d.i1.norm().max(d.i2.norm()));
        // The same field through the generic second-type constructor with FD gradients.
        let alpha = |q: [f64; 4]| KerrBranch::stereo(1.0).value(&q);
        let beta = |q: [f64; 4]| Ok(C64::new(q[0] + (q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt(), 0.0));
        let g = em_field_ii(alpha, beta, &p, 1e-3 * r, true).map_err(e)?;
        fd = fd.max(g.sub(&c).norm() / c.norm());
        n += 1;
    }
    Ok(verdict(
        comp <= 1e-6 && inv <= 1e-8,
        format!(
            "100 points with θ < 3; max relative componentwise error {comp:.2e} (≤ 1e-6); max |I₁|, |I₂| {inv:.2e} (≤ 1e-8); FD constructor agrees to {fd:.1e}"
        ),
    ))
}

fn c6_weyl() -> Result<Verdict, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let p = off_axis(&mut rng);
        let psi1 = |q: [f64; 4]| weyl_ansatz(&q).map(|w| w.0);
        let psi2 = |q: [f64; 4]| weyl_ansatz(&q).map(|w| w.1);
        let h = 1e-3 * (p[1] * p[1] + p[2] * p[2] + p[3] * p[3]).sqrt();
        let r = weyl_residual(psi1, psi2, &p, h, true).map_err(e)?;
        worst = worst.max(r[0].norm().max(r[1].norm()));
    }
    Ok(verdict(worst <= 1e-6, format!("100 points, max residual {worst:.2e} (≤ 1e-6)")))
}

fn c7_kerr_ring() -> Result<Verdict, String> {
    let tol = Tolerances::default();
    let mut parts = Vec::new();
    let mut pass = true;
    for a in [0.5, 1.0, 2.0] {
        let half = 1.5 * a + 0.3;
        let grid = Grid4::spatial_cube(0.0, -half, half, 64).map_err(e)?;
        let h = grid.max_spatial_spacing();
        let frame = extract_locus(&GenFuncProjective::kerr(a), &grid, &tol).map_err(e)?;
        let err = frame
            .points
            .iter()
            .map(|p| (p.x.hypot(p.y) - a).abs().max(p.z.abs()))
            .fold(0.0, f64::max);
        let ok = !frame.points.is_empty() && err <= h;
        pass &= ok;
        parts.push(format!("a = {a}: {} points, max error {err:.1e} vs spacing {h:.3}", frame.points.len()));
    }
    Ok(verdict(pass, format!("64³ grids; {}", parts.join("; "))))
}

fn c8_null_cone() -> Result<Verdict, String> {
    let tol = Tolerances::default();
    let mut parts = Vec::new();
    let mut pass = true;
    for b in &BUNDLED_PAIRS {
        let grid = Grid4::spatial_cube(0.0, -2.0, 2.0, 16).map_err(e)?;
        let pts = pair_singular_points(&GenFuncPair::bundled(b), &grid, &tol).map_err(e)?;
        let undefined = pts.iter().filter(|s| s.null_cone.is_none()).count();
        let worst = pts.iter().filter_map(|s| s.null_cone).map(|c| c.norm()).fold(0.0, f64::max);
        pass &= !pts.is_empty() && undefined == 0 && worst <= 1e-6;
        parts.push(format!("{}: {} points, max |det(Ẑ − Z)| {worst:.1e}, {undefined} undefined", b.name, pts.len()));
    }
    Ok(verdict(pass, format!("{} (≤ 1e-6)", parts.join("; "))))
}

fn c9_spinor_gradient() -> Result<Verdict, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let tol = Tolerances::default();
    let mut worst = 0.0f64;
    let mut count = 0;
    while count < 20 {
        let mut z = Biquaternion::identity();
        for r in 0..2 {
            for c in 0..2 {
                z.set(r, c, C64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)));
            }
        }
        if z.norm_det().norm() < 0.2 {
            continue;
        }
        let cvec = [C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)), C64::new(0.7, -0.3)];
        let pair = GenFuncPair::constant_twistor(cvec);
        let sols = solve_bispinor(&pair, &z, &tol).map_err(e)?;
        let [sol] = sols.as_slice() else { return Err(format!("{} solutions", sols.len())) };
        let g = spinor_gradient(&pair, &z, &sol.xi).map_err(e)?;
        let h = 1e-5;
        for b in 0..2 {
            for d in 0..2 {
                let shifted = |s: f64| -> Result<[C64; 2], String> {
                    let mut zz = z;
                    zz.set(b, d, z.get(b, d) + s);
                    let sols = solve_bispinor(&pair, &zz, &tol).map_err(e)?;
                    Ok(sols[0].xi.as_array())
                };
                let (up, dn) = (shifted(h)?, shifted(-h)?);
                for k in 0..2 {
                    let fd = (up[k] - dn[k]) / (2.0 * h);
                    let denom = g.iter().flatten().flatten().map(|v| v.norm()).fold(0.0, f64::max);
                    worst = worst.max((fd - g[k][b][d]).norm() / denom);
                }
            }
        }
        count += 1;
    }
    Ok(verdict(worst <= 1e-5, format!("20 random invertible Z, max relative error {worst:.2e} (≤ 1e-5)")))
}

fn random_worldline(rng: &mut ChaCha8Rng) -> Result<PolyWorldline, String> {
    let deg = rng.random_range(2..=4);
    let mut coords: Vec<Vec<f64>> = Vec::new();
    for mu in 0..4 {
        let mut c: Vec<f64> = (0..=deg).map(|_| rng.random_range(-1.0..1.0)).collect();
        if mu == 0 {
            c[1] = 2.0;
        }
        c[0] += if mu == 1 { 6.0 } else { 0.0 };
        coords.push(c);
    }
    PolyWorldline::from_real([&coords[0], &coords[1], &coords[2], &coords[3]]).map_err(e)
}

fn c10_uwl_conservation() -> Result<Verdict, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let tol = Tolerances::default();
    let taus: Vec<f64> = (0..200).map(|k| 10.0 * k as f64 / 199.0).collect();
    let inertial = PolyWorldline::inertial([0.0, -2.0, 1.0, 0.5], [1.0, 0.2, -0.1, 0.3]).map_err(e)?;
    let accelerated = PolyWorldline::from_real([&[0.0, 1.0], &[-2.0, 0.0, 0.3], &[1.0], &[0.5]]).map_err(e)?;
    let (mut worst, mut weakest, mut flagged) = (0.0f64, f64::INFINITY, true);
    let mut all_complete = true;
    for _ in 0..5 {
        let wl = random_worldline(&mut rng)?;
        let rep = conservation_report(&wl, &inertial, &taus, &tol).map_err(e)?;
        all_complete &= rep.complete && !rep.flagged_non_conservative();
        worst = worst.max(rep.max_momentum_deviation.max(rep.max_angular_momentum_deviation));
        let acc = conservation_report(&wl, &accelerated, &taus, &tol).map_err(e)?;
        weakest = weakest.min(acc.max_momentum_deviation.max(acc.max_angular_momentum_deviation));
        flagged &= acc.flagged_non_conservative();
    }
    Ok(verdict(
        worst <= 1e-6 && all_complete && weakest > 1e-3 && flagged,
        format!(
            "5 worldlines (deg 2–4), 200 samples on [0, 10]: inertial max deviation {worst:.2e} (≤ 1e-6); degree-2 observer min deviation {weakest:.2e} (> 1e-3), flagged: {flagged}"
        ),
    ))
}

fn c11_annihilation_timing() -> Result<Verdict, String> {
    let tol = Tolerances::default();
    let sys = ImplicitUWL::parse(["x^2 - t", "y", "z"]).map_err(e)?;
    let mut worst = 0.0f64;
    let mut kinds = Vec::new();
    for (a, b, n) in [(1.0, -1.0, 50), (-1.0, 1.0, 41), (-0.37, 0.81, 23)] {
        let times: Vec<f64> = (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect();
        let (_, log) = implicit_events(&sys, &times, &tol).map_err(e)?;
        if log.events.len() != 1 {
            return Ok(verdict(false, format!("{} events on [{a}, {b}]", log.events.len())));
        }
        worst = worst.max(log.events[0].time.abs());
        kinds.push(format!("{:?}", log.events[0].kind));
    }
    Ok(verdict(worst <= 1e-9, format!("three samplings, |t*| ≤ {worst:.1e} (≤ 1e-9); kinds {}", kinds.join("/"))))
}

fn c12_polarization() -> Result<Verdict, String> {
    let n_theta = 13;
    let n_phi = 24;
    let pol = render_polarization(screw_field, 1.0, n_theta, n_phi).map_err(e)?;
    let mut eq: Vec<(f64, f64)> =
        pol.arrows.iter().filter(|a| (a.theta - PI / 2.0).abs() < 1e-12).map(|a| (a.phi, a.angle)).collect();
    eq.sort_by(|a, b| a.0.total_cmp(&b.0));
    if eq.len() != n_phi {
        return Ok(verdict(false, format!("{} equatorial arrows", eq.len())));
    }
    // Unwrap and fit angle = α + β φ.
    let mut unwrapped = vec![eq[0].1];
    for w in eq.windows(2) {
        let mut d = w[1].1 - w[0].1;
        d -= 2.0 * PI * (d / (2.0 * PI)).round();
        unwrapped.push(unwrapped.last().unwrap() + d);
    }
    let n = eq.len() as f64;
    let (mx, my) = (eq.iter().map(|p| p.0).sum::<f64>() / n, unwrapped.iter().sum::<f64>() / n);
    let sxy: f64 = eq.iter().zip(&unwrapped).map(|(p, y)| (p.0 - mx) * (y - my)).sum();
    let sxx: f64 = eq.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let fit = eq.iter().zip(&unwrapped).map(|(p, y)| (y - (my + slope * (p.0 - mx))).abs()).fold(0.0, f64::max);
    let pass = fit <= 1e-9 && slope.abs() > 0.5 && pol.max_radial <= 1e-10;
    Ok(verdict(
        pass,
        format!(
            "equator arrow angle linear in φ: slope {slope:.6}, max fit residual {fit:.1e}; max |C_r| {:.1e} (≤ 1e-10) over {} arrows",
            pol.max_radial,
            pol.arrows.len()
        ),
    ))
}

fn main() {
    let s = Duration::from_secs;
    let results = [
        run(1, "stereographic branches", Some(s(1)), c1_stereographic_branches),
        run(2, "shear-free, eikonal and wave residuals", Some(s(10)), c2_shear_free_residuals),
        run(3, "charge quantization", Some(s(30)), c3_charge_quantization),
        run(4, "self-duality", None, c4_self_duality),
        run(5, "second-type field closed form", None, c5_screw_closed_form),
        run(6, "Weyl ansatz", None, c6_weyl),
        run(7, "Kerr ring", Some(s(60)), c7_kerr_ring),
        run(8, "null-cone membership", None, c8_null_cone),
        run(9, "analytic vs FD spinor gradients", None, c9_spinor_gradient),
        run(10, "UWL conservation", None, c10_uwl_conservation),
        run(11, "annihilation event timing", None, c11_annihilation_timing),
        run(12, "polarization figure", None, c12_polarization),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
