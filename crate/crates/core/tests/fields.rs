use adw_core::congruence::{KerrBranch, RatioField};
use adw_core::fields::*;
use adw_core::{Biquaternion, Spinor, Tolerances, C64};

fn static_phi(p: &[f64; 4]) -> adw_core::Result<Biquaternion> {
    Ok(phi_from_branch(&KerrBranch::stereo(1.0), p, &Tolerances::default())?.phi)
}

fn static_field(p: &[f64; 4]) -> adw_core::Result<FieldStrength> {
    em_field_i(static_phi, p, 1e-4, true)
}

#[test]
fn static_charge_is_a_quarter() {
    let q = charge_flux(static_field, &[0.0, 0.0, 0.0, 0.0], 1.0, 32).unwrap();
    assert!((q.norm() - 0.25).abs() < 1e-6, "{q}");
    let q = charge_flux(static_field, &[0.0, 0.0, 0.0, 0.0], 2.5, 32).unwrap();
    assert!((q.norm() - 0.25).abs() < 1e-6, "{q}");
    let off = charge_flux(static_field, &[0.0, 3.0, 0.0, 0.0], 1.0, 32).unwrap();
    assert!(off.norm() < 1e-6, "{off}");
}

#[test]
fn curvature_annihilates_the_spinor_and_traces_to_the_field() {
    let p = [0.0, 0.6, -0.8, 0.9];
    let r = matrix_curvature(static_phi, &p, 1e-4, true).unwrap();
    let g = KerrBranch::stereo(1.0).value(&p).unwrap();
    let scale = r.r.iter().flatten().map(|m| m.norm()).fold(0.0, f64::max);
    assert!(r.annihilation_residual(&Spinor::from_ratio(g)) < 1e-6 * scale.max(1.0));
    let f = static_field(&p).unwrap();
    assert!(r.trace_form().sub(&f).norm() < 1e-6 * f.norm());
}

#[test]
fn field_is_gauge_invariant() {
    let p = [0.2, 0.6, -0.8, 0.9];
    // Gradient of α = t·x + y·z².
    let dalpha = |q: &[f64; 4]| [q[1], q[0], q[3] * q[3], 2.0 * q[2] * q[3]];
    let shifted = |q: &[f64; 4]| {
        let a = static_phi(q)?.components();
        let d = dalpha(q);
        // Lower-index potential shifts by the gradient.
        Ok(Biquaternion::from_components(std::array::from_fn(|m| a[m] - d[m])))
    };
    let f0 = static_field(&p).unwrap();
    let f1 = em_field_i(shifted, &p, 1e-4, true).unwrap();
    assert!(f0.sub(&f1).norm() < 1e-7 * f0.norm());
}

#[test]
fn screw_field_matches_closed_form_and_is_null() {
    for &(r, th, ph) in &[(1.0f64, 0.7f64, 0.3f64), (2.0, 1.5, -2.0), (0.5, 2.2, 1.0)] {
        let p = [0.0, r * th.sin() * ph.cos(), r * th.sin() * ph.sin(), r * th.cos()];
        let c = screw_field(&p).unwrap();
        let sph = spherical_components(&c, &p);
        let want = screw_closed_form(r, th, ph);
        for k in 0..3 {
            assert!((sph[k] - want[k]).norm() < 1e-10 * want[1].norm(), "{k}: {} vs {}", sph[k], want[k]);
        }
        let d = duality_invariants(&c);
        assert!(d.i1.norm() < 1e-10 * c.norm().powi(2));
        assert!(d.i2.norm() < 1e-10 * c.norm().powi(2));
        assert!(d.selfdual_residual < 1e-12);
    }
}

#[test]
fn screw_field_is_closed_and_coclosed() {
    let p = [0.0, 0.6, -0.8, 0.9];
    let res = form_residuals(|q| screw_field(q), &p, 1e-3, true).unwrap();
    assert!(res.max_dc() < 1e-7, "{:?}", res.dc);
    assert!(res.max_d_star_c() < 1e-7, "{:?}", res.d_star_c);
}

#[test]
fn static_field_satisfies_maxwell() {
    let p = [0.0, 0.6, -0.8, 0.9];
    let res = form_residuals(static_field, &p, 1e-2, true).unwrap();
    assert!(res.max_dc() < 1e-5 && res.max_d_star_c() < 1e-5, "{res:?}");
}

#[test]
fn non_closed_ansatz_is_detected() {
    let c01 = |q: &[f64; 4]| {
        let mut f = TwoForm::zero();
        f.c[0][1] = C64::new(q[2], 0.0);
        f.c[1][0] = -f.c[0][1];
        Ok(f)
    };
    let res = form_residuals(c01, &[0.0, 0.3, 0.4, 0.5], 1e-3, false).unwrap();
    assert!((res.dc[3].norm() - 1.0).abs() < 1e-10);
}

#[test]
fn promoted_waves_satisfy_maxwell() {
    let profile = |s: f64| (-(s - 1.0) * (s - 1.0)).exp();
    for kind in [WaveKind::Advanced, WaveKind::Retarded] {
        let field = |q: &[f64; 4]| Ok(wave_promote(&screw_field(q)?, profile, kind, q));
        let res = form_residuals(field, &[0.3, 0.6, -0.8, 0.9], 1e-3, true).unwrap();
        assert!(res.max_dc() < 1e-6 && res.max_d_star_c() < 1e-6, "{kind:?} {res:?}");
    }
}

#[test]
fn weyl_ansatz_solves_the_equations() {
    let p = [0.0, 0.6, -0.8, 0.9];
    let psi1 = |q: [f64; 4]| weyl_ansatz(&q).map(|v| v.0);
    let psi2 = |q: [f64; 4]| weyl_ansatz(&q).map(|v| v.1);
    let r = weyl_residual(psi1, psi2, &p, 1e-3, true).unwrap();
    assert!(r[0].norm() < 1e-8 && r[1].norm() < 1e-8, "{r:?}");
}

#[test]
fn kerr_schild_of_static_congruence_is_schwarzschild() {
    let (m, p) = (0.4, [0.0, 0.6, -0.8, 0.9]);
    let r = (0.36f64 + 0.64 + 0.81).sqrt();
    let g = KerrBranch::stereo(1.0).value(&p).unwrap();
    let k = congruence_covector(g);
    let metric = kerr_schild(-2.0 * m / r, &k, &Tolerances::default()).unwrap();
    assert!((metric.g[0][0] - (1.0 - 2.0 * m / r)).abs() < 1e-12);
    assert!((metric.det + 1.0).abs() < 1e-12);
}

#[test]
fn static_field_is_self_dual_with_h_proportional_to_e() {
    for p in [[0.0, 0.6, -0.8, 0.9], [0.0, 1.0, 2.0, 2.0], [0.0, -1.5, 0.2, -0.3]] {
        let f = static_field(&p).unwrap();
        let d = duality_invariants(&f);
        assert!(d.selfdual_residual < 1e-6, "{p:?} {d:?}");
        let (e, h) = (f.e(), f.h());
        let best = [1.0, -1.0]
            .iter()
            .map(|s| (0..3).map(|k| (h[k] - C64::new(0.0, *s) * e[k]).norm()).fold(0.0, f64::max))
            .fold(f64::INFINITY, f64::min);
        assert!(best < 1e-6 * f.norm(), "{p:?}");
    }
}

#[test]
fn trace_free_curvature_is_self_dual() {
    let p = [0.0, 0.6, -0.8, 0.9];
    let r = matrix_curvature(static_phi, &p, 1e-3, true).unwrap();
    for row in r.trace_free() {
        for form in row {
            if form.norm() > 1e-6 {
                assert!(duality_invariants(&form).selfdual_residual < 1e-5);
            }
        }
    }
}

#[test]
fn stereo_potential_is_consistent() {
    let pm = phi_from_branch(&KerrBranch::stereo(1.0), &[0.0, 1.0, 2.0, 2.0], &Tolerances::default()).unwrap();
    assert!(pm.consistency < 1e-8);
    assert_eq!(pm.phi.get(0, 0), C64::new(0.0, 0.0));
    assert_eq!(pm.phi.get(0, 1), C64::new(0.0, 0.0));
    let back = PotentialMatrix::from_potential(pm.potential());
    assert!((back.phi - pm.phi).norm() < 1e-14);
}

#[test]
fn kerr_charge_is_quantised() {
    let branch = KerrBranch { a: 0.5, sign: 1.0 };
    let phi = |p: &[f64; 4]| Ok(phi_from_branch(&branch, p, &Tolerances::default())?.phi);
    let field = |p: &[f64; 4]| em_field_i(phi, p, 1e-4, true);
    let q = charge_flux(field, &[0.0; 4], 2.0, 32).unwrap();
    let n = (q.norm() * 4.0).round();
    assert!(n >= 1.0 && (q.norm() - n / 4.0).abs() < 1e-3, "{q}");
}

#[test]
fn static_field_is_radial_inverse_square() {
    let dir = [0.0, 0.48, -0.6, 0.64];
    let at = |r: f64| {
        let p = [0.0, dir[1] * r, dir[2] * r, dir[3] * r];
        let e = static_field(&p).unwrap().e();
        let radial = e[0] * dir[1] + e[1] * dir[2] + e[2] * dir[3];
        let total = e.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        (radial, total)
    };
    let (e1, t1) = at(1.0);
    let (e2, _) = at(2.0);
    assert!((e1.norm() - t1).abs() < 1e-6 * t1, "field is not radial");
    assert!((e1.norm() / e2.norm() - 4.0).abs() < 1e-5);
    assert!((e1.norm() - 0.25).abs() < 1e-6);
}
