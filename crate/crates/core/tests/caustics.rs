use adw_core::caustics::*;
use adw_core::congruence::{GenFuncPair, BUNDLED_PAIRS};
use adw_core::{Grid4, Tolerances};

#[test]
fn bundled_pair_singular_points_lie_on_the_ring_and_the_null_cone() {
    let tol = Tolerances::default();
    for b in &BUNDLED_PAIRS {
        let pair = GenFuncPair::bundled(b);
        let grid = Grid4::spatial_cube(0.0, -2.0, 2.0, 12).unwrap();
        let pts = pair_singular_points(&pair, &grid, &tol).unwrap();
        assert!(pts.len() >= 8, "{}: {} points", b.name, pts.len());
        for s in &pts {
            let rho = s.point.x.hypot(s.point.y);
            assert!((rho - b.ring_radius).abs() < 1e-10 && s.point.z.abs() < 1e-10, "{:?}", s.point);
            let nc = s.null_cone.expect("string defined on the bundled rings");
            assert!(nc.norm() <= 1e-6, "{}: {nc}", b.name);
        }
    }
}

#[test]
fn singular_tau_derivative_leaves_string_undefined() {
    // ∂Π²/∂τ = (1, 1) is parallel to ∂Π¹/∂τ = (ξ¹, −ξ⁰) where ξ¹/ξ⁰ = −1,
    // which the merging spinor reaches on the ring at (0, −1, 0).
    let tol = Tolerances::default();
    let pair = GenFuncPair::parse("xi1*tau0 - xi0*tau1 + 2i*xi0*xi1", "tau0 + tau1 - 1").unwrap();
    let grid = Grid4::spatial_cube(0.0, -2.0, 2.0, 16).unwrap();
    let pts = pair_singular_points(&pair, &grid, &tol).unwrap();
    assert!(pts.iter().any(|s| s.zhat.is_none() || (s.point.x.abs() < 1e-3 && s.point.y < 0.0)));
    for s in pts.iter().filter(|s| s.point.x.hypot(s.point.y + 1.0) > 0.1) {
        assert!(s.null_cone.unwrap().norm() <= 1e-6);
    }
}
