use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use adw_bench::{sample_points, sample_twistor_matrix};
use adw_core::caustics::extract_locus;
use adw_core::congruence::{solve_bispinor, solve_branches, spinor_gradient, GenFuncPair, GenFuncProjective, KerrBranch};
use adw_core::fields::{em_field_i, phi_from_branch, screw_field};
use adw_core::uwl::{implicit_events, ImplicitUWL};
use adw_core::{Grid4, Tolerances, C64};

fn congruence(c: &mut Criterion) {
    let tol = Tolerances::default();
    let pts = sample_points(64);
    let kerr = GenFuncProjective::kerr(1.0);
    c.bench_function("solve_branches/kerr/64", |b| {
        b.iter(|| {
            for p in &pts {
                black_box(solve_branches(&kerr, p, &tol).unwrap());
            }
        })
    });
    let z = sample_twistor_matrix();
    let pair = GenFuncPair::constant_twistor([C64::new(0.3, -0.1), C64::new(0.7, -0.3)]);
    let xi = solve_bispinor(&pair, &z, &tol).unwrap()[0].xi;
    c.bench_function("spinor_gradient", |b| b.iter(|| black_box(spinor_gradient(&pair, &z, &xi).unwrap())));
}

fn fields(c: &mut Criterion) {
    let tol = Tolerances::default();
    let pts = sample_points(16);
    let branch = KerrBranch::stereo(1.0);
    let phi = |p: &[f64; 4]| Ok(phi_from_branch(&branch, p, &tol)?.phi);
    c.bench_function("em_field_i/static/16", |b| {
        b.iter(|| {
            for p in &pts {
                black_box(em_field_i(phi, p, 1e-4, true).unwrap());
            }
        })
    });
    c.bench_function("screw_field/16", |b| {
        b.iter(|| {
            for p in &pts {
                black_box(screw_field(p).unwrap());
            }
        })
    });
}

fn caustics(c: &mut Criterion) {
    let tol = Tolerances::default();
    let grid = Grid4::spatial_cube(0.0, -2.0, 2.0, 16).unwrap();
    let kerr = GenFuncProjective::kerr(1.0);
    c.bench_function("extract_locus/kerr/16^3", |b| b.iter(|| black_box(extract_locus(&kerr, &grid, &tol).unwrap())));
}

fn uwl(c: &mut Criterion) {
    let tol = Tolerances::default();
    let sys = ImplicitUWL::parse(["x^2 - t", "y", "z"]).unwrap();
    let times: Vec<f64> = (0..20).map(|k| -1.0 + 2.0 * k as f64 / 19.0).collect();
    c.bench_function("implicit_events/20", |b| b.iter(|| black_box(implicit_events(&sys, &times, &tol).unwrap())));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = congruence, fields, caustics, uwl
}
criterion_main!(benches);
