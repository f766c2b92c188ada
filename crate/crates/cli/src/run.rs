//! Mode runners. Each one turns a validated configuration into files in the
//! output sink; the caller writes the manifest.

use rayon::prelude::*;
use serde::Serialize;

use adw_core::caustics::{pair_singular_points, track_locus};
use adw_core::congruence::{branch_continue, GenFuncPair, GenFuncProjective, BUNDLED_PAIRS};
use adw_core::fields::{charge_flux, duality_invariants};
use adw_core::uwl::{conservation_report, evolve, implicit_events, ImplicitUWL, PolyWorldline, RootClass};
use adw_core::{Grid4, C64};

use crate::config::{Mode, RunConfig};
use crate::error::CliError;
use crate::io::{fmt_f64, OutputSink};
use crate::render::render_polarization;
use crate::sources::FieldSampler;

/// Result of a full run: the manifest is always written when the output
/// directory is usable.
pub fn execute(mode: Mode, cfg: &RunConfig) -> Result<crate::io::Manifest, CliError> {
    cfg.validate(mode)?;
    let mut sink = OutputSink::create(std::path::Path::new(&cfg.output_dir))?;
    let outcome = match mode {
        Mode::Congruence => run_congruence(cfg, &mut sink),
        Mode::Caustics => run_caustics(cfg, &mut sink),
        Mode::Fields => run_fields(cfg, &mut sink),
        Mode::Uwl => run_uwl(cfg, &mut sink),
        Mode::Render => run_render(cfg, &mut sink),
    };
    match outcome {
        Ok(()) => sink.finish(mode, cfg, None),
        // Bad input discovered while building the problem: no manifest.
        Err(e @ (CliError::Config(_) | CliError::Output(_))) => Err(e),
        Err(e) => {
            sink.finish(mode, cfg, Some(&e))?;
            Err(e)
        }
    }
}

fn grid(cfg: &RunConfig, t: f64) -> Result<Grid4, CliError> {
    let g = &cfg.grid;
    Grid4::spatial_box(t, g.lo, g.hi, g.n).map_err(CliError::config)
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

fn f(v: f64) -> String {
    fmt_f64(v)
}

fn projective(pi: &str, kerr_a: f64) -> Result<GenFuncProjective, CliError> {
    let g = GenFuncProjective::parse(pi).map_err(CliError::config)?;
    let zero = C64::new(0.0, 0.0);
    Ok(if kerr_a != 0.0 { g.with_shift([zero, zero, zero, C64::new(0.0, kerr_a)]) } else { g })
}

fn run_congruence(cfg: &RunConfig, sink: &mut OutputSink) -> Result<(), CliError> {
    let spec = cfg.congruence.as_ref().expect("validated");
    let pi = projective(&spec.pi, spec.kerr_a)?;
    let grid = grid(cfg, cfg.grid.t)?;
    let field = branch_continue(&pi, &grid, &cfg.tolerances)?;
    let rows: Vec<Vec<String>> = field
        .rows()
        .map(|(idx, b)| {
            let p = grid.point(grid.unflat(idx));
            let (re, im, inf) = match b.g {
                Some(g) => (g.re, g.im, 0),
                None => (f64::NAN, f64::NAN, 1),
            };
            vec![
                f(p[0]),
                f(p[1]),
                f(p[2]),
                f(p[3]),
                b.label.to_string(),
                f(re),
                f(im),
                inf.to_string(),
                b.multiplicity.to_string(),
            ]
        })
        .collect();
    sink.csv(
        "branches.csv",
        "branches/1",
        &["t", "x", "y", "z", "branch", "g_re", "g_im", "at_infinity", "multiplicity"],
        &rows,
    )?;
    sink.note("nominal_degree", field.nominal_degree);
    sink.note("label_count", field.label_count);
    sink.note("degenerate_points", field.points.iter().filter(|p| p.degenerate).count());
    sink.note("monodromy_plaquettes", &field.monodromy);
    sink.note("unmatched_points", &field.unmatched);
    Ok(())
}

fn run_caustics(cfg: &RunConfig, sink: &mut OutputSink) -> Result<(), CliError> {
    let spec = cfg.caustics.as_ref().expect("validated");
    let tol = &cfg.tolerances;
    if let Some(text) = &spec.pi {
        let pi = projective(text, spec.kerr_a)?;
        let times = cfg.grid.times.clone().unwrap_or_else(|| vec![cfg.grid.t]);
        let g = grid(cfg, times[0])?;
        let frames = track_locus(&pi, &g, &times, tol)?;
        let rows: Vec<Vec<String>> = frames
            .iter()
            .enumerate()
            .flat_map(|(k, fr)| {
                fr.points.iter().map(move |p| {
                    vec![k.to_string(), f(p.t), f(p.x), f(p.y), f(p.z), f(p.residual)]
                })
            })
            .collect();
        sink.csv("locus.csv", "locus/1", &["frame", "t", "x", "y", "z", "residual"], &rows)?;
        sink.note("locus_points_per_frame", frames.iter().map(|fr| fr.points.len()).collect::<Vec<_>>());
    }
    let pair = match (&spec.pair, &spec.pi1, &spec.pi2) {
        (Some(name), _, _) => {
            let b = BUNDLED_PAIRS.iter().find(|b| b.name == name).expect("validated");
            Some(GenFuncPair::bundled(b))
        }
        (None, Some(p1), Some(p2)) => Some(GenFuncPair::parse(p1, p2).map_err(CliError::config)?),
        _ => None,
    };
    if let Some(pair) = pair {
        let g = grid(cfg, cfg.grid.t)?;
        let pts = pair_singular_points(&pair, &g, tol)?;
        let rows: Vec<Vec<String>> = pts
            .iter()
            .map(|s| {
                let p = &s.point;
                let mut r = vec![f(p.t), f(p.x), f(p.y), f(p.z), f(p.residual)];
                for z in [s.xi.s0, s.xi.s1] {
                    r.extend([f(z.re), f(z.im)]);
                }
                let nan = C64::new(f64::NAN, f64::NAN);
                for z in s.zhat.unwrap_or([nan; 4]) {
                    r.extend([f(z.re), f(z.im)]);
                }
                let nc = s.null_cone.unwrap_or(nan);
                r.extend([f(nc.re), f(nc.im)]);
                r
            })
            .collect();
        let header = [
            "t", "x", "y", "z", "residual", "xi0_re", "xi0_im", "xi1_re", "xi1_im", "zhat00_re", "zhat00_im",
            "zhat01_re", "zhat01_im", "zhat10_re", "zhat10_im", "zhat11_re", "zhat11_im", "null_cone_re",
            "null_cone_im",
        ];
        sink.csv("pair_singular.csv", "pair_singular/1", &header, &rows)?;
        let worst = pts.iter().filter_map(|s| s.null_cone).map(|c| c.norm()).fold(0.0, f64::max);
        sink.note("pair_singular_points", pts.len());
        sink.note("string_undefined_points", pts.iter().filter(|s| s.zhat.is_none()).count());
        sink.note("max_null_cone", worst);
    }
    Ok(())
}

#[derive(Serialize)]
struct ChargeRecord {
    center: [f64; 4],
    radius: f64,
    q_re: f64,
    q_im: f64,
    q_abs: f64,
}

fn run_fields(cfg: &RunConfig, sink: &mut OutputSink) -> Result<(), CliError> {
    let spec = cfg.fields.as_ref().expect("validated");
    let sampler = FieldSampler::new(spec.source, spec.kerr_a, spec.branch, cfg.tolerances);
    let grid = grid(cfg, cfg.grid.t)?;
    let points: Vec<[f64; 4]> = grid.points().collect();
    // Singular grid points (axis, ring, origin) are kept as invalid rows.
    let samples: Vec<Option<_>> = points
        .par_iter()
        .map(|p| sampler.field(p).ok().map(|c| (c, duality_invariants(&c))))
        .collect();

    let mut header: Vec<String> = ["t", "x", "y", "z", "valid"].map(String::from).to_vec();
    for comp in &spec.components {
        for axis in ["x", "y", "z"] {
            for part in ["re", "im"] {
                header.push(format!("{}{axis}_{part}", comp.to_lowercase()));
            }
        }
    }
    header.extend(["selfdual_residual", "selfdual_sign"].map(String::from));
    let width = header.len();
    let rows: Vec<Vec<String>> = points
        .iter()
        .zip(&samples)
        .map(|(p, s)| {
            let mut r: Vec<String> = p.iter().map(|&v| f(v)).collect();
            match s {
                Some((c, d)) => {
                    r.push("1".into());
                    for comp in &spec.components {
                        let v = match comp.as_str() {
                            "E" => c.e(),
                            "H" => c.h(),
                            _ => c.complex_vector(),
                        };
                        for z in v {
                            r.extend([f(z.re), f(z.im)]);
                        }
                    }
                    r.extend([f(d.selfdual_residual), f(d.sign)]);
                }
                None => {
                    r.push("0".into());
                    r.resize(width, f(f64::NAN));
                }
            }
            r
        })
        .collect();
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    sink.csv("fields.csv", "fields/1", &header_refs, &rows)?;
    let valid = samples.iter().filter(|s| s.is_some()).count();
    sink.note("valid_points", valid);
    sink.note("singular_points", samples.len() - valid);
    if valid == 0 {
        return Err(CliError::Numerical(adw_core::Error::NoConvergence(
            "field is singular at every grid point".into(),
        )));
    }
    let worst = samples.iter().flatten().map(|(_, d)| d.selfdual_residual).fold(0.0, f64::max);
    sink.note("max_selfdual_residual", worst);

    if !spec.charge_radii.is_empty() {
        let center = [cfg.grid.t, 0.0, 0.0, 0.0];
        let charges = spec
            .charge_radii
            .iter()
            .map(|&radius| {
                let q = charge_flux(|p: &[f64; 4]| sampler.field(p), &center, radius, spec.quadrature_order)?;
                Ok(ChargeRecord { center, radius, q_re: q.re, q_im: q.im, q_abs: q.norm() })
            })
            .collect::<Result<Vec<_>, adw_core::Error>>()?;
        sink.json("charge.json", "charge/1", &charges)?;
    }
    Ok(())
}

fn worldline(texts: &[String; 4]) -> Result<PolyWorldline, CliError> {
    PolyWorldline::parse([&texts[0], &texts[1], &texts[2], &texts[3]].map(String::as_str)).map_err(CliError::config)
}

fn run_uwl(cfg: &RunConfig, sink: &mut OutputSink) -> Result<(), CliError> {
    let spec = cfg.uwl.as_ref().expect("validated");
    let tol = &cfg.tolerances;
    let wl = worldline(&spec.worldline)?;
    let observer = worldline(&spec.observer)?;
    let taus = linspace(spec.tau[0], spec.tau[1], spec.samples);
    let implicit = match &spec.implicit {
        Some(t) => Some(ImplicitUWL::parse([&t[0], &t[1], &t[2]].map(String::as_str)).map_err(CliError::config)?),
        None => None,
    };

    let evo = evolve(&wl, &observer, &taus, tol)?;
    let mut rows = Vec::new();
    for (k, &tau) in evo.tracked.params.iter().enumerate() {
        for (label, sigma) in evo.tracked.roots_at(k) {
            let class = match RootClass::of(sigma, tol.eps_real) {
                RootClass::R => "R",
                RootClass::C => "C",
            };
            let pos = wl.position(sigma);
            let mut r = vec![f(tau), label.to_string(), f(sigma.re), f(sigma.im), class.to_string()];
            for z in &pos[1..] {
                r.extend([f(z.re), f(z.im)]);
            }
            rows.push(r);
        }
    }
    let header =
        ["tau", "root", "sigma_re", "sigma_im", "class", "x_re", "x_im", "y_re", "y_im", "z_re", "z_im"];
    sink.csv("trajectories.csv", "trajectories/1", &header, &rows)?;
    sink.json("events.json", "events/1", &evo.events)?;

    let report = conservation_report(&wl, &observer, &taus, tol)?;
    sink.note("max_momentum_deviation", report.max_momentum_deviation);
    sink.note("max_angular_momentum_deviation", report.max_angular_momentum_deviation);
    sink.note("flagged_non_conservative", report.flagged_non_conservative());
    sink.json("conservation.json", "conservation/1", &report)?;

    if let Some(sys) = implicit {
        let [a, b] = spec.times.unwrap_or([-1.0, 1.0]);
        let (tracked, log) = implicit_events(&sys, &linspace(a, b, spec.samples), tol)?;
        sink.note("implicit_events", log.events.len());
        sink.json("implicit_events.json", "implicit_events/1", &serde_json::json!({ "tracked": tracked, "events": log }))?;
    }
    Ok(())
}

fn run_render(cfg: &RunConfig, sink: &mut OutputSink) -> Result<(), CliError> {
    let spec = cfg.render.as_ref().expect("validated");
    let sampler = FieldSampler::new(spec.source, spec.kerr_a, 1.0, cfg.tolerances);
    let pol = render_polarization(|p: &[f64; 4]| sampler.field(p), spec.radius, spec.n_theta, spec.n_phi)?;
    sink.note("arrows", pol.arrows.len());
    sink.note("max_radial", pol.max_radial);
    let svg = pol.to_svg();
    sink.text(&spec.file, "svg", "polarization-svg/1", pol.arrows.len(), &svg)?;
    sink.json("arrows.json", "arrows/1", &pol)?;
    Ok(())
}
