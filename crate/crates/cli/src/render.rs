//! Polarization pictures: the tangential part of `Re(E + iH)` on a sphere,
//! drawn as arrows in an orthographic view.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use adw_core::fields::{spherical_components, spherical_frame, TwoForm};
use adw_core::{Error, Result};

/// Rows closer than this to the south pole are skipped; the stereographic
/// fields blow up there.
pub const SOUTH_POLE_MARGIN: f64 = 0.1;

/// View elevation above the equator, radians.
const ELEVATION: f64 = 0.35;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arrow {
    pub theta: f64,
    pub phi: f64,
    /// Direction in the tangent plane, `atan2(Re C_φ, Re C_θ)`.
    pub angle: f64,
    pub magnitude: f64,
    /// `|C_r|`, which vanishes for a field tangent to the sphere.
    pub radial: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polarization {
    pub radius: f64,
    pub n_theta: usize,
    pub n_phi: usize,
    pub arrows: Vec<Arrow>,
    pub max_radial: f64,
}

/// Samples the field at `θ_i = π(i + ½)/n_θ`, `φ_j = 2πj/n_φ` on the sphere
/// of the given radius at `t = 0`. Points where the field vanishes produce
/// no arrow.
pub fn render_polarization<F>(field: F, radius: f64, n_theta: usize, n_phi: usize) -> Result<Polarization>
where
    F: Fn(&[f64; 4]) -> Result<TwoForm>,
{
    if n_theta == 0 || n_phi == 0 || !(radius > 0.0) {
        return Err(Error::InvalidArgument("empty polarization grid".into()));
    }
    let mut arrows = Vec::new();
    let mut max_radial = 0.0f64;
    for i in 0..n_theta {
        let theta = PI * (i as f64 + 0.5) / n_theta as f64;
        if theta > PI - SOUTH_POLE_MARGIN {
            continue;
        }
        for j in 0..n_phi {
            let phi = 2.0 * PI * j as f64 / n_phi as f64;
            let p = [0.0, radius * theta.sin() * phi.cos(), radius * theta.sin() * phi.sin(), radius * theta.cos()];
            let c = field(&p)?;
            let [cr, cth, cph] = spherical_components(&c, &p);
            let (a, b) = (cth.re, cph.re);
            let magnitude = a.hypot(b);
            let radial = cr.norm();
            max_radial = max_radial.max(radial);
            if magnitude == 0.0 {
                continue;
            }
            arrows.push(Arrow { theta, phi, angle: b.atan2(a), magnitude, radial });
        }
    }
    Ok(Polarization { radius, n_theta, n_phi, arrows, max_radial })
}

fn view_axes() -> ([f64; 3], [f64; 3], [f64; 3]) {
    let (s, c) = ELEVATION.sin_cos();
    // Toward the viewer, screen right, screen up.
    ([c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c])
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

impl Polarization {
    /// Orthographic SVG of the front hemisphere. Arrows have a common length;
    /// the output depends only on the arrow data.
    pub fn to_svg(&self) -> String {
        const SIZE: f64 = 400.0;
        let scale = 0.42 * SIZE;
        let centre = SIZE / 2.0;
        let (view, right, up) = view_axes();
        let arrow_len = 0.75 * PI / self.n_theta.max(1) as f64;
        let screen = |v: [f64; 3]| (centre + scale * dot(&v, &right), centre - scale * dot(&v, &up));

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
        );
        s.push_str(
            "<defs><marker id=\"head\" markerWidth=\"6\" markerHeight=\"6\" refX=\"5\" refY=\"3\" orient=\"auto\">\
             <path d=\"M0,0 L6,3 L0,6 z\" fill=\"#1f4e8c\"/></marker></defs>\n",
        );
        let _ = writeln!(
            s,
            r##"<circle cx="{centre:.3}" cy="{centre:.3}" r="{scale:.3}" fill="#f4f4f4" stroke="#555" stroke-width="1"/>"##
        );
        for a in &self.arrows {
            let p = [a.theta.sin() * a.phi.cos(), a.theta.sin() * a.phi.sin(), a.theta.cos()];
            if dot(&p, &view) <= 0.0 {
                continue;
            }
            let frame = spherical_frame(&[0.0, p[0], p[1], p[2]]);
            let (ca, sa) = (a.angle.cos(), a.angle.sin());
            let t: [f64; 3] = std::array::from_fn(|k| arrow_len * (ca * frame[1][k] + sa * frame[2][k]));
            let (x0, y0) = screen(std::array::from_fn(|k| p[k] - 0.5 * t[k]));
            let (x1, y1) = screen(std::array::from_fn(|k| p[k] + 0.5 * t[k]));
            let _ = writeln!(
                s,
                r##"<line x1="{x0:.3}" y1="{y0:.3}" x2="{x1:.3}" y2="{y1:.3}" stroke="#1f4e8c" stroke-width="1.5" marker-end="url(#head)"/>"##
            );
        }
        s.push_str("</svg>\n");
        s
    }
}
