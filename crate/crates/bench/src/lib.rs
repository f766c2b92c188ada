//! Fixtures shared by the benchmarks.

use adw_core::biquat::Biquaternion;
use adw_core::C64;

/// Deterministic off-axis spacetime points on a shell of radii in `[0.5, 2]`.
pub fn sample_points(n: usize) -> Vec<[f64; 4]> {
    (0..n)
        .map(|k| {
            let s = (k as f64 + 0.5) / n as f64;
            let r = 0.5 + 1.5 * s;
            let theta = 0.3 + 2.5 * ((k * 7 % n) as f64 + 0.5) / n as f64;
            let phi = 2.399_963 * k as f64;
            [0.1 * k as f64, r * theta.sin() * phi.cos(), r * theta.sin() * phi.sin(), r * theta.cos()]
        })
        .collect()
}

/// A well-conditioned complex position matrix.
pub fn sample_twistor_matrix() -> Biquaternion {
    let mut z = Biquaternion::identity();
    z.set(0, 0, C64::new(1.2, 0.3));
    z.set(0, 1, C64::new(-0.4, 0.7));
    z.set(1, 0, C64::new(0.5, -0.2));
    z.set(1, 1, C64::new(0.9, 0.1));
    z
}
