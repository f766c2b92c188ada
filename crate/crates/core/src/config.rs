//! Central tolerance record. Every threshold used by the kernels lives here.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Relative leading-coefficient magnitude below which a root moves to infinity.
    pub infinity_rel: f64,
    /// Cluster radius factor for multiplicity detection: `r * (1 + |root|)`.
    pub cluster_rel: f64,
    /// Residual budget for simple roots, relative to `1 + max|coeff|`.
    pub root_residual: f64,
    pub collision_eps: f64,
    /// Real/complex classification threshold, scaled by `1 + |value|`.
    pub eps_real: f64,
    pub locus_tol: f64,
    /// Singular values below `rank_rel * sigma_max` count as zero.
    pub rank_rel: f64,
    /// Relative FD step: `h = fd_rel * (1 + |X|)`.
    pub fd_rel: f64,
    pub hermitian: f64,
    pub unimodular: f64,
    pub null_vector: f64,
    pub light_cone: f64,
    /// Consistency residual above which a branch is rejected as non-congruent.
    pub congruence_reject: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            infinity_rel: 1e-12,
            cluster_rel: 1e-6,
            root_residual: 1e-10,
            collision_eps: 1e-5,
            eps_real: 1e-9,
            locus_tol: 1e-8,
            rank_rel: 1e-7,
            fd_rel: 1e-3,
            hermitian: 1e-14,
            unimodular: 1e-10,
            null_vector: 1e-10,
            light_cone: 1e-8,
            congruence_reject: 1e-2,
            max_iterations: 500,
            seed: 0,
        }
    }
}

impl Tolerances {
    pub fn fd_step(&self, point: &[f64; 4]) -> f64 {
        let norm = point.iter().map(|v| v * v).sum::<f64>().sqrt();
        self.fd_rel * (1.0 + norm)
    }
}
