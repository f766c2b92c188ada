//! Built-in field sources shared by the `fields` and `render` modes.

use adw_core::congruence::KerrBranch;
use adw_core::fields::{em_field_i, phi_from_branch, screw_field, TwoForm};
use adw_core::{Result, Tolerances};

use crate::config::FieldSource;

/// FD step for differentiating the potential matrix of a branch.
pub const POTENTIAL_FD_STEP: f64 = 1e-4;

/// Field strength of a source at a point.
pub struct FieldSampler {
    source: FieldSource,
    branch: KerrBranch,
    tol: Tolerances,
}

impl FieldSampler {
    /// `kerr_a` is ignored for the static and screw sources; `branch` picks
    /// the sign of the root.
    pub fn new(source: FieldSource, kerr_a: f64, branch: f64, tol: Tolerances) -> Self {
        let a = if source == FieldSource::Kerr { kerr_a } else { 0.0 };
        let sign = if branch < 0.0 { -1.0 } else { 1.0 };
        Self { source, branch: KerrBranch { a, sign }, tol }
    }

    pub fn field(&self, p: &[f64; 4]) -> Result<TwoForm> {
        match self.source {
            FieldSource::Screw => screw_field(p),
            FieldSource::Static | FieldSource::Kerr => em_field_i(
                |q: &[f64; 4]| Ok(phi_from_branch(&self.branch, q, &self.tol)?.phi),
                p,
                POTENTIAL_FD_STEP,
                true,
            ),
        }
    }
}
