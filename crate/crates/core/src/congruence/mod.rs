//! Generating functions, congruence branches, full-spinor solutions and
//! their residual checks.

pub mod bispinor;
pub mod branches;
pub mod genfunc;
pub mod residuals;

pub use bispinor::{caustic_determinant, solve_bispinor, spinor_gradient, total_derivative, BispinorSolution};
pub use branches::{
    branch_continue, implicit_spinor_gradient, reduce_at_point, relabel_from, solve_branches, BranchField,
    BranchPoint, BranchValue, ConstantRatio, ImplicitBranch, KerrBranch, RatioField, SampledRatio,
};
pub use genfunc::{BundledPair, GenFuncPair, GenFuncProjective, BUNDLED_PAIRS};
pub use residuals::{
    orthogonality, scalar_pde_residual, sfc_residual, twistor_jet, twistor_rank, twistor_rank_check, PdeKind,
    TwistorJet,
};
