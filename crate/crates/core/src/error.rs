use thiserror::Error;

/// Failures raised by the numerical and field-theoretic kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("polynomial is identically zero")]
    IdenticallyZero,
    #[error("degree too low: need at least {needed}, got {got}")]
    DegreeTooLow { needed: usize, got: usize },
    #[error("resultant of two constants is undefined")]
    BothConstant,
    #[error("sampler failed at point {point:?}: {reason}")]
    Sampler { point: [f64; 4], reason: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("matrix is not Hermitian")]
    NotHermitian,
    #[error("null divisor not invertible")]
    NullDivisor,
    #[error("transformation is not unimodular (det = {0})")]
    NotUnimodular(String),
    #[error("zero spinor")]
    ZeroSpinor,
    #[error("degenerate point: generating function vanishes identically")]
    DegeneratePoint,
    #[error("solution set is not isolated")]
    NonIsolated,
    #[error("caustic point: {0}")]
    CausticPoint(String),
    #[error("not a congruence (consistency residual {0:.3e})")]
    NotACongruence(f64),
    #[error("string undefined for this pair")]
    StringUndefined,
    #[error("vector is not null (norm {0:.3e})")]
    NotNull(f64),
    #[error("observer on worldline")]
    ObserverOnWorldline,
    #[error("not on light cone (det {0:.3e})")]
    NotOnLightCone(f64),
    #[error("coincident point")]
    CoincidentPoint,
    #[error("non-generic system: elimination degenerates")]
    NonGenericSystem,
    #[error("outside degree caps: {0}")]
    DegreeCap(String),
    #[error("singularity too close to the integration surface")]
    SingularSurface,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("no convergence: {0}")]
    NoConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
