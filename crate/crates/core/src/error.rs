use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension must be at least 2, got {0}")]
    InvalidDimension(usize),

    #[error("dimension {dim} needs {expected} couplings, got {got}")]
    CouplingLength {
        dim: usize,
        expected: usize,
        got: usize,
    },

    #[error("non-finite coupling g_{index}")]
    NonFiniteCoupling { index: usize },

    #[error("gamma_{index} = {gamma} exceeds 1, coupling would be imaginary")]
    ImaginaryCoupling { index: usize, gamma: f64 },

    #[error("odd dimension {dim}: constant term {value:e} of the characteristic polynomial does not vanish")]
    OddConstantTerm { dim: usize, value: f64 },

    #[error("closed-form criteria cover J = 1..5 only, got J = {0}; use the spectral oracle")]
    UnsupportedJ(usize),

    #[error("band is undefined: B = {b:e} is not above eps_B = {eps_b:e}")]
    DegenerateBand { b: f64, eps_b: f64 },

    #[error("root finder did not converge after {iterations} iterations (backward error {residual:e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        best: Vec<(f64, f64)>,
    },

    #[error("polynomial must be monic with at least one coefficient")]
    NotMonic,

    #[error("ray origin is not inside the domain ({0})")]
    OriginNotInside(String),

    #[error("no boundary crossing found along the ray within radius {cap}")]
    NoSignChange { cap: f64 },

    #[error("no double exceptional point with a in [1, 3] at c = {c}")]
    NoDepRoot { c: f64 },

    #[error("invalid slice: {0}")]
    InvalidSlice(String),

    #[error("invalid tolerance configuration: {0}")]
    InvalidTolerance(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable machine-readable identifier.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidDimension(_) => "invalid_dimension",
            Error::CouplingLength { .. } => "coupling_length",
            Error::NonFiniteCoupling { .. } => "non_finite_coupling",
            Error::ImaginaryCoupling { .. } => "imaginary_coupling",
            Error::OddConstantTerm { .. } => "odd_constant_term",
            Error::UnsupportedJ(_) => "unsupported_j",
            Error::DegenerateBand { .. } => "degenerate_band",
            Error::NoConvergence { .. } => "no_convergence",
            Error::NotMonic => "not_monic",
            Error::OriginNotInside(_) => "origin_not_inside",
            Error::NoSignChange { .. } => "no_sign_change",
            Error::NoDepRoot { .. } => "no_dep_root",
            Error::InvalidSlice(_) => "invalid_slice",
            Error::InvalidTolerance(_) => "invalid_tolerance",
            Error::InvalidArgument(_) => "invalid_argument",
        }
    }
}
