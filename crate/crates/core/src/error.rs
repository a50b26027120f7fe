use thiserror::Error;

/// Every failure the library can report. Each variant maps to a stable
/// string code and to a process exit status used by the CLI.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported mode: {0}")]
    UnsupportedMode(String),

    #[error("equilibrium undefined: ps = {ps} >= 1")]
    NoInteriorEquilibrium { ps: f64 },

    #[error("step size underflow at r = {r:e} (h = {h:e}); the problem is too stiff for the explicit pair")]
    StepUnderflow { r: f64, h: f64 },

    #[error("maximum number of steps ({0}) exceeded")]
    TooManySteps(usize),

    #[error("Picard iteration diverged: sweep change grew for 3 consecutive sweeps (last change {0:e})")]
    PicardDivergence(f64),

    #[error("insufficient tail points for the blow-up fit: {found} < {needed}")]
    InsufficientTail { found: usize, needed: usize },

    #[error("no pole found in the tail of the solution")]
    NoPole,

    #[error("division by a vanishing quantity ({0})")]
    VanishingDenominator(&'static str),

    #[error("fit window too short: {decades:.3} decades < {required}")]
    ShortWindow { decades: f64, required: f64 },

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("monotonicity violated: {0}")]
    NonMonotone(String),

    #[error("not eligible: {0}")]
    Ineligible(String),

    #[error("unknown strategy `{name}` (available: {available})")]
    UnknownStrategy { name: String, available: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl LabError {
    pub fn code(&self) -> &'static str {
        match self {
            LabError::InvalidProblem(_) => "invalid_problem",
            LabError::InvalidArgument(_) => "invalid_argument",
            LabError::UnsupportedMode(_) => "unsupported_mode",
            LabError::NoInteriorEquilibrium { .. } => "no_interior_equilibrium",
            LabError::StepUnderflow { .. } => "stiffness_failure",
            LabError::TooManySteps(_) => "too_many_steps",
            LabError::PicardDivergence(_) => "picard_divergence",
            LabError::InsufficientTail { .. } => "insufficient_tail",
            LabError::NoPole => "no_pole",
            LabError::VanishingDenominator(_) => "vanishing_denominator",
            LabError::ShortWindow { .. } => "short_window",
            LabError::Quadrature(_) => "quadrature_failure",
            LabError::NonMonotone(_) => "non_monotone",
            LabError::Ineligible(_) => "ineligible",
            LabError::UnknownStrategy { .. } => "unknown_strategy",
            LabError::Io(_) => "io_error",
        }
    }

    /// Process exit status: 2 for bad input, 4 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::InvalidProblem(_)
            | LabError::InvalidArgument(_)
            | LabError::UnsupportedMode(_)
            | LabError::NoInteriorEquilibrium { .. }
            | LabError::Ineligible(_)
            | LabError::UnknownStrategy { .. }
            | LabError::ShortWindow { .. }
            | LabError::Io(_) => 2,
            LabError::StepUnderflow { .. }
            | LabError::TooManySteps(_)
            | LabError::PicardDivergence(_)
            | LabError::InsufficientTail { .. }
            | LabError::NoPole
            | LabError::VanishingDenominator(_)
            | LabError::Quadrature(_)
            | LabError::NonMonotone(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
