use thiserror::Error;

/// Everything that can go wrong in the analysis and simulation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid device parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("device does not lase: transparency photon number {n_t} must exceed 0.5")]
    NonLasingDevice { n_t: f64 },

    #[error("`{name}` must be non-negative, got {value}")]
    NegativeInput { name: &'static str, value: f64 },

    #[error("photon number {n_bar} is below the transparency photon number {n_t}")]
    BelowTransparency { n_bar: f64, n_t: f64 },

    #[error("linearized dynamics are not stable; eigenvalues {eigenvalues:?}")]
    UnstableLinearization { eigenvalues: [(f64, f64); 2] },

    #[error("no sign change of the noise-threshold condition on [{lo}, {hi}]")]
    NoRootFound { lo: f64, hi: f64 },

    #[error("time step {dt} s exceeds the stability limit {limit} s")]
    StepTooLarge { dt: f64, limit: f64 },

    #[error("estimated {estimated:.3e} events exceeds the budget of {cap:.3e}")]
    BudgetExceeded { estimated: f64, cap: f64 },

    #[error("statistics window is empty")]
    EmptyWindow,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("inconsistent device file: {0}")]
    InconsistentDevice(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("{0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable name of the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "InvalidParameter",
            Error::NonLasingDevice { .. } => "NonLasingDevice",
            Error::NegativeInput { .. } => "NegativeInput",
            Error::BelowTransparency { .. } => "BelowTransparency",
            Error::UnstableLinearization { .. } => "UnstableLinearization",
            Error::NoRootFound { .. } => "NoRootFound",
            Error::StepTooLarge { .. } => "StepTooLarge",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::EmptyWindow => "EmptyWindow",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::InconsistentDevice(_) => "InconsistentDevice",
            Error::UnknownPreset(_) => "UnknownPreset",
            Error::Io(_) => "Io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
