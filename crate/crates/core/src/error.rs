use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Zero or negative impact parameter where a finite transverse kick is required.
    #[error("impact parameter must be positive for a nonzero angular-momentum transfer (got b = {0} nm)")]
    BSingularity(f64),

    #[error("no finite solution: {0}")]
    NoFiniteSolution(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("profile has no interior peak: {0}")]
    NoPeak(String),

    /// Every sublevel amplitude vanishes, so probabilities and means are undefined.
    #[error("undefined sublevel distribution: all amplitudes vanish")]
    UndefinedDistribution,

    #[error("no absorption: beam factor vanishes over the target")]
    NoAbsorption,

    #[error("solver error: {0}")]
    Solver(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("unknown figure id `{0}`")]
    UnknownFigure(String),

    #[error("figure `{figure}` has no parameter `{name}`")]
    UnknownParameter { figure: String, name: String },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

impl Error {
    /// Stable machine-readable code, printed by the CLI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain(_) => "DOMAIN",
            Error::BSingularity(_) => "B_SINGULARITY",
            Error::NoFiniteSolution(_) => "NO_FINITE_SOLUTION",
            Error::Config(_) => "CONFIG",
            Error::NoPeak(_) => "NO_PEAK",
            Error::UndefinedDistribution => "UNDEFINED_DISTRIBUTION",
            Error::NoAbsorption => "NO_ABSORPTION",
            Error::Solver(_) => "SOLVER",
            Error::Quadrature(_) => "QUADRATURE",
            Error::Fit(_) => "FIT",
            Error::UnknownFigure(_) => "UNKNOWN_FIGURE",
            Error::UnknownParameter { .. } => "UNKNOWN_PARAMETER",
            Error::InvalidGrid(_) => "INVALID_GRID",
        }
    }

    /// True for errors caused by how the tool was invoked rather than by the numerics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::UnknownFigure(_) | Error::UnknownParameter { .. } | Error::InvalidGrid(_)
        )
    }
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
