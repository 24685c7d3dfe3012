use std::io;
use std::path::PathBuf;

use monocube::Error as CoreError;

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {reason}", path.display())]
    Malformed { path: PathBuf, reason: String },
    #[error("writing report: {0}")]
    Encode(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn malformed(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        CliError::Malformed { path: path.into(), reason: reason.into() }
    }

    /// 0 success, 1 usage, 2 algorithmic precondition, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(e) => match e {
                CoreError::EpsilonOutOfRange(_)
                | CoreError::InvalidParameter(_)
                | CoreError::DimensionOutOfRange(..)
                | CoreError::InvalidPoint { .. }
                | CoreError::LevelOutOfRange { .. } => 1,
                _ => 2,
            },
            CliError::Io { .. } | CliError::Malformed { .. } | CliError::Encode(_) => 3,
        }
    }

    /// Stable identifier for scripts.
    pub fn reason(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io { .. } => "io",
            CliError::Malformed { .. } => "malformed_input",
            CliError::Encode(_) => "encode",
            CliError::Core(e) => match e {
                CoreError::DimensionOutOfRange(..) => "dimension_out_of_range",
                CoreError::DimensionMismatch(..) => "dimension_mismatch",
                CoreError::InvalidPoint { .. } => "invalid_point",
                CoreError::LevelOutOfRange { .. } => "level_out_of_range",
                CoreError::NotDominated { .. } => "not_dominated",
                CoreError::WindowTooLarge { .. } => "window_too_large",
                CoreError::InvalidDistribution(_) => "invalid_distribution",
                CoreError::InvalidWeights(_) => "invalid_weights",
                CoreError::NotMonotone => "not_monotone",
                CoreError::EpsilonOutOfRange(_) => "epsilon_out_of_range",
                CoreError::NoValidH0 { .. } => "no_valid_h0",
                CoreError::LpTooLarge(..) => "lp_too_large",
                CoreError::LpInfeasible => "lp_infeasible",
                CoreError::LpIterationLimit(_) => "lp_iteration_limit",
                CoreError::LpUnbounded => "lp_unbounded",
                CoreError::InvalidParameter(_) => "invalid_parameter",
            },
        }
    }

    /// One-line JSON for stderr.
    pub fn to_json(&self) -> String {
        serde_json::json!({
            "error": self.reason(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        })
        .to_string()
    }
}
