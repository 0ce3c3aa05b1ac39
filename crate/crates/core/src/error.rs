use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("expected excess return must be positive, got mu = {0}")]
    NegativeExcessReturn(f64),
    #[error("volatility must be positive, got sigma = {0}")]
    NonpositiveVolatility(f64),
    #[error("risk aversion must be positive, got gamma = {0}")]
    NonpositiveRiskAversion(f64),
    #[error("bid-ask spread must lie in [0, 1), got epsilon = {0}")]
    SpreadOutOfRange(f64),
    #[error("parameter {name} is not finite")]
    NonFiniteParameter { name: &'static str },
    #[error("Riccati discriminant vanishes at lambda = {lambda} (a = {a:e})")]
    DiscriminantDegenerate { lambda: f64, a: f64 },
    #[error("closed-form w has a pole between 0 and y = {y}")]
    PoleEncountered { y: f64 },
    #[error("trading boundary is singular at lambda = {lambda} (a boundary weight equals one)")]
    BoundarySingular { lambda: f64 },
    #[error("no sign change of the boundary residual on lambda in [{from:e}, {to:e}]")]
    NoBracket { from: f64, to: f64 },
    #[error("no-trade interval has zero width")]
    DegenerateInterval,
    #[error("liquidation value of the initial position is not positive ({0})")]
    NonpositiveWealth(f64),
    #[error("w(y) = 1 at y = {y}; the shadow quantities are undefined")]
    Degenerate { y: f64 },
    #[error("time step {step} exceeds the reflection guard {limit}")]
    StepTooCoarse { step: f64, limit: f64 },
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("power utility is degenerate: {0}")]
    DegenerateUtility(String),
    #[error("malformed row at line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("negative value at line {line}: {column} = {value}")]
    NegativeValue { line: usize, column: String, value: f64 },
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable variant name, used as the diagnostic printed by front ends.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NegativeExcessReturn(_) => "NegativeExcessReturn",
            Error::NonpositiveVolatility(_) => "NonpositiveVolatility",
            Error::NonpositiveRiskAversion(_) => "NonpositiveRiskAversion",
            Error::SpreadOutOfRange(_) => "SpreadOutOfRange",
            Error::NonFiniteParameter { .. } => "NonFiniteParameter",
            Error::DiscriminantDegenerate { .. } => "DiscriminantDegenerate",
            Error::PoleEncountered { .. } => "PoleEncountered",
            Error::BoundarySingular { .. } => "BoundarySingular",
            Error::NoBracket { .. } => "NoBracket",
            Error::DegenerateInterval => "DegenerateInterval",
            Error::NonpositiveWealth(_) => "NonpositiveWealth",
            Error::Degenerate { .. } => "Degenerate",
            Error::StepTooCoarse { .. } => "StepTooCoarse",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::DegenerateUtility(_) => "DegenerateUtility",
            Error::MalformedRow { .. } => "MalformedRow",
            Error::NegativeValue { .. } => "NegativeValue",
            Error::Io(_) => "Io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
