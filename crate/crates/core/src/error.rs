use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HopfError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("singular resolvent: {0}")]
    SingularResolvent(String),
    #[error("degenerate eigenstructure: {0}")]
    DegenerateEigenstructure(String),
    #[error("eigenvalue tracking ambiguous: {0}")]
    TrackingAmbiguity(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("step size underflow at t = {0}")]
    StiffnessFailure(f64),
    #[error("solution blew up at t = {0}")]
    BlowUp(f64),
    #[error("no limit cycle found: {0}")]
    NoCycleFound(String),
    #[error("shooting iteration failed: {0}")]
    ShootingFailure(String),
    #[error("invalid cycle: {0}")]
    InvalidCycle(String),
}

impl HopfError {
    /// Whether the error stems from a numerical breakdown rather than bad input.
    pub fn is_numerical(&self) -> bool {
        !matches!(self, HopfError::InvalidArgument(_) | HopfError::InvalidState(_))
    }
}

pub type Result<T, E = HopfError> = std::result::Result<T, E>;
