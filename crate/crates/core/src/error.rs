use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("region is empty: {0}")]
    EmptyRegion(String),
    #[error("sampling point ({x}, {y}) lies outside the source domain")]
    OutOfDomain { x: f64, y: f64 },
    #[error("moment condition violated: |∫ψ(s)e^(is) ds| = {0:e}")]
    MomentCondition(f64),
    #[error("entropy is not odd: π-periodicity defect {0:e}")]
    NotOdd(f64),
    #[error("inadmissible jump: normal component jumps by {0:e}")]
    InadmissibleJump(f64),
    #[error("compatibility violated: sup |∂₁a + ∂₂b| = {max_defect:e}")]
    Compatibility { max_defect: f64, defect: Vec<f64> },
    #[error("test function support violates the domain: {0}")]
    Support(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("non-finite energy encountered at iteration {iteration}")]
    BlowUp { iteration: usize },
    #[error("field format: {0}")]
    Format(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
