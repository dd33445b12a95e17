use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KopulaError {
    #[error("context error: {0}")]
    Context(String),
    #[error("argument error: {0}")]
    Argument(String),
    #[error("not a valid 2nd-kind distribution: p({subset}) = {value:e}")]
    NotSecondKind { subset: String, mask: u32, value: f64 },
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("conditioning error: {0}")]
    Conditioning(String),
    #[error("composition error: {0}")]
    Composition(String),
    #[error("missing parameter: {0}")]
    Dependency(String),
    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, KopulaError>;
