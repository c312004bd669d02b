use thiserror::Error;

/// Errors raised by the laboratory operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("accuracy not reached: {0}")]
    AccuracyNotReached(String),
    #[error("division domain: {0}")]
    DivisionDomain(String),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("overflow guard: {0}")]
    Overflow(String),
    #[error("size limit: {0}")]
    SizeLimit(String),
    #[error("degenerate range: {0}")]
    DegenerateRange(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("placement failure: {0}")]
    PlacementFailure(String),
    #[error("no valid k: {0}")]
    NoValidK(String),
    #[error("missed zero suspected: {0}")]
    MissedZeroSuspected(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl LabError {
    /// True for the budget family, which the command line maps to its own exit code.
    pub fn is_budget(&self) -> bool {
        matches!(self, LabError::BudgetExceeded(_) | LabError::Overflow(_) | LabError::SizeLimit(_))
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
