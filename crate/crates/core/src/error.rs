use thiserror::Error;

use crate::scenario::Violation;

/// Errors produced by the numerical kernels and the equilibrium pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is singular to working precision ({0}); use the normal-form mode")]
    Singular(String),

    #[error("scenario is invalid: {}", format_violations(.0))]
    InvalidScenario(Vec<Violation>),

    #[error("zero marginal probability for {firm} type {index}")]
    ZeroMarginal { firm: u8, index: usize },

    #[error(
        "boundary operator is singular (min |pivot| = {min_pivot:e}, max |pivot| = {max_pivot:e})"
    )]
    BoundarySolve { min_pivot: f64, max_pivot: f64 },

    #[error("cannot normalize costs: target of firm {firm} type {index} is zero")]
    Normalization { firm: u8, index: usize },

    #[error("grids do not match: {0}")]
    GridMismatch(String),

    #[error("index out of range: {0}")]
    Index(String),

    #[error("discrete functional is not positive definite at row {0}")]
    Formulation(usize),

    #[error("invalid argument: {0}")]
    Argument(String),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Input problems (bad scenario, bad arguments) as opposed to numerical failures.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidScenario(_)
                | Error::ZeroMarginal { .. }
                | Error::Normalization { .. }
                | Error::Index(_)
                | Error::Argument(_)
                | Error::GridMismatch(_)
                | Error::Dimension(_)
        )
    }
}
