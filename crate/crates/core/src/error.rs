use thiserror::Error;

/// Errors produced by parameter validation and the experiment procedures.
#[derive(Debug, Error)]
pub enum Error {
    /// A named parameter was rejected. `name` matches the CLI flag spelling
    /// (without the leading dashes) so front ends can point at the offender.
    #[error("{name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// `acceptance_rate` was requested before any candidate had been drawn.
    #[error("acceptance rate is undefined before any candidate has been drawn")]
    NoDraws,

    /// Bisection preconditions failed: the predicate `e_r(n) <= budget` does
    /// not change value across the search interval.
    #[error("no crossing of budget {budget} bracketed on [{lo}, {hi}]")]
    NoCrossing { lo: f64, hi: f64, budget: f64 },

    /// A search exhausted its iteration cap before the bracket shrank
    /// below the requested tolerance.
    #[error("search bracket stuck at width {width} (tolerance {tol})")]
    NoConvergence { width: f64, tol: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
