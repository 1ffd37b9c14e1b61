use thiserror::Error;

/// Errors raised by the numeric kernels and distribution constructors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Distribution parameters violate the allowable-parameter rules.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// The density is unbounded at the requested point.
    #[error("density has a pole at {at}")]
    Pole { at: f64 },

    /// Adaptive quadrature did not reach the requested tolerance.
    #[error("quadrature did not converge: estimated relative error {achieved:e} > {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    /// The integrand does not decay fast enough for the integral to exist.
    #[error("divergent integral: {0}")]
    Divergent(String),

    /// A mixing density without a sampler was asked for draws.
    #[error("mixing density has no sampler")]
    MissingSampler,

    /// The scale matrix is singular or too badly conditioned.
    #[error("scale matrix rejected: estimated condition number {condition:e}")]
    IllConditioned { condition: f64 },

    /// A precondition on the shape of an input was not met.
    #[error("shape precondition failed: {0}")]
    Shape(String),
}

pub type Result<T> = std::result::Result<T, Error>;
