use thiserror::Error;

pub type Result<T> = std::result::Result<T, PricingError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PricingError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("american exercise is not supported by this pricer; use the PDE solver")]
    UnsupportedExercise,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("grid error: {0}")]
    Grid(String),

    #[error("PSOR did not converge after {sweeps} sweeps (last change {last_change:e}) at time step {step}")]
    PsorNonConvergence {
        sweeps: usize,
        last_change: f64,
        step: usize,
    },

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("price {price} is below the no-arbitrage lower bound {bound}")]
    ArbitrageViolation { price: f64, bound: f64 },

    #[error("data error: {0}")]
    Data(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for PricingError {
    fn from(e: std::io::Error) -> Self {
        PricingError::Io(e.to_string())
    }
}
