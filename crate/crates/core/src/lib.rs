//! Option pricing when the underlying follows an arithmetic Brownian motion.
//!
//! Prices are allowed to be negative, for both the underlying and the
//! strike. The crate provides closed-form European prices for three
//! underlying kinds, two independent oracles (quadrature and Monte Carlo),
//! finite-difference solvers for European and American exercise, and
//! calibration of `sigma_s` from option quotes or price history.

pub mod analytic;
pub mod calibration;
pub mod error;
pub mod normal;
pub mod oracle;
pub mod pde;
pub mod roots;
pub mod types;

pub use analytic::{
    bachelier, effective_stddev, parity_gap, perpetual_call, price_european, price_naive_call,
    upper_bound_crossing, ScanRange, VarianceHorizon,
};
pub use calibration::{historical_sigma, implied_sigma, ImpliedResult, PriceSeries};
pub use error::{PricingError, Result};
pub use normal::{inverse_cdf, std_normal_cdf, std_normal_pdf};
pub use oracle::{
    price_by_mc, price_by_quadrature, terminal_law, McConfig, McEstimate, TerminalLaw,
};
pub use pde::{pde_residual, solve_american, solve_european, GridSpec, PdeOperator, PriceGrid};
pub use types::{Exercise, MarketState, OptionContract, OptionKind, PriceQuote, Underlying};
