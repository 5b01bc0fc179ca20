//! Price oracles that never touch the closed forms.
//!
//! Both integrate the option payoff against the exact Gaussian law of `S_T`:
//! one by deterministic quadrature, one by sampling.

mod mc;
mod quadrature;

pub use mc::{price_by_mc, McConfig, McEstimate};
pub use quadrature::{gauss_legendre, price_by_quadrature};

use crate::analytic::variance_factor;
use crate::error::Result;
use crate::types::{MarketState, Underlying};

/// Risk-neutral law of the terminal underlying price, `N(mean, stddev^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TerminalLaw {
    pub mean: f64,
    pub stddev: f64,
}

/// `S_T = e^{(r-q) tau} [S_t + sigma_s e^{(r-q) t} X_T]` with
/// `X_T ~ N(0, (e^{-2(r-q)t} - e^{-2(r-q)T}) / (2(r-q)))`.
pub fn terminal_law(ms: &MarketState, underlying: Underlying) -> Result<TerminalLaw> {
    ms.validate()?;
    let a = ms.rate - ms.yield_for(underlying);
    let tau = ms.tau();
    let growth = (a * tau).exp();
    let stddev = if underlying == Underlying::Futures {
        ms.sigma_s * tau.sqrt()
    } else {
        ms.sigma_s * variance_factor(a, tau).sqrt() * growth
    };
    Ok(TerminalLaw {
        mean: ms.spot * growth,
        stddev,
    })
}
