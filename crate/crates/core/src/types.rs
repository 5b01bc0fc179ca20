//! Market inputs and contract descriptions shared by every pricer.

use serde::{Deserialize, Serialize};

use crate::error::{PricingError, Result};

/// Observable market state at valuation time.
///
/// `spot` is unconstrained in sign: an arithmetic Brownian motion can and
/// does go negative. `sigma_s` is the standard deviation of price *changes*
/// per square-root year, in price units, not a return volatility.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketState {
    pub spot: f64,
    pub rate: f64,
    pub dividend_yield: f64,
    pub valuation_time: f64,
    pub maturity_time: f64,
    pub sigma_s: f64,
}

impl MarketState {
    /// Market state valued at `t = 0` with maturity `tau`.
    pub fn new(spot: f64, sigma_s: f64, rate: f64, dividend_yield: f64, tau: f64) -> Self {
        Self {
            spot,
            rate,
            dividend_yield,
            valuation_time: 0.0,
            maturity_time: tau,
            sigma_s,
        }
    }

    pub fn tau(&self) -> f64 {
        self.maturity_time - self.valuation_time
    }

    pub fn with_sigma(mut self, sigma_s: f64) -> Self {
        self.sigma_s = sigma_s;
        self
    }

    pub fn with_spot(mut self, spot: f64) -> Self {
        self.spot = spot;
        self
    }

    /// Moves valuation and maturity together, keeping `tau`.
    pub fn shifted(mut self, dt: f64) -> Self {
        self.valuation_time += dt;
        self.maturity_time += dt;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("spot", self.spot),
            ("rate", self.rate),
            ("dividend_yield", self.dividend_yield),
            ("valuation_time", self.valuation_time),
            ("maturity_time", self.maturity_time),
            ("sigma_s", self.sigma_s),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(PricingError::Domain(format!(
                    "{name} must be finite, got {v}"
                )));
            }
        }
        if self.sigma_s < 0.0 {
            return Err(PricingError::Domain(format!(
                "sigma_s must be non-negative, got {}",
                self.sigma_s
            )));
        }
        if self.tau() < 0.0 {
            return Err(PricingError::Domain(format!(
                "maturity {} precedes valuation time {}",
                self.maturity_time, self.valuation_time
            )));
        }
        Ok(())
    }

    /// The dividend yield the pricers actually use for `underlying`.
    pub fn yield_for(&self, underlying: Underlying) -> f64 {
        match underlying {
            Underlying::NoDividend => 0.0,
            Underlying::DividendYield => self.dividend_yield,
            Underlying::Futures => self.rate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptionKind {
    Call,
    Put,
}

impl OptionKind {
    pub fn payoff(self, underlying: f64, strike: f64) -> f64 {
        match self {
            OptionKind::Call => (underlying - strike).max(0.0),
            OptionKind::Put => (strike - underlying).max(0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exercise {
    European,
    American,
}

/// What the option is written on.
///
/// `Futures` is priced as a dividend-yield underlying with the yield equal
/// to the risk-free rate, so its risk-neutral drift vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Underlying {
    NoDividend,
    DividendYield,
    Futures,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptionContract {
    pub kind: OptionKind,
    pub exercise: Exercise,
    pub strike: f64,
    pub underlying: Underlying,
}

impl OptionContract {
    pub fn new(kind: OptionKind, exercise: Exercise, strike: f64, underlying: Underlying) -> Self {
        Self {
            kind,
            exercise,
            strike,
            underlying,
        }
    }

    pub fn european(kind: OptionKind, strike: f64, underlying: Underlying) -> Self {
        Self::new(kind, Exercise::European, strike, underlying)
    }

    pub fn american(kind: OptionKind, strike: f64, underlying: Underlying) -> Self {
        Self::new(kind, Exercise::American, strike, underlying)
    }

    pub fn with_kind(mut self, kind: OptionKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn payoff(&self, underlying: f64) -> f64 {
        self.kind.payoff(underlying, self.strike)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.strike.is_finite() {
            return Err(PricingError::Domain(format!(
                "strike must be finite, got {}",
                self.strike
            )));
        }
        Ok(())
    }
}

/// Price and first/second-order sensitivities.
///
/// `theta` is the derivative with respect to calendar (valuation) time at
/// fixed maturity; `vega` is with respect to `sigma_s`; `rho` is with
/// respect to `rate` at fixed dividend yield (for futures the yield moves
/// with the rate).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriceQuote {
    pub price: f64,
    pub delta: f64,
    pub gamma: f64,
    pub vega: f64,
    pub theta: f64,
    pub rho: f64,
}
