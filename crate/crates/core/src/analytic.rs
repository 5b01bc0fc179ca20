//! Closed-form European prices under arithmetic Brownian motion.
//!
//! Under the risk-neutral measure the underlying follows
//! `dS = (r - q) S dt + sigma_s dB`, so `S_T` is exactly Gaussian. Every
//! price here has the shape `e^{-q tau} h [d N(d) + n(d)]` with
//! `d = (S - K e^{-(r-q) tau}) / h` and `h` the effective standard deviation
//! returned by [`effective_stddev`].

use crate::error::{PricingError, Result};
use crate::normal::{cdf, pdf};
use crate::roots::brent;
use crate::types::{Exercise, MarketState, OptionContract, OptionKind, PriceQuote, Underlying};

/// Below this `|(r - q) tau|` the variance factor is evaluated by its Taylor series.
pub const SMALL_RATE_THRESHOLD: f64 = 1e-6;

/// `g(a, tau) = (1 - e^{-2 a tau}) / (2 a)`, with `g(0, tau) = tau`.
pub(crate) fn variance_factor(a: f64, tau: f64) -> f64 {
    let x = a * tau;
    if x.abs() < SMALL_RATE_THRESHOLD {
        tau * (1.0 - x + x * x * (2.0 / 3.0) - x * x * x / 3.0)
    } else {
        -(-2.0 * x).exp_m1() / (2.0 * a)
    }
}

/// `dg/da`.
fn variance_factor_rate_derivative(a: f64, tau: f64) -> f64 {
    let x = a * tau;
    if x.abs() < SMALL_RATE_THRESHOLD {
        tau * tau * (-1.0 + x * (4.0 / 3.0) - x * x + x * x * x * (8.0 / 15.0))
    } else {
        (tau * (-2.0 * x).exp() - variance_factor(a, tau)) / a
    }
}

/// Effective normal standard deviation `h = sigma_s * sqrt(g(r - q, tau))`.
///
/// Depends on `(t, T)` only through `tau`. Exactly `sigma_s * sqrt(tau)`
/// when `r == q`.
pub fn effective_stddev(sigma_s: f64, r_minus_q: f64, tau: f64) -> Result<f64> {
    if !(sigma_s.is_finite() && r_minus_q.is_finite() && tau.is_finite()) {
        return Err(PricingError::Domain(
            "non-finite input to effective_stddev".into(),
        ));
    }
    if tau < 0.0 {
        return Err(PricingError::Domain(format!(
            "tau must be non-negative, got {tau}"
        )));
    }
    if sigma_s < 0.0 {
        return Err(PricingError::Domain(format!(
            "sigma_s must be non-negative, got {sigma_s}"
        )));
    }
    Ok(sigma_s * variance_factor(r_minus_q, tau).sqrt())
}

/// Effective standard deviation together with the standardized moneyness `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceHorizon {
    pub h: f64,
    pub d: f64,
}

impl VarianceHorizon {
    pub fn new(ms: &MarketState, oc: &OptionContract) -> Result<Self> {
        ms.validate()?;
        oc.validate()?;
        let q = ms.yield_for(oc.underlying);
        let a = ms.rate - q;
        let tau = ms.tau();
        let h = effective_stddev(ms.sigma_s, a, tau)?;
        let x = ms.spot - oc.strike * (-a * tau).exp();
        let d = if h > 0.0 {
            x / h
        } else if x > 0.0 {
            f64::INFINITY
        } else if x < 0.0 {
            f64::NEG_INFINITY
        } else {
            0.0
        };
        Ok(Self { h, d })
    }
}

/// European price and Greeks, dispatching on the underlying kind.
///
/// `tau == 0` or `sigma_s == 0` returns the discounted forward intrinsic
/// with one-sided Greeks; at `tau == 0` the diffusion part of theta is
/// dropped (it is singular exactly at the strike).
pub fn price_european(ms: &MarketState, oc: &OptionContract) -> Result<PriceQuote> {
    ms.validate()?;
    oc.validate()?;
    if oc.exercise == Exercise::American {
        return Err(PricingError::UnsupportedExercise);
    }
    let q = ms.yield_for(oc.underlying);
    let mut quote = q_form(
        ms.spot,
        oc.strike,
        ms.sigma_s,
        ms.rate,
        q,
        ms.tau(),
        oc.kind,
    );
    if oc.underlying == Underlying::Futures {
        // q tracks r, so the e^{-q tau} factor carries the whole rate dependence
        let tau = ms.tau();
        quote.price = bachelier(ms.spot, oc.strike, ms.sigma_s, ms.rate, tau, oc.kind);
        quote.rho = -tau * quote.price;
    }
    Ok(quote)
}

/// Bachelier futures-option price `e^{-r tau} sigma sqrt(tau) [d N(d) + n(d)]`.
pub fn bachelier(
    forward: f64,
    strike: f64,
    sigma: f64,
    rate: f64,
    tau: f64,
    kind: OptionKind,
) -> f64 {
    let df = (-rate * tau).exp();
    let sd = sigma * tau.sqrt();
    if sd == 0.0 {
        return df * kind.payoff(forward, strike);
    }
    let d = (forward - strike) / sd;
    let v = match kind {
        OptionKind::Call => d * cdf(d) + pdf(d),
        OptionKind::Put => pdf(d) - d * cdf(-d),
    };
    (df * sd * v).max(0.0)
}

fn q_form(
    spot: f64,
    strike: f64,
    sigma: f64,
    r: f64,
    q: f64,
    tau: f64,
    kind: OptionKind,
) -> PriceQuote {
    let a = r - q;
    let g = variance_factor(a, tau);
    let sqrt_g = g.sqrt();
    let h = sigma * sqrt_g;
    let growth = (-a * tau).exp();
    let x = spot - strike * growth;
    let dq = (-q * tau).exp();
    let sign = match kind {
        OptionKind::Call => 1.0,
        OptionKind::Put => -1.0,
    };

    if h == 0.0 {
        let itm = sign * x > 0.0;
        let ind = if itm { 1.0 } else { 0.0 };
        let price = dq * (sign * x).max(0.0);
        let dx_dtau = a * strike * growth;
        let dx_da = tau * strike * growth;
        let vega = if x == 0.0 {
            dq * sqrt_g * pdf(0.0)
        } else {
            0.0
        };
        return PriceQuote {
            price,
            delta: sign * dq * ind,
            gamma: 0.0,
            vega,
            theta: -(-q * price + dq * ind * sign * dx_dtau),
            rho: dq * ind * sign * dx_da,
        };
    }

    let d = x / h;
    let nd = pdf(d);
    // N(sign * d)
    let cum = cdf(sign * d);
    let price = match kind {
        OptionKind::Call => dq * h * (d * cdf(d) + nd),
        OptionKind::Put => dq * h * (nd - d * cdf(-d)),
    }
    .max(0.0);

    // v = e^{-q tau} V(X, h) with dV/dX = sign N(sign d) and dV/dh = n(d)
    let dv_dx = sign * cum;
    let dh_dtau = sigma * sigma * (-2.0 * a * tau).exp() / (2.0 * h);
    let dx_dtau = a * strike * growth;
    let dprice_dtau = -q * price + dq * (dv_dx * dx_dtau + nd * dh_dtau);

    let dh_da = sigma * sigma * variance_factor_rate_derivative(a, tau) / (2.0 * h);
    let dx_da = tau * strike * growth;

    PriceQuote {
        price,
        delta: dq * dv_dx,
        gamma: dq * nd / h,
        vega: dq * nd * sqrt_g,
        theta: -dprice_dtau,
        rho: dq * (dv_dx * dx_da + nd * dh_da),
    }
}

/// The drift-`r` formula obtained by setting the ABM drift to the risk-free
/// rate directly: `e^{-r tau} sigma sqrt(tau) [d N(d) + n(d)]` with
/// `d = (S + r tau - K) / (sigma sqrt(tau))`.
///
/// This is *not* an arbitrage-free price. It is kept as a negative control:
/// it fails the pricing PDE and coincides with the correct call only at
/// `r = 0`.
pub fn price_naive_call(ms: &MarketState, strike: f64) -> Result<f64> {
    ms.validate()?;
    if !strike.is_finite() {
        return Err(PricingError::Domain(format!(
            "strike must be finite, got {strike}"
        )));
    }
    let tau = ms.tau();
    let r = ms.rate;
    let sd = ms.sigma_s * tau.sqrt();
    let df = (-r * tau).exp();
    let shifted = ms.spot + r * tau - strike;
    if sd == 0.0 {
        return Ok(df * shifted.max(0.0));
    }
    let d = shifted / sd;
    Ok(df * sd * (d * cdf(d) + pdf(d)))
}

/// `(c - p) - (S e^{-q tau} - K e^{-r tau})` for European options.
pub fn parity_gap(ms: &MarketState, strike: f64, underlying: Underlying) -> Result<f64> {
    let call = OptionContract::european(OptionKind::Call, strike, underlying);
    let put = call.with_kind(OptionKind::Put);
    let c = price_european(ms, &call)?.price;
    let p = price_european(ms, &put)?.price;
    let q = ms.yield_for(underlying);
    let tau = ms.tau();
    let forward_value = ms.spot * (-q * tau).exp() - strike * (-ms.rate * tau).exp();
    Ok((c - p) - forward_value)
}

/// Infinite-maturity call on a non-dividend underlying:
/// `S N(k S) + n(k S) / k` with `k = sqrt(2 r) / sigma_s`.
pub fn perpetual_call(spot: f64, sigma_s: f64, rate: f64) -> Result<f64> {
    if !(spot.is_finite() && sigma_s.is_finite() && rate.is_finite()) {
        return Err(PricingError::Domain(
            "non-finite input to perpetual_call".into(),
        ));
    }
    if rate <= 0.0 {
        return Err(PricingError::Domain(format!(
            "perpetual call diverges for non-positive rate {rate}"
        )));
    }
    if sigma_s < 0.0 {
        return Err(PricingError::Domain(format!(
            "sigma_s must be non-negative, got {sigma_s}"
        )));
    }
    if sigma_s == 0.0 {
        return Ok(spot.max(0.0));
    }
    let scale = sigma_s / (2.0 * rate).sqrt();
    let z = spot / scale;
    Ok(spot * cdf(z) + scale * pdf(z))
}

/// Range scanned by [`upper_bound_crossing`] for a sign change of `call(S) - S`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRange {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Default for ScanRange {
    fn default() -> Self {
        Self {
            lo: 0.0,
            hi: 100.0,
            points: 2001,
        }
    }
}

/// Spot at which a European call on a non-dividend underlying is worth
/// exactly the spot, i.e. where the call price crosses the limited-liability
/// upper bound `c <= S`.
///
/// Scans `range` for the first sign change of `call(S) - S` and polishes it
/// with Brent's method to 1e-9 in `S`. `Ok(None)` means no sign change in the
/// scanned range.
pub fn upper_bound_crossing(
    sigma_s: f64,
    rate: f64,
    strike: f64,
    tau: f64,
    range: ScanRange,
) -> Result<Option<f64>> {
    if range.points < 2 || !range.lo.is_finite() || !range.hi.is_finite() || range.hi <= range.lo {
        return Err(PricingError::Config(format!(
            "invalid scan range {range:?}"
        )));
    }
    let base = MarketState::new(0.0, sigma_s, rate, 0.0, tau);
    base.validate()?;
    let call = OptionContract::european(OptionKind::Call, strike, Underlying::NoDividend);
    let gap = |s: f64| -> f64 {
        let quote = q_form(s, call.strike, sigma_s, rate, 0.0, tau, OptionKind::Call);
        quote.price - s
    };

    let step = (range.hi - range.lo) / (range.points - 1) as f64;
    let mut prev_s = range.lo;
    let mut prev = gap(prev_s);
    if prev == 0.0 {
        return Ok(Some(prev_s));
    }
    for i in 1..range.points {
        let s = range.lo + i as f64 * step;
        let cur = gap(s);
        if cur == 0.0 {
            return Ok(Some(s));
        }
        if cur.signum() != prev.signum() {
            return brent(gap, prev_s, s, 1e-10, 200).map(Some);
        }
        prev_s = s;
        prev = cur;
    }
    Ok(None)
}
