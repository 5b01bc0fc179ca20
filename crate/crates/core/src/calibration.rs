//! Implied and historical `sigma_s`.

use std::io::Read;

use chrono::NaiveDate;

use crate::analytic::price_european;
use crate::error::{PricingError, Result};
use crate::types::{Exercise, MarketState, OptionContract};

/// Slack below the discounted forward intrinsic before a quote is rejected.
const LOWER_BOUND_SLACK: f64 = 1e-12;
const MAX_ITERATIONS: usize = 200;
const PRICE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpliedResult {
    pub sigma_s: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// Inverts the closed-form European price for `sigma_s`.
///
/// `ms.sigma_s` is ignored. Quotes are bounded below by the discounted
/// forward intrinsic; there is no upper bound, because a call on an
/// underlying that can go negative may legitimately be worth more than the
/// spot. Newton steps on the analytic vega, safeguarded by bisection on a
/// bracket grown geometrically from `[1e-12, 1]`.
pub fn implied_sigma(
    ms: &MarketState,
    oc: &OptionContract,
    market_price: f64,
) -> Result<ImpliedResult> {
    oc.validate()?;
    if oc.exercise == Exercise::American {
        return Err(PricingError::UnsupportedExercise);
    }
    if !market_price.is_finite() {
        return Err(PricingError::Domain(format!(
            "market price must be finite, got {market_price}"
        )));
    }
    let base = ms.with_sigma(0.0);
    base.validate()?;
    let price_at = |sigma: f64| price_european(&base.with_sigma(sigma), oc);

    let bound = price_at(0.0)?.price;
    if market_price < bound - LOWER_BOUND_SLACK {
        return Err(PricingError::ArbitrageViolation {
            price: market_price,
            bound,
        });
    }
    if market_price <= bound {
        return Ok(ImpliedResult {
            sigma_s: 0.0,
            iterations: 0,
            residual: (market_price - bound).abs(),
        });
    }
    if base.tau() == 0.0 {
        return Err(PricingError::Domain(format!(
            "price {market_price} exceeds intrinsic {bound} at expiry; no sigma_s reproduces it"
        )));
    }

    let objective = |sigma: f64| -> Result<(f64, f64)> {
        let q = price_at(sigma)?;
        Ok((q.price - market_price, q.vega))
    };

    let mut lo = 1e-12;
    let mut hi = 1.0;
    let mut iterations = 0;
    while objective(hi)?.0 < 0.0 {
        lo = hi;
        hi *= 2.0;
        iterations += 1;
        if iterations >= MAX_ITERATIONS || !hi.is_finite() {
            return Err(PricingError::NoConvergence {
                iterations,
                residual: objective(lo)?.0.abs(),
            });
        }
    }
    if objective(lo)?.0 > 0.0 {
        // price is within the first bracket's bottom; 1e-12 is the floor we resolve
        let residual = objective(lo)?.0.abs();
        return Ok(ImpliedResult {
            sigma_s: lo,
            iterations,
            residual,
        });
    }

    let mut sigma = 0.5 * (lo + hi);
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let (f, vega) = objective(sigma)?;
        if f > 0.0 {
            hi = sigma;
        } else {
            lo = sigma;
        }
        let step = if vega > 0.0 { f / vega } else { f64::INFINITY };
        // deep in or out of the money a 1e-10 price residual still leaves
        // sigma loose, so also wait for the Newton step to vanish
        let settled = f == 0.0 || step.abs() <= 1e-13 * sigma;
        let collapsed = hi - lo <= 4.0 * f64::EPSILON * hi;
        if (settled || collapsed) && f.abs() <= PRICE_TOLERANCE {
            return Ok(ImpliedResult {
                sigma_s: sigma,
                iterations,
                residual: f.abs(),
            });
        }
        if collapsed {
            break;
        }
        let newton = sigma - step;
        sigma = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Err(PricingError::NoConvergence {
        iterations,
        residual: objective(sigma)?.0.abs(),
    })
}

/// Ordered price observations; timestamps are in days.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    observations: Vec<(f64, f64)>,
    year_fraction_per_step: f64,
}

impl PriceSeries {
    pub const TRADING_DAYS: f64 = 252.0;

    pub fn new(observations: Vec<(f64, f64)>) -> Result<Self> {
        if let Some((t, p)) = observations
            .iter()
            .find(|(t, p)| !t.is_finite() || !p.is_finite())
        {
            return Err(PricingError::Data(format!(
                "non-finite observation ({t}, {p})"
            )));
        }
        for w in observations.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(PricingError::Data(format!(
                    "timestamps must be strictly increasing ({} then {})",
                    w[0].0, w[1].0
                )));
            }
        }
        Ok(Self {
            observations,
            year_fraction_per_step: 1.0 / Self::TRADING_DAYS,
        })
    }

    /// Builds a series with unit-spaced timestamps.
    pub fn from_prices(prices: &[f64]) -> Result<Self> {
        Self::new(
            prices
                .iter()
                .enumerate()
                .map(|(i, p)| (i as f64, *p))
                .collect(),
        )
    }

    pub fn with_step(mut self, year_fraction: f64) -> Result<Self> {
        if !(year_fraction > 0.0 && year_fraction.is_finite()) {
            return Err(PricingError::Data(format!(
                "step must be a positive year fraction, got {year_fraction}"
            )));
        }
        self.year_fraction_per_step = year_fraction;
        Ok(self)
    }

    pub fn observations(&self) -> &[(f64, f64)] {
        &self.observations
    }

    pub fn year_fraction_per_step(&self) -> f64 {
        self.year_fraction_per_step
    }

    /// Reads `date,price` CSV with ISO-8601 dates. Malformed rows are errors
    /// that name their line.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| PricingError::Data(format!("line 1: {e}")))?
            .clone();
        let names: Vec<&str> = headers.iter().map(str::trim).collect();
        if names != ["date", "price"] {
            return Err(PricingError::Data(format!(
                "line 1: expected header `date,price`, got `{}`",
                names.join(",")
            )));
        }
        let epoch = NaiveDate::from_ymd_opt(1970, 1, 1).expect("valid epoch");
        let mut observations = Vec::new();
        for record in rdr.records() {
            let record = record.map_err(|e| {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                PricingError::Data(format!("line {line}: {e}"))
            })?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            if record.len() != 2 {
                return Err(PricingError::Data(format!(
                    "line {line}: expected 2 fields, got {}",
                    record.len()
                )));
            }
            let date = NaiveDate::parse_from_str(record[0].trim(), "%Y-%m-%d").map_err(|e| {
                PricingError::Data(format!("line {line}: bad date `{}`: {e}", &record[0]))
            })?;
            let price: f64 = record[1].trim().parse().map_err(|_| {
                PricingError::Data(format!("line {line}: bad price `{}`", &record[1]))
            })?;
            if !price.is_finite() {
                return Err(PricingError::Data(format!("line {line}: non-finite price")));
            }
            let days = (date - epoch).num_days() as f64;
            if let Some(&(prev, _)) = observations.last() {
                if days <= prev {
                    return Err(PricingError::Data(format!(
                        "line {line}: date {} is not after the previous row",
                        &record[0]
                    )));
                }
            }
            observations.push((days, price));
        }
        Self::new(observations)
    }
}

/// `sqrt(Var[dS] / dt)`: unbiased sample variance of successive price
/// differences, one step being `year_fraction_per_step` years regardless of
/// calendar gaps.
pub fn historical_sigma(ps: &PriceSeries) -> Result<f64> {
    let obs = ps.observations();
    if obs.len() < 3 {
        return Err(PricingError::Data(format!(
            "need at least 3 observations, got {}",
            obs.len()
        )));
    }
    let diffs: Vec<f64> = obs.windows(2).map(|w| w[1].1 - w[0].1).collect();
    let n = diffs.len() as f64;
    let mean = diffs.iter().sum::<f64>() / n;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((var / ps.year_fraction_per_step()).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{OptionKind, Underlying};

    #[test]
    fn implied_recovers_benchmark() {
        let ms = MarketState::new(5.0, 0.0, 0.05, 0.0, 0.5);
        let oc = OptionContract::european(OptionKind::Call, 5.0, Underlying::NoDividend);
        let price = price_european(&ms.with_sigma(3.0), &oc).unwrap().price;
        let res = implied_sigma(&ms, &oc, price).unwrap();
        assert!((res.sigma_s - 3.0).abs() / 3.0 < 1e-8);
        assert!(res.residual <= 1e-10);
    }

    #[test]
    fn implied_at_lower_bound_is_zero() {
        let ms = MarketState::new(5.0, 0.0, 0.05, 0.0, 0.5);
        let oc = OptionContract::european(OptionKind::Call, 5.0, Underlying::NoDividend);
        let bound = 5.0 - 5.0 * (-0.025f64).exp();
        let res = implied_sigma(&ms, &oc, bound).unwrap();
        assert_eq!(res.sigma_s, 0.0);
    }

    #[test]
    fn implied_rejects_arbitrage() {
        let ms = MarketState::new(5.0, 0.0, 0.05, 0.0, 0.5);
        let oc = OptionContract::european(OptionKind::Call, 5.0, Underlying::NoDividend);
        assert!(matches!(
            implied_sigma(&ms, &oc, 0.1),
            Err(PricingError::ArbitrageViolation { .. })
        ));
    }

    #[test]
    fn implied_has_no_upper_bound_at_spot() {
        // call worth more than the spot, S = 0.5
        let ms = MarketState::new(0.5, 0.0, 0.05, 0.0, 0.5);
        let oc = OptionContract::european(OptionKind::Call, 5.0, Underlying::NoDividend);
        let price = price_european(&ms.with_sigma(40.0), &oc).unwrap().price;
        assert!(price > 0.5);
        let res = implied_sigma(&ms, &oc, price).unwrap();
        assert!((res.sigma_s - 40.0).abs() / 40.0 < 1e-8);
    }

    #[test]
    fn historical_examples() {
        let flat = PriceSeries::from_prices(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert!(historical_sigma(&flat).unwrap().abs() < 1e-12);
        let zigzag = PriceSeries::from_prices(&[10.0, 11.0, 10.0, 11.0, 10.0]).unwrap();
        // sample variance 4/3, so sqrt(4/3 * 252)
        assert!((historical_sigma(&zigzag).unwrap() - 18.330_302_779_823_36).abs() < 1e-12);
        let short = PriceSeries::from_prices(&[1.0, 2.0]).unwrap();
        assert!(matches!(
            historical_sigma(&short),
            Err(PricingError::Data(_))
        ));
    }

    #[test]
    fn csv_ingestion() {
        let text = "date,price\n2019-01-02,10\n2019-01-03,11\n2019-01-04,10\n2019-01-07,11\n2019-01-08,10\n";
        let ps = PriceSeries::from_csv(text.as_bytes()).unwrap();
        assert_eq!(ps.observations().len(), 5);
        assert!((historical_sigma(&ps).unwrap() - 18.330_302_779_823_36).abs() < 1e-12);
    }

    #[test]
    fn csv_errors_carry_line_numbers() {
        let bad_price = "date,price\n2019-01-02,10\n2019-01-03,abc\n";
        let err = PriceSeries::from_csv(bad_price.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");

        let bad_date = "date,price\n2019-01-02,10\n2019-13-03,11\n";
        let err = PriceSeries::from_csv(bad_date.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");

        let unordered = "date,price\n2019-01-03,10\n2019-01-02,11\n";
        assert!(PriceSeries::from_csv(unordered.as_bytes()).is_err());

        let header = "day,close\n2019-01-02,10\n";
        assert!(PriceSeries::from_csv(header.as_bytes()).is_err());
    }
}
