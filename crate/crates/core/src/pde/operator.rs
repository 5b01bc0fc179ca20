use crate::error::{PricingError, Result};
use crate::types::{MarketState, Underlying};

/// Coefficients of the pricing PDE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdeOperator {
    pub rate: f64,
    pub dividend_yield: f64,
    pub sigma_s: f64,
}

impl PdeOperator {
    /// Operator for `underlying`; futures get `q = r`, which removes the
    /// drift term entirely.
    pub fn new(ms: &MarketState, underlying: Underlying) -> Self {
        Self {
            rate: ms.rate,
            dividend_yield: ms.yield_for(underlying),
            sigma_s: ms.sigma_s,
        }
    }

    pub fn drift(&self, spot: f64) -> f64 {
        (self.rate - self.dividend_yield) * spot
    }

    pub fn diffusion(&self) -> f64 {
        0.5 * self.sigma_s * self.sigma_s
    }

    /// Left side minus right side.
    pub fn residual(&self, spot: f64, v: f64, v_t: f64, v_s: f64, v_ss: f64) -> f64 {
        v_t + self.drift(spot) * v_s + self.diffusion() * v_ss - self.rate * v
    }
}

const TIME_STEP: f64 = 1e-6;

/// Residual of the pricing PDE for a closed-form `pricer`, evaluated at `ms`
/// with fourth-order central differences (`h_S = 1e-4 max(1, |S|)`,
/// `h_t = 1e-6`). Time derivatives move the valuation time at fixed
/// maturity.
pub fn pde_residual<F>(ms: &MarketState, underlying: Underlying, pricer: F) -> Result<f64>
where
    F: Fn(&MarketState) -> Result<f64>,
{
    ms.validate()?;
    if ms.sigma_s <= 0.0 {
        return Err(PricingError::Domain("residual needs sigma_s > 0".into()));
    }
    if ms.tau() <= 2.0 * TIME_STEP {
        return Err(PricingError::Domain(format!(
            "residual is undefined at the payoff kink (tau = {})",
            ms.tau()
        )));
    }
    let hs = 1e-4 * ms.spot.abs().max(1.0);
    let ht = TIME_STEP;

    let at_spot = |ds: f64| pricer(&ms.with_spot(ms.spot + ds));
    let at_time = |dt: f64| {
        let mut m = *ms;
        m.valuation_time += dt;
        pricer(&m)
    };

    let v = pricer(ms)?;
    let (sp1, sp2, sm1, sm2) = (
        at_spot(hs)?,
        at_spot(2.0 * hs)?,
        at_spot(-hs)?,
        at_spot(-2.0 * hs)?,
    );
    let v_s = (-sp2 + 8.0 * sp1 - 8.0 * sm1 + sm2) / (12.0 * hs);
    let v_ss = (-sp2 + 16.0 * sp1 - 30.0 * v + 16.0 * sm1 - sm2) / (12.0 * hs * hs);
    let (tp1, tp2, tm1, tm2) = (
        at_time(ht)?,
        at_time(2.0 * ht)?,
        at_time(-ht)?,
        at_time(-2.0 * ht)?,
    );
    let v_t = (-tp2 + 8.0 * tp1 - 8.0 * tm1 + tm2) / (12.0 * ht);

    Ok(PdeOperator::new(ms, underlying).residual(ms.spot, v, v_t, v_s, v_ss))
}
