//! CSV data behind the price-versus-spot figures.

use std::io::Write;

use abm_pricing::{price_european, MarketState, OptionContract, OptionKind, Result, Underlying};

use crate::format::sig;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureSpec {
    pub strike: f64,
    pub sigma_s: f64,
    pub rate: f64,
    pub tau: f64,
    pub spot_lo: f64,
    pub spot_hi: f64,
    pub step: f64,
    /// Emit the `underlying` diagonal instead of the put column.
    pub diagonal: bool,
}

impl FigureSpec {
    pub fn for_id(id: u8) -> Option<Self> {
        let base = FigureSpec {
            strike: 5.0,
            sigma_s: 3.0,
            rate: 0.05,
            tau: 0.5,
            spot_lo: -15.0,
            spot_hi: 25.0,
            step: 0.05,
            diagonal: false,
        };
        match id {
            1 => Some(base),
            2 => Some(FigureSpec {
                strike: -5.0,
                ..base
            }),
            3 => Some(FigureSpec {
                tau: 5.0,
                spot_lo: 0.0,
                diagonal: true,
                ..base
            }),
            4 => Some(FigureSpec {
                sigma_s: 12.0,
                spot_lo: 0.0,
                diagonal: true,
                ..base
            }),
            _ => None,
        }
    }

    /// Spot values from `spot_lo` to `spot_hi` inclusive.
    pub fn spots(&self) -> Vec<f64> {
        let n = ((self.spot_hi - self.spot_lo) / self.step + 1e-9).floor() as i64;
        let per_unit = 1.0 / self.step;
        let exact_ticks = (per_unit - per_unit.round()).abs() < 1e-9;
        (0..=n)
            .map(|i| {
                if exact_ticks {
                    // divide integers so that e.g. 0.05 steps land on exact decimals
                    let start = (self.spot_lo * per_unit).round();
                    (start + i as f64) / per_unit.round()
                } else {
                    self.spot_lo + i as f64 * self.step
                }
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, mut out: W, digits: usize) -> Result<()> {
        let header = if self.diagonal {
            "spot,call,underlying"
        } else {
            "spot,call,put"
        };
        writeln!(out, "{header}")?;
        let call = OptionContract::european(OptionKind::Call, self.strike, Underlying::NoDividend);
        let put = call.with_kind(OptionKind::Put);
        for spot in self.spots() {
            let ms = MarketState::new(spot, self.sigma_s, self.rate, 0.0, self.tau);
            let c = price_european(&ms, &call)?.price;
            let third = if self.diagonal {
                spot
            } else {
                price_european(&ms, &put)?.price
            };
            writeln!(
                out,
                "{},{},{}",
                sig(spot, digits),
                sig(c, digits),
                sig(third, digits)
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spot_grid_hits_round_values() {
        let spec = FigureSpec::for_id(1).unwrap();
        let spots = spec.spots();
        assert_eq!(spots.len(), 801);
        assert_eq!(spots[0], -15.0);
        assert_eq!(spots[300], 0.0);
        assert_eq!(*spots.last().unwrap(), 25.0);
        assert_eq!(FigureSpec::for_id(3).unwrap().spots().len(), 501);
        assert!(FigureSpec::for_id(5).is_none());
    }
}
