//! Monte Carlo over the exact terminal law.
//!
//! Seeding scheme: samples are cut into fixed blocks of [`BLOCK`]. Block `b`
//! draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `b`, and each
//! uniform is the top 53 bits of a `u64` mapped to `(k + 0.5) / 2^53`, then
//! pushed through the inverse normal CDF. Block statistics are merged in
//! block order, so the estimate depends only on `(seed, n_paths,
//! antithetic)` and not on how many threads rayon uses.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::terminal_law;
use crate::error::{PricingError, Result};
use crate::normal::inverse_cdf;
use crate::types::{Exercise, MarketState, OptionContract};

const BLOCK: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub n_paths: usize,
    pub seed: u64,
    /// Pair every draw `z` with `-z`. `n_paths` counts draws, so
    /// `n_paths / 2` pairs are simulated.
    pub antithetic: bool,
}

impl McConfig {
    pub fn new(n_paths: usize, seed: u64) -> Self {
        Self {
            n_paths,
            seed,
            antithetic: false,
        }
    }

    pub fn antithetic(mut self, on: bool) -> Self {
        self.antithetic = on;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub price: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let delta = x - self.mean;
        self.mean += delta / self.n;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if other.n == 0.0 {
            return self;
        }
        if self.n == 0.0 {
            return other;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        Moments {
            n,
            mean: self.mean + delta * other.n / n,
            m2: self.m2 + other.m2 + delta * delta * self.n * other.n / n,
        }
    }
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
    ((rng.next_u64() >> 11) as f64 + 0.5) * SCALE
}

/// Sample mean of discounted payoffs and its standard error.
pub fn price_by_mc(ms: &MarketState, oc: &OptionContract, cfg: &McConfig) -> Result<McEstimate> {
    ms.validate()?;
    oc.validate()?;
    if oc.exercise == Exercise::American {
        return Err(PricingError::UnsupportedExercise);
    }
    if cfg.n_paths < 2 {
        return Err(PricingError::Config(format!(
            "Monte Carlo needs at least 2 paths, got {}",
            cfg.n_paths
        )));
    }
    let law = terminal_law(ms, oc.underlying)?;
    let discount = (-ms.rate * ms.tau()).exp();
    let samples = if cfg.antithetic {
        cfg.n_paths / 2
    } else {
        cfg.n_paths
    };
    let n_blocks = samples.div_ceil(BLOCK);

    let value = |z: f64| discount * oc.payoff(law.mean + law.stddev * z);

    let blocks: Vec<Moments> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(b as u64);
            let len = BLOCK.min(samples - b * BLOCK);
            let mut m = Moments::default();
            for _ in 0..len {
                let z = inverse_cdf(uniform(&mut rng));
                let y = if cfg.antithetic {
                    0.5 * (value(z) + value(-z))
                } else {
                    value(z)
                };
                m.push(y);
            }
            m
        })
        .collect();

    let total = blocks.into_iter().fold(Moments::default(), Moments::merge);
    let variance = if total.n > 1.0 {
        total.m2 / (total.n - 1.0)
    } else {
        0.0
    };
    Ok(McEstimate {
        price: total.mean,
        std_error: (variance / total.n).sqrt(),
    })
}
