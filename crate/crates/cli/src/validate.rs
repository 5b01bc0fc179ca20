//! Cross-checks between the closed forms, the oracles and the PDE.

use abm_pricing::{
    bachelier, parity_gap, pde_residual, price_by_quadrature, price_european, price_naive_call,
    MarketState, OptionContract, OptionKind, Result, Underlying,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
}

const SEED: u64 = 20_240_101;

fn random_state(rng: &mut ChaCha8Rng) -> (MarketState, f64) {
    let ms = MarketState::new(
        rng.gen_range(-50.0..=50.0),
        20.0 * (1.0 - rng.gen::<f64>()),
        rng.gen_range(-0.05..=0.2),
        rng.gen_range(-0.05..=0.2),
        10.0 * (1.0 - rng.gen::<f64>()),
    );
    (ms, rng.gen_range(-50.0..=50.0))
}

const KINDS: [Underlying; 3] = [
    Underlying::NoDividend,
    Underlying::DividendYield,
    Underlying::Futures,
];

fn below(name: &'static str, measured: f64, threshold: f64) -> CheckResult {
    CheckResult {
        name,
        passed: measured <= threshold,
        measured,
        threshold,
    }
}

fn above(name: &'static str, measured: f64, threshold: f64) -> CheckResult {
    CheckResult {
        name,
        passed: measured >= threshold,
        measured,
        threshold,
    }
}

pub fn run() -> Result<Vec<CheckResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut checks = Vec::new();

    let mut worst = 0.0f64;
    for i in 0..10_000 {
        let (ms, k) = random_state(&mut rng);
        worst = worst.max(parity_gap(&ms, k, KINDS[i % 3])?.abs());
    }
    checks.push(below("put-call parity sweep", worst, 1e-10));

    let mut worst = 0.0f64;
    for i in 0..2_000 {
        let (ms, k) = random_state(&mut rng);
        let kind = if i % 2 == 0 {
            OptionKind::Call
        } else {
            OptionKind::Put
        };
        let oc = OptionContract::european(kind, k, KINDS[i % 3]);
        let gap = price_by_quadrature(&ms, &oc, 64)? - price_european(&ms, &oc)?.price;
        worst = worst.max(gap.abs());
    }
    checks.push(below("quadrature vs closed form", worst, 1e-9));

    let ms = MarketState::new(5.0, 3.0, 0.05, 0.0, 0.5);
    let call = OptionContract::european(OptionKind::Call, 5.0, Underlying::NoDividend);
    let correct = pde_residual(&ms, Underlying::NoDividend, |m| {
        Ok(price_european(m, &call)?.price)
    })?;
    let naive = pde_residual(&ms, Underlying::NoDividend, |m| price_naive_call(m, 5.0))?;
    checks.push(below(
        "PDE residual of the drift-rS price",
        correct.abs(),
        1e-5,
    ));
    checks.push(above(
        "PDE residual of the drift-r (naive) price",
        naive.abs(),
        1e-3,
    ));

    let ms_q = MarketState::new(5.0, 3.0, 0.05, 0.03, 0.5);
    let mut worst = 0.0f64;
    for kind in [OptionKind::Call, OptionKind::Put] {
        let oc = OptionContract::european(kind, 5.0, Underlying::DividendYield);
        worst = worst.max(
            pde_residual(&ms_q, Underlying::DividendYield, |m| {
                Ok(price_european(m, &oc)?.price)
            })?
            .abs(),
        );
    }
    checks.push(below(
        "PDE residual of the dividend-yield prices",
        worst,
        1e-5,
    ));

    let mut worst = 0.0f64;
    for _ in 0..2_000 {
        let (mut ms, k) = random_state(&mut rng);
        ms.dividend_yield = ms.rate;
        for kind in [OptionKind::Call, OptionKind::Put] {
            let via_yield = price_european(
                &ms,
                &OptionContract::european(kind, k, Underlying::DividendYield),
            )?
            .price;
            let direct = bachelier(ms.spot, k, ms.sigma_s, ms.rate, ms.tau(), kind);
            worst = worst.max((via_yield - direct).abs());
        }
    }
    checks.push(below(
        "dividend form at q = r vs futures form",
        worst,
        1e-12,
    ));

    let mut worst = 0.0f64;
    for _ in 0..2_000 {
        let (ms, k) = random_state(&mut rng);
        let mut ms = ms;
        ms.rate = 0.0;
        let naive = price_naive_call(&ms, k)?;
        let correct = price_european(
            &ms,
            &OptionContract::european(OptionKind::Call, k, Underlying::NoDividend),
        )?
        .price;
        worst = worst.max((naive - correct).abs());
    }
    checks.push(below(
        "naive and correct calls coincide at r = 0",
        worst,
        1e-12,
    ));

    let anchor = price_european(
        &MarketState::new(0.0, 3.0, 0.05, 0.0, 0.5),
        &OptionContract::european(OptionKind::Call, -5.0, Underlying::NoDividend),
    )?
    .price;
    checks.push(below(
        "negative-strike call at zero spot is 4.88",
        (anchor - 4.88).abs(),
        0.01,
    ));

    Ok(checks)
}
