//! Acceptance criteria. Each test prints one PASS/FAIL line; run with
//! `cargo test -p abm-pricing --test acceptance -- --nocapture` to see them.

use std::time::{Duration, Instant};

use abm_pricing::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(name: &str, pass: bool, detail: String) {
    println!("[{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{name}: {detail}");
}

#[derive(Debug, Clone, Copy)]
struct Draw {
    ms: MarketState,
    strike: f64,
    underlying: Underlying,
}

/// S, K in [-50, 50], sigma_s in (0, 20], r, q in [-0.05, 0.2], tau in (0, 10].
fn sweep(n: usize, seed: u64) -> Vec<Draw> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let underlying = match i % 3 {
                0 => Underlying::NoDividend,
                1 => Underlying::DividendYield,
                _ => Underlying::Futures,
            };
            let ms = MarketState::new(
                rng.gen_range(-50.0..=50.0),
                20.0 * (1.0 - rng.gen::<f64>()),
                rng.gen_range(-0.05..=0.2),
                rng.gen_range(-0.05..=0.2),
                10.0 * (1.0 - rng.gen::<f64>()),
            );
            Draw {
                ms,
                strike: rng.gen_range(-50.0..=50.0),
                underlying,
            }
        })
        .collect()
}

fn benchmark() -> (MarketState, OptionContract) {
    (
        MarketState::new(5.0, 3.0, 0.05, 0.0, 0.5),
        OptionContract::european(OptionKind::Call, 5.0, Underlying::NoDividend),
    )
}

#[test]
fn figure_two_anchor() {
    let start = Instant::now();
    let ms = MarketState::new(0.0, 3.0, 0.05, 0.0, 0.5);
    let oc = OptionContract::european(OptionKind::Call, -5.0, Underlying::NoDividend);

    let analytic = price_european(&ms, &oc).unwrap().price;
    let quad = price_by_quadrature(&ms, &oc, 64).unwrap();
    let mc = price_by_mc(&ms, &oc, &McConfig::new(1_000_000, 42)).unwrap();
    let pde = solve_european(&ms, &oc, &GridSpec::default())
        .unwrap()
        .price_at(0.0)
        .unwrap();
    let elapsed = start.elapsed();

    let pass = (analytic - 4.88).abs() <= 0.01
        && (quad - 4.88).abs() <= 0.01
        && (mc.price - analytic).abs() <= 3.0 * mc.std_error
        && (mc.price - 4.88).abs() <= 0.01
        && (pde - 4.88).abs() <= 5e-3
        && elapsed < Duration::from_secs(5);
    report(
        "figure-2 anchor",
        pass,
        format!(
            "analytic {analytic:.6}, quadrature {quad:.6}, mc {:.6} (se {:.2e}), pde {pde:.6}, {elapsed:?}",
            mc.price, mc.std_error
        ),
    );
}

#[test]
fn parity_sweep() {
    let draws = sweep(10_000, 2024);
    let start = Instant::now();
    let worst = draws
        .iter()
        .map(|d| parity_gap(&d.ms, d.strike, d.underlying).unwrap().abs())
        .fold(0.0, f64::max);
    let elapsed = start.elapsed();
    let negatives = draws
        .iter()
        .filter(|d| d.ms.spot < 0.0 && d.strike < 0.0 && d.ms.rate < 0.0)
        .count();
    report(
        "parity sweep",
        worst <= 1e-10 && elapsed < Duration::from_secs(1) && negatives > 0,
        format!("max |gap| {worst:.2e} over 10000 draws ({negatives} with S, K, r all negative), {elapsed:?}"),
    );
}

#[test]
fn pde_discrimination() {
    let (ms, oc) = benchmark();
    let correct = pde_residual(&ms, Underlying::NoDividend, |m| {
        Ok(price_european(m, &oc)?.price)
    })
    .unwrap();
    let naive = pde_residual(&ms, Underlying::NoDividend, |m| price_naive_call(m, 5.0)).unwrap();

    let zero_rate = MarketState::new(5.0, 3.0, 0.0, 0.0, 0.5);
    let mut coincide = 0.0f64;
    for s in [-10.0, 0.0, 2.5, 5.0, 7.5, 20.0] {
        let m = zero_rate.with_spot(s);
        let gap =
            (price_naive_call(&m, 5.0).unwrap() - price_european(&m, &oc).unwrap().price).abs();
        coincide = coincide.max(gap);
    }
    report(
        "PDE discrimination",
        correct.abs() <= 1e-5 && naive.abs() >= 1e-3 && coincide <= 1e-12,
        format!("correct residual {correct:.2e}, naive residual {naive:.4e}, r=0 max gap {coincide:.1e}"),
    );
}

#[test]
fn oracle_equivalence() {
    let draws = sweep(10_000, 7);
    let mut worst = 0.0f64;
    for (i, d) in draws.iter().enumerate() {
        let kind = if i % 2 == 0 {
            OptionKind::Call
        } else {
            OptionKind::Put
        };
        let oc = OptionContract::european(kind, d.strike, d.underlying);
        let q = price_by_quadrature(&d.ms, &oc, 64).unwrap();
        let a = price_european(&d.ms, &oc).unwrap().price;
        worst = worst.max((q - a).abs());
    }

    let (ms, oc) = benchmark();
    let exact = price_european(&ms, &oc).unwrap().price;
    let trials = 1000;
    let hits = (0..trials)
        .filter(|&seed| {
            let est = price_by_mc(&ms, &oc, &McConfig::new(100_000, seed)).unwrap();
            (est.price - exact).abs() <= 3.0 * est.std_error
        })
        .count();
    let rate = hits as f64 / trials as f64;
    report(
        "oracle equivalence",
        worst <= 1e-9 && rate >= 0.99,
        format!("quadrature max |err| {worst:.2e}; mc within 3 SE in {hits}/{trials} runs"),
    );
}

#[test]
fn futures_consistency() {
    let mut worst = 0.0f64;
    for d in sweep(2000, 99) {
        let mut ms = d.ms;
        ms.dividend_yield = ms.rate;
        for kind in [OptionKind::Call, OptionKind::Put] {
            let via_yield = price_european(
                &ms,
                &OptionContract::european(kind, d.strike, Underlying::DividendYield),
            )
            .unwrap()
            .price;
            let via_futures = price_european(
                &ms,
                &OptionContract::european(kind, d.strike, Underlying::Futures),
            )
            .unwrap()
            .price;
            let direct = bachelier(ms.spot, d.strike, ms.sigma_s, ms.rate, ms.tau(), kind);
            worst = worst
                .max((via_yield - via_futures).abs())
                .max((via_yield - direct).abs());
        }
    }
    let atm = MarketState::new(10.0, 1.0, 0.0, 0.0, 1.0);
    let c = price_european(
        &atm,
        &OptionContract::european(OptionKind::Call, 10.0, Underlying::Futures),
    )
    .unwrap()
    .price;
    report(
        "futures consistency",
        worst <= 1e-12 && (c - 0.398_942_280).abs() <= 1e-9,
        format!("yield-form vs futures max gap {worst:.1e}; ATM price {c:.12}"),
    );
}

#[test]
fn pde_convergence_and_american_dominance() {
    let (ms, oc) = benchmark();
    let exact = price_european(&ms, &oc).unwrap().price;
    let err = |n: usize| {
        let v = solve_european(&ms, &oc, &GridSpec::new(n, n))
            .unwrap()
            .price_at(5.0)
            .unwrap();
        (v - exact).abs()
    };
    let (coarse, fine) = (err(200), err(400));
    let ratio = coarse / fine;

    let put = oc.with_kind(OptionKind::Put);
    let spec = GridSpec::default();
    let am = solve_american(&ms, &put, &spec).unwrap();
    let eu = solve_european(&ms, &put, &spec).unwrap();
    let mut violations = 0;
    for (row_a, row_e) in am.values.iter().zip(&eu.values) {
        for ((s, a), e) in am.s_nodes.iter().zip(row_a).zip(row_e) {
            if !(*a >= *e - 1e-12 && *e >= 0.0 && *a >= put.payoff(*s)) {
                violations += 1;
            }
        }
    }
    let am_price = am.price_at(5.0).unwrap();
    report(
        "PDE convergence and American dominance",
        (3.5..=4.5).contains(&ratio) && violations == 0 && am_price >= 0.775_540_544_834_207,
        format!(
            "errors {coarse:.3e} (n=200) / {fine:.3e} (n=400), ratio {ratio:.3}; \
             {violations} ordering violations; American put {am_price:.6}"
        ),
    );
}

#[test]
fn perpetual_limit() {
    let perpetual = perpetual_call(0.0, 3.0, 0.05).unwrap();
    let long = price_european(
        &MarketState::new(0.0, 3.0, 0.05, 0.0, 500.0),
        &OptionContract::european(OptionKind::Call, 5.0, Underlying::NoDividend),
    )
    .unwrap()
    .price;
    let rel = ((long - perpetual) / perpetual).abs();
    report(
        "perpetual limit",
        (perpetual - 3.78466).abs() <= 1e-4 && rel <= 1e-4,
        format!("perpetual {perpetual:.6}, tau=500 call {long:.6}, rel gap {rel:.1e}"),
    );
}

#[test]
fn upper_bound_crossings() {
    let range = ScanRange::default();
    let long = upper_bound_crossing(3.0, 0.05, 5.0, 5.0, range).unwrap();
    let wide = upper_bound_crossing(12.0, 0.05, 5.0, 0.5, range).unwrap();
    let short = upper_bound_crossing(3.0, 0.05, 5.0, 0.5, range).unwrap();
    let pass = matches!(long, Some(s) if s > 1.0)
        && matches!(wide, Some(s) if (1.5..=2.5).contains(&s))
        && short.is_none();
    report(
        "upper-bound crossings",
        pass,
        format!("sigma 3 tau 5: {long:?}; sigma 12 tau 0.5: {wide:?}; sigma 3 tau 0.5: {short:?} (expected none on (0, 100))"),
    );
}

#[test]
fn calibration_round_trip() {
    let mut worst = 0.0f64;
    for underlying in [
        Underlying::NoDividend,
        Underlying::DividendYield,
        Underlying::Futures,
    ] {
        for sigma in [0.1, 3.0, 12.0, 100.0] {
            let ms = MarketState::new(5.0, sigma, 0.05, 0.03, 0.5);
            let oc = OptionContract::european(OptionKind::Call, 5.0, underlying);
            let price = price_european(&ms, &oc).unwrap().price;
            let implied = implied_sigma(&ms, &oc, price).unwrap();
            worst = worst.max(((implied.sigma_s - sigma) / sigma).abs());
        }
    }
    let fixture = PriceSeries::from_prices(&[10.0, 11.0, 10.0, 11.0, 10.0]).unwrap();
    let hist = historical_sigma(&fixture).unwrap();
    report(
        "calibration round trip",
        worst <= 1e-8 && (hist - 18.3303).abs() <= 1e-4,
        format!("max relative sigma error {worst:.1e}; histvol fixture {hist:.6}"),
    );
}

/// The 2019 S&P 500 estimate needs the daily closes, which are not shipped.
/// Point `ABM_SP500_2019_CSV` at a `date,price` file and run with
/// `--ignored`. Exact agreement depends on the variance and day-count
/// conventions behind the published figure, so the band is 0.5.
#[test]
#[ignore = "needs the 2019 S&P 500 closes; set ABM_SP500_2019_CSV"]
fn sp500_2019_historical_sigma() {
    let Ok(path) = std::env::var("ABM_SP500_2019_CSV") else {
        println!("[SKIP] S&P 500 2019 sigma_s: ABM_SP500_2019_CSV not set");
        return;
    };
    let file = std::fs::File::open(&path).expect("open S&P 500 csv");
    let series = PriceSeries::from_csv(file).unwrap();
    let sigma = historical_sigma(&series).unwrap();
    report(
        "S&P 500 2019 sigma_s",
        (sigma - 354.77).abs() <= 0.5,
        format!(
            "{sigma:.4} from {} observations",
            series.observations().len()
        ),
    );
}
