//! `abm`: price, calibrate and validate options on arithmetic-Brownian
//! underlyings from the command line.

mod figure;
mod format;
mod validate;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use abm_pricing::{
    historical_sigma, implied_sigma, price_by_mc, price_by_quadrature, price_european,
    price_naive_call, solve_american, solve_european, Exercise, GridSpec, MarketState, McConfig,
    OptionContract, OptionKind, PriceSeries, PricingError, Underlying,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::figure::FigureSpec;
use crate::format::{round_sig, sig};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "abm",
    version,
    about = "Option pricing under arithmetic Brownian motion"
)]
struct Cli {
    /// Emit JSON instead of text
    #[arg(long, global = true)]
    json: bool,

    /// Significant digits in numeric output
    #[arg(long, global = true, default_value_t = 12, value_parser = clap::value_parser!(u8).range(1..=17))]
    precision: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Price a single option
    Price(PriceArgs),
    /// Write the data behind one of the price-versus-spot figures as CSV
    Figure(FigureArgs),
    /// Run the cross-check battery; exits non-zero if any check fails
    Validate,
    /// Back out sigma_s from an option price
    Implied(ImpliedArgs),
    /// Estimate sigma_s from a `date,price` CSV of daily prices
    Histvol(HistvolArgs),
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum KindArg {
    Call,
    Put,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum UnderlyingArg {
    NoDividend,
    DividendYield,
    Futures,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ExerciseArg {
    European,
    American,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum Method {
    Analytic,
    Quadrature,
    Mc,
    Pde,
    Naive,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct ContractArgs {
    #[arg(long, value_enum, default_value = "call")]
    kind: KindArg,
    #[arg(long, value_enum, default_value = "european")]
    exercise: ExerciseArg,
    #[arg(long, value_enum, default_value = "no-dividend")]
    underlying: UnderlyingArg,
    /// Underlying (or futures) price; may be negative
    #[arg(long)]
    spot: f64,
    /// Strike; may be negative
    #[arg(long)]
    strike: f64,
    /// Annual continuously-compounded risk-free rate
    #[arg(long, default_value_t = 0.0)]
    rate: f64,
    /// Annual continuous dividend yield (dividend-yield underlyings only)
    #[arg(long = "yield", default_value_t = 0.0)]
    dividend_yield: f64,
    /// Years to maturity
    #[arg(long)]
    tau: f64,
    /// Valuation time in years; maturity is valuation time plus tau
    #[arg(long, default_value_t = 0.0)]
    valuation_time: f64,
}

impl ContractArgs {
    fn market(&self, sigma_s: f64) -> MarketState {
        MarketState {
            spot: self.spot,
            rate: self.rate,
            dividend_yield: self.dividend_yield,
            valuation_time: self.valuation_time,
            maturity_time: self.valuation_time + self.tau,
            sigma_s,
        }
    }

    fn contract(&self) -> OptionContract {
        let kind = match self.kind {
            KindArg::Call => OptionKind::Call,
            KindArg::Put => OptionKind::Put,
        };
        let exercise = match self.exercise {
            ExerciseArg::European => Exercise::European,
            ExerciseArg::American => Exercise::American,
        };
        let underlying = match self.underlying {
            UnderlyingArg::NoDividend => Underlying::NoDividend,
            UnderlyingArg::DividendYield => Underlying::DividendYield,
            UnderlyingArg::Futures => Underlying::Futures,
        };
        OptionContract::new(kind, exercise, self.strike, underlying)
    }
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct PriceArgs {
    #[command(flatten)]
    contract: ContractArgs,
    /// sigma_s: standard deviation of price changes per sqrt-year
    #[arg(long)]
    sigma: f64,
    #[arg(long, value_enum, default_value = "analytic")]
    method: Method,
    /// Monte Carlo draws
    #[arg(long, default_value_t = 100_000)]
    paths: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    antithetic: bool,
    /// Quadrature nodes per side of the strike
    #[arg(long, default_value_t = 64)]
    nodes: usize,
    /// PDE price nodes
    #[arg(long, default_value_t = 400)]
    ns: usize,
    /// PDE time steps
    #[arg(long, default_value_t = 400)]
    ntau: usize,
    /// PDE half-width in terminal standard deviations
    #[arg(long, default_value_t = 8.0)]
    width: f64,
    /// Write the full PDE grid (tau,spot,value) to this CSV
    #[arg(long)]
    grid_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct FigureArgs {
    /// Figure number, 1 to 4
    #[arg(value_parser = clap::value_parser!(u8).range(1..=4))]
    id: u8,
    #[arg(long)]
    out: PathBuf,
    /// Override the lowest spot
    #[arg(long)]
    spot_lo: Option<f64>,
    /// Override the highest spot
    #[arg(long)]
    spot_hi: Option<f64>,
    /// Override the spot step
    #[arg(long)]
    step: Option<f64>,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct ImpliedArgs {
    #[command(flatten)]
    contract: ContractArgs,
    /// Observed option price
    #[arg(long)]
    price: f64,
}

#[derive(Args, Debug)]
struct HistvolArgs {
    /// CSV with header `date,price`
    path: PathBuf,
    /// Years per observation step
    #[arg(long, default_value_t = 1.0 / 252.0)]
    dt: f64,
}

#[derive(Debug)]
enum Failure {
    Pricing(PricingError),
    Invalid(String),
    Checks(Vec<&'static str>),
}

impl From<PricingError> for Failure {
    fn from(e: PricingError) -> Self {
        Failure::Pricing(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Pricing(PricingError::Io(e.to_string()))
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 2,
            Failure::Checks(_) => 3,
            Failure::Pricing(e) => match e {
                PricingError::PsorNonConvergence { .. } | PricingError::NoConvergence { .. } => 3,
                PricingError::Io(_) => 4,
                _ => 2,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Pricing(e) => e.to_string(),
            Failure::Invalid(m) => m.clone(),
            Failure::Checks(names) => format!("failed checks: {}", names.join("; ")),
        }
    }
}

struct Output {
    json: bool,
    digits: usize,
}

impl Output {
    fn num(&self, x: f64) -> f64 {
        round_sig(x, self.digits)
    }

    fn text(&self, x: f64) -> String {
        sig(x, self.digits)
    }

    fn emit<T: Serialize>(&self, value: &T, lines: &[(&str, String)]) -> Result<(), Failure> {
        let stdout = std::io::stdout();
        let mut out = stdout.lock();
        if self.json {
            let text = serde_json::to_string(value).map_err(|e| Failure::Invalid(e.to_string()))?;
            writeln!(out, "{text}")?;
        } else {
            for (k, v) in lines {
                writeln!(out, "{k}: {v}")?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct Greeks {
    delta: f64,
    gamma: f64,
    vega: f64,
    theta: f64,
    rho: f64,
}

#[derive(Serialize)]
struct PriceReport {
    version: u32,
    command: &'static str,
    method: Method,
    price: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    std_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    greeks: Option<Greeks>,
}

fn cmd_price(args: &PriceArgs, out: &Output) -> Result<(), Failure> {
    let ms = args.contract.market(args.sigma);
    let oc = args.contract.contract();
    if oc.exercise == Exercise::American && args.method != Method::Pde {
        return Err(Failure::Invalid(
            "american exercise requires --method pde".into(),
        ));
    }
    if args.method == Method::Naive
        && (oc.kind != OptionKind::Call || oc.underlying != Underlying::NoDividend)
    {
        return Err(Failure::Invalid(
            "--method naive only prices calls on no-dividend underlyings".into(),
        ));
    }
    if args.grid_out.is_some() && args.method != Method::Pde {
        return Err(Failure::Invalid("--grid-out requires --method pde".into()));
    }

    let mut report = PriceReport {
        version: SCHEMA_VERSION,
        command: "price",
        method: args.method,
        price: 0.0,
        std_error: None,
        greeks: None,
    };
    match args.method {
        Method::Analytic => {
            let q = price_european(&ms, &oc)?;
            report.price = q.price;
            report.greeks = Some(Greeks {
                delta: out.num(q.delta),
                gamma: out.num(q.gamma),
                vega: out.num(q.vega),
                theta: out.num(q.theta),
                rho: out.num(q.rho),
            });
        }
        Method::Quadrature => report.price = price_by_quadrature(&ms, &oc, args.nodes)?,
        Method::Mc => {
            let cfg = McConfig::new(args.paths, args.seed).antithetic(args.antithetic);
            let est = price_by_mc(&ms, &oc, &cfg)?;
            report.price = est.price;
            report.std_error = Some(out.num(est.std_error));
        }
        Method::Pde => {
            let spec = GridSpec {
                n_s: args.ns,
                n_tau: args.ntau,
                width: args.width,
            };
            let grid = match oc.exercise {
                Exercise::European => solve_european(&ms, &oc, &spec)?,
                Exercise::American => solve_american(&ms, &oc, &spec)?,
            };
            report.price = grid.price_at(ms.spot)?;
            if let Some(path) = &args.grid_out {
                let file = File::create(path)?;
                grid.write_csv(BufWriter::new(file))?;
            }
        }
        Method::Naive => report.price = price_naive_call(&ms, oc.strike)?,
    }
    report.price = out.num(report.price);

    let mut lines = vec![("price", out.text(report.price))];
    if let Some(se) = report.std_error {
        lines.push(("std_error", out.text(se)));
    }
    if let Some(g) = &report.greeks {
        lines.extend([
            ("delta", out.text(g.delta)),
            ("gamma", out.text(g.gamma)),
            ("vega", out.text(g.vega)),
            ("theta", out.text(g.theta)),
            ("rho", out.text(g.rho)),
        ]);
    }
    out.emit(&report, &lines)
}

#[derive(Serialize)]
struct FigureReport {
    version: u32,
    command: &'static str,
    figure: u8,
    rows: usize,
    path: String,
}

fn cmd_figure(args: &FigureArgs, out: &Output) -> Result<(), Failure> {
    let mut spec = FigureSpec::for_id(args.id)
        .ok_or_else(|| Failure::Invalid(format!("no figure {}", args.id)))?;
    if let Some(lo) = args.spot_lo {
        spec.spot_lo = lo;
    }
    if let Some(hi) = args.spot_hi {
        spec.spot_hi = hi;
    }
    if let Some(step) = args.step {
        spec.step = step;
    }
    if !(spec.step > 0.0
        && spec.spot_hi >= spec.spot_lo
        && spec.spot_lo.is_finite()
        && spec.spot_hi.is_finite())
    {
        return Err(Failure::Invalid(format!(
            "invalid spot range [{}, {}] step {}",
            spec.spot_lo, spec.spot_hi, spec.step
        )));
    }
    let file = File::create(&args.out)?;
    let mut writer = BufWriter::new(file);
    spec.write_csv(&mut writer, out.digits)?;
    writer.flush()?;
    let report = FigureReport {
        version: SCHEMA_VERSION,
        command: "figure",
        figure: args.id,
        rows: spec.spots().len(),
        path: args.out.display().to_string(),
    };
    let lines = [
        ("figure", args.id.to_string()),
        ("rows", report.rows.to_string()),
        ("path", report.path.clone()),
    ];
    out.emit(&report, &lines)
}

#[derive(Serialize)]
struct ValidateReport {
    version: u32,
    command: &'static str,
    passed: bool,
    checks: Vec<validate::CheckResult>,
}

fn cmd_validate(out: &Output) -> Result<(), Failure> {
    let checks: Vec<_> = validate::run()?
        .into_iter()
        .map(|mut c| {
            c.measured = out.num(c.measured);
            c
        })
        .collect();
    let failed: Vec<&'static str> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name)
        .collect();
    let lines: Vec<(&str, String)> = checks
        .iter()
        .map(|c| {
            let status = if c.passed { "PASS" } else { "FAIL" };
            (
                status,
                format!(
                    "{} (measured {}, threshold {})",
                    c.name,
                    out.text(c.measured),
                    out.text(c.threshold)
                ),
            )
        })
        .collect();
    let report = ValidateReport {
        version: SCHEMA_VERSION,
        command: "validate",
        passed: failed.is_empty(),
        checks,
    };
    out.emit(&report, &lines)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Checks(failed))
    }
}

#[derive(Serialize)]
struct ImpliedReport {
    version: u32,
    command: &'static str,
    sigma_s: f64,
    iterations: usize,
    residual: f64,
}

fn cmd_implied(args: &ImpliedArgs, out: &Output) -> Result<(), Failure> {
    let ms = args.contract.market(0.0);
    let oc = args.contract.contract();
    let res = implied_sigma(&ms, &oc, args.price)?;
    let report = ImpliedReport {
        version: SCHEMA_VERSION,
        command: "implied",
        sigma_s: out.num(res.sigma_s),
        iterations: res.iterations,
        residual: out.num(res.residual),
    };
    let lines = [
        ("sigma_s", out.text(report.sigma_s)),
        ("iterations", res.iterations.to_string()),
        ("residual", out.text(report.residual)),
    ];
    out.emit(&report, &lines)
}

#[derive(Serialize)]
struct HistvolReport {
    version: u32,
    command: &'static str,
    sigma_s: f64,
    observations: usize,
}

fn cmd_histvol(args: &HistvolArgs, out: &Output) -> Result<(), Failure> {
    let file = File::open(&args.path)?;
    let series = PriceSeries::from_csv(file)?.with_step(args.dt)?;
    let sigma = historical_sigma(&series)?;
    let report = HistvolReport {
        version: SCHEMA_VERSION,
        command: "histvol",
        sigma_s: out.num(sigma),
        observations: series.observations().len(),
    };
    let lines = [
        ("sigma_s", out.text(sigma)),
        ("observations", report.observations.to_string()),
    ];
    out.emit(&report, &lines)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = Output {
        json: cli.json,
        digits: cli.precision as usize,
    };
    let result = match &cli.command {
        Command::Price(args) => cmd_price(args, &out),
        Command::Figure(args) => cmd_figure(args, &out),
        Command::Validate => cmd_validate(&out),
        Command::Implied(args) => cmd_implied(args, &out),
        Command::Histvol(args) => cmd_histvol(args, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.exit_code())
        }
    }
}
