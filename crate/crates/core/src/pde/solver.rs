//! Crank-Nicolson on a uniform price grid, in time-to-maturity.
//!
//! The first step is replaced by two fully implicit half steps (Rannacher)
//! to damp the oscillation the payoff kink excites under Crank-Nicolson.
//! American exercise is enforced inside every implicit solve by projected
//! SOR.

use std::io::Write;

use super::PdeOperator;
use crate::error::{PricingError, Result};
use crate::oracle::terminal_law;
use crate::types::{Exercise, MarketState, OptionContract, OptionKind};

const PSOR_RELAXATION: f64 = 1.2;
const PSOR_TOLERANCE: f64 = 1e-10;
const PSOR_MAX_SWEEPS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub n_s: usize,
    pub n_tau: usize,
    /// Half-width of the price domain in terminal standard deviations.
    pub width: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n_s: 400,
            n_tau: 400,
            width: 8.0,
        }
    }
}

impl GridSpec {
    pub fn new(n_s: usize, n_tau: usize) -> Self {
        Self {
            n_s,
            n_tau,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_s < 50 || self.n_tau < 50 {
            return Err(PricingError::Config(format!(
                "grid needs n_s >= 50 and n_tau >= 50, got {} x {}",
                self.n_s, self.n_tau
            )));
        }
        if !(self.width >= 6.0 && self.width.is_finite()) {
            return Err(PricingError::Config(format!(
                "grid width must be at least 6 standard deviations, got {}",
                self.width
            )));
        }
        Ok(())
    }
}

/// Solution values on a uniform `(S, tau)` lattice.
///
/// `values[j][i]` is the option value at `s_nodes[i]` with `tau_nodes[j]`
/// left to maturity; `values[0]` is the payoff.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceGrid {
    pub s_nodes: Vec<f64>,
    pub tau_nodes: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl PriceGrid {
    pub fn ds(&self) -> f64 {
        self.s_nodes[1] - self.s_nodes[0]
    }

    /// Value at `spot` on the last time slice, by cubic Lagrange
    /// interpolation through the four surrounding nodes.
    pub fn price_at(&self, spot: f64) -> Result<f64> {
        self.value_at(self.values.len() - 1, spot)
    }

    pub fn value_at(&self, slice: usize, spot: f64) -> Result<f64> {
        let s = &self.s_nodes;
        let n = s.len();
        let (lo, hi) = (s[0], s[n - 1]);
        if !(spot >= lo && spot <= hi) {
            return Err(PricingError::Grid(format!(
                "spot {spot} outside grid [{lo}, {hi}]"
            )));
        }
        let v = self
            .values
            .get(slice)
            .ok_or_else(|| PricingError::Grid(format!("no time slice {slice}")))?;
        let pos = (spot - lo) / self.ds();
        let i = (pos.floor() as usize).clamp(1, n - 3);
        let x = pos - i as f64;
        // nodes at offsets -1, 0, 1, 2
        let w = [
            -x * (x - 1.0) * (x - 2.0) / 6.0,
            (x + 1.0) * (x - 1.0) * (x - 2.0) / 2.0,
            -(x + 1.0) * x * (x - 2.0) / 2.0,
            (x + 1.0) * x * (x - 1.0) / 6.0,
        ];
        Ok(w[0] * v[i - 1] + w[1] * v[i] + w[2] * v[i + 1] + w[3] * v[i + 2])
    }

    /// CSV with header `tau,spot,value`, one row per node, slices in
    /// increasing `tau`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "tau,spot,value")?;
        for (tau, row) in self.tau_nodes.iter().zip(&self.values) {
            for (s, v) in self.s_nodes.iter().zip(row) {
                writeln!(out, "{tau:.12e},{s:.12e},{v:.12e}")?;
            }
        }
        Ok(())
    }
}

/// Solves for a European option; `oc.exercise` is ignored.
pub fn solve_european(ms: &MarketState, oc: &OptionContract, spec: &GridSpec) -> Result<PriceGrid> {
    solve(ms, oc, spec, Exercise::European)
}

/// Solves for an American option; `oc.exercise` is ignored.
pub fn solve_american(ms: &MarketState, oc: &OptionContract, spec: &GridSpec) -> Result<PriceGrid> {
    solve(ms, oc, spec, Exercise::American)
}

/// Uniform nodes covering the spot and the forward by `width` terminal
/// standard deviations, stretched to cover the strike too when it lies
/// within another `width` of that core, and shifted so the strike sits on a
/// node.
fn build_nodes(ms: &MarketState, oc: &OptionContract, spec: &GridSpec) -> Result<Vec<f64>> {
    let law = terminal_law(ms, oc.underlying)?;
    if law.stddev <= 0.0 {
        return Err(PricingError::Grid(
            "degenerate terminal law (sigma_s * tau = 0) leaves no grid to solve on".into(),
        ));
    }
    let margin = spec.width * law.stddev;
    let mut lo = ms.spot.min(law.mean) - margin;
    let mut hi = ms.spot.max(law.mean) + margin;
    let k = oc.strike;
    if k >= lo - margin && k <= hi + margin {
        lo = lo.min(k - margin);
        hi = hi.max(k + margin);
    }
    let ds = (hi - lo) / spec.n_s as f64;
    if k > lo && k < hi {
        let j = ((k - lo) / ds).ceil();
        lo = k - j * ds;
    }
    let nodes: Vec<f64> = (0..=spec.n_s).map(|i| lo + i as f64 * ds).collect();
    if !(ms.spot >= nodes[0] && ms.spot <= nodes[spec.n_s]) {
        return Err(PricingError::Grid(format!(
            "domain [{}, {}] does not contain spot {}",
            nodes[0], nodes[spec.n_s], ms.spot
        )));
    }
    Ok(nodes)
}

fn solve(
    ms: &MarketState,
    oc: &OptionContract,
    spec: &GridSpec,
    exercise: Exercise,
) -> Result<PriceGrid> {
    ms.validate()?;
    oc.validate()?;
    spec.validate()?;
    let s = build_nodes(ms, oc, spec)?;
    let op = PdeOperator::new(ms, oc.underlying);
    let n = s.len() - 1;
    let ds = s[1] - s[0];
    let tau = ms.tau();
    let dt = tau / spec.n_tau as f64;
    let american = exercise == Exercise::American;

    let payoff: Vec<f64> = s.iter().map(|&x| oc.payoff(x)).collect();
    let q = op.dividend_yield;
    let r = op.rate;
    let boundary = |x: f64, t: f64| -> f64 {
        // the degenerate (zero-diffusion) European value at the domain edge
        let fwd_value = x * (-q * t).exp() - oc.strike * (-r * t).exp();
        let european = match oc.kind {
            OptionKind::Call => fwd_value.max(0.0),
            OptionKind::Put => (-fwd_value).max(0.0),
        };
        if american {
            european.max(oc.payoff(x))
        } else {
            european
        }
    };

    // L v at interior node i = lower[i] v[i-1] + diag[i] v[i] + upper[i] v[i+1]
    let diff = op.diffusion() / (ds * ds);
    let lower: Vec<f64> = s.iter().map(|&x| diff - op.drift(x) / (2.0 * ds)).collect();
    let upper: Vec<f64> = s.iter().map(|&x| diff + op.drift(x) / (2.0 * ds)).collect();
    let diag = -2.0 * diff - r;

    let mut v = payoff.clone();
    let mut values = Vec::with_capacity(spec.n_tau + 1);
    let mut tau_nodes = Vec::with_capacity(spec.n_tau + 1);
    values.push(v.clone());
    tau_nodes.push(0.0);

    let mut stepper = Stepper::new(n + 1);
    let mut t_now = 0.0;
    let mut step_index = 0;
    let mut advance = |v: &mut Vec<f64>, t_now: f64, h: f64, theta: f64| -> Result<()> {
        step_index += 1;
        let t_next = t_now + h;
        let explicit = (1.0 - theta) * h;
        let implicit = theta * h;
        let rhs = &mut stepper.rhs;
        for i in 1..n {
            let lv = lower[i] * v[i - 1] + diag * v[i] + upper[i] * v[i + 1];
            rhs[i] = v[i] + explicit * lv;
        }
        let left = boundary(s[0], t_next);
        let right = boundary(s[n], t_next);
        rhs[1] += implicit * lower[1] * left;
        rhs[n - 1] += implicit * upper[n - 1] * right;
        for i in 1..n {
            stepper.sub[i] = -implicit * lower[i];
            stepper.main[i] = 1.0 - implicit * diag;
            stepper.sup[i] = -implicit * upper[i];
        }
        v[0] = left;
        v[n] = right;
        if american {
            stepper.psor(v, &payoff, step_index)
        } else {
            stepper.thomas(v);
            Ok(())
        }
    };

    for step in 0..spec.n_tau {
        if step == 0 {
            advance(&mut v, t_now, 0.5 * dt, 1.0)?;
            advance(&mut v, t_now + 0.5 * dt, 0.5 * dt, 1.0)?;
        } else {
            advance(&mut v, t_now, dt, 0.5)?;
        }
        t_now = (step + 1) as f64 * dt;
        values.push(v.clone());
        tau_nodes.push(t_now);
    }

    Ok(PriceGrid {
        s_nodes: s,
        tau_nodes,
        values,
    })
}

/// Scratch space for the tridiagonal solves on interior nodes `1..n-1`.
struct Stepper {
    sub: Vec<f64>,
    main: Vec<f64>,
    sup: Vec<f64>,
    rhs: Vec<f64>,
    scratch: Vec<f64>,
}

impl Stepper {
    fn new(len: usize) -> Self {
        Self {
            sub: vec![0.0; len],
            main: vec![0.0; len],
            sup: vec![0.0; len],
            rhs: vec![0.0; len],
            scratch: vec![0.0; len],
        }
    }

    fn thomas(&mut self, v: &mut [f64]) {
        let n = v.len() - 1;
        let c = &mut self.scratch;
        let d = &mut self.rhs;
        c[1] = self.sup[1] / self.main[1];
        d[1] /= self.main[1];
        for i in 2..n {
            let m = self.main[i] - self.sub[i] * c[i - 1];
            c[i] = self.sup[i] / m;
            d[i] = (d[i] - self.sub[i] * d[i - 1]) / m;
        }
        v[n - 1] = d[n - 1];
        for i in (1..n - 1).rev() {
            v[i] = d[i] - c[i] * v[i + 1];
        }
    }

    fn psor(&mut self, v: &mut [f64], floor: &[f64], step: usize) -> Result<()> {
        let n = v.len() - 1;
        for i in 1..n {
            v[i] = v[i].max(floor[i]);
        }
        let mut change = f64::INFINITY;
        for _ in 0..PSOR_MAX_SWEEPS {
            change = 0.0;
            for i in 1..n {
                let gs =
                    (self.rhs[i] - self.sub[i] * v[i - 1] - self.sup[i] * v[i + 1]) / self.main[i];
                let next = (v[i] + PSOR_RELAXATION * (gs - v[i])).max(floor[i]);
                change = f64::max(change, (next - v[i]).abs());
                v[i] = next;
            }
            if change <= PSOR_TOLERANCE {
                return Ok(());
            }
        }
        Err(PricingError::PsorNonConvergence {
            sweeps: PSOR_MAX_SWEEPS,
            last_change: change,
            step,
        })
    }
}
