//! The pricing PDE `v_t + (r - q) S v_S + 1/2 sigma_s^2 v_SS = r v`.
//!
//! Unlike the lognormal case there is no `S^2` in front of the diffusion
//! term. [`pde_residual`] plugs a closed form into the operator; the solvers
//! integrate it on a uniform grid that is free to extend below zero.

mod operator;
mod solver;

pub use operator::{pde_residual, PdeOperator};
pub use solver::{solve_american, solve_european, GridSpec, PriceGrid};
