//! Credit-market equilibrium and wealth dynamics with heterogeneous prior
//! beliefs.
//!
//! Investors differ only in their subjective probability `θ` of a good
//! aggregate shock. Each period the distribution of wealth across beliefs
//! pins down borrowing `b`, the bond issue `q = h(b)` and price `p = b/q`;
//! the realized shock then moves wealth toward whichever side of the market
//! was right, and the next period starts from the new distribution.
//!
//! - [`model`]: grids, wealth shares, revenue and shock-probability rules, validation
//! - [`portfolio`]: CRRA bond share of a single belief type
//! - [`equilibrium`]: within-period market clearing
//! - [`dynamics`]: shocks, simulation runs and parameter sweeps
//! - [`selffulfilling`]: single-belief borrowing curve and its fixed points

// `!(x > 0.0)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod equilibrium;
pub mod error;
pub mod model;
pub mod portfolio;
mod roots;
pub mod selffulfilling;

pub use dynamics::{
    apply_shock, simulate, step, step_with, sweep, InitialDistribution, PeriodRecord, RunRecord,
    ShockDraw, ShockState, SimulationConfig, SummaryStat, SweepTable,
};
pub use equilibrium::{excess_demand, solve_equilibrium, solve_risk_neutral, Equilibrium};
pub use error::{ModelError, Result};
pub use model::{
    cdf, eval_shock_prob, mean_belief, mix_with_uniform, validate_spec, BeliefGrid, Economy,
    EconomySpec, RevenueSpec, ShockProbSpec, ValidationReport, WealthShares,
};
pub use portfolio::{
    gain_loss, indifference_borrowing, optimal_share, share_thresholds, BondShare, GainLoss,
    MarketTerms,
};
pub use selffulfilling::{
    beta_of_theta, emit_re_curve, find_re_equilibria, FixedPoint, RECurvePoint,
};
