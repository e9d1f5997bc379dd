//! Self-fulfilling beliefs.
//!
//! `β(θ)` is the equilibrium borrowing when every investor holds belief `θ`.
//! A belief `θ*` is self-fulfilling when the borrowing it induces makes the
//! good state occur with exactly that probability: `π(β(θ*)) = θ*`.

use crate::equilibrium::{BORROWING_TOL, BRACKET_EDGE};
use crate::error::{ModelError, Result};
use crate::model::{eval_shock_prob, Economy};
use crate::portfolio::{indifference_borrowing, share_at_borrowing};
use crate::roots::bisect;

/// Default number of scan points for [`find_re_equilibria`].
pub const DEFAULT_SCAN_POINTS: usize = 1000;

/// Tolerance on `θ` when refining a fixed point.
pub const FIXED_POINT_TOL: f64 = 1e-10;

const FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RECurvePoint {
    pub theta: f64,
    pub beta: f64,
    pub pi_at_beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub theta: f64,
    pub beta: f64,
    /// Slope of `π(β(θ)) − θ` at the fixed point.
    pub slope: f64,
    pub stability: Stability,
}

/// Equilibrium borrowing when all wealth is held by belief `theta`.
///
/// With a single type the market-clearing condition reduces to `σ(θ; b) = b`.
/// Risk neutrality gives the type's indifference level; otherwise
/// `b − σ(θ; b)` is bisected just as the full-market excess demand is.
pub fn beta_of_theta(theta: f64, economy: &Economy) -> Result<f64> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(ModelError::InvalidArgument(format!(
            "belief {theta} outside [0,1]"
        )));
    }
    let gamma = economy.gamma();
    let rev = economy.revenue();
    if gamma == 0.0 {
        return Ok(indifference_borrowing(theta, rev));
    }
    if theta == 0.0 {
        return Ok(0.0);
    }
    if theta == 1.0 {
        return Ok(1.0);
    }
    let excess = |b: f64| -> Result<f64> {
        Ok(b - share_at_borrowing(theta, gamma, b, rev)?
            .value()
            .unwrap_or(0.0))
    };
    let (lo, hi) = (BRACKET_EDGE, 1.0 - BRACKET_EDGE);
    if excess(lo)? >= 0.0 {
        return Ok(0.0);
    }
    if excess(hi)? <= 0.0 {
        return Ok(1.0);
    }
    bisect(
        |b| excess(b).unwrap_or(f64::NAN),
        lo,
        hi,
        BORROWING_TOL,
        200,
    )
}

/// `π(β(θ)) − θ`.
pub fn fixed_point_gap(theta: f64, economy: &Economy) -> Result<f64> {
    let beta = beta_of_theta(theta, economy)?;
    Ok(eval_shock_prob(economy.shock_prob(), beta) - theta)
}

fn scan_thetas(n: usize) -> Vec<f64> {
    let last = (n - 1) as f64;
    (0..n).map(|k| k as f64 / last).collect()
}

/// All beliefs with `π(β(θ)) = θ`, found by scanning the gap on `grid_size`
/// evenly spaced beliefs and refining every sign change by bisection.
/// Each root is tagged stable when the gap crosses zero from above.
pub fn find_re_equilibria(economy: &Economy, grid_size: usize) -> Result<Vec<FixedPoint>> {
    if grid_size < 2 {
        return Err(ModelError::InvalidArgument(format!(
            "scan needs at least 2 points, got {grid_size}"
        )));
    }
    let thetas = scan_thetas(grid_size);
    let gaps = thetas
        .iter()
        .map(|&t| fixed_point_gap(t, economy))
        .collect::<Result<Vec<_>>>()?;

    let mut roots = Vec::new();
    for k in 0..grid_size {
        if gaps[k] == 0.0 {
            roots.push(thetas[k]);
            continue;
        }
        if k + 1 < grid_size && gaps[k + 1] != 0.0 && gaps[k].signum() != gaps[k + 1].signum() {
            let root = bisect(
                |t| fixed_point_gap(t, economy).unwrap_or(f64::NAN),
                thetas[k],
                thetas[k + 1],
                FIXED_POINT_TOL,
                200,
            )?;
            roots.push(root);
        }
    }

    roots
        .into_iter()
        .map(|theta| {
            let lo = (theta - FD_STEP).max(0.0);
            let hi = (theta + FD_STEP).min(1.0);
            let slope = (fixed_point_gap(hi, economy)? - fixed_point_gap(lo, economy)?) / (hi - lo);
            Ok(FixedPoint {
                theta,
                beta: beta_of_theta(theta, economy)?,
                slope,
                stability: if slope < 0.0 {
                    Stability::Stable
                } else {
                    Stability::Unstable
                },
            })
        })
        .collect()
}

/// Tabulates `β(θ)` and `π(β(θ))` on `grid_size` evenly spaced beliefs.
/// Fails if the computed `β` is not weakly increasing.
pub fn emit_re_curve(economy: &Economy, grid_size: usize) -> Result<Vec<RECurvePoint>> {
    if grid_size < 2 {
        return Err(ModelError::InvalidArgument(format!(
            "curve needs at least 2 points, got {grid_size}"
        )));
    }
    let points = scan_thetas(grid_size)
        .into_iter()
        .map(|theta| {
            let beta = beta_of_theta(theta, economy)?;
            Ok(RECurvePoint {
                theta,
                beta,
                pi_at_beta: eval_shock_prob(economy.shock_prob(), beta),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(w) = points.windows(2).find(|w| w[1].beta < w[0].beta - 1e-12) {
        return Err(ModelError::Internal(format!(
            "borrowing curve decreases between theta={} and theta={}",
            w[0].theta, w[1].theta
        )));
    }
    Ok(points)
}
