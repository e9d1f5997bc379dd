//! Within-period credit-market equilibrium.
//!
//! Given the belief distribution of wealth, borrowing `b` must equal the
//! wealth-weighted bond holdings of all investors, with the bond issue
//! `q = h(b)` and price `p = b/q`. Risk-neutral markets are solved by the
//! constructive marginal-type argument; for `γ > 0` excess demand
//! `b − Σ fᵢσᵢ(b)` is strictly increasing in `b` and is bisected.

use crate::error::{ModelError, Result};
use crate::model::{Economy, WealthShares};
use crate::portfolio::{optimal_share, share_from_log_ratio, GainLoss};
use crate::roots::bisect;

/// Borrowing below this level is recorded as a period without lending.
pub const DEGENERATE_FLOOR: f64 = 1e-6;

/// Bracket used when bisecting excess demand.
pub const BRACKET_EDGE: f64 = 1e-9;

/// Absolute tolerance on `b` for the excess-demand bisection.
pub const BORROWING_TOL: f64 = 1e-12;

const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct Equilibrium {
    /// Borrowing per unit wealth.
    pub b: f64,
    /// Bond issue per unit wealth, `h(b)`.
    pub q: f64,
    /// Bond price, `b/h(b)`.
    pub p: f64,
    /// Bond share of each belief type, aligned with the grid.
    pub sigmas: Vec<f64>,
    /// Most pessimistic type that must be induced to lend. Risk-neutral only.
    pub marginal_index: Option<usize>,
    /// Set when `b` falls below [`DEGENERATE_FLOOR`].
    pub degenerate: bool,
}

impl Equilibrium {
    fn from_borrowing(
        b: f64,
        sigmas: Vec<f64>,
        marginal_index: Option<usize>,
        economy: &Economy,
    ) -> Self {
        let q = economy.revenue().high(b);
        let p = if b > 0.0 { b / q } else { 0.0 };
        Self {
            b,
            q,
            p,
            sigmas,
            marginal_index,
            degenerate: b < DEGENERATE_FLOOR,
        }
    }

    /// Belief of the marginal type, if there is one.
    pub fn marginal_theta(&self, economy: &Economy) -> Option<f64> {
        self.marginal_index.map(|i| economy.grid().thetas()[i])
    }

    /// `H` and `L` at the equilibrium terms.
    pub fn gain_loss(&self, economy: &Economy) -> Result<GainLoss> {
        gain_loss_at(self.b, economy)
    }
}

fn check_len(f: &WealthShares, economy: &Economy) -> Result<()> {
    if f.len() != economy.grid().len() {
        return Err(ModelError::InvalidShares(format!(
            "{} shares for a grid of {} types",
            f.len(),
            economy.grid().len()
        )));
    }
    Ok(())
}

/// Risk-neutral equilibrium by the marginal-type construction.
///
/// With `αᵢ` the indifference borrowing of type `i` and `ωᵢ` the wealth
/// share of types at least as optimistic as `θᵢ`, find `i` with `αᵢ < ωᵢ`
/// and `αᵢ₊₁ ≥ ωᵢ₊₁`. If `αᵢ ≤ ωᵢ₊₁` the types above `i` lend everything
/// and `b = ωᵢ₊₁`; otherwise type `i` lends the fraction that makes it
/// exactly indifferent, which puts `b` at `αᵢ`.
pub fn solve_risk_neutral(f: &WealthShares, economy: &Economy) -> Result<Equilibrium> {
    check_len(f, economy)?;
    let w = f.as_slice();
    let alphas = economy.alphas();
    let n = w.len();

    let mut tail = vec![0.0; n + 1];
    for k in (0..n).rev() {
        tail[k] = tail[k + 1] + w[k];
    }

    let j = (1..n).find(|&k| alphas[k] >= tail[k]).unwrap_or(n - 1);
    let i = j - 1;

    let mut sigmas = vec![0.0; n];
    sigmas[j..].iter_mut().for_each(|s| *s = 1.0);
    let b = if alphas[i] <= tail[j] {
        tail[j]
    } else {
        sigmas[i] = ((alphas[i] - tail[j]) / w[i]).clamp(0.0, 1.0);
        alphas[i]
    };

    let marginal_index = (0..n).find(|&k| tail[k + 1] < b);
    Ok(Equilibrium::from_borrowing(
        b,
        sigmas,
        marginal_index,
        economy,
    ))
}

/// `H = h(b)/b − 1` and `L = 1 − l(b)/b` at borrowing `b`.
fn gain_loss_at(b: f64, economy: &Economy) -> Result<GainLoss> {
    if !(b > 0.0 && b < 1.0) {
        return Err(ModelError::DegenerateTerms(format!(
            "borrowing b={b} is not interior"
        )));
    }
    let rev = economy.revenue();
    GainLoss::new(rev.high_per_unit(b) - 1.0, 1.0 - rev.low_per_unit(b))
}

/// Bond share of every grid type when borrowing is `b` (`γ > 0`).
pub fn shares_at(b: f64, economy: &Economy) -> Result<Vec<f64>> {
    let gamma = economy.gamma();
    if gamma <= 0.0 {
        return Err(ModelError::InvalidArgument(
            "bond shares as a function of b need gamma > 0".into(),
        ));
    }
    let gl = gain_loss_at(b, economy)?;
    let thetas = economy.grid().thetas();
    if gamma == 1.0 {
        return Ok(thetas
            .iter()
            .map(|&t| optimal_share(t, 1.0, &gl).value().unwrap_or(0.0))
            .collect());
    }
    let market_term = (gl.gain.ln() - gl.loss.ln()) / gamma;
    Ok(economy
        .scaled_log_odds()
        .iter()
        .map(|&odds| share_from_log_ratio(odds + market_term, gl.gain, gl.loss))
        .collect())
}

/// Excess demand for funds `b − Σᵢ fᵢ·σᵢ(b)` for `b ∈ (0,1)` and `γ > 0`.
pub fn excess_demand(b: f64, f: &WealthShares, economy: &Economy) -> Result<f64> {
    check_len(f, economy)?;
    let sigmas = shares_at(b, economy)?;
    let supply: f64 = sigmas.iter().zip(f.as_slice()).map(|(s, w)| s * w).sum();
    Ok(b - supply)
}

/// Solves the period equilibrium for any `γ ≥ 0`.
///
/// Risk neutrality uses [`solve_risk_neutral`]. Otherwise excess demand is
/// bisected on `[1e-9, 1 − 1e-9]`; if it is already nonnegative at the lower
/// edge nobody lends and the period is degenerate, and if it is still
/// negative at the upper edge all wealth sits with types that lend
/// everything at any interior price.
pub fn solve_equilibrium(f: &WealthShares, economy: &Economy) -> Result<Equilibrium> {
    if economy.gamma() == 0.0 {
        return solve_risk_neutral(f, economy);
    }
    check_len(f, economy)?;
    let n = f.len();
    let (lo, hi) = (BRACKET_EDGE, 1.0 - BRACKET_EDGE);
    let ed = |b: f64| excess_demand(b, f, economy);

    if ed(lo)? >= 0.0 {
        return Ok(Equilibrium::from_borrowing(
            0.0,
            vec![0.0; n],
            None,
            economy,
        ));
    }
    if ed(hi)? <= 0.0 {
        let sigmas = shares_at(hi, economy)?;
        let b: f64 = sigmas.iter().zip(f.as_slice()).map(|(s, w)| s * w).sum();
        return Ok(Equilibrium::from_borrowing(
            b.min(1.0),
            sigmas,
            None,
            economy,
        ));
    }

    let mut failure = None;
    let b = bisect(
        |b| match ed(b) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        lo,
        hi,
        BORROWING_TOL,
        MAX_BISECTIONS,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let sigmas = shares_at(b, economy)?;
    Ok(Equilibrium::from_borrowing(b, sigmas, None, economy))
}

/// `θ·h(b)/b + (1−θ)·l(b)/b − 1`: positive when a risk-neutral investor
/// with belief `θ` strictly prefers bonds at borrowing `b`.
pub fn lending_margin(theta: f64, b: f64, economy: &Economy) -> f64 {
    let rev = economy.revenue();
    theta * rev.high_per_unit(b) + (1.0 - theta) * rev.low_per_unit(b) - 1.0
}

/// Checks a risk-neutral equilibrium against the lenders' participation
/// condition: full lenders weakly prefer bonds, cash holders weakly prefer
/// cash, a partial lender is indifferent (within `tol`), wealth-holding types
/// above the marginal type strictly prefer bonds and those below it strictly
/// prefer cash (the type just below may be exactly indifferent while holding
/// cash). Returns a description of every violation.
pub fn participation_violations(
    eq: &Equilibrium,
    f: &WealthShares,
    economy: &Economy,
    tol: f64,
) -> Vec<String> {
    let mut out = Vec::new();
    if eq.degenerate {
        return out;
    }
    let thetas = economy.grid().thetas();
    let marginal = eq.marginal_index;
    for (k, (&theta, &sigma)) in thetas.iter().zip(&eq.sigmas).enumerate() {
        let m = lending_margin(theta, eq.b, economy);
        if sigma >= 1.0 && m < -tol {
            out.push(format!("type {k} lends fully with margin {m:e}"));
        } else if sigma <= 0.0 && m > tol {
            out.push(format!("type {k} holds cash with margin {m:e}"));
        } else if sigma > 0.0 && sigma < 1.0 && m.abs() > tol {
            out.push(format!("partial lender {k} not indifferent: margin {m:e}"));
        }
        let Some(mi) = marginal else { continue };
        if f.as_slice()[k] <= 0.0 {
            continue;
        }
        if k > mi && !(m > 0.0) {
            out.push(format!("type {k} above marginal {mi} has margin {m:e}"));
        }
        if k < mi {
            let adjacent_cash = k + 1 == mi && sigma == 0.0;
            let ok = if adjacent_cash { m <= tol } else { m < 0.0 };
            if !ok {
                out.push(format!("type {k} below marginal {mi} has margin {m:e}"));
            }
        }
    }
    out
}
