//! Single-investor portfolio choice between cash and risky bonds.
//!
//! An investor putting a share `σ` of wealth into bonds ends the period with
//! `1 + σH` if the bonds are repaid and `1 − σL` if they partially default,
//! where `H` and `L` are the per-unit gain and loss implied by the market
//! terms. Preferences are CRRA with coefficient `γ`.

use crate::error::{ModelError, Result};
use crate::model::RevenueSpec;
use crate::roots::bisect;

/// Prices and quantities faced by lenders at a given borrowing level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketTerms {
    /// Borrowing per unit of aggregate wealth.
    pub b: f64,
    /// Bond price.
    pub p: f64,
    /// Bonds issued per unit of wealth.
    pub q: f64,
    /// `l(b)`
    pub l_val: f64,
    /// `h(b)`
    pub h_val: f64,
}

impl MarketTerms {
    /// Terms implied by borrowing `b` when the issue exhausts good-state
    /// revenue (`q = h(b)`) and raises exactly `b` (`p·q = b`).
    pub fn at_borrowing(b: f64, revenue: &RevenueSpec) -> Self {
        let h_val = revenue.high(b);
        Self {
            b,
            p: b / h_val,
            q: h_val,
            l_val: revenue.low(b),
            h_val,
        }
    }
}

/// Gain (`H`) per unit invested in bonds in the good state and loss (`L`)
/// in the bad state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainLoss {
    pub gain: f64,
    pub loss: f64,
}

impl GainLoss {
    /// Builds a gain/loss pair, requiring `H > 0` and `0 < L ≤ 1`.
    pub fn new(gain: f64, loss: f64) -> Result<Self> {
        if !(gain > 0.0) || !gain.is_finite() {
            return Err(ModelError::DegenerateTerms(format!(
                "gain H={gain} must be positive"
            )));
        }
        if !(loss > 0.0 && loss <= 1.0) {
            return Err(ModelError::DegenerateTerms(format!(
                "loss L={loss} outside (0,1]"
            )));
        }
        Ok(Self { gain, loss })
    }
}

/// `H = 1/p − 1`, `L = 1 − (1/p)(l(b)/q)`.
pub fn gain_loss(terms: &MarketTerms) -> Result<GainLoss> {
    if !(terms.b > 0.0 && terms.b < 1.0) {
        return Err(ModelError::DegenerateTerms(format!(
            "borrowing b={} is not interior",
            terms.b
        )));
    }
    let gain = 1.0 / terms.p - 1.0;
    let loss = 1.0 - (terms.l_val / terms.q) / terms.p;
    GainLoss::new(gain, loss)
}

/// `θ_min = L/(H+L)` and `θ_max = (HL + L)/(H+L)`: log investors hold no
/// bonds at or below `θ_min` and only bonds above `θ_max`.
pub fn share_thresholds(gl: &GainLoss) -> (f64, f64) {
    let GainLoss { gain: h, loss: l } = *gl;
    (l / (h + l), (h * l + l) / (h + l))
}

/// Optimal bond holding of one belief type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BondShare {
    Share(f64),
    /// Risk-neutral investor exactly indifferent between cash and bonds.
    Indifferent,
}

impl BondShare {
    pub fn value(self) -> Option<f64> {
        match self {
            Self::Share(s) => Some(s),
            Self::Indifferent => None,
        }
    }
}

/// Expected-utility maximizing bond share for belief `theta` under CRRA
/// coefficient `gamma`.
///
/// For `γ > 0` the interior optimum solves the first-order condition
/// `θH(1+σH)^{−γ} = (1−θ)L(1−σL)^{−γ}`, giving
/// `σ = (r − 1)/(H + rL)` with `r = (θH / ((1−θ)L))^{1/γ}`, clamped to `[0,1]`.
/// Log utility uses the equivalent piecewise form with the `θ_min`/`θ_max`
/// cutoffs.
pub fn optimal_share(theta: f64, gamma: f64, gl: &GainLoss) -> BondShare {
    let GainLoss { gain: h, loss: l } = *gl;
    if gamma == 0.0 {
        let edge = theta * h - (1.0 - theta) * l;
        return if edge > 0.0 {
            BondShare::Share(1.0)
        } else if edge < 0.0 {
            BondShare::Share(0.0)
        } else {
            BondShare::Indifferent
        };
    }
    if theta <= 0.0 {
        return BondShare::Share(0.0);
    }
    if theta >= 1.0 {
        return BondShare::Share(1.0);
    }
    if gamma == 1.0 {
        let (lo, hi) = share_thresholds(gl);
        let s = if theta <= lo {
            0.0
        } else if theta <= hi {
            ((theta * h - (1.0 - theta) * l) / (h * l)).min(1.0)
        } else {
            1.0
        };
        return BondShare::Share(s);
    }
    let log_ratio = (theta.ln() - (1.0 - theta).ln() + h.ln() - l.ln()) / gamma;
    BondShare::Share(share_from_log_ratio(log_ratio, h, l))
}

/// `clamp((r − 1)/(H + rL), 0, 1)` evaluated from `ln r` without overflow.
#[inline]
pub(crate) fn share_from_log_ratio(log_ratio: f64, h: f64, l: f64) -> f64 {
    if log_ratio <= 0.0 {
        return 0.0;
    }
    if log_ratio == f64::INFINITY {
        return 1.0;
    }
    // σ ≥ 1 exactly when r ≥ (1+H)/(1−L).
    if l < 1.0 && log_ratio >= (1.0 + h).ln() - (1.0 - l).ln() {
        return 1.0;
    }
    let r = log_ratio.exp();
    ((r - 1.0) / (h + r * l)).clamp(0.0, 1.0)
}

/// Bond share chosen by belief `theta` when aggregate borrowing is `b`.
pub fn share_at_borrowing(
    theta: f64,
    gamma: f64,
    b: f64,
    revenue: &RevenueSpec,
) -> Result<BondShare> {
    let gl = gain_loss(&MarketTerms::at_borrowing(b, revenue))?;
    Ok(optimal_share(theta, gamma, &gl))
}

/// CRRA utility `w^{1−γ}/(1−γ)`, `ln w` at `γ = 1`.
pub fn crra_utility(w: f64, gamma: f64) -> f64 {
    if gamma == 1.0 {
        w.ln()
    } else {
        w.powf(1.0 - gamma) / (1.0 - gamma)
    }
}

/// Subjective expected utility of holding bond share `sigma`.
pub fn expected_utility(theta: f64, gamma: f64, gl: &GainLoss, sigma: f64) -> f64 {
    let good = 1.0 + sigma * gl.gain;
    let bad = 1.0 - sigma * gl.loss;
    theta * crra_utility(good, gamma) + (1.0 - theta) * crra_utility(bad, gamma)
}

/// Derivative of [`expected_utility`] with respect to `sigma`.
pub fn marginal_utility_of_share(theta: f64, gamma: f64, gl: &GainLoss, sigma: f64) -> f64 {
    let GainLoss { gain: h, loss: l } = *gl;
    theta * h * (1.0 + sigma * h).powf(-gamma) - (1.0 - theta) * l * (1.0 - sigma * l).powf(-gamma)
}

/// Borrowing level `α` at which a risk-neutral investor with belief `theta`
/// is indifferent between cash and bonds:
/// `θ·h(α)/α + (1−θ)·l(α)/α = 1`.
///
/// `α(0) = 0` and `α(1) = 1`. The left side is decreasing in `α`, so the
/// root is found by bisection on `(0, 1]`, run to floating-point resolution
/// (at most 200 halvings).
pub fn indifference_borrowing(theta: f64, revenue: &RevenueSpec) -> f64 {
    if theta <= 0.0 {
        return 0.0;
    }
    if theta >= 1.0 {
        return 1.0;
    }
    let excess = |alpha: f64| {
        theta * revenue.high_per_unit(alpha) + (1.0 - theta) * revenue.low_per_unit(alpha) - 1.0
    };
    // Unbracketed only when l(1) ≥ 1 or h(1) > 1, which validation rejects.
    bisect(excess, 0.0, 1.0, 0.0, 200).unwrap_or(1.0)
}
