//! Model primitives: belief grids, the belief distribution of wealth, the
//! revenue and shock-probability families, and configuration validation.

use std::fmt;

use crate::error::{ModelError, Result};
use crate::portfolio::indifference_borrowing;

/// Tolerance on the unit sum of a wealth-share vector.
pub const SHARE_SUM_TOL: f64 = 1e-12;

/// Largest pre-renormalization drift accepted before it is treated as a bug.
pub const SHARE_DRIFT_TOL: f64 = 1e-9;

/// Number of points used for the numerical concavity checks.
const CONCAVITY_POINTS: usize = 1000;

/// Ordered finite set of belief types `0 = θ₁ < θ₂ < … < θₙ = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefGrid {
    thetas: Vec<f64>,
}

impl BeliefGrid {
    pub fn new(thetas: Vec<f64>) -> Result<Self> {
        if thetas.len() < 2 {
            return Err(ModelError::InvalidGrid(format!(
                "need at least 2 belief types, got {}",
                thetas.len()
            )));
        }
        if thetas[0] != 0.0 || thetas[thetas.len() - 1] != 1.0 {
            return Err(ModelError::InvalidGrid(
                "grid must start at 0 and end at 1".into(),
            ));
        }
        if let Some(w) = thetas.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(ModelError::InvalidGrid(format!(
                "beliefs must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        Ok(Self { thetas })
    }

    /// Evenly spaced grid `{0, 1/(n-1), …, 1}`.
    pub fn uniform(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(ModelError::InvalidGrid(format!(
                "need at least 2 belief types, got {n}"
            )));
        }
        let last = (n - 1) as f64;
        Self::new((0..n).map(|k| k as f64 / last).collect())
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    /// Index of the grid point within `1e-9` of `theta`.
    pub fn index_of(&self, theta: f64) -> Option<usize> {
        self.thetas.iter().position(|&t| (t - theta).abs() <= 1e-9)
    }
}

impl Default for BeliefGrid {
    /// The 101-point grid `{0, 0.01, …, 1}`.
    fn default() -> Self {
        Self::uniform(101).expect("101-point grid is valid")
    }
}

/// Belief distribution of wealth: the share of aggregate wealth held by each
/// belief type, aligned with a [`BeliefGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct WealthShares {
    f: Vec<f64>,
}

impl WealthShares {
    /// Wraps a vector that must already lie on the simplex.
    pub fn new(f: Vec<f64>) -> Result<Self> {
        if f.is_empty() {
            return Err(ModelError::InvalidShares("empty share vector".into()));
        }
        if let Some((i, v)) = f
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v >= 0.0) || !v.is_finite())
        {
            return Err(ModelError::InvalidShares(format!(
                "share {i} is {v}, must be finite and nonnegative"
            )));
        }
        let sum: f64 = f.iter().sum();
        if (sum - 1.0).abs() > SHARE_SUM_TOL {
            return Err(ModelError::InvalidShares(format!(
                "shares sum to {sum}, expected 1"
            )));
        }
        Ok(Self { f })
    }

    /// Normalizes arbitrary nonnegative weights onto the simplex.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = weights
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v >= 0.0) || !v.is_finite())
        {
            return Err(ModelError::InvalidShares(format!(
                "weight {i} is {v}, must be finite and nonnegative"
            )));
        }
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0) {
            return Err(ModelError::InvalidShares("weights sum to zero".into()));
        }
        Ok(Self {
            f: weights.into_iter().map(|w| w / sum).collect(),
        })
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            f: vec![1.0 / n as f64; n],
        }
    }

    pub fn point_mass(n: usize, index: usize) -> Result<Self> {
        if index >= n {
            return Err(ModelError::InvalidShares(format!(
                "point mass index {index} outside grid of {n}"
            )));
        }
        let mut f = vec![0.0; n];
        f[index] = 1.0;
        Ok(Self { f })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.f
    }

    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    /// Indices of types holding strictly positive wealth.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.f
            .iter()
            .enumerate()
            .filter(|(_, v)| **v > 0.0)
            .map(|(i, _)| i)
    }

    /// Divides by the sum of `weights`, which must already be within
    /// [`SHARE_DRIFT_TOL`] of `expected_sum`.
    pub(crate) fn renormalized(weights: Vec<f64>, expected_sum: f64) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if !(sum > 1e-300) || !sum.is_finite() {
            return Err(ModelError::ZeroWealth(sum));
        }
        let drift = (sum - expected_sum).abs();
        if drift > SHARE_DRIFT_TOL * expected_sum.max(1.0) {
            return Err(ModelError::ShareDrift { drift });
        }
        Ok(Self {
            f: weights.into_iter().map(|w| w / sum).collect(),
        })
    }
}

/// Cumulative wealth share `F(x) = Σ_{θᵢ ≤ x} f(θᵢ)`. Right-continuous, and
/// exactly 1 for `x ≥ 1`.
pub fn cdf(grid: &BeliefGrid, f: &WealthShares, x: f64) -> f64 {
    if x >= grid.thetas[grid.len() - 1] {
        return 1.0;
    }
    grid.thetas
        .iter()
        .zip(&f.f)
        .take_while(|(t, _)| **t <= x)
        .map(|(_, w)| w)
        .sum()
}

/// Wealth-weighted mean belief `Σ θᵢ f(θᵢ)`.
pub fn mean_belief(grid: &BeliefGrid, f: &WealthShares) -> f64 {
    grid.thetas.iter().zip(&f.f).map(|(t, w)| t * w).sum()
}

/// `(1 − eps)·f + eps·uniform`.
pub fn mix_with_uniform(f: &WealthShares, eps: f64) -> Result<WealthShares> {
    if !(0.0..1.0).contains(&eps) {
        return Err(ModelError::InvalidArgument(format!(
            "noise weight {eps} outside [0, 1)"
        )));
    }
    if eps == 0.0 {
        return Ok(f.clone());
    }
    let floor = eps / f.len() as f64;
    let mixed = f.f.iter().map(|w| (1.0 - eps) * w + floor).collect();
    WealthShares::renormalized(mixed, 1.0)
}

/// Revenue functions `h(b) = A·b^a` (good state) and `l(b) = c·b` (bad state).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RevenueSpec {
    /// `A`
    pub scale: f64,
    /// `a`
    pub exponent: f64,
    /// `c`
    pub recovery: f64,
}

impl RevenueSpec {
    pub const FAMILY: &'static str = "power_linear";

    pub fn new(scale: f64, exponent: f64, recovery: f64) -> Self {
        Self {
            scale,
            exponent,
            recovery,
        }
    }

    /// Good-state revenue `h(b)`.
    pub fn high(&self, b: f64) -> f64 {
        self.scale * b.powf(self.exponent)
    }

    /// Bad-state revenue `l(b)`.
    pub fn low(&self, b: f64) -> f64 {
        self.recovery * b
    }

    /// `h(b)/b`, infinite at `b = 0`.
    pub fn high_per_unit(&self, b: f64) -> f64 {
        self.scale * b.powf(self.exponent - 1.0)
    }

    /// `l(b)/b`, equal to `c` for every `b > 0`.
    pub fn low_per_unit(&self, _b: f64) -> f64 {
        self.recovery
    }
}

impl Default for RevenueSpec {
    /// `h(b) = √b`, `l(b) = b/2`.
    fn default() -> Self {
        Self::new(1.0, 0.5, 0.5)
    }
}

/// Objective probability of the good state as a function of borrowing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShockProbSpec {
    Constant(f64),
    /// `base + amplitude / (1 + exp(offset − slope·b))`
    Logistic {
        base: f64,
        amplitude: f64,
        offset: f64,
        slope: f64,
    },
}

impl ShockProbSpec {
    /// `π(b) = 0.3 + 0.5/(1 + exp(4.75 − 12b))`, which ranges over (0.3, 0.8).
    pub fn standard_logistic() -> Self {
        Self::Logistic {
            base: 0.3,
            amplitude: 0.5,
            offset: 4.75,
            slope: 12.0,
        }
    }

    /// Borrowing level at which a logistic rule sits halfway between its
    /// bounds. `None` for a constant rule.
    pub fn midpoint(&self) -> Option<f64> {
        match *self {
            Self::Constant(_) => None,
            Self::Logistic { offset, slope, .. } => Some(offset / slope),
        }
    }
}

/// Evaluates `π(b)`.
pub fn eval_shock_prob(p: &ShockProbSpec, b: f64) -> f64 {
    match *p {
        ShockProbSpec::Constant(pi) => pi,
        ShockProbSpec::Logistic {
            base,
            amplitude,
            offset,
            slope,
        } => base + amplitude / (1.0 + (offset - slope * b).exp()),
    }
}

/// Full economy configuration as supplied by a user. May be invalid; see
/// [`validate_spec`] and [`Economy::new`].
#[derive(Debug, Clone, PartialEq)]
pub struct EconomySpec {
    pub grid: BeliefGrid,
    pub revenue: RevenueSpec,
    pub gamma: f64,
    pub shock_prob: ShockProbSpec,
    pub noise_eps: f64,
}

impl Default for EconomySpec {
    fn default() -> Self {
        Self {
            grid: BeliefGrid::default(),
            revenue: RevenueSpec::default(),
            gamma: 0.0,
            shock_prob: ShockProbSpec::Constant(0.8),
            noise_eps: 0.0,
        }
    }
}

/// Outcome of a single validation condition.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Pass/fail result for every validation condition.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    fn push(&mut self, name: &'static str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name,
            passed,
            detail: detail.into(),
        });
    }

    pub fn is_ok(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn violations(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn passed(&self, name: &str) -> Option<bool> {
        self.checks
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = if c.passed { "ok  " } else { "FAIL" };
            writeln!(f, "[{tag}] {}: {}", c.name, c.detail)?;
        }
        Ok(())
    }
}

pub mod checks {
    pub const REVENUE_PARAMETERS: &str = "revenue parameters";
    pub const H_STRICTLY_CONCAVE: &str = "h strictly concave";
    pub const L_CONCAVE: &str = "l concave";
    pub const REVENUE_ORDERING: &str = "l(b) < b < h(b) on (0,1)";
    pub const H_OVER_B_UNBOUNDED: &str = "h(b)/b -> inf as b -> 0";
    pub const L_OVER_B_BELOW_ONE: &str = "lim l(b)/b < 1";
    pub const ENDPOINTS: &str = "l(1) < 1 = h(1)";
    pub const GAMMA: &str = "gamma finite and >= 0";
    pub const NOISE: &str = "noise weight in [0,1)";
    pub const SHOCK_PROB: &str = "pi(b) in (0,1) on [0,1]";
}

/// Checks every modelling assumption the solvers rely on and reports each
/// condition separately.
pub fn validate_spec(spec: &EconomySpec) -> ValidationReport {
    let mut report = ValidationReport::default();
    let rev = spec.revenue;

    let params_ok = rev.scale.is_finite()
        && rev.scale >= 1.0
        && rev.exponent.is_finite()
        && rev.exponent > 0.0
        && rev.recovery.is_finite()
        && rev.recovery >= 0.0;
    report.push(
        checks::REVENUE_PARAMETERS,
        params_ok,
        format!(
            "A={} (>= 1), a={} (> 0), c={} (>= 0)",
            rev.scale, rev.exponent, rev.recovery
        ),
    );

    let step = 1.0 / (CONCAVITY_POINTS - 1) as f64;
    let xs: Vec<f64> = (0..CONCAVITY_POINTS).map(|k| k as f64 * step).collect();
    let second_diffs = |g: &dyn Fn(f64) -> f64| -> f64 {
        xs.windows(3)
            .map(|w| g(w[0]) - 2.0 * g(w[1]) + g(w[2]))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let h_d2 = second_diffs(&|b| rev.high(b));
    report.push(
        checks::H_STRICTLY_CONCAVE,
        params_ok && h_d2 < -1e-14,
        format!("max second difference {h_d2:e}"),
    );
    let l_d2 = second_diffs(&|b| rev.low(b));
    report.push(
        checks::L_CONCAVE,
        params_ok && l_d2 <= 1e-14,
        format!("max second difference {l_d2:e}"),
    );

    let bad_point = xs[1..xs.len() - 1]
        .iter()
        .find(|&&b| !(rev.low(b) < b && b < rev.high(b)));
    report.push(
        checks::REVENUE_ORDERING,
        params_ok && bad_point.is_none(),
        match bad_point {
            Some(b) => format!("violated at b={b}"),
            None => "holds on interior grid".into(),
        },
    );

    report.push(
        checks::H_OVER_B_UNBOUNDED,
        params_ok && rev.exponent < 1.0,
        format!("h(b)/b = A*b^(a-1) with a={}", rev.exponent),
    );
    report.push(
        checks::L_OVER_B_BELOW_ONE,
        params_ok && rev.recovery < 1.0,
        format!("l(b)/b = c = {}", rev.recovery),
    );
    let (h1, l1) = (rev.high(1.0), rev.low(1.0));
    report.push(
        checks::ENDPOINTS,
        params_ok && l1 < 1.0 && (h1 - 1.0).abs() <= 1e-12,
        format!("l(1)={l1}, h(1)={h1}"),
    );

    report.push(
        checks::GAMMA,
        spec.gamma.is_finite() && spec.gamma >= 0.0,
        format!("gamma={}", spec.gamma),
    );
    report.push(
        checks::NOISE,
        (0.0..1.0).contains(&spec.noise_eps),
        format!("eps={}", spec.noise_eps),
    );

    let (lo, hi) = shock_prob_range(&spec.shock_prob);
    report.push(
        checks::SHOCK_PROB,
        lo > 0.0 && hi < 1.0,
        format!("range [{lo}, {hi}]"),
    );

    report
}

/// Extremes of `π` over `[0,1]`. Both families are monotone in `b`, so the
/// endpoints suffice.
fn shock_prob_range(p: &ShockProbSpec) -> (f64, f64) {
    let params_finite = match *p {
        ShockProbSpec::Constant(pi) => pi.is_finite(),
        ShockProbSpec::Logistic {
            base,
            amplitude,
            offset,
            slope,
        } => [base, amplitude, offset, slope]
            .iter()
            .all(|v| v.is_finite()),
    };
    if !params_finite {
        return (f64::NAN, f64::NAN);
    }
    let (a, b) = (eval_shock_prob(p, 0.0), eval_shock_prob(p, 1.0));
    (a.min(b), a.max(b))
}

/// A validated economy, with per-type quantities the solvers reuse every
/// period.
#[derive(Debug, Clone)]
pub struct Economy {
    spec: EconomySpec,
    /// Risk-neutral indifference borrowing `αᵢ` for each grid type.
    alphas: Vec<f64>,
    /// `ln(θᵢ/(1−θᵢ)) / γ` for each grid type (γ > 0 only).
    scaled_log_odds: Vec<f64>,
}

impl Economy {
    pub fn new(spec: EconomySpec) -> Result<Self> {
        let report = validate_spec(&spec);
        if !report.is_ok() {
            return Err(ModelError::InvalidSpec(report));
        }
        let alphas = spec
            .grid
            .thetas()
            .iter()
            .map(|&t| indifference_borrowing(t, &spec.revenue))
            .collect();
        let scaled_log_odds = if spec.gamma > 0.0 {
            spec.grid
                .thetas()
                .iter()
                .map(|&t| (t.ln() - (1.0 - t).ln()) / spec.gamma)
                .collect()
        } else {
            Vec::new()
        };
        Ok(Self {
            spec,
            alphas,
            scaled_log_odds,
        })
    }

    pub fn spec(&self) -> &EconomySpec {
        &self.spec
    }

    pub fn grid(&self) -> &BeliefGrid {
        &self.spec.grid
    }

    pub fn revenue(&self) -> &RevenueSpec {
        &self.spec.revenue
    }

    pub fn gamma(&self) -> f64 {
        self.spec.gamma
    }

    pub fn shock_prob(&self) -> &ShockProbSpec {
        &self.spec.shock_prob
    }

    pub fn noise_eps(&self) -> f64 {
        self.spec.noise_eps
    }

    pub(crate) fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub(crate) fn scaled_log_odds(&self) -> &[f64] {
        &self.scaled_log_odds
    }

    /// Same economy with a different risk-aversion coefficient.
    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        Self::new(EconomySpec {
            gamma,
            ..self.spec.clone()
        })
    }

    /// Same economy with a different shock-probability rule.
    pub fn with_shock_prob(&self, shock_prob: ShockProbSpec) -> Result<Self> {
        Self::new(EconomySpec {
            shock_prob,
            ..self.spec.clone()
        })
    }
}
