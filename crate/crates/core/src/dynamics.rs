//! Period-by-period evolution of the belief distribution of wealth.
//!
//! Each period: optionally mix the inherited distribution with the uniform
//! one, solve the credit-market equilibrium, draw the aggregate shock with
//! probability `π(b)` of the good state, and pay every type its realized
//! gross return. Wealth shares are then renormalized.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::equilibrium::{solve_equilibrium, Equilibrium};
use crate::error::{ModelError, Result};
use crate::model::{
    eval_shock_prob, mean_belief, mix_with_uniform, BeliefGrid, Economy, EconomySpec,
    ShockProbSpec, WealthShares,
};

/// Identifier of the random stream used by [`simulate`]: ChaCha8 seeded via
/// `SeedableRng::seed_from_u64`, stream 0, one `f64` in `[0,1)` drawn per
/// period.
pub const RNG_ID: &str = "chacha8/seed_from_u64/v1";

pub fn run_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShockState {
    Good,
    Bad,
}

impl ShockState {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Good => "good",
            Self::Bad => "bad",
        }
    }
}

/// Everything observed in one period.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodRecord {
    pub t: usize,
    pub b: f64,
    pub p: f64,
    pub q: f64,
    /// Good-state probability; absent in periods without lending.
    pub pi: Option<f64>,
    pub state: Option<ShockState>,
    /// Aggregate gross wealth growth, `(1 − b) + y`.
    pub growth: f64,
    /// Normalized revenue `y`: `h(b)` after a good state, `l(b)` after a bad one.
    pub realized_y: f64,
    /// Mean belief of the end-of-period distribution.
    pub mean_belief: f64,
    pub marginal_theta: Option<f64>,
    pub degenerate: bool,
}

/// Starting belief distribution of wealth.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum InitialDistribution {
    #[default]
    Uniform,
    /// All wealth on the grid type equal to this belief.
    PointMass(f64),
    /// Nonnegative weights, one per grid type; normalized on use.
    Explicit(Vec<f64>),
}

impl InitialDistribution {
    pub fn resolve(&self, grid: &BeliefGrid) -> Result<WealthShares> {
        match self {
            Self::Uniform => Ok(WealthShares::uniform(grid.len())),
            Self::PointMass(theta) => {
                let idx = grid.index_of(*theta).ok_or_else(|| {
                    ModelError::InvalidShares(format!("belief {theta} is not on the grid"))
                })?;
                WealthShares::point_mass(grid.len(), idx)
            }
            Self::Explicit(w) => {
                if w.len() != grid.len() {
                    return Err(ModelError::InvalidShares(format!(
                        "{} initial weights for a grid of {} types",
                        w.len(),
                        grid.len()
                    )));
                }
                WealthShares::from_weights(w.clone())
            }
        }
    }
}

/// Statistic summarizing a run's mean belief.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SummaryStat {
    /// Mean belief after the final period.
    #[default]
    Terminal,
    /// Average over all periods of the end-of-period mean belief.
    TimeAverage,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub periods: usize,
    pub seed: u64,
    pub initial: InitialDistribution,
    /// Store the distribution every `thin` periods (the final one always).
    pub thin: usize,
    /// Mix with the uniform distribution before (true) or after the
    /// equilibrium and shock of each period.
    pub mix_before: bool,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            periods: 1,
            seed: 0,
            initial: InitialDistribution::Uniform,
            thin: 10,
            mix_before: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: usize,
    pub shares: WealthShares,
}

/// Full trace of one simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub spec: EconomySpec,
    pub config: SimulationConfig,
    pub periods: Vec<PeriodRecord>,
    /// Distribution at `t = 0` and every `thin` periods, plus the final one.
    pub snapshots: Vec<Snapshot>,
    pub final_shares: WealthShares,
}

impl RunRecord {
    pub fn seed(&self) -> u64 {
        self.config.seed
    }

    pub fn terminal_mean_belief(&self) -> f64 {
        mean_belief(&self.spec.grid, &self.final_shares)
    }

    pub fn time_averaged_mean_belief(&self) -> f64 {
        let n = self.periods.len().max(1) as f64;
        self.periods.iter().map(|r| r.mean_belief).sum::<f64>() / n
    }

    pub fn summary(&self, stat: SummaryStat) -> f64 {
        match stat {
            SummaryStat::Terminal => self.terminal_mean_belief(),
            SummaryStat::TimeAverage => self.time_averaged_mean_belief(),
        }
    }

    pub fn leverage(&self) -> impl Iterator<Item = f64> + '_ {
        self.periods.iter().map(|r| r.b)
    }
}

/// Pays each type its realized gross return on the portfolio chosen in
/// `eq`, then renormalizes. Returns the new shares and aggregate growth
/// (the pre-normalization total), which equals `(1 − b) + y`.
pub fn apply_shock(
    f: &WealthShares,
    eq: &Equilibrium,
    state: ShockState,
    economy: &Economy,
) -> Result<(WealthShares, f64)> {
    let rev = economy.revenue();
    let (unit_return, realized_y) = match state {
        // each unit invested buys 1/p bonds repaying 1
        ShockState::Good => (1.0 / eq.p, rev.high(eq.b)),
        // each bond recovers l(b)/q
        ShockState::Bad => (rev.low(eq.b) / eq.q / eq.p, rev.low(eq.b)),
    };
    let weights: Vec<f64> = f
        .as_slice()
        .iter()
        .zip(&eq.sigmas)
        .map(|(&w, &s)| {
            if s == 0.0 {
                w
            } else {
                w * (1.0 - s + s * unit_return)
            }
        })
        .collect();
    let growth: f64 = weights.iter().sum();
    let expected = (1.0 - eq.b) + if eq.b > 0.0 { realized_y } else { 0.0 };
    let shares = WealthShares::renormalized(weights, expected)?;
    Ok((shares, growth))
}

/// How the period's shock is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShockDraw {
    /// Uniform draw in `[0,1)`; good iff `u < π(b)`.
    Uniform(f64),
    Forced(ShockState),
}

/// Advances one period using a given shock draw. `t` is the index recorded
/// on the period.
pub fn step_with(
    f: &WealthShares,
    economy: &Economy,
    t: usize,
    draw: ShockDraw,
    mix_before: bool,
) -> Result<(WealthShares, PeriodRecord)> {
    let eps = economy.noise_eps();
    let start = if mix_before && eps > 0.0 {
        mix_with_uniform(f, eps)?
    } else {
        f.clone()
    };
    let eq = solve_equilibrium(&start, economy)?;

    let (mut next, pi, state, growth, realized_y) = if eq.degenerate {
        (start, None, None, 1.0, 0.0)
    } else {
        let pi = eval_shock_prob(economy.shock_prob(), eq.b);
        let state = match draw {
            ShockDraw::Uniform(u) if u < pi => ShockState::Good,
            ShockDraw::Uniform(_) => ShockState::Bad,
            ShockDraw::Forced(s) => s,
        };
        let (next, growth) = apply_shock(&start, &eq, state, economy)?;
        let y = match state {
            ShockState::Good => economy.revenue().high(eq.b),
            ShockState::Bad => economy.revenue().low(eq.b),
        };
        (next, Some(pi), Some(state), growth, y)
    };
    if !mix_before && eps > 0.0 {
        next = mix_with_uniform(&next, eps)?;
    }

    let record = PeriodRecord {
        t,
        b: eq.b,
        p: eq.p,
        q: eq.q,
        pi,
        state,
        growth,
        realized_y,
        mean_belief: mean_belief(economy.grid(), &next),
        marginal_theta: eq.marginal_theta(economy),
        degenerate: eq.degenerate,
    };
    Ok((next, record))
}

/// Advances one period, consuming exactly one uniform draw from `rng`
/// whether or not the period has lending.
pub fn step<R: Rng + ?Sized>(
    f: &WealthShares,
    economy: &Economy,
    t: usize,
    rng: &mut R,
    mix_before: bool,
) -> Result<(WealthShares, PeriodRecord)> {
    let u: f64 = rng.random();
    step_with(f, economy, t, ShockDraw::Uniform(u), mix_before)
}

/// Runs `config.periods` periods from the configured initial distribution.
/// Identical economy and config give bit-identical records.
pub fn simulate(economy: &Economy, config: &SimulationConfig) -> Result<RunRecord> {
    if config.periods == 0 {
        return Err(ModelError::InvalidArgument(
            "simulation needs at least one period".into(),
        ));
    }
    let thin = config.thin.max(1);
    let mut rng = run_rng(config.seed);
    let mut f = config.initial.resolve(economy.grid())?;
    let mut periods = Vec::with_capacity(config.periods);
    let mut snapshots = vec![Snapshot {
        t: 0,
        shares: f.clone(),
    }];
    for t in 1..=config.periods {
        let (next, record) = step(&f, economy, t, &mut rng, config.mix_before)?;
        f = next;
        periods.push(record);
        if t % thin == 0 || t == config.periods {
            snapshots.push(Snapshot {
                t,
                shares: f.clone(),
            });
        }
    }
    Ok(RunRecord {
        spec: economy.spec().clone(),
        config: config.clone(),
        periods,
        snapshots,
        final_shares: f,
    })
}

/// One cell of a risk-aversion × shock-probability sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub gamma: f64,
    pub pi_star: f64,
    pub mean_belief: f64,
    pub run: RunRecord,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub gammas: Vec<f64>,
    pub pis: Vec<f64>,
    /// Row-major: all `pis` for `gammas[0]`, then `gammas[1]`, ….
    pub cells: Vec<SweepCell>,
}

impl SweepTable {
    pub fn cell(&self, gamma_idx: usize, pi_idx: usize) -> &SweepCell {
        &self.cells[gamma_idx * self.pis.len() + pi_idx]
    }

    /// Mean beliefs for one `π*` across all `γ`, in `gammas` order.
    pub fn column(&self, pi_idx: usize) -> Vec<f64> {
        (0..self.gammas.len())
            .map(|g| self.cell(g, pi_idx).mean_belief)
            .collect()
    }
}

/// Simulates every `(γ, π*)` pair with a constant shock probability. All
/// cells share `config.seed`, so for a given `π*` every `γ` sees the same
/// sequence of states. Cells run on a pool of `jobs` threads (rayon's
/// default when `None`).
pub fn sweep(
    base: &EconomySpec,
    gammas: &[f64],
    pis: &[f64],
    config: &SimulationConfig,
    summary: SummaryStat,
    jobs: Option<usize>,
) -> Result<SweepTable> {
    let pairs: Vec<(f64, f64)> = gammas
        .iter()
        .flat_map(|&g| pis.iter().map(move |&p| (g, p)))
        .collect();
    let economies = pairs
        .iter()
        .map(|&(gamma, pi)| {
            Economy::new(EconomySpec {
                gamma,
                shock_prob: ShockProbSpec::Constant(pi),
                ..base.clone()
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let run_all = || -> Result<Vec<SweepCell>> {
        economies
            .par_iter()
            .zip(pairs.par_iter())
            .map(|(economy, &(gamma, pi_star))| {
                let run = simulate(economy, config)?;
                Ok(SweepCell {
                    gamma,
                    pi_star,
                    mean_belief: run.summary(summary),
                    run,
                })
            })
            .collect()
    };
    let cells = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| ModelError::Internal(format!("thread pool: {e}")))?
            .install(run_all)?,
        None => run_all()?,
    };
    Ok(SweepTable {
        gammas: gammas.to_vec(),
        pis: pis.to_vec(),
        cells,
    })
}
