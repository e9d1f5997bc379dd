//! Flat `section.key = value` run configuration.
//!
//! One assignment per line; `#` starts a comment; lists are comma-separated.
//! Every key is optional and falls back to the defaults below. Serializing a
//! parsed config writes every key in a fixed order, so parse → serialize →
//! parse is the identity.

use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use leverage_core::{
    BeliefGrid, EconomySpec, InitialDistribution, RevenueSpec, ShockProbSpec, SimulationConfig,
    SummaryStat,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Equilibrium,
    Simulate,
    Sweep,
    Recurve,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Equilibrium => "equilibrium",
            Self::Simulate => "simulate",
            Self::Sweep => "sweep",
            Self::Recurve => "recurve",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "equilibrium" => Ok(Self::Equilibrium),
            "simulate" => Ok(Self::Simulate),
            "sweep" => Ok(Self::Sweep),
            "recurve" => Ok(Self::Recurve),
            _ => Err(format!("unknown experiment kind '{s}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub kind: ExperimentKind,
    pub economy: EconomySpec,
    pub simulation: SimulationConfig,
    pub summary: SummaryStat,
    pub sweep_gammas: Vec<f64>,
    pub sweep_pis: Vec<f64>,
    /// Points in the tabulated borrowing curve.
    pub recurve_points: usize,
    /// Scan resolution for fixed-point search.
    pub recurve_scan: usize,
    pub out_dir: PathBuf,
    /// Worker threads for sweeps; `None` uses every available core.
    pub jobs: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            kind: ExperimentKind::Simulate,
            economy: EconomySpec::default(),
            simulation: SimulationConfig::default(),
            summary: SummaryStat::Terminal,
            sweep_gammas: vec![0.0, 0.5, 1.0, 1.5, 2.0],
            sweep_pis: vec![0.2, 0.4, 0.6, 0.8],
            recurve_points: 101,
            recurve_scan: 1000,
            out_dir: PathBuf::from("out"),
            jobs: None,
        }
    }
}

/// Every problem found while parsing, with line numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigErrors(pub Vec<String>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.0 {
            writeln!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

fn parse_num<T: FromStr>(v: &str) -> Result<T, String> {
    v.parse::<T>().map_err(|_| format!("cannot parse '{v}'"))
}

fn parse_list(v: &str) -> Result<Vec<f64>, String> {
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|x| parse_num::<f64>(x.trim())).collect()
}

fn parse_bool(v: &str) -> Result<bool, String> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(format!("expected true or false, got '{v}'")),
    }
}

fn join(xs: &[f64]) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

#[derive(Default)]
struct ShockFields {
    kind: Option<String>,
    pi_star: Option<f64>,
    base: Option<f64>,
    amplitude: Option<f64>,
    offset: Option<f64>,
    slope: Option<f64>,
}

#[derive(Default)]
struct InitFields {
    kind: Option<String>,
    theta: Option<f64>,
    weights: Option<Vec<f64>>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigErrors> {
        let mut cfg = RunConfig::default();
        let mut errors = Vec::new();
        let mut seen = std::collections::HashSet::new();
        let mut grid_n: Option<usize> = None;
        let mut shock = ShockFields::default();
        let mut init = InitFields::default();

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                errors.push(format!("line {}: expected key = value", lineno + 1));
                continue;
            };
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                errors.push(format!("line {}: duplicate key '{key}'", lineno + 1));
                continue;
            }
            let result: Result<(), String> = (|| {
                match key {
                    "experiment.kind" => cfg.kind = value.parse()?,
                    "grid.n" => grid_n = Some(parse_num(value)?),
                    "revenue.family" => {
                        if value != RevenueSpec::FAMILY {
                            return Err(format!(
                                "unknown revenue family '{value}' (only {} is available)",
                                RevenueSpec::FAMILY
                            ));
                        }
                    }
                    "revenue.A" => cfg.economy.revenue.scale = parse_num(value)?,
                    "revenue.a" => cfg.economy.revenue.exponent = parse_num(value)?,
                    "revenue.c" => cfg.economy.revenue.recovery = parse_num(value)?,
                    "economy.gamma" => cfg.economy.gamma = parse_num(value)?,
                    "economy.noise_eps" => cfg.economy.noise_eps = parse_num(value)?,
                    "economy.mix_before" => cfg.simulation.mix_before = parse_bool(value)?,
                    "shock.kind" => shock.kind = Some(value.to_string()),
                    "shock.pi_star" => shock.pi_star = Some(parse_num(value)?),
                    "shock.base" => shock.base = Some(parse_num(value)?),
                    "shock.amplitude" => shock.amplitude = Some(parse_num(value)?),
                    "shock.offset" => shock.offset = Some(parse_num(value)?),
                    "shock.slope" => shock.slope = Some(parse_num(value)?),
                    "init.kind" => init.kind = Some(value.to_string()),
                    "init.theta" => init.theta = Some(parse_num(value)?),
                    "init.weights" => init.weights = Some(parse_list(value)?),
                    "run.periods" => cfg.simulation.periods = parse_num(value)?,
                    "run.seed" => cfg.simulation.seed = parse_num(value)?,
                    "run.thin" => cfg.simulation.thin = parse_num(value)?,
                    "run.summary" => {
                        cfg.summary = match value {
                            "terminal" => SummaryStat::Terminal,
                            "time_average" => SummaryStat::TimeAverage,
                            _ => return Err(format!("unknown summary '{value}'")),
                        }
                    }
                    "sweep.gammas" => cfg.sweep_gammas = parse_list(value)?,
                    "sweep.pis" => cfg.sweep_pis = parse_list(value)?,
                    "recurve.points" => cfg.recurve_points = parse_num(value)?,
                    "recurve.scan_points" => cfg.recurve_scan = parse_num(value)?,
                    "output.dir" => cfg.out_dir = PathBuf::from(value),
                    _ => return Err(format!("unknown key '{key}'")),
                }
                Ok(())
            })();
            if let Err(e) = result {
                errors.push(format!("line {}: {key}: {e}", lineno + 1));
            }
        }

        if let Some(n) = grid_n {
            match BeliefGrid::uniform(n) {
                Ok(g) => cfg.economy.grid = g,
                Err(e) => errors.push(format!("grid.n: {e}")),
            }
        }
        match shock.kind.as_deref().unwrap_or("constant") {
            "constant" => {
                let pi = shock.pi_star.unwrap_or(0.8);
                cfg.economy.shock_prob = ShockProbSpec::Constant(pi);
                if shock
                    .base
                    .or(shock.amplitude)
                    .or(shock.offset)
                    .or(shock.slope)
                    .is_some()
                {
                    errors.push("shock: logistic parameters given for a constant rule".into());
                }
            }
            "logistic" => {
                let ShockProbSpec::Logistic {
                    base,
                    amplitude,
                    offset,
                    slope,
                } = ShockProbSpec::standard_logistic()
                else {
                    unreachable!()
                };
                cfg.economy.shock_prob = ShockProbSpec::Logistic {
                    base: shock.base.unwrap_or(base),
                    amplitude: shock.amplitude.unwrap_or(amplitude),
                    offset: shock.offset.unwrap_or(offset),
                    slope: shock.slope.unwrap_or(slope),
                };
                if shock.pi_star.is_some() {
                    errors.push("shock: pi_star given for a logistic rule".into());
                }
            }
            other => errors.push(format!("shock.kind: unknown rule '{other}'")),
        }
        match init.kind.as_deref().unwrap_or("uniform") {
            "uniform" => cfg.simulation.initial = InitialDistribution::Uniform,
            "point_mass" => match init.theta {
                Some(t) => cfg.simulation.initial = InitialDistribution::PointMass(t),
                None => errors.push("init: point_mass needs init.theta".into()),
            },
            "explicit" => match init.weights.take() {
                Some(w) => cfg.simulation.initial = InitialDistribution::Explicit(w),
                None => errors.push("init: explicit needs init.weights".into()),
            },
            other => errors.push(format!("init.kind: unknown distribution '{other}'")),
        }

        if errors.is_empty() {
            Ok(cfg)
        } else {
            Err(ConfigErrors(errors))
        }
    }

    /// Problems that depend on the experiment rather than on the economy.
    pub fn check(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.simulation.periods == 0 {
            out.push("run.periods must be at least 1".into());
        }
        if self.simulation.thin == 0 {
            out.push("run.thin must be at least 1".into());
        }
        if self.kind == ExperimentKind::Sweep
            && (self.sweep_gammas.is_empty() || self.sweep_pis.is_empty())
        {
            out.push("sweep.gammas and sweep.pis must be non-empty".into());
        }
        if self.kind == ExperimentKind::Recurve
            && (self.recurve_points < 2 || self.recurve_scan < 2)
        {
            out.push("recurve.points and recurve.scan_points must be at least 2".into());
        }
        if self.jobs == Some(0) {
            out.push("--jobs must be at least 1".into());
        }
        out
    }

    /// Canonical `key = value` listing of every parameter.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let e = &self.economy;
        let grid_n = e.grid.len();
        let mut out = vec![
            ("experiment.kind", self.kind.as_str().to_string()),
            ("grid.n", grid_n.to_string()),
            ("revenue.family", RevenueSpec::FAMILY.to_string()),
            ("revenue.A", e.revenue.scale.to_string()),
            ("revenue.a", e.revenue.exponent.to_string()),
            ("revenue.c", e.revenue.recovery.to_string()),
            ("economy.gamma", e.gamma.to_string()),
            ("economy.noise_eps", e.noise_eps.to_string()),
            ("economy.mix_before", self.simulation.mix_before.to_string()),
        ];
        match e.shock_prob {
            ShockProbSpec::Constant(pi) => {
                out.push(("shock.kind", "constant".into()));
                out.push(("shock.pi_star", pi.to_string()));
            }
            ShockProbSpec::Logistic {
                base,
                amplitude,
                offset,
                slope,
            } => {
                out.push(("shock.kind", "logistic".into()));
                out.push(("shock.base", base.to_string()));
                out.push(("shock.amplitude", amplitude.to_string()));
                out.push(("shock.offset", offset.to_string()));
                out.push(("shock.slope", slope.to_string()));
            }
        }
        match &self.simulation.initial {
            InitialDistribution::Uniform => out.push(("init.kind", "uniform".into())),
            InitialDistribution::PointMass(t) => {
                out.push(("init.kind", "point_mass".into()));
                out.push(("init.theta", t.to_string()));
            }
            InitialDistribution::Explicit(w) => {
                out.push(("init.kind", "explicit".into()));
                out.push(("init.weights", join(w)));
            }
        }
        out.extend([
            ("run.periods", self.simulation.periods.to_string()),
            ("run.seed", self.simulation.seed.to_string()),
            ("run.thin", self.simulation.thin.to_string()),
            (
                "run.summary",
                match self.summary {
                    SummaryStat::Terminal => "terminal",
                    SummaryStat::TimeAverage => "time_average",
                }
                .into(),
            ),
            ("sweep.gammas", join(&self.sweep_gammas)),
            ("sweep.pis", join(&self.sweep_pis)),
            ("recurve.points", self.recurve_points.to_string()),
            ("recurve.scan_points", self.recurve_scan.to_string()),
            ("output.dir", self.out_dir.display().to_string()),
        ]);
        out
    }

    pub fn serialize(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.entries() {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }
}
