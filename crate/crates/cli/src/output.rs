//! CSV and manifest writers.
//!
//! Floats are written in scientific notation with 17 significant digits, so
//! every value round-trips exactly. Missing values are empty fields. Each
//! writer builds the file in memory, writes it in one go and returns the
//! SHA-256 of the bytes written.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use leverage_core::dynamics::SweepTable;
use leverage_core::selffulfilling::{FixedPoint, RECurvePoint, Stability};
use leverage_core::{Economy, Equilibrium, RunRecord, WealthShares};
use sha2::{Digest, Sha256};

#[derive(Debug, thiserror::Error)]
#[error("cannot write {path}: {source}")]
pub struct WriteError {
    pub path: PathBuf,
    #[source]
    pub source: std::io::Error,
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes `contents` to `path` and returns its checksum.
pub fn write_checked(path: &Path, contents: &str) -> Result<String, WriteError> {
    fs::write(path, contents).map_err(|source| WriteError {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(sha256_hex(contents.as_bytes()))
}

pub const TIMESERIES_HEADER: &str = "t,b,p,q,pi,state,growth,realized_y,mean_belief,marginal_theta";

pub fn timeseries_csv(record: &RunRecord) -> String {
    let mut s = String::with_capacity(200 * (record.periods.len() + 1));
    s.push_str(TIMESERIES_HEADER);
    s.push('\n');
    for r in &record.periods {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            r.t,
            fmt_f64(r.b),
            fmt_f64(r.p),
            fmt_f64(r.q),
            fmt_opt(r.pi),
            r.state.map(|x| x.as_str()).unwrap_or(""),
            fmt_f64(r.growth),
            fmt_f64(r.realized_y),
            fmt_f64(r.mean_belief),
            fmt_opt(r.marginal_theta),
        );
    }
    s
}

pub fn write_timeseries(record: &RunRecord, path: &Path) -> Result<String, WriteError> {
    write_checked(path, &timeseries_csv(record))
}

/// Snapshots in long format: one row per (t, θ) with positive or zero share.
pub fn distribution_csv(record: &RunRecord, thetas: &[f64]) -> String {
    let mut s = String::from("t,theta,share\n");
    for snap in &record.snapshots {
        for (theta, share) in thetas.iter().zip(snap.shares.as_slice()) {
            let _ = writeln!(s, "{},{},{}", snap.t, fmt_f64(*theta), fmt_f64(*share));
        }
    }
    s
}

pub fn equilibrium_csv(eq: &Equilibrium, economy: &Economy) -> String {
    format!(
        "b,p,q,theta_bar,marginal_index,degenerate\n{},{},{},{},{},{}\n",
        fmt_f64(eq.b),
        fmt_f64(eq.p),
        fmt_f64(eq.q),
        fmt_opt(eq.marginal_theta(economy)),
        eq.marginal_index.map(|k| k.to_string()).unwrap_or_default(),
        eq.degenerate,
    )
}

/// Per-type holdings at the equilibrium: wealth share and bond share.
pub fn shares_csv(eq: &Equilibrium, f: &WealthShares, thetas: &[f64]) -> String {
    let mut s = String::from("theta,wealth_share,bond_share\n");
    for ((theta, w), sigma) in thetas.iter().zip(f.as_slice()).zip(&eq.sigmas) {
        let _ = writeln!(s, "{},{},{}", fmt_f64(*theta), fmt_f64(*w), fmt_f64(*sigma));
    }
    s
}

pub fn sweep_csv(table: &SweepTable) -> String {
    let mut s = String::from("gamma,pi_star,mean_belief\n");
    for c in &table.cells {
        let _ = writeln!(
            s,
            "{},{},{}",
            fmt_f64(c.gamma),
            fmt_f64(c.pi_star),
            fmt_f64(c.mean_belief)
        );
    }
    s
}

pub fn recurve_csv(points: &[RECurvePoint]) -> String {
    let mut s = String::from("theta,beta,pi_at_beta\n");
    for p in points {
        let _ = writeln!(
            s,
            "{},{},{}",
            fmt_f64(p.theta),
            fmt_f64(p.beta),
            fmt_f64(p.pi_at_beta)
        );
    }
    s
}

pub fn fixed_points_csv(points: &[FixedPoint]) -> String {
    let mut s = String::from("theta_star,beta,slope,stability\n");
    for p in points {
        let tag = match p.stability {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
        };
        let _ = writeln!(
            s,
            "{},{},{},{}",
            fmt_f64(p.theta),
            fmt_f64(p.beta),
            fmt_f64(p.slope),
            tag
        );
    }
    s
}
