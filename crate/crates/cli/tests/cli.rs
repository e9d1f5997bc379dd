use std::fs;
use std::path::Path;

use leverage_cli::output::sha256_hex;
use leverage_cli::{run, RunConfig, EXIT_CONFIG, EXIT_OK};

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn invoke(args: &[&str]) -> i32 {
    run(std::iter::once("leverage").chain(args.iter().copied()))
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn equilibrium_worked_example_row() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "eq.conf", "economy.gamma = 0\ngrid.n = 101\n");
    let out = tmp.path().join("out");
    assert_eq!(
        invoke(&[
            "equilibrium",
            "--config",
            &cfg,
            "--out",
            out.to_str().unwrap()
        ]),
        EXIT_OK
    );
    let rows = csv_rows(&out.join("equilibrium.csv"));
    assert_eq!(rows.len(), 2);
    assert_eq!(
        rows[0],
        ["b", "p", "q", "theta_bar", "marginal_index", "degenerate"]
    );
    let num = |k: usize| rows[1][k].parse::<f64>().unwrap();
    assert!((num(0) - 0.4752).abs() < 5e-4);
    assert!((num(1) - 0.6894).abs() < 5e-4);
    assert!((num(2) - 0.6894).abs() < 5e-4);
    assert!((num(3) - 0.53).abs() < 5e-4);
    assert_eq!(rows[1][5], "false");
}

#[test]
fn manifest_checksums_match_files() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "sim.conf",
        "economy.gamma = 1\nshock.pi_star = 0.6\nrun.periods = 50\nrun.thin = 7\n",
    );
    let out = tmp.path().join("out");
    assert_eq!(
        invoke(&[
            "simulate",
            "--config",
            &cfg,
            "--out",
            out.to_str().unwrap(),
            "--seed",
            "3"
        ]),
        EXIT_OK
    );
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 3);
    assert_eq!(manifest["config"]["run.seed"], "3");
    let outputs = manifest["outputs"].as_array().unwrap();
    assert_eq!(outputs.len(), 2);
    for o in outputs {
        let bytes = fs::read(out.join(o["file"].as_str().unwrap())).unwrap();
        assert_eq!(o["sha256"].as_str().unwrap(), sha256_hex(&bytes));
        assert_eq!(o["bytes"].as_u64().unwrap() as usize, bytes.len());
    }
    // The echoed config reproduces the run.
    let echoed = RunConfig::parse(manifest["config_text"].as_str().unwrap()).unwrap();
    assert_eq!(echoed.simulation.seed, 3);
    assert_eq!(echoed.simulation.periods, 50);

    let rows = csv_rows(&out.join("timeseries.csv"));
    assert_eq!(rows.len(), 51);
    let dist = csv_rows(&out.join("distribution.csv"));
    assert_eq!(dist[0], ["t", "theta", "share"]);
    // Snapshots at t = 0, 7, ..., 49 and the final period.
    assert_eq!(dist.len() - 1, 101 * 9);
}

#[test]
fn periods_flag_overrides_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "sim.conf", "run.periods = 500\n");
    let out = tmp.path().join("out");
    assert_eq!(
        invoke(&[
            "simulate",
            "--config",
            &cfg,
            "--out",
            out.to_str().unwrap(),
            "--periods",
            "1"
        ]),
        EXIT_OK
    );
    assert_eq!(
        fs::read_to_string(out.join("timeseries.csv"))
            .unwrap()
            .lines()
            .count(),
        2
    );
}

#[test]
fn missing_config_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let missing = tmp.path().join("absent.conf");
    assert_eq!(
        invoke(&[
            "simulate",
            "--config",
            missing.to_str().unwrap(),
            "--out",
            out.to_str().unwrap()
        ]),
        EXIT_CONFIG
    );
    assert!(!out.exists());
}

#[test]
fn invalid_spec_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "bad.conf",
        "revenue.a = 1.5\neconomy.gamma = -1\nshock.pi_star = 2\n",
    );
    let out = tmp.path().join("out");
    assert_eq!(
        invoke(&[
            "equilibrium",
            "--config",
            &cfg,
            "--out",
            out.to_str().unwrap()
        ]),
        EXIT_CONFIG
    );
    assert!(!out.exists());
}

#[test]
fn bad_sweep_cell_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "sw.conf",
        "sweep.gammas = 0,1\nsweep.pis = 0.5,1.5\nrun.periods = 5\n",
    );
    let out = tmp.path().join("out");
    assert_eq!(
        invoke(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap()]),
        EXIT_CONFIG
    );
    assert!(!out.exists());
}

#[test]
fn unknown_subcommand_and_bad_flags_exit_one() {
    assert_eq!(invoke(&["launch", "--config", "x"]), EXIT_CONFIG);
    assert_eq!(invoke(&["simulate"]), EXIT_CONFIG);
    assert_eq!(
        invoke(&["simulate", "--config", "x", "--seed", "-4"]),
        EXIT_CONFIG
    );
}

#[test]
fn sweep_writes_merged_table_and_cells() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "sw.conf", "run.periods = 20\n");
    let out = tmp.path().join("out");
    assert_eq!(
        invoke(&[
            "sweep",
            "--config",
            &cfg,
            "--out",
            out.to_str().unwrap(),
            "--jobs",
            "2"
        ]),
        EXIT_OK
    );
    let rows = csv_rows(&out.join("sweep.csv"));
    assert_eq!(rows[0], ["gamma", "pi_star", "mean_belief"]);
    assert_eq!(rows.len(), 21);
    assert_eq!(fs::read_dir(out.join("cells")).unwrap().count(), 20);
}

#[test]
fn recurve_lists_fixed_points() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "re.conf",
        "economy.gamma = 1\nshock.kind = logistic\n",
    );
    let out = tmp.path().join("out");
    assert_eq!(
        invoke(&["recurve", "--config", &cfg, "--out", out.to_str().unwrap()]),
        EXIT_OK
    );
    assert_eq!(csv_rows(&out.join("recurve.csv")).len(), 102);
    let roots = csv_rows(&out.join("fixed_points.csv"));
    assert_eq!(roots.len(), 4);
    assert_eq!(roots[1][3], "stable");
    assert_eq!(roots[2][3], "unstable");
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut count = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let text = fs::read_to_string(entry.unwrap().path()).unwrap();
        let cfg = RunConfig::parse(&text).unwrap();
        assert_eq!(RunConfig::parse(&cfg.serialize()).unwrap(), cfg);
        count += 1;
    }
    assert!(count >= 3);
}
