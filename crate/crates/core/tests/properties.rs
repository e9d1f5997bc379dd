use leverage_core::equilibrium::{participation_violations, shares_at};
use leverage_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

fn dirichlet(rng: &mut ChaCha8Rng, n: usize) -> WealthShares {
    let w: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    WealthShares::from_weights(w).unwrap()
}

fn random_economy(rng: &mut ChaCha8Rng, gamma: f64) -> Economy {
    Economy::new(EconomySpec {
        revenue: RevenueSpec::new(1.0, rng.random_range(0.2..0.9), rng.random_range(0.1..0.9)),
        gamma,
        ..EconomySpec::default()
    })
    .unwrap()
}

fn supply(eq: &Equilibrium, f: &WealthShares) -> f64 {
    eq.sigmas.iter().zip(f.as_slice()).map(|(s, w)| s * w).sum()
}

#[test]
fn equilibrium_invariants_hold() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let gamma = [0.0, 0.5, 1.0, 1.5, 2.0][rng.random_range(0..5)];
        let econ = random_economy(&mut rng, gamma);
        let f = dirichlet(&mut rng, 101);
        let eq = solve_equilibrium(&f, &econ).unwrap();
        assert!(!eq.degenerate);
        assert!((eq.q - econ.revenue().high(eq.b)).abs() < 1e-12);
        assert!((eq.p * eq.q - eq.b).abs() < 1e-10);
        assert!((supply(&eq, &f) - eq.b).abs() < 1e-10, "gamma {gamma}");
        assert!(eq.sigmas.windows(2).all(|w| w[1] >= w[0]));
        assert!(eq.p < 1.0);
    }
}

#[test]
fn excess_demand_has_one_crossing() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..30 {
        let gamma = rng.random_range(0.05..2.0);
        let econ = random_economy(&mut rng, gamma);
        let f = dirichlet(&mut rng, 101);
        let n = 10_000;
        let values: Vec<f64> = (1..n)
            .map(|k| excess_demand(k as f64 / n as f64, &f, &econ).unwrap())
            .collect();
        let crossings: Vec<usize> = (1..values.len())
            .filter(|&k| (values[k - 1] < 0.0) != (values[k] < 0.0))
            .collect();
        assert_eq!(crossings.len(), 1, "gamma {gamma}");
        let eq = solve_equilibrium(&f, &econ).unwrap();
        let k = crossings[0];
        assert!(eq.b >= k as f64 / n as f64 - 1e-6 && eq.b <= (k + 1) as f64 / n as f64 + 1e-6);
    }
}

#[test]
fn risk_neutral_participation_ordering() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let econ = random_economy(&mut rng, 0.0);
        let f = dirichlet(&mut rng, 101);
        let eq = solve_risk_neutral(&f, &econ).unwrap();
        let v = participation_violations(&eq, &f, &econ, 1e-12);
        assert!(v.is_empty(), "{v:?}");
    }
}

fn direction_violations(
    before: &Equilibrium,
    after: &Equilibrium,
    state: ShockState,
    tol: f64,
) -> usize {
    let pairs = [
        (before.b, after.b),
        (before.q, after.q),
        (before.p, after.p),
    ];
    let mut bad = pairs
        .iter()
        .filter(|(x, y)| match state {
            ShockState::Good => *y < *x - tol,
            ShockState::Bad => *y > *x + tol,
        })
        .count();
    if let (Some(m0), Some(m1)) = (before.marginal_index, after.marginal_index) {
        let wrong = match state {
            ShockState::Good => m1 < m0,
            ShockState::Bad => m1 > m0,
        };
        bad += usize::from(wrong);
    }
    bad
}

#[test]
fn comparative_statics_for_proven_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for gamma in [0.0, 1.0] {
        for _ in 0..100 {
            let econ = random_economy(&mut rng, gamma);
            let f = dirichlet(&mut rng, 101);
            let eq = solve_equilibrium(&f, &econ).unwrap();
            for state in [ShockState::Good, ShockState::Bad] {
                let (next, _) = apply_shock(&f, &eq, state, &econ).unwrap();
                let eq2 = solve_equilibrium(&next, &econ).unwrap();
                assert_eq!(
                    direction_violations(&eq, &eq2, state, 1e-10),
                    0,
                    "gamma {gamma} {state:?}"
                );
            }
        }
    }
}

#[test]
fn shocks_shift_distribution_by_dominance() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let gamma = rng.random_range(0.0..2.0);
        let econ = random_economy(&mut rng, gamma);
        let f = dirichlet(&mut rng, 101);
        let eq = solve_equilibrium(&f, &econ).unwrap();
        let (good, g_good) = apply_shock(&f, &eq, ShockState::Good, &econ).unwrap();
        let (bad, g_bad) = apply_shock(&f, &eq, ShockState::Bad, &econ).unwrap();
        assert!(g_good > 1.0 && g_bad < 1.0);
        let rev = econ.revenue();
        assert!((g_good - (1.0 - eq.b + rev.high(eq.b))).abs() < 1e-9);
        assert!((g_bad - (1.0 - eq.b + rev.low(eq.b))).abs() < 1e-9);
        for &x in econ.grid().thetas() {
            let base = cdf(econ.grid(), &f, x);
            assert!(cdf(econ.grid(), &good, x) <= base + 1e-12);
            assert!(cdf(econ.grid(), &bad, x) >= base - 1e-12);
        }
    }
}

#[test]
fn beta_matches_point_mass_equilibrium() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..50 {
        let gamma = [0.0, 0.5, 1.0, 1.5, 2.0][rng.random_range(0..5)];
        let econ = random_economy(&mut rng, gamma);
        let idx = rng.random_range(1..101);
        let theta = econ.grid().thetas()[idx];
        let beta = beta_of_theta(theta, &econ).unwrap();
        let f = WealthShares::point_mass(101, idx).unwrap();
        let eq = solve_equilibrium(&f, &econ).unwrap();
        assert!(
            (beta - eq.b).abs() < 1e-8,
            "gamma {gamma} theta {theta}: {beta} vs {}",
            eq.b
        );
        if gamma > 0.0 && beta > 1e-6 && beta < 1.0 {
            assert!(excess_demand(beta, &f, &econ).unwrap().abs() < 1e-9);
        }
    }
}

#[test]
fn log_beta_satisfies_single_belief_condition() {
    let econ = Economy::new(EconomySpec {
        gamma: 1.0,
        ..EconomySpec::default()
    })
    .unwrap();
    let rev = econ.revenue();
    for k in 1..100 {
        let theta = k as f64 / 100.0;
        let b = beta_of_theta(theta, &econ).unwrap();
        let shares = shares_at(b, &econ).unwrap();
        let sigma = shares[k];
        if sigma > 0.0 && sigma < 1.0 {
            let lhs = theta / (1.0 - rev.low(b) / b) - (1.0 - theta) / (rev.high(b) / b - 1.0);
            assert!((lhs - b).abs() < 1e-10, "theta {theta}");
        }
    }
}

#[test]
fn re_root_count_is_resolution_stable() {
    let econ = Economy::new(EconomySpec {
        gamma: 1.0,
        shock_prob: ShockProbSpec::standard_logistic(),
        ..EconomySpec::default()
    })
    .unwrap();
    let coarse = find_re_equilibria(&econ, 1000).unwrap();
    let fine = find_re_equilibria(&econ, 2000).unwrap();
    assert!(coarse.len() >= 2);
    assert_eq!(coarse.len(), fine.len());
    for r in &coarse {
        let gap = selffulfilling::fixed_point_gap(r.theta, &econ).unwrap();
        assert!(gap.abs() < 1e-8);
    }
    let stable = coarse
        .iter()
        .filter(|r| r.stability == selffulfilling::Stability::Stable)
        .count();
    assert!(stable >= 2);

    let flat = econ.with_shock_prob(ShockProbSpec::Constant(0.5)).unwrap();
    let roots = find_re_equilibria(&flat, 1000).unwrap();
    assert_eq!(roots.len(), 1);
    assert!((roots[0].theta - 0.5).abs() < 1e-8);
}

#[test]
fn simulation_keeps_simplex_and_support() {
    for gamma in [0.0, 1.0, 2.0] {
        let econ = Economy::new(EconomySpec {
            gamma,
            shock_prob: ShockProbSpec::Constant(0.6),
            ..EconomySpec::default()
        })
        .unwrap();
        let mut explicit = vec![0.0; 101];
        for (k, w) in explicit.iter_mut().enumerate().skip(20).take(40) {
            *w = 1.0 + k as f64;
        }
        let cfg = SimulationConfig {
            periods: 300,
            seed: 9,
            initial: InitialDistribution::Explicit(explicit),
            thin: 1,
            ..SimulationConfig::default()
        };
        let run = simulate(&econ, &cfg).unwrap();
        let initial: Vec<usize> = run.snapshots[0].shares.support().collect();
        for snap in &run.snapshots {
            let s = snap.shares.as_slice();
            assert!(((s.iter().sum::<f64>()) - 1.0).abs() < 1e-12);
            assert!(snap.shares.support().all(|k| initial.contains(&k)));
        }
        for r in &run.periods {
            match r.state {
                Some(ShockState::Good) => assert_eq!(r.realized_y, econ.revenue().high(r.b)),
                Some(ShockState::Bad) => assert_eq!(r.realized_y, econ.revenue().low(r.b)),
                None => assert!(r.degenerate),
            }
            assert!((r.growth - (1.0 - r.b + r.realized_y)).abs() < 1e-9);
        }
    }
}

#[test]
fn simulation_is_deterministic() {
    let econ = Economy::new(EconomySpec {
        gamma: 1.0,
        noise_eps: 0.01,
        shock_prob: ShockProbSpec::standard_logistic(),
        ..EconomySpec::default()
    })
    .unwrap();
    let cfg = SimulationConfig {
        periods: 200,
        seed: 77,
        ..SimulationConfig::default()
    };
    assert_eq!(
        simulate(&econ, &cfg).unwrap(),
        simulate(&econ, &cfg).unwrap()
    );
    let other = simulate(
        &econ,
        &SimulationConfig {
            seed: 78,
            ..cfg.clone()
        },
    )
    .unwrap();
    assert_ne!(simulate(&econ, &cfg).unwrap().periods, other.periods);
}

#[test]
fn sweep_cell_equals_direct_simulation() {
    let base = EconomySpec::default();
    let cfg = SimulationConfig {
        periods: 100,
        seed: 4,
        ..SimulationConfig::default()
    };
    let table = sweep(
        &base,
        &[0.0, 1.0],
        &[0.4, 0.8],
        &cfg,
        SummaryStat::Terminal,
        Some(2),
    )
    .unwrap();
    assert_eq!(table.cells.len(), 4);
    let econ = Economy::new(EconomySpec {
        gamma: 1.0,
        shock_prob: ShockProbSpec::Constant(0.4),
        ..base.clone()
    })
    .unwrap();
    let direct = simulate(&econ, &cfg).unwrap();
    let cell = table.cell(1, 0);
    assert_eq!(cell.run, direct);
    assert_eq!(cell.mean_belief, direct.terminal_mean_belief());

    // Same seed and constant π*: identical state sequences across γ.
    let states = |g: usize| -> Vec<_> {
        table
            .cell(g, 1)
            .run
            .periods
            .iter()
            .map(|r| r.state)
            .collect()
    };
    assert_eq!(states(0), states(1));
}
