use skyline_core::availability::p_available_exact;
use skyline_core::blockage::{derived_rates, dynamic_blockage_prob};
use skyline_core::simcore::*;
use skyline_core::ScenarioParams;
use std::f64::consts::PI;

fn table() -> ScenarioParams {
    ScenarioParams::default()
}

fn opts(n: u64, seed: u64) -> EstimateOptions {
    EstimateOptions {
        n_trials: n,
        seed,
        ..Default::default()
    }
}

// Pearson statistic of blocker radii over ten equal-area annuli.
fn radial_chi_square(worlds: &[WorldState], r_cell: f64) -> f64 {
    let mut bins = [0f64; 10];
    let mut n = 0.0;
    for w in worlds {
        for b in &w.blockers {
            let u = (b.position[0].hypot(b.position[1]) / r_cell).powi(2);
            bins[((u * 10.0) as usize).min(9)] += 1.0;
            n += 1.0;
        }
    }
    bins.iter().map(|&o| (o - n / 10.0).powi(2) / (n / 10.0)).sum()
}

#[test]
fn mean_uav_count_is_pi() {
    let p = table();
    let spec = PlacementSpec::Ppp { mu_h: 25.0 };
    let sim = SimConfig::default();
    let n = 10_000;
    let total: usize = (0..n).map(|s| sample_world(&p, &spec, s, &sim).unwrap().uavs.len()).sum();
    let mean = total as f64 / n as f64;
    assert!((mean / PI - 1.0).abs() < 0.02, "{mean}");
}

#[test]
fn blockers_uniform_in_cell_before_and_after_motion() {
    // 9 degrees of freedom, 5% critical value.
    const CRITICAL: f64 = 16.919;
    let p = table();
    let sim = SimConfig::default();
    let spec = PlacementSpec::single(10.0, 25.0);
    let mut worlds: Vec<WorldState> = (0..60).map(|s| sample_world(&p, &spec, s, &sim).unwrap()).collect();
    let before = radial_chi_square(&worlds, p.r_cell);
    assert!(before < CRITICAL, "{before}");
    for w in worlds.iter_mut() {
        for _ in 0..300 {
            w.step_blockers(0.5, &p, &sim);
        }
        assert!(w.blockers.iter().all(|b| b.position[0].hypot(b.position[1]) <= p.r_cell + 1e-9));
    }
    let after = radial_chi_square(&worlds, p.r_cell);
    assert!(after < CRITICAL, "{after}");
}

#[test]
fn onoff_time_fraction_matches_steady_state() {
    let p = table();
    let spec = PlacementSpec::single(10.0, 25.0);
    let o = EstimateOptions {
        phi_mode: PhiMode::TimeFraction { horizon: 200.0 },
        ..opts(20_000, 11)
    };
    let e = estimate_metric(Metric::Phi, &p, &spec, &o).unwrap();
    let exact = dynamic_blockage_prob(25.0, 10.0, &p).unwrap();
    assert!((exact - 5.392e-4).abs() < 1e-6);
    assert!((e.mean / exact - 1.0).abs() < 0.05, "{} vs {exact}", e.mean);
}

#[test]
fn body_width_biases_geometric_blockage_upward() {
    // Blockers of finite width occupy a strip around the shadow segment,
    // so the snapshot blocked fraction is the Poisson void probability
    // of that strip rather than the renewal steady state.
    let p = table();
    let sim = SimConfig::default();
    let uav = [10.0, 0.0, 25.0];
    let spec = PlacementSpec::Fixed { uavs: vec![uav] };
    let n = 20_000;
    let blocked = (0..n)
        .filter(|&s| link_dynamic_blocked(uav, &sample_world(&p, &spec, s, &sim).unwrap().blockers, &p, &sim).unwrap())
        .count() as f64
        / n as f64;
    let r_eff = (p.h_b - p.h_r) / (25.0 - p.h_r) * 10.0;
    let w = sim.blocker_width;
    let strip = 1.0 - (-p.lambda_b * (r_eff + w) * w).exp();
    let hw = 4.0 * (strip * (1.0 - strip) / n as f64).sqrt();
    assert!((blocked - strip).abs() < hw, "{blocked} vs {strip}");
    let phi = dynamic_blockage_prob(25.0, 10.0, &p).unwrap();
    eprintln!("geometric/renewal blockage ratio at width {w} m: {:.2}", blocked / phi);
    assert!(blocked > phi);
}

#[test]
fn static_los_matches_boolean_model() {
    let p = ScenarioParams {
        theta: 0.0,
        sigma: 0.0,
        ..table()
    };
    let d = derived_rates(&p);
    for r in [25.0, 50.0, 100.0] {
        let spec = PlacementSpec::single(r, 25.0);
        let o = EstimateOptions {
            availability: AvailabilityBackend::Geometric,
            ..opts(100_000, r as u64)
        };
        let e = estimate_metric(Metric::PAvailable, &p, &spec, &o).unwrap();
        let expected = (-(d.epsilon * r + d.epsilon_0)).exp();
        assert!((e.mean - expected).abs() < 1.5 * e.half_width_95 + 1e-3, "r={r}: {} vs {expected}", e.mean);
    }
}

#[test]
fn self_blockage_sector_fraction() {
    let p = ScenarioParams {
        theta: PI / 6.0,
        lambda_s: 0.0,
        ..table()
    };
    let spec = PlacementSpec::Ppp { mu_h: 25.0 };
    let o = EstimateOptions {
        availability: AvailabilityBackend::Geometric,
        ..opts(200_000, 4)
    };
    let e = estimate_metric(Metric::PAvailable, &p, &spec, &o).unwrap();
    assert!(((1.0 - e.mean) - 1.0 / 12.0).abs() < e.half_width_95 * 1.5, "{}", e.mean);
}

#[test]
fn geometric_availability_matches_exact() {
    let p = table();
    let spec = PlacementSpec::Ppp { mu_h: 25.0 };
    let o = EstimateOptions {
        availability: AvailabilityBackend::Geometric,
        ..opts(100_000, 8)
    };
    let e = estimate_metric(Metric::PAvailable, &p, &spec, &o).unwrap();
    let exact = p_available_exact(&p);
    assert!((e.mean / exact - 1.0).abs() < 0.01, "{} vs {exact}", e.mean);
}

#[test]
fn estimates_independent_of_thread_count() {
    let p = table();
    let spec = PlacementSpec::Ring {
        r_in: 10.0,
        r_out: 15.0,
        mu_h: 25.0,
    };
    let o = opts(10_000, 21);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                Metric::ALL
                    .iter()
                    .map(|&m| estimate_metric(m, &p, &spec, &o).unwrap())
                    .collect::<Vec<_>>()
            })
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, run(7));
}

#[test]
fn rejects_bad_inputs() {
    let p = table();
    assert!(estimate_metric(Metric::RelSingle, &p, &PlacementSpec::single(10.0, 1.0), &opts(10, 0)).is_err());
    assert!(estimate_metric(Metric::RelSingle, &p, &PlacementSpec::single(10.0, 25.0), &opts(0, 0)).is_err());
    let bad = ScenarioParams { omega: -1.0, ..table() };
    assert!(estimate_metric(Metric::RelSingle, &bad, &PlacementSpec::single(10.0, 25.0), &opts(10, 0)).is_err());
}
