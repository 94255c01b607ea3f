use linkform_core::control::{system_matrices, AgentState};
use linkform_core::presets;
use linkform_core::sim::{
    aggregate, formation_error, monte_carlo, run_scenario, sample_noise, step_dynamics, update_edges, AgentNoise,
    NoiseDraw, PowerMode, RangeKind, ScenarioConfig,
};
use nalgebra::DVector;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn quiet(mut cfg: ScenarioConfig) -> ScenarioConfig {
    cfg.noise = vec![AgentNoise { pos: 0.0, vel: 0.0 }; cfg.n_agents()];
    cfg
}

#[test]
fn equilibrium_start_stays_on_formation() {
    let mut cfg = quiet(presets::formation_adaptive());
    let drift = DVector::from_column_slice(&[0.4, -0.2]);
    cfg.initial = cfg
        .offsets
        .iter()
        .map(|o| AgentState::new(o + DVector::from_column_slice(&[5.0, 5.0]), drift.clone()).unwrap())
        .collect();
    cfg.horizon_steps = 400;
    let trace = run_scenario(&cfg).unwrap();
    for s in &trace.steps {
        assert!(s.pos_error < 1e-9 && s.vel_error < 1e-12, "step {}", s.step);
    }
    assert!(trace.decode_failures.is_empty());
}

#[test]
fn noiseless_loop_converges() {
    let mut cfg = quiet(presets::formation_adaptive());
    cfg.horizon_steps = 4000;
    let trace = run_scenario(&cfg).unwrap();
    let starts: Vec<f64> = trace.windows.iter().map(|w| trace.steps[w.start_step].pos_error).collect();
    assert!(starts[0] > 1.0);
    assert!(*starts.last().unwrap() < 1e-9, "{}", starts.last().unwrap());
}

// Neighbor inputs after the window start are extrapolated from the relayed
// aggregate, which lags the neighbor's true aggregate by one window. Without
// process noise there is no range slack to absorb that lag, so transient
// windows can miss. Own ranges stay exact.
#[test]
fn noiseless_transient_exposes_neighbor_extrapolation_gap() {
    let mut cfg = quiet(presets::formation_adaptive());
    cfg.horizon_steps = 4000;
    let trace = run_scenario(&cfg).unwrap();
    assert!(!trace.containment_violations.is_empty());
    assert!(trace.containment_violations.iter().all(|v| v.kind == RangeKind::Neighbor));
    assert!(trace.containment_violations.iter().all(|v| v.excess_m < 0.05));
    assert!(trace.decode_failures.iter().all(|f| f.step < 200));
}

#[test]
fn adaptive_runs_audit_clean() {
    for seed in 0..5 {
        let trace = run_scenario(&presets::formation_adaptive().with_seed(seed)).unwrap();
        let s = &trace.summary;
        assert_eq!(s.containment_violations, 0, "seed {seed}");
        assert_eq!(s.control_decode_failures, 0, "seed {seed}");
        assert_eq!(s.planner_faults, 0, "seed {seed}");
        assert!(s.control_connected_throughout);
        for w in &trace.windows {
            for (i, j) in presets::six_cycle().edges() {
                assert!(w.edges.contains(&(i, j)) && w.edges.contains(&(j, i)), "window {}", w.window);
            }
        }
    }
}

#[test]
fn edges_regenerate_from_recorded_states() {
    let trace = run_scenario(&presets::formation_fixed_jamming().with_seed(4)).unwrap();
    assert!(!trace.decode_failures.is_empty());
    for w in &trace.windows {
        let positions: Vec<Vec<DVector<f64>>> = (0..w.len)
            .map(|l| trace.steps[w.start_step + l].states.iter().map(|x| x.position.clone()).collect())
            .collect();
        assert_eq!(update_edges(&positions, &w.self_ranges, &w.comm_radii), w.edges);
    }
}

#[test]
fn same_seed_same_trace() {
    let cfg = presets::formation_adaptive().with_seed(9);
    assert_eq!(run_scenario(&cfg).unwrap(), run_scenario(&cfg).unwrap());
    let other = run_scenario(&cfg.with_seed(10)).unwrap();
    assert_ne!(run_scenario(&cfg).unwrap().final_states, other.final_states);
}

#[test]
fn invalid_configs_rejected() {
    let mut cfg = presets::formation_adaptive();
    cfg.tau = 3;
    assert!(run_scenario(&cfg).is_err());
    let mut cfg = presets::formation_adaptive();
    cfg.initial.pop();
    assert!(run_scenario(&cfg).is_err());
    let mut cfg = presets::formation_adaptive();
    cfg.topology = linkform_core::control::ControlTopology::from_edges(6, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
    assert!(run_scenario(&cfg).is_err());
}

#[test]
fn single_run_monte_carlo_matches_scenario() {
    let mut base = presets::montecarlo_base();
    base.horizon_steps = 400;
    let rows = monte_carlo(&base, &[17], &[2], 2).unwrap();
    let s = run_scenario(&base.with_seed(17)).unwrap().summary;
    assert_eq!(rows[0].mean_steady_error, s.steady_mean_pos_error);
    assert_eq!(rows[0].mean_power_w, s.mean_power_w[2]);
    assert_eq!(rows[0].runs, 1);
}

#[test]
fn aggregate_order_and_rerun() {
    let mut base = presets::montecarlo_base();
    base.horizon_steps = 300;
    let runs: Vec<_> = (0..6).map(|s| run_scenario(&base.with_seed(s)).unwrap().summary).collect();
    let fwd = aggregate(2, 5120.0, &runs, 2).unwrap();
    let mut rev = runs.clone();
    rev.reverse();
    let back = aggregate(2, 5120.0, &rev, 2).unwrap();
    assert!((fwd.mean_steady_error - back.mean_steady_error).abs() < 1e-12);
    assert!((fwd.mean_power_w - back.mean_power_w).abs() < 1e-12);
    let seeds: Vec<u64> = (0..3).collect();
    assert_eq!(
        monte_carlo(&base, &seeds, &[2, 3], 2).unwrap(),
        monte_carlo(&base, &seeds, &[2, 3], 2).unwrap()
    );
}

#[test]
fn step_matches_stacked_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let h = 0.05;
    let (a, b) = system_matrices(h, 2).unwrap();
    for _ in 0..100 {
        let x = AgentState::new(
            DVector::from_fn(2, |_, _| rng.gen_range(-5.0..5.0)),
            DVector::from_fn(2, |_, _| rng.gen_range(-5.0..5.0)),
        )
        .unwrap();
        let u = DVector::from_fn(2, |_, _| rng.gen_range(-3.0..3.0));
        let w = NoiseDraw { pos: sample_noise(&mut rng, 0.15, 2), vel: sample_noise(&mut rng, 0.15, 2) };
        let next = step_dynamics(&x, &u, &w, (0.15, 0.15), h).unwrap();
        let mut wv = w.pos.clone().resize_vertically(4, 0.0);
        wv.rows_mut(2, 2).copy_from(&w.vel);
        let stacked = &a * x.stacked() + &b * &u + wv;
        assert!((next.stacked() - stacked).norm() < 1e-12);
    }
}

#[test]
fn pairwise_error_brackets_centroid_deviation() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let offsets = presets::triangle_offsets();
    for _ in 0..3 {
        let states: Vec<AgentState> = offsets
            .iter()
            .map(|o| {
                AgentState::new(
                    o + DVector::from_fn(2, |_, _| rng.gen_range(-2.0..2.0)),
                    DVector::from_fn(2, |_, _| rng.gen_range(-1.0..1.0)),
                )
                .unwrap()
            })
            .collect();
        let devs: Vec<DVector<f64>> = states.iter().zip(&offsets).map(|(x, o)| &x.position - o).collect();
        let mean = devs.iter().fold(DVector::zeros(2), |acc, d| acc + d) / devs.len() as f64;
        let centroid_max = devs.iter().map(|d| (d - &mean).norm()).fold(0.0, f64::max);
        let (ep, _) = formation_error(&states, &offsets);
        assert!(ep >= centroid_max - 1e-12);
        assert!(ep <= 2.0 * centroid_max + 1e-12);
    }
}

#[test]
fn fixed_power_needs_jamming_to_fail() {
    let mut cfg = presets::formation_fixed_jamming();
    cfg.jamming.clear();
    let calm = run_scenario(&cfg).unwrap();
    assert!(calm.decode_failures.is_empty());
    let jammed = run_scenario(&presets::formation_fixed_jamming()).unwrap();
    let first = jammed.decode_failures.first().unwrap();
    assert!(first.step >= 800);
    assert!(matches!(cfg.power, PowerMode::Fixed { .. }));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn noise_draws_stay_in_ball(seed in any::<u64>(), radius in 0.0f64..3.0, dim in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..200 {
            prop_assert!(sample_noise(&mut rng, radius, dim).norm() <= radius);
        }
    }

    #[test]
    fn adaptive_random_seed_has_no_control_failures(seed in any::<u64>()) {
        let mut cfg = presets::formation_adaptive().with_seed(seed);
        cfg.horizon_steps = 600;
        let s = run_scenario(&cfg).unwrap().summary;
        prop_assert_eq!(s.control_decode_failures, 0);
        prop_assert_eq!(s.containment_violations, 0);
    }
}
