use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::{PowerMode, ScenarioConfig};
use super::dynamics::{sample_noise, step_dynamics, NoiseDraw};
use super::metrics::{formation_error, RunSummary};
use crate::ball::{predict_position_range, Ball, PredictionQuery};
use crate::channel::{comm_radius_at_rate, decodable, guaranteed_region};
use crate::control::{connected_components_of, AgentState};
use crate::error::{Error, Result};
use crate::power::{neighbor_range, plan_power, NeighborReport, NeighborSnapshot, PowerPlanInput};

const AUDIT_TOL: f64 = 1e-9;

/// State of every agent at the start of step `step`, and what was applied during it.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub states: Vec<AgentState>,
    pub inputs: Vec<DVector<f64>>,
    pub powers: Vec<f64>,
    pub comm_radii: Vec<f64>,
    pub pos_error: f64,
    pub vel_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowRecord {
    pub window: usize,
    pub start_step: usize,
    /// Steps simulated in this window; shorter than `tau` only at the horizon.
    pub len: usize,
    pub powers: Vec<f64>,
    /// Planner output per agent; `None` in fixed mode or after a planner fault.
    pub required_radii: Vec<Option<f64>>,
    /// `[agent][l]` transmitter position ranges used for decoding.
    pub self_ranges: Vec<Vec<Ball>>,
    /// `[agent][l]` communication radius in force at each step.
    pub comm_radii: Vec<Vec<f64>>,
    /// Directed `(transmitter, receiver)` pairs that decoded the window's message.
    pub edges: Vec<(usize, usize)>,
    pub control_connected: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecodeFailure {
    pub window: usize,
    /// First step of the window at which the receiver left the guaranteed region.
    pub step: usize,
    pub transmitter: usize,
    pub receiver: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RangeKind {
    /// An agent's own range as used for decoding.
    Own,
    /// An observer's prediction of a control neighbor's range.
    Neighbor,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContainmentViolation {
    pub window: usize,
    pub step: usize,
    pub observer: usize,
    pub target: usize,
    pub kind: RangeKind,
    /// Distance from the ball surface to the realized position (m).
    pub excess_m: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlannerFault {
    pub window: usize,
    pub agent: usize,
    pub error: Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub steps: Vec<StepRecord>,
    pub final_states: Vec<AgentState>,
    pub windows: Vec<WindowRecord>,
    /// Decode failures on control-topology edges only.
    pub decode_failures: Vec<DecodeFailure>,
    pub containment_violations: Vec<ContainmentViolation>,
    pub planner_faults: Vec<PlannerFault>,
    pub summary: RunSummary,
}

/// Directed pairs `(i, j)` for which `positions[l][j]` stays in the open
/// guaranteed region of transmitter `i` at every step `l` of the window.
pub fn update_edges(
    positions: &[Vec<DVector<f64>>],
    self_ranges: &[Vec<Ball>],
    comm_radii: &[Vec<f64>],
) -> Vec<(usize, usize)> {
    let n = self_ranges.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let ok = positions.iter().enumerate().all(|(l, pos)| {
                decodable(&pos[j], &guaranteed_region(&self_ranges[i][l], comm_radii[i][l]))
            });
            if ok {
                edges.push((i, j));
            }
        }
    }
    edges
}

#[derive(Debug, Clone)]
struct Known {
    step: usize,
    state: AgentState,
    aggregate: AgentState,
}

struct Engine<'a> {
    cfg: &'a ScenarioConfig,
    n: usize,
    h: f64,
    rate_bps: f64,
    states: Vec<AgentState>,
    /// Own exact state at the last window start.
    own_snapshot: Vec<AgentState>,
    /// `[receiver][transmitter]` latest decoded message.
    known: Vec<Vec<Known>>,
    powers: Vec<f64>,
    rng: ChaCha8Rng,
    trace: Trace,
}

impl<'a> Engine<'a> {
    fn new(cfg: &'a ScenarioConfig) -> Result<Self> {
        let n = cfg.n_agents();
        let states = cfg.initial.clone();
        let mut engine = Engine {
            cfg,
            n,
            h: cfg.step_s,
            rate_bps: cfg.rate()?.rate_bps(),
            own_snapshot: states.clone(),
            known: Vec::new(),
            powers: vec![0.0; n],
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            trace: Trace {
                steps: Vec::with_capacity(cfg.horizon_steps),
                final_states: Vec::new(),
                windows: Vec::new(),
                decode_failures: Vec::new(),
                containment_violations: Vec::new(),
                planner_faults: Vec::new(),
                summary: RunSummary {
                    seed: cfg.seed,
                    tau: cfg.tau,
                    rate_bps: 0.0,
                    steady_max_pos_error: 0.0,
                    steady_mean_pos_error: 0.0,
                    steady_max_vel_error: 0.0,
                    mean_power_w: Vec::new(),
                    control_decode_failures: 0,
                    total_decode_failures: 0,
                    containment_violations: 0,
                    planner_faults: 0,
                    control_connected_throughout: true,
                    within_bound: false,
                },
            },
            states,
        };
        // Initial states are common knowledge; seed every table with them.
        let initial_aggregates: Vec<AgentState> = (0..n)
            .map(|i| engine.exact_aggregate(i, &engine.states))
            .collect();
        engine.known = (0..n)
            .map(|_| {
                (0..n)
                    .map(|j| Known {
                        step: 0,
                        state: engine.states[j].clone(),
                        aggregate: initial_aggregates[j].clone(),
                    })
                    .collect()
            })
            .collect();
        if let PowerMode::Fixed { power_w } = cfg.power {
            engine.powers = vec![power_w; n];
        }
        Ok(engine)
    }

    fn formation_coords(&self, agent: usize, x: &AgentState) -> AgentState {
        x.offset_by(&self.cfg.offsets[agent])
    }

    /// `sum_j w (x_j - x_i)` in formation coordinates with all states exact at one step.
    fn exact_aggregate(&self, i: usize, states: &[AgentState]) -> AgentState {
        let zi = self.formation_coords(i, &states[i]);
        let mut agg = AgentState::zeros(self.cfg.dim);
        for (j, w) in self.cfg.topology.neighbors(i) {
            agg.add_scaled(&self.formation_coords(j, &states[j]).sub(&zi), w);
        }
        agg
    }

    /// Aggregate agent `i` feeds its controller for the window starting at `k0`.
    fn window_aggregate(&self, i: usize, k0: usize, snapshot_step: usize) -> AgentState {
        let zi = self
            .formation_coords(i, &self.own_snapshot[i])
            .advanced(k0 - snapshot_step, self.h);
        let mut agg = AgentState::zeros(self.cfg.dim);
        for (j, w) in self.cfg.topology.neighbors(i) {
            let k = &self.known[i][j];
            let zj = self.formation_coords(j, &k.state).advanced(k0 - k.step, self.h);
            agg.add_scaled(&zj.sub(&zi), w);
        }
        agg
    }

    fn plan_input(&self, i: usize, k0: usize, snapshot_step: usize, epsilon_w: f64) -> PowerPlanInput {
        let cfg = self.cfg;
        let neighbors = cfg
            .topology
            .neighbors(i)
            .map(|(j, w)| {
                let k = &self.known[i][j];
                NeighborReport {
                    id: j,
                    weight: w,
                    pos_noise: cfg.noise[j].pos,
                    vel_noise: cfg.noise[j].vel,
                    offset: &cfg.offsets[j] - &cfg.offsets[i],
                    snapshot: (k.step == snapshot_step).then(|| NeighborSnapshot {
                        state: k.state.clone(),
                        aggregate: k.aggregate.clone(),
                    }),
                }
            })
            .collect();
        PowerPlanInput {
            self_state: self.states[i].clone(),
            self_snapshot: self.own_snapshot[i].clone(),
            neighbors,
            gain: cfg.gain,
            tau: cfg.tau,
            step_s: self.h,
            elapsed: k0 - snapshot_step,
            self_pos_noise: cfg.noise[i].pos,
            self_vel_noise: cfg.noise[i].vel,
            rate_bps: self.rate_bps,
            channel: cfg.channel,
            noise_power_w: cfg.noise_power(k0),
            epsilon_w,
        }
    }

    fn run_window(&mut self, m: usize) -> Result<()> {
        let cfg = self.cfg;
        let (n, h, tau) = (self.n, self.h, cfg.tau);
        let k0 = m * tau;
        let len = tau.min(cfg.horizon_steps - k0);
        let snapshot_step = k0.saturating_sub(tau);

        let aggregates: Vec<AgentState> = (0..n)
            .map(|i| self.window_aggregate(i, k0, snapshot_step))
            .collect();

        // Power and, in adaptive mode, predicted neighbor ranges for the audit.
        let mut required_radii = vec![None; n];
        let mut predicted: Vec<Vec<(usize, Vec<Ball>)>> = vec![Vec::new(); n];
        if let PowerMode::Adaptive { epsilon_w } = cfg.power {
            for i in 0..n {
                let input = self.plan_input(i, k0, snapshot_step, epsilon_w);
                match plan_power(&input) {
                    Ok(plan) => {
                        self.powers[i] = plan.power_w;
                        required_radii[i] = Some(plan.required_radius_m);
                        for (idx, nb) in input.neighbors.iter().enumerate() {
                            let balls = (0..len)
                                .map(|l| neighbor_range(&input, idx, l))
                                .collect::<Result<Vec<_>>>()?;
                            predicted[i].push((nb.id, balls));
                        }
                    }
                    Err(error) => self.trace.planner_faults.push(PlannerFault { window: m, agent: i, error }),
                }
            }
        }

        let inputs: Vec<Vec<DVector<f64>>> = (0..n)
            .map(|i| (0..len).map(|l| cfg.gain.apply_advanced(l, h, &aggregates[i])).collect())
            .collect();
        let mut self_ranges = Vec::with_capacity(n);
        let mut comm_radii = Vec::with_capacity(n);
        for i in 0..n {
            let mut balls = Vec::with_capacity(len);
            let mut radii = Vec::with_capacity(len);
            for l in 0..len {
                balls.push(predict_position_range(&PredictionQuery::with_exact_controls(
                    self.states[i].position.clone(),
                    self.states[i].velocity.clone(),
                    &inputs[i][..l],
                    cfg.noise[i].pos,
                    cfg.noise[i].vel,
                    h,
                ))?);
                radii.push(comm_radius_at_rate(
                    self.powers[i],
                    self.rate_bps,
                    &cfg.channel,
                    cfg.noise_power(k0 + l),
                )?);
            }
            self_ranges.push(balls);
            comm_radii.push(radii);
        }

        let window_start_states = self.states.clone();
        let mut positions = Vec::with_capacity(len);
        for l in 0..len {
            let k = k0 + l;
            for i in 0..n {
                let own = &self_ranges[i][l];
                let excess = (&self.states[i].position - own.center()).norm() - own.radius();
                if excess > AUDIT_TOL {
                    self.trace.containment_violations.push(ContainmentViolation {
                        window: m,
                        step: k,
                        observer: i,
                        target: i,
                        kind: RangeKind::Own,
                        excess_m: excess,
                    });
                }
                for (j, balls) in &predicted[i] {
                    let b = &balls[l];
                    let excess = (&self.states[*j].position - b.center()).norm() - b.radius();
                    if excess > AUDIT_TOL {
                        self.trace.containment_violations.push(ContainmentViolation {
                            window: m,
                            step: k,
                            observer: i,
                            target: *j,
                            kind: RangeKind::Neighbor,
                            excess_m: excess,
                        });
                    }
                }
            }
            positions.push(self.states.iter().map(|x| x.position.clone()).collect::<Vec<_>>());

            let (pos_error, vel_error) = formation_error(&self.states, &cfg.offsets);
            let step_inputs: Vec<DVector<f64>> = (0..n).map(|i| inputs[i][l].clone()).collect();
            self.trace.steps.push(StepRecord {
                step: k,
                states: self.states.clone(),
                inputs: step_inputs.clone(),
                powers: self.powers.clone(),
                comm_radii: (0..n).map(|i| comm_radii[i][l]).collect(),
                pos_error,
                vel_error,
            });

            for i in 0..n {
                let noise = NoiseDraw {
                    pos: sample_noise(&mut self.rng, cfg.noise[i].pos, cfg.dim),
                    vel: sample_noise(&mut self.rng, cfg.noise[i].vel, cfg.dim),
                };
                self.states[i] = step_dynamics(
                    &self.states[i],
                    &step_inputs[i],
                    &noise,
                    (cfg.noise[i].pos, cfg.noise[i].vel),
                    h,
                )?;
            }
        }

        let edges = update_edges(&positions, &self_ranges, &comm_radii);
        let mut decoded = vec![vec![false; n]; n];
        for &(i, j) in &edges {
            decoded[i][j] = true;
        }
        let mut failures = 0;
        for i in 0..n {
            for j in 0..n {
                if i == j || decoded[i][j] {
                    continue;
                }
                failures += 1;
                if cfg.topology.weight(i, j) > 0.0 {
                    let first = (0..len)
                        .find(|&l| {
                            !decodable(
                                &positions[l][j],
                                &guaranteed_region(&self_ranges[i][l], comm_radii[i][l]),
                            )
                        })
                        .unwrap_or(0);
                    self.trace.decode_failures.push(DecodeFailure {
                        window: m,
                        step: k0 + first,
                        transmitter: i,
                        receiver: j,
                    });
                }
            }
        }
        self.trace.summary.total_decode_failures += failures;

        for &(i, j) in &edges {
            self.known[j][i] = Known {
                step: k0,
                state: window_start_states[i].clone(),
                aggregate: aggregates[i].clone(),
            };
        }
        let control_connected = connected_components_of(n, |i, j| {
            cfg.topology.weight(i, j) > 0.0 && decoded[i][j] && decoded[j][i]
        }) == 1;
        self.trace.summary.control_connected_throughout &= control_connected;
        self.own_snapshot = window_start_states;

        self.trace.windows.push(WindowRecord {
            window: m,
            start_step: k0,
            len,
            powers: self.powers.clone(),
            required_radii,
            self_ranges,
            comm_radii,
            edges,
            control_connected,
        });
        Ok(())
    }

    fn finish(mut self) -> Trace {
        let cfg = self.cfg;
        let (final_pos, final_vel) = formation_error(&self.states, &cfg.offsets);
        let start = cfg.steady_start();
        let steady = self
            .trace
            .steps
            .iter()
            .filter(|s| s.step >= start)
            .map(|s| (s.pos_error, s.vel_error))
            .chain(core::iter::once((final_pos, final_vel)));
        let (mut max_p, mut max_v, mut sum_p, mut count) = (0.0f64, 0.0f64, 0.0, 0usize);
        for (p, v) in steady {
            max_p = max_p.max(p);
            max_v = max_v.max(v);
            sum_p += p;
            count += 1;
        }
        let mut mean_power = vec![0.0; self.n];
        for s in &self.trace.steps {
            for (acc, p) in mean_power.iter_mut().zip(&s.powers) {
                *acc += p;
            }
        }
        let steps = self.trace.steps.len().max(1) as f64;
        mean_power.iter_mut().for_each(|p| *p /= steps);

        let summary = &mut self.trace.summary;
        summary.rate_bps = self.rate_bps;
        summary.steady_max_pos_error = max_p;
        summary.steady_mean_pos_error = sum_p / count as f64;
        summary.steady_max_vel_error = max_v;
        summary.mean_power_w = mean_power;
        summary.control_decode_failures = self.trace.decode_failures.len();
        summary.containment_violations = self.trace.containment_violations.len();
        summary.planner_faults = self.trace.planner_faults.len();
        summary.within_bound = max_p <= cfg.delta_p;
        self.trace.final_states = self.states;
        self.trace
    }
}

/// Simulate the closed loop over the configured horizon with `cfg.seed`.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Trace> {
    cfg.validate()?;
    let mut engine = Engine::new(cfg)?;
    let windows = cfg.horizon_steps.div_ceil(cfg.tau);
    for m in 0..windows {
        engine.run_window(m)?;
    }
    Ok(engine.finish())
}
