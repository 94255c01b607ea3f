//! Per-window transmit power from predicted position ranges.
//!
//! At the start of window `m` an agent knows its own exact state, the exact
//! states its control neighbors broadcast one window earlier, and the
//! aggregate `f_j` each neighbor relayed with that state. From these it
//! predicts a position ball for itself and for each neighbor at every step of
//! the coming window, then picks the smallest power whose guaranteed region
//! covers every neighbor ball.

use alloc::vec::Vec;

use nalgebra::DVector;

use crate::ball::{predict_position_range, Ball, PredictionQuery};
use crate::channel::ChannelParams;
use crate::control::{AgentState, Gain};
use crate::error::{check_nonneg, check_positive, Error, Result};

/// What agent `i` last decoded from one control neighbor.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborSnapshot {
    /// Exact state broadcast at the snapshot step.
    pub state: AgentState,
    /// Relayed aggregate `f_j = sum w (x_hat_j1 - x_hat_j)` driving its inputs from the snapshot step on.
    pub aggregate: AgentState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NeighborReport {
    pub id: usize,
    pub weight: f64,
    pub pos_noise: f64,
    pub vel_noise: f64,
    /// Desired displacement from agent `i` to this neighbor, `Delta_j - Delta_i`.
    pub offset: DVector<f64>,
    /// `None` when the snapshot from the previous window never arrived.
    pub snapshot: Option<NeighborSnapshot>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerPlanInput {
    /// Own exact state at the window start.
    pub self_state: AgentState,
    /// Own exact state at the snapshot step.
    pub self_snapshot: AgentState,
    pub neighbors: Vec<NeighborReport>,
    pub gain: Gain,
    pub tau: usize,
    pub step_s: f64,
    /// Steps from the snapshot to the window start: `tau`, or 0 in the first window.
    pub elapsed: usize,
    pub self_pos_noise: f64,
    pub self_vel_noise: f64,
    pub rate_bps: f64,
    pub channel: ChannelParams,
    /// Receiver noise power used for the link budget (W).
    pub noise_power_w: f64,
    pub epsilon_w: f64,
}

impl PowerPlanInput {
    pub fn validate(&self) -> Result<()> {
        if self.tau < 1 {
            return Err(Error::InvalidCount { name: "tau", value: self.tau });
        }
        check_positive("step_s", self.step_s)?;
        check_nonneg("self_pos_noise", self.self_pos_noise)?;
        check_nonneg("self_vel_noise", self.self_vel_noise)?;
        check_positive("rate_bps", self.rate_bps)?;
        check_positive("noise_power_w", self.noise_power_w)?;
        check_nonneg("epsilon_w", self.epsilon_w)?;
        if self.neighbors.is_empty() {
            return Err(Error::InvalidCount { name: "neighbors", value: 0 });
        }
        let n = self.self_state.dim();
        for nb in &self.neighbors {
            check_nonneg("pos_noise", nb.pos_noise)?;
            check_nonneg("vel_noise", nb.vel_noise)?;
            if nb.offset.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: nb.offset.len() });
            }
            if let Some(s) = &nb.snapshot {
                if s.state.dim() != n || s.aggregate.dim() != n {
                    return Err(Error::DimensionMismatch { expected: n, found: s.state.dim() });
                }
            }
        }
        Ok(())
    }

    fn snapshot(&self, idx: usize) -> Result<&NeighborSnapshot> {
        let nb = self
            .neighbors
            .get(idx)
            .ok_or(Error::InvalidCount { name: "neighbor index", value: idx })?;
        nb.snapshot
            .as_ref()
            .ok_or(Error::MissingNeighborSnapshot { neighbor: nb.id })
    }
}

/// Own input at step `s1` of the window, rebuilt from the exact neighbor snapshots.
pub fn predict_self_inputs(input: &PowerPlanInput, s1: usize) -> Result<DVector<f64>> {
    if s1 + 2 > input.tau {
        return Err(Error::InvalidCount { name: "s1", value: s1 });
    }
    self_input(input, s1)
}

fn self_input(input: &PowerPlanInput, s1: usize) -> Result<DVector<f64>> {
    let mut agg = AgentState::zeros(input.self_state.dim());
    for (idx, nb) in input.neighbors.iter().enumerate() {
        let snap = input.snapshot(idx)?;
        let diff = snap.state.sub(&input.self_snapshot).offset_by(&nb.offset);
        agg.add_scaled(&diff, nb.weight);
    }
    Ok(input.gain.apply_advanced(input.elapsed + s1, input.step_s, &agg))
}

/// Neighbor `idx`'s input `s2` steps after its snapshot: `K A^s2 f_j`.
pub fn predict_neighbor_inputs(input: &PowerPlanInput, idx: usize, s2: usize) -> Result<DVector<f64>> {
    if s2 + 2 > input.elapsed + input.tau {
        return Err(Error::InvalidCount { name: "s2", value: s2 });
    }
    neighbor_input(input, idx, s2)
}

fn neighbor_input(input: &PowerPlanInput, idx: usize, s2: usize) -> Result<DVector<f64>> {
    let snap = input.snapshot(idx)?;
    Ok(input.gain.apply_advanced(s2, input.step_s, &snap.aggregate))
}

/// Own position ball `l` steps into the window.
pub fn self_range(input: &PowerPlanInput, l: usize) -> Result<Ball> {
    let controls = (0..l)
        .map(|s| self_input(input, s))
        .collect::<Result<Vec<_>>>()?;
    predict_position_range(&PredictionQuery::with_exact_controls(
        input.self_state.position.clone(),
        input.self_state.velocity.clone(),
        &controls,
        input.self_pos_noise,
        input.self_vel_noise,
        input.step_s,
    ))
}

/// Neighbor `idx`'s position ball `l` steps into the window, anchored at its snapshot.
pub fn neighbor_range(input: &PowerPlanInput, idx: usize, l: usize) -> Result<Ball> {
    let snap = input.snapshot(idx)?;
    let sigma = input.elapsed + l;
    let controls = (0..sigma)
        .map(|s| neighbor_input(input, idx, s))
        .collect::<Result<Vec<_>>>()?;
    let nb = &input.neighbors[idx];
    predict_position_range(&PredictionQuery::with_exact_controls(
        snap.state.position.clone(),
        snap.state.velocity.clone(),
        &controls,
        nb.pos_noise,
        nb.vel_noise,
        input.step_s,
    ))
}

/// Worst-case transmitter-to-receiver reach over all control neighbors and window steps.
pub fn required_radius(input: &PowerPlanInput) -> Result<f64> {
    input.validate()?;
    let mut worst = 0.0f64;
    for l in 0..input.tau {
        let own = self_range(input, l)?;
        for idx in 0..input.neighbors.len() {
            let other = neighbor_range(input, idx, l)?;
            let reach = (own.center() - other.center()).norm() + own.radius() + other.radius();
            worst = worst.max(reach);
        }
    }
    Ok(worst)
}

/// Smallest power whose communication radius is `radius_m`, plus `epsilon_w`.
pub fn transmit_power(
    radius_m: f64,
    rate_bps: f64,
    channel: &ChannelParams,
    noise_power_w: f64,
    epsilon_w: f64,
) -> Result<f64> {
    check_positive("radius_m", radius_m)?;
    check_positive("rate_bps", rate_bps)?;
    check_positive("noise_power_w", noise_power_w)?;
    check_nonneg("epsilon_w", epsilon_w)?;
    let base = channel.snr_threshold(rate_bps) * noise_power_w / channel.ref_gain();
    Ok(base * libm::pow(radius_m / channel.ref_distance_m(), channel.path_loss_exponent()) + epsilon_w)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerPlan {
    pub required_radius_m: f64,
    pub power_w: f64,
}

pub fn plan_power(input: &PowerPlanInput) -> Result<PowerPlan> {
    let r = required_radius(input)?;
    let p = transmit_power(r, input.rate_bps, &input.channel, input.noise_power_w, input.epsilon_w)?;
    Ok(PowerPlan { required_radius_m: r, power_w: p })
}
