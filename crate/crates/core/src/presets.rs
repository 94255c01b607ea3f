//! Reference parameter sets: the six-UAV triangle formation and its channel.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DVector;

use crate::channel::ChannelParams;
use crate::control::{AgentState, ControlTopology, Gain};
use crate::rate::RatePlanQuery;
use crate::sim::{AgentNoise, JammingEvent, PowerMode, ScenarioConfig};

pub const PACKET_BITS: u32 = 512;
pub const STEP_S: f64 = 0.05;
pub const GRID_BANDWIDTHS_HZ: [f64; 4] = [1e3, 1e4, 1e5, 1e6];
pub const GRID_RATES_BPS: [f64; 2] = [5120.0, 10240.0];
pub const FIXED_POWER_W: f64 = 1.3452;

/// Free-space channel at 1 MHz with reference gain `1/(16 pi)^2`.
pub fn reference_channel() -> ChannelParams {
    ChannelParams::new(1e6, 1.0, 1.0 / (256.0 * PI * PI), 2.0, 1e-11, 2.5e-10).expect("valid constants")
}

pub fn triangle_rate_query() -> RatePlanQuery {
    RatePlanQuery {
        packet_bits: PACKET_BITS,
        step_s: STEP_S,
        delta_p: 3.0,
        max_offset: 16.0,
        self_pos_noise: 0.5,
        self_vel_noise: 0.5,
        peer_pos_noise: 0.5,
        peer_vel_noise: 0.5,
        tx_power_w: 1.0,
        channel: reference_channel(),
        tau_cap: 100,
    }
}

pub fn six_cycle() -> ControlTopology {
    ControlTopology::cycle(6).expect("valid ring")
}

/// Right isosceles triangle, hypotenuse 40 m: agents 1, 3, 5 on the vertices
/// and 2, 4, 6 on the edge midpoints.
pub fn triangle_offsets() -> Vec<DVector<f64>> {
    [(-20.0, 0.0), (0.0, 0.0), (20.0, 0.0), (10.0, 10.0), (0.0, 20.0), (-10.0, 10.0)]
        .iter()
        .map(|&(x, y)| DVector::from_column_slice(&[x, y]))
        .collect()
}

/// Offsets scaled about the centroid plus a fixed perturbation per agent.
fn perturbed_start(scale: f64) -> Vec<AgentState> {
    let offsets = triangle_offsets();
    let centroid = offsets.iter().fold(DVector::zeros(2), |acc, o| acc + o) / offsets.len() as f64;
    let bumps = [
        (1.5, -1.0, 0.3, 0.1),
        (-1.0, 1.2, -0.2, 0.2),
        (0.8, 1.5, 0.1, -0.3),
        (-1.4, -0.6, 0.25, 0.0),
        (1.1, -1.3, -0.1, -0.2),
        (-0.7, 0.9, 0.0, 0.3),
    ];
    offsets
        .iter()
        .zip(bumps)
        .map(|(o, (px, py, vx, vy))| {
            let p = &centroid + (o - &centroid) * scale + DVector::from_column_slice(&[px, py]);
            AgentState::new(p, DVector::from_column_slice(&[vx, vy])).expect("2-D")
        })
        .collect()
}

/// Adaptive-power closed loop, 100 s at `tau = 2`.
pub fn formation_adaptive() -> ScenarioConfig {
    ScenarioConfig {
        dim: 2,
        step_s: STEP_S,
        horizon_steps: 2000,
        tau: 2,
        packet_bits: PACKET_BITS,
        offsets: triangle_offsets(),
        topology: six_cycle(),
        gain: Gain::new(1.54, 1.61).expect("positive"),
        noise: vec![AgentNoise { pos: 0.15, vel: 0.15 }; 6],
        initial: perturbed_start(1.0),
        channel: reference_channel(),
        power: PowerMode::Adaptive { epsilon_w: 1e-4 },
        jamming: vec![JammingEvent { time_s: 40.0, multiplier: 2.0 }],
        seed: 1,
        delta_p: 3.0,
        delta_v: 1.0,
        steady_fraction: 0.2,
    }
}

/// Same loop at constant power, starting from a tighter formation.
pub fn formation_fixed_jamming() -> ScenarioConfig {
    ScenarioConfig {
        initial: perturbed_start(0.8),
        power: PowerMode::Fixed { power_w: FIXED_POWER_W },
        ..formation_adaptive()
    }
}

/// Base for the rate sweep. The gain must be stable for every swept `tau`.
pub fn montecarlo_base() -> ScenarioConfig {
    ScenarioConfig {
        gain: Gain::new(0.5, 0.9).expect("positive"),
        jamming: Vec::new(),
        ..formation_adaptive()
    }
}

pub const MONTECARLO_TAUS: [usize; 3] = [2, 3, 4];
/// Zero-based index of the agent whose power the sweep reports.
pub const MONTECARLO_AGENT: usize = 2;
