use alloc::vec::Vec;

use nalgebra::DVector;

use crate::control::AgentState;

/// Largest pairwise position and velocity formation errors,
/// `max |p_i - p_j - (D_i - D_j)|` and `max |v_i - v_j|`.
pub fn formation_error(states: &[AgentState], offsets: &[DVector<f64>]) -> (f64, f64) {
    let mut ep = 0.0f64;
    let mut ev = 0.0f64;
    for i in 0..states.len() {
        for j in i + 1..states.len() {
            let dp = (&states[i].position - &offsets[i]) - (&states[j].position - &offsets[j]);
            ep = ep.max(dp.norm());
            ev = ev.max((&states[i].velocity - &states[j].velocity).norm());
        }
    }
    (ep, ev)
}

/// Scalar outcomes of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub seed: u64,
    pub tau: usize,
    pub rate_bps: f64,
    /// Max over the steady window of the max pairwise position error.
    pub steady_max_pos_error: f64,
    /// Mean over the steady window of the max pairwise position error.
    pub steady_mean_pos_error: f64,
    pub steady_max_vel_error: f64,
    /// Time-averaged transmit power per agent over the whole horizon.
    pub mean_power_w: Vec<f64>,
    /// Control-edge decode failures over the whole run.
    pub control_decode_failures: usize,
    /// Decode failures on any ordered pair.
    pub total_decode_failures: usize,
    pub containment_violations: usize,
    pub planner_faults: usize,
    pub control_connected_throughout: bool,
    pub within_bound: bool,
}
