use alloc::vec::Vec;

use nalgebra::DVector;

use crate::channel::{ChannelParams, RateConfig};
use crate::control::{gain_feasible, stability_eigs, AgentState, ControlTopology, Gain};
use crate::error::{check_nonneg, check_positive, Error, Result};

/// Process-noise bounds for one agent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentNoise {
    pub pos: f64,
    pub vel: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PowerMode {
    /// Recompute power every window from predicted position ranges.
    Adaptive { epsilon_w: f64 },
    /// Every agent transmits at the same constant power.
    Fixed { power_w: f64 },
}

/// From `time_s` on, the jamming PSD is `multiplier` times its configured value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JammingEvent {
    pub time_s: f64,
    pub multiplier: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub dim: usize,
    pub step_s: f64,
    pub horizon_steps: usize,
    pub tau: usize,
    pub packet_bits: u32,
    pub offsets: Vec<DVector<f64>>,
    pub topology: ControlTopology,
    pub gain: Gain,
    pub noise: Vec<AgentNoise>,
    pub initial: Vec<AgentState>,
    pub channel: ChannelParams,
    pub power: PowerMode,
    pub jamming: Vec<JammingEvent>,
    pub seed: u64,
    pub delta_p: f64,
    pub delta_v: f64,
    /// Trailing fraction of the horizon treated as steady state.
    pub steady_fraction: f64,
}

impl ScenarioConfig {
    pub fn n_agents(&self) -> usize {
        self.topology.n_agents()
    }

    pub fn rate(&self) -> Result<RateConfig> {
        RateConfig::new(self.packet_bits, self.step_s, self.tau)
    }

    pub fn with_tau(&self, tau: usize) -> ScenarioConfig {
        ScenarioConfig { tau, ..self.clone() }
    }

    pub fn with_seed(&self, seed: u64) -> ScenarioConfig {
        ScenarioConfig { seed, ..self.clone() }
    }

    /// Jamming multiplier in force at step `k`.
    pub fn jamming_multiplier(&self, k: usize) -> f64 {
        let mut m = 1.0;
        for ev in &self.jamming {
            if k as f64 * self.step_s >= ev.time_s - 1e-9 * self.step_s {
                m = ev.multiplier;
            }
        }
        m
    }

    /// Receiver noise power `W` at step `k`.
    pub fn noise_power(&self, k: usize) -> f64 {
        let c = &self.channel;
        (c.channel_noise_psd() + c.jamming_noise_psd() * self.jamming_multiplier(k)) * c.bandwidth_hz()
    }

    /// Steps counted as steady state for error reporting.
    pub fn steady_start(&self) -> usize {
        let len = libm::ceil(self.steady_fraction * self.horizon_steps as f64) as usize;
        self.horizon_steps - len.min(self.horizon_steps)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_agents();
        if n < 2 {
            return Err(Error::InvalidCount { name: "n_agents", value: n });
        }
        if self.dim == 0 {
            return Err(Error::InvalidCount { name: "dim", value: 0 });
        }
        if self.horizon_steps == 0 {
            return Err(Error::InvalidCount { name: "horizon_steps", value: 0 });
        }
        self.rate()?;
        for (name, len) in [
            ("offsets", self.offsets.len()),
            ("noise", self.noise.len()),
            ("initial", self.initial.len()),
        ] {
            if len != n {
                return Err(Error::InvalidCount { name, value: len });
            }
        }
        for o in &self.offsets {
            if o.len() != self.dim {
                return Err(Error::DimensionMismatch { expected: self.dim, found: o.len() });
            }
        }
        for x in &self.initial {
            if x.dim() != self.dim {
                return Err(Error::DimensionMismatch { expected: self.dim, found: x.dim() });
            }
        }
        for w in &self.noise {
            check_nonneg("pos_noise", w.pos)?;
            check_nonneg("vel_noise", w.vel)?;
        }
        match self.power {
            PowerMode::Adaptive { epsilon_w } => {
                check_nonneg("epsilon_w", epsilon_w)?;
            }
            PowerMode::Fixed { power_w } => {
                check_positive("power_w", power_w)?;
            }
        }
        for ev in &self.jamming {
            check_nonneg("jamming.time_s", ev.time_s)?;
            check_nonneg("jamming.multiplier", ev.multiplier)?;
        }
        check_positive("delta_p", self.delta_p)?;
        check_positive("delta_v", self.delta_v)?;
        if !(self.steady_fraction > 0.0 && self.steady_fraction <= 1.0) {
            return Err(Error::InvalidParameter { name: "steady_fraction", value: self.steady_fraction });
        }
        let eigs = stability_eigs(&self.topology)?;
        if !gain_feasible(&self.gain, &eigs, self.step_s, self.tau)? {
            return Err(Error::GainInfeasible { alpha: self.gain.alpha(), beta: self.gain.beta() });
        }
        Ok(())
    }
}
