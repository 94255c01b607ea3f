//! TOML run configuration.
//!
//! Every physical quantity carries its SI unit in the key name. Agent ids in
//! files are 1-based; they become 0-based when converted to core types.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use linkform_core::channel::ChannelParams;
use linkform_core::control::{AgentState, ControlTopology, Gain};
use linkform_core::rate::RatePlanQuery;
use linkform_core::sim::{AgentNoise, JammingEvent, PowerMode, ScenarioConfig};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub channel: Option<ChannelSection>,
    pub link: Option<LinkSection>,
    pub radius: Option<RadiusSection>,
    pub rates: Option<RatesSection>,
    pub gains: Option<GainsSection>,
    pub formation: Option<FormationSection>,
    pub power: Option<PowerSection>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub jamming: Vec<JammingSection>,
    pub montecarlo: Option<MonteCarloSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    pub bandwidth_hz: f64,
    pub ref_distance_m: f64,
    pub ref_gain: f64,
    pub path_loss_exponent: f64,
    pub channel_noise_psd_w_per_hz: f64,
    pub jamming_noise_psd_w_per_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSection {
    pub packet_bits: u32,
    pub step_s: f64,
    #[serde(default)]
    pub tx_power_w: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadiusSection {
    pub bandwidths_hz: Vec<f64>,
    pub rates_bps: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatesSection {
    pub delta_p_m: f64,
    pub max_offset_m: f64,
    pub self_pos_noise_m: f64,
    pub self_vel_noise_m_per_s: f64,
    pub peer_pos_noise_m: f64,
    pub peer_vel_noise_m_per_s: f64,
    pub tau_cap: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainsSection {
    pub tau: usize,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub beta_min: f64,
    pub beta_max: f64,
    pub resolution: usize,
    /// Nonzero Laplacian eigenvalues; taken from `[formation]` edges when absent.
    #[serde(default)]
    pub eigenvalues: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormationSection {
    pub offsets_m: Vec<Vec<f64>>,
    /// Undirected control edges as 1-based agent pairs.
    pub edges: Vec<[usize; 2]>,
    #[serde(default)]
    pub edge_weights: Option<Vec<f64>>,
    #[serde(default)]
    pub gain_alpha: Option<f64>,
    #[serde(default)]
    pub gain_beta: Option<f64>,
    #[serde(default)]
    pub tau: Option<usize>,
    #[serde(default)]
    pub horizon_s: Option<f64>,
    #[serde(default)]
    pub pos_noise_m: Option<Vec<f64>>,
    #[serde(default)]
    pub vel_noise_m_per_s: Option<Vec<f64>>,
    #[serde(default)]
    pub initial_positions_m: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub initial_velocities_m_per_s: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub delta_p_m: Option<f64>,
    #[serde(default)]
    pub delta_v_m_per_s: Option<f64>,
    #[serde(default)]
    pub steady_fraction: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PowerModeName {
    Adaptive,
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerSection {
    pub mode: PowerModeName,
    #[serde(default)]
    pub epsilon_w: Option<f64>,
    #[serde(default)]
    pub fixed_power_w: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JammingSection {
    pub time_s: f64,
    pub multiplier: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloSection {
    pub runs: usize,
    pub tau_sweep: Vec<usize>,
    #[serde(default)]
    pub seed_start: u64,
    /// 1-based agent whose transmit power is averaged.
    pub report_agent: usize,
}

fn missing(section: &str) -> CliError {
    CliError::Config(format!("missing [{section}] section"))
}

fn missing_key(section: &str, key: &str) -> CliError {
    CliError::Config(format!("[{section}] needs `{key}`"))
}

fn core_err(context: &str, e: linkform_core::Error) -> CliError {
    CliError::Config(format!("{context}: {e}"))
}

fn per_agent(name: &str, values: &Option<Vec<f64>>, n: usize) -> Result<Vec<f64>, CliError> {
    match values.as_deref() {
        None => Err(missing_key("formation", name)),
        Some([v]) => Ok(vec![*v; n]),
        Some(vs) if vs.len() == n => Ok(vs.to_vec()),
        Some(vs) => Err(CliError::Config(format!(
            "[formation] `{name}` has {} entries, expected 1 or {n}",
            vs.len()
        ))),
    }
}

fn vectors(name: &str, rows: &[Vec<f64>], n: usize, dim: usize) -> Result<Vec<DVector<f64>>, CliError> {
    if rows.len() != n {
        return Err(CliError::Config(format!("[formation] `{name}` has {} rows, expected {n}", rows.len())));
    }
    rows.iter()
        .map(|r| {
            if r.len() == dim {
                Ok(DVector::from_column_slice(r))
            } else {
                Err(CliError::Config(format!("[formation] `{name}` rows must have {dim} coordinates")))
            }
        })
        .collect()
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn channel(&self) -> Result<ChannelParams, CliError> {
        let c = self.channel.as_ref().ok_or_else(|| missing("channel"))?;
        ChannelParams::new(
            c.bandwidth_hz,
            c.ref_distance_m,
            c.ref_gain,
            c.path_loss_exponent,
            c.channel_noise_psd_w_per_hz,
            c.jamming_noise_psd_w_per_hz,
        )
        .map_err(|e| core_err("[channel]", e))
    }

    pub fn link(&self) -> Result<&LinkSection, CliError> {
        self.link.as_ref().ok_or_else(|| missing("link"))
    }

    pub fn tx_power(&self) -> Result<f64, CliError> {
        self.link()?.tx_power_w.ok_or_else(|| missing_key("link", "tx_power_w"))
    }

    pub fn rate_query(&self) -> Result<RatePlanQuery, CliError> {
        let r = self.rates.as_ref().ok_or_else(|| missing("rates"))?;
        let link = self.link()?;
        let q = RatePlanQuery {
            packet_bits: link.packet_bits,
            step_s: link.step_s,
            delta_p: r.delta_p_m,
            max_offset: r.max_offset_m,
            self_pos_noise: r.self_pos_noise_m,
            self_vel_noise: r.self_vel_noise_m_per_s,
            peer_pos_noise: r.peer_pos_noise_m,
            peer_vel_noise: r.peer_vel_noise_m_per_s,
            tx_power_w: self.tx_power()?,
            channel: self.channel()?,
            tau_cap: r.tau_cap,
        };
        q.validate().map_err(|e| core_err("[rates]", e))?;
        Ok(q)
    }

    pub fn topology(&self) -> Result<ControlTopology, CliError> {
        let f = self.formation.as_ref().ok_or_else(|| missing("formation"))?;
        let n = f.offsets_m.len();
        let weights = match &f.edge_weights {
            Some(w) if w.len() != f.edges.len() => {
                return Err(CliError::Config("[formation] `edge_weights` must match `edges`".into()))
            }
            Some(w) => w.clone(),
            None => vec![1.0; f.edges.len()],
        };
        let mut triples = Vec::with_capacity(f.edges.len());
        for (&[a, b], w) in f.edges.iter().zip(weights) {
            if a == 0 || b == 0 || a > n || b > n {
                return Err(CliError::Config(format!("[formation] edge ({a}, {b}) names an unknown agent")));
            }
            triples.push((a - 1, b - 1, w));
        }
        ControlTopology::from_edges(n, &triples).map_err(|e| core_err("[formation] edges", e))
    }

    pub fn scenario(&self) -> Result<ScenarioConfig, CliError> {
        let f = self.formation.as_ref().ok_or_else(|| missing("formation"))?;
        let link = self.link()?;
        let topology = self.topology()?;
        let n = topology.n_agents();
        let dim = f.offsets_m.first().map_or(0, Vec::len);
        let offsets = vectors("offsets_m", &f.offsets_m, n, dim)?;
        let positions = f
            .initial_positions_m
            .as_ref()
            .ok_or_else(|| missing_key("formation", "initial_positions_m"))?;
        let velocities = f
            .initial_velocities_m_per_s
            .as_ref()
            .ok_or_else(|| missing_key("formation", "initial_velocities_m_per_s"))?;
        let initial = vectors("initial_positions_m", positions, n, dim)?
            .into_iter()
            .zip(vectors("initial_velocities_m_per_s", velocities, n, dim)?)
            .map(|(p, v)| AgentState { position: p, velocity: v })
            .collect();
        let pos_noise = per_agent("pos_noise_m", &f.pos_noise_m, n)?;
        let vel_noise = per_agent("vel_noise_m_per_s", &f.vel_noise_m_per_s, n)?;
        let gain = Gain::new(
            f.gain_alpha.ok_or_else(|| missing_key("formation", "gain_alpha"))?,
            f.gain_beta.ok_or_else(|| missing_key("formation", "gain_beta"))?,
        )
        .map_err(|e| core_err("[formation] gain", e))?;
        let horizon_s = f.horizon_s.ok_or_else(|| missing_key("formation", "horizon_s"))?;
        if !(horizon_s > 0.0 && horizon_s.is_finite()) {
            return Err(CliError::Config("[formation] `horizon_s` must be positive".into()));
        }
        let p = self.power.as_ref().ok_or_else(|| missing("power"))?;
        let power = match p.mode {
            PowerModeName::Adaptive => PowerMode::Adaptive {
                epsilon_w: p.epsilon_w.ok_or_else(|| missing_key("power", "epsilon_w"))?,
            },
            PowerModeName::Fixed => PowerMode::Fixed {
                power_w: p.fixed_power_w.ok_or_else(|| missing_key("power", "fixed_power_w"))?,
            },
        };
        let cfg = ScenarioConfig {
            dim,
            step_s: link.step_s,
            horizon_steps: (horizon_s / link.step_s).round() as usize,
            tau: f.tau.ok_or_else(|| missing_key("formation", "tau"))?,
            packet_bits: link.packet_bits,
            offsets,
            topology,
            gain,
            noise: pos_noise
                .into_iter()
                .zip(vel_noise)
                .map(|(pos, vel)| AgentNoise { pos, vel })
                .collect(),
            initial,
            channel: self.channel()?,
            power,
            jamming: self
                .jamming
                .iter()
                .map(|j| JammingEvent { time_s: j.time_s, multiplier: j.multiplier })
                .collect(),
            seed: f.seed.unwrap_or(0),
            delta_p: f.delta_p_m.ok_or_else(|| missing_key("formation", "delta_p_m"))?,
            delta_v: f.delta_v_m_per_s.ok_or_else(|| missing_key("formation", "delta_v_m_per_s"))?,
            steady_fraction: f.steady_fraction.unwrap_or(0.2),
        };
        cfg.validate().map_err(|e| core_err("scenario", e))?;
        Ok(cfg)
    }
}

/// Configurations shipped with the binary, selectable with `--preset`.
pub const PRESETS: &[(&str, &str)] = &[
    ("radius_grid", include_str!("../configs/radius_grid.toml")),
    ("triangle_rates", include_str!("../configs/triangle_rates.toml")),
    ("gains_6cycle", include_str!("../configs/gains_6cycle.toml")),
    ("formation_adaptive", include_str!("../configs/formation_adaptive.toml")),
    ("formation_fixed_jamming", include_str!("../configs/formation_fixed_jamming.toml")),
    ("montecarlo", include_str!("../configs/montecarlo.toml")),
];

pub fn preset(name: &str) -> Result<FileConfig, CliError> {
    let text = PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| {
            let names: Vec<_> = PRESETS.iter().map(|(n, _)| *n).collect();
            CliError::Config(format!("unknown preset `{name}` (available: {})", names.join(", ")))
        })?;
    FileConfig::parse(text)
}
