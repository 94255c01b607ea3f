use alloc::vec::Vec;

use super::config::ScenarioConfig;
use super::engine::run_scenario;
use super::metrics::RunSummary;
use crate::error::{Error, Result};

/// Averages over all runs at one window length.
#[derive(Debug, Clone, PartialEq)]
pub struct McRow {
    pub tau: usize,
    pub rate_bps: f64,
    pub runs: usize,
    pub mean_steady_error: f64,
    pub mean_steady_max_error: f64,
    pub mean_power_w: f64,
    pub control_decode_failures: usize,
}

/// Reduce per-run summaries in the given order. `agent` picks whose power is averaged.
pub fn aggregate(tau: usize, rate_bps: f64, runs: &[RunSummary], agent: usize) -> Result<McRow> {
    if runs.is_empty() {
        return Err(Error::InvalidCount { name: "runs", value: 0 });
    }
    let n = runs.len() as f64;
    let mut row = McRow {
        tau,
        rate_bps,
        runs: runs.len(),
        mean_steady_error: 0.0,
        mean_steady_max_error: 0.0,
        mean_power_w: 0.0,
        control_decode_failures: 0,
    };
    for r in runs {
        let p = *r
            .mean_power_w
            .get(agent)
            .ok_or(Error::InvalidCount { name: "agent", value: agent })?;
        row.mean_steady_error += r.steady_mean_pos_error;
        row.mean_steady_max_error += r.steady_max_pos_error;
        row.mean_power_w += p;
        row.control_decode_failures += r.control_decode_failures;
    }
    row.mean_steady_error /= n;
    row.mean_steady_max_error /= n;
    row.mean_power_w /= n;
    Ok(row)
}

/// Sequential sweep: one row per `tau`, each averaging a run per seed.
pub fn monte_carlo(base: &ScenarioConfig, seeds: &[u64], taus: &[usize], agent: usize) -> Result<Vec<McRow>> {
    if seeds.is_empty() {
        return Err(Error::InvalidCount { name: "runs", value: 0 });
    }
    taus.iter()
        .map(|&tau| {
            let cfg = base.with_tau(tau);
            let runs = seeds
                .iter()
                .map(|&s| run_scenario(&cfg.with_seed(s)).map(|t| t.summary))
                .collect::<Result<Vec<_>>>()?;
            aggregate(tau, cfg.rate()?.rate_bps(), &runs, agent)
        })
        .collect()
}
