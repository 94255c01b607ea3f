use std::path::{Path, PathBuf};

use rayon::prelude::*;

use linkform_core::channel::comm_radius_at_rate;
use linkform_core::control::{gain_region_grid, stability_eigs};
use linkform_core::rate::rate_scan;
use linkform_core::sim::{aggregate, run_scenario, PowerMode, RangeKind, RunSummary, ScenarioConfig, Trace};

use crate::config::FileConfig;
use crate::error::CliError;
use crate::output::{num, write_run, Table};

/// Tables produced by one command, plus an error to report after they are written.
pub struct CommandOutput {
    pub tables: Vec<Table>,
    pub seeds: Vec<u64>,
    pub deferred: Option<CliError>,
}

impl CommandOutput {
    fn ok(tables: Vec<Table>) -> Self {
        CommandOutput { tables, seeds: Vec::new(), deferred: None }
    }
}

/// Write the output and manifest, then surface any deferred error.
pub fn finish(out_dir: &Path, command: &str, cfg: &FileConfig, out: CommandOutput) -> Result<Vec<PathBuf>, CliError> {
    let paths = write_run(out_dir, command, cfg, &out.seeds, &out.tables)?;
    match out.deferred {
        Some(e) => Err(e),
        None => Ok(paths),
    }
}

fn agent_id(i: usize) -> String {
    (i + 1).to_string()
}

fn axes(dim: usize) -> Vec<String> {
    match dim {
        1..=3 => ["x", "y", "z"][..dim].iter().map(|s| s.to_string()).collect(),
        _ => (1..=dim).map(|d| d.to_string()).collect(),
    }
}

fn prefixed(prefix: &str, axes: &[String]) -> Vec<String> {
    axes.iter().map(|a| format!("{prefix}_{a}")).collect()
}

pub fn radius(cfg: &FileConfig) -> Result<CommandOutput, CliError> {
    let channel = cfg.channel()?;
    let link = cfg.link()?;
    let power = cfg.tx_power()?;
    let (bandwidths, rates) = match &cfg.radius {
        Some(r) => (r.bandwidths_hz.clone(), r.rates_bps.clone()),
        None => (vec![channel.bandwidth_hz()], vec![link.packet_bits as f64 / link.step_s]),
    };
    let mut t = Table::new("radius.csv", &["bandwidth_hz", "rate_bps", "radius_m"]);
    for &bw in &bandwidths {
        let ch = channel.with_bandwidth(bw).map_err(|e| CliError::Config(format!("[radius] {e}")))?;
        for &rate in &rates {
            let r = comm_radius_at_rate(power, rate, &ch, ch.noise_power())
                .map_err(|e| CliError::Config(format!("[radius] {e}")))?;
            t.push(vec![num(bw), num(rate), num(r)]);
        }
    }
    Ok(CommandOutput::ok(vec![t]))
}

pub fn rates(cfg: &FileConfig) -> Result<CommandOutput, CliError> {
    let q = cfg.rate_query()?;
    let scan = rate_scan(&q)?;
    let mut feasible = Table::new("rates.csv", &["tau", "rate_bps", "psi1", "psi2"]);
    let mut all = Table::new("rates_scan.csv", &["tau", "rate_bps", "psi1", "psi2", "feasible"]);
    for c in &scan {
        let row = vec![c.tau.to_string(), num(c.rate_bps), num(c.psi1), num(c.psi2)];
        if c.is_feasible() {
            feasible.push(row.clone());
        }
        let mut row = row;
        row.push(c.is_feasible().to_string());
        all.push(row);
    }
    let deferred = feasible
        .is_empty()
        .then(|| CliError::EmptyFeasibleSet(format!("no tau in 1..={} meets both margins", q.tau_cap)));
    Ok(CommandOutput { tables: vec![feasible, all], seeds: Vec::new(), deferred })
}

pub fn gains(cfg: &FileConfig) -> Result<CommandOutput, CliError> {
    let g = cfg.gains.as_ref().ok_or_else(|| CliError::Config("missing [gains] section".into()))?;
    let step = cfg.link()?.step_s;
    let eigs = match &g.eigenvalues {
        Some(e) => e.clone(),
        None => stability_eigs(&cfg.topology()?).map_err(|e| CliError::Config(format!("[formation] {e}")))?,
    };
    let grid = gain_region_grid(
        &eigs,
        step,
        g.tau,
        (g.alpha_min, g.alpha_max),
        (g.beta_min, g.beta_max),
        g.resolution,
    )
    .map_err(|e| CliError::Config(format!("[gains] {e}")))?;
    let mut t = Table::new("gains.csv", &["alpha", "beta", "feasible"]);
    for (ia, &a) in grid.alphas.iter().enumerate() {
        for (ib, &b) in grid.betas.iter().enumerate() {
            t.push(vec![num(a), num(b), grid.is_feasible(ia, ib).to_string()]);
        }
    }
    Ok(CommandOutput::ok(vec![t]))
}

fn summary_table(name: &str, summaries: &[RunSummary]) -> Table {
    let mut t = Table::new(
        name,
        &[
            "seed",
            "tau",
            "rate_bps",
            "steady_max_pos_error_m",
            "steady_mean_pos_error_m",
            "steady_max_vel_error_m_per_s",
            "control_decode_failures",
            "total_decode_failures",
            "containment_violations",
            "planner_faults",
            "control_connected_throughout",
            "within_bound",
        ],
    );
    for s in summaries {
        t.push(vec![
            s.seed.to_string(),
            s.tau.to_string(),
            num(s.rate_bps),
            num(s.steady_max_pos_error),
            num(s.steady_mean_pos_error),
            num(s.steady_max_vel_error),
            s.control_decode_failures.to_string(),
            s.total_decode_failures.to_string(),
            s.containment_violations.to_string(),
            s.planner_faults.to_string(),
            s.control_connected_throughout.to_string(),
            s.within_bound.to_string(),
        ]);
    }
    t
}

/// All CSV tables for one simulated trace.
pub fn trace_tables(sc: &ScenarioConfig, trace: &Trace) -> Vec<Table> {
    let ax = axes(sc.dim);
    let h = sc.step_s;

    let mut header: Vec<String> = ["step", "time_s", "agent"].iter().map(|s| s.to_string()).collect();
    header.extend(prefixed("p", &ax));
    header.extend(prefixed("v", &ax));
    header.extend(prefixed("u", &ax));
    header.push("power_w".into());
    header.push("comm_radius_m".into());
    let mut states = Table::with_header("states.csv", header);
    let mut errors = Table::new("errors.csv", &["step", "time_s", "pos_error_m", "vel_error_m_per_s"]);
    for s in &trace.steps {
        for (i, x) in s.states.iter().enumerate() {
            let mut row = vec![s.step.to_string(), num(s.step as f64 * h), agent_id(i)];
            row.extend(x.position.iter().map(|&v| num(v)));
            row.extend(x.velocity.iter().map(|&v| num(v)));
            row.extend(s.inputs[i].iter().map(|&v| num(v)));
            row.push(num(s.powers[i]));
            row.push(num(s.comm_radii[i]));
            states.push(row);
        }
        errors.push(vec![s.step.to_string(), num(s.step as f64 * h), num(s.pos_error), num(s.vel_error)]);
    }
    let (fp, fv) = linkform_core::sim::formation_error(&trace.final_states, &sc.offsets);
    errors.push(vec![
        sc.horizon_steps.to_string(),
        num(sc.horizon_steps as f64 * h),
        num(fp),
        num(fv),
    ]);

    let mut powers = Table::new(
        "powers.csv",
        &["window", "start_step", "time_s", "agent", "power_w", "required_radius_m", "comm_radius_m"],
    );
    let mut edges = Table::new("edges.csv", &["window", "transmitter", "receiver", "control_edge"]);
    let mut header: Vec<String> = ["window", "step", "agent"].iter().map(|s| s.to_string()).collect();
    header.extend(prefixed("center", &ax));
    header.push("radius_m".into());
    header.push("comm_radius_m".into());
    let mut ranges = Table::with_header("ranges.csv", header);
    for w in &trace.windows {
        for i in 0..w.powers.len() {
            powers.push(vec![
                w.window.to_string(),
                w.start_step.to_string(),
                num(w.start_step as f64 * h),
                agent_id(i),
                num(w.powers[i]),
                w.required_radii[i].map(num).unwrap_or_default(),
                num(w.comm_radii[i][0]),
            ]);
            for (l, b) in w.self_ranges[i].iter().enumerate() {
                let mut row = vec![w.window.to_string(), (w.start_step + l).to_string(), agent_id(i)];
                row.extend(b.center().iter().map(|&v| num(v)));
                row.push(num(b.radius()));
                row.push(num(w.comm_radii[i][l]));
                ranges.push(row);
            }
        }
        for &(i, j) in &w.edges {
            edges.push(vec![
                w.window.to_string(),
                agent_id(i),
                agent_id(j),
                (sc.topology.weight(i, j) > 0.0).to_string(),
            ]);
        }
    }

    let mut failures = Table::new("failures.csv", &["window", "step", "time_s", "transmitter", "receiver"]);
    for f in &trace.decode_failures {
        failures.push(vec![
            f.window.to_string(),
            f.step.to_string(),
            num(f.step as f64 * h),
            agent_id(f.transmitter),
            agent_id(f.receiver),
        ]);
    }
    let mut containment = Table::new("containment.csv", &["window", "step", "observer", "target", "kind", "excess_m"]);
    for v in &trace.containment_violations {
        containment.push(vec![
            v.window.to_string(),
            v.step.to_string(),
            agent_id(v.observer),
            agent_id(v.target),
            match v.kind {
                RangeKind::Own => "own",
                RangeKind::Neighbor => "neighbor",
            }
            .into(),
            num(v.excess_m),
        ]);
    }
    let mut mean_power = Table::new("mean_power.csv", &["agent", "mean_power_w"]);
    for (i, p) in trace.summary.mean_power_w.iter().enumerate() {
        mean_power.push(vec![agent_id(i), num(*p)]);
    }
    vec![
        states,
        errors,
        powers,
        edges,
        ranges,
        failures,
        containment,
        mean_power,
        summary_table("summary.csv", std::slice::from_ref(&trace.summary)),
    ]
}

fn adaptive_invariant_error(sc: &ScenarioConfig, s: &RunSummary) -> Option<CliError> {
    let adaptive = matches!(sc.power, PowerMode::Adaptive { .. });
    let broken = s.control_decode_failures + s.containment_violations + s.planner_faults > 0;
    (adaptive && broken).then(|| {
        CliError::Invariant(format!(
            "adaptive run (seed {}) had {} control-edge decode failures, {} containment violations, {} planner faults",
            s.seed, s.control_decode_failures, s.containment_violations, s.planner_faults
        ))
    })
}

pub fn simulate(cfg: &FileConfig, seed: Option<u64>) -> Result<CommandOutput, CliError> {
    let mut sc = cfg.scenario()?;
    if let Some(s) = seed {
        sc.seed = s;
    }
    let trace = run_scenario(&sc)?;
    let deferred = adaptive_invariant_error(&sc, &trace.summary);
    Ok(CommandOutput { tables: trace_tables(&sc, &trace), seeds: vec![sc.seed], deferred })
}

pub struct SweepOptions {
    pub runs: Option<usize>,
    pub seeds: Option<Vec<u64>>,
    pub tau_sweep: Option<Vec<usize>>,
}

pub fn montecarlo(cfg: &FileConfig, opts: &SweepOptions) -> Result<CommandOutput, CliError> {
    let base = cfg.scenario()?;
    let mc = cfg
        .montecarlo
        .as_ref()
        .ok_or_else(|| CliError::Config("missing [montecarlo] section".into()))?;
    let seeds: Vec<u64> = match &opts.seeds {
        Some(s) => s.clone(),
        None => {
            let runs = opts.runs.unwrap_or(mc.runs);
            (0..runs as u64).map(|k| mc.seed_start + k).collect()
        }
    };
    if seeds.is_empty() {
        return Err(CliError::Config("at least one run is required".into()));
    }
    let taus = opts.tau_sweep.clone().unwrap_or_else(|| mc.tau_sweep.clone());
    if mc.report_agent == 0 || mc.report_agent > base.n_agents() {
        return Err(CliError::Config(format!("[montecarlo] report_agent {} is not an agent", mc.report_agent)));
    }
    let agent = mc.report_agent - 1;

    let mut table = Table::new(
        "montecarlo.csv",
        &[
            "tau",
            "rate_bps",
            "runs",
            "mean_steady_error_m",
            "mean_steady_max_error_m",
            "mean_power_w",
            "control_decode_failures",
        ],
    );
    let mut all_runs = Vec::new();
    for &tau in &taus {
        let cfg_tau = base.with_tau(tau);
        cfg_tau
            .validate()
            .map_err(|e| CliError::Config(format!("tau = {tau}: {e}")))?;
        let summaries = seeds
            .par_iter()
            .map(|&s| run_scenario(&cfg_tau.with_seed(s)).map(|t| t.summary))
            .collect::<Result<Vec<_>, _>>()?;
        let row = aggregate(tau, cfg_tau.rate()?.rate_bps(), &summaries, agent)?;
        table.push(vec![
            row.tau.to_string(),
            num(row.rate_bps),
            row.runs.to_string(),
            num(row.mean_steady_error),
            num(row.mean_steady_max_error),
            num(row.mean_power_w),
            row.control_decode_failures.to_string(),
        ]);
        all_runs.extend(summaries);
    }
    Ok(CommandOutput {
        tables: vec![table, summary_table("montecarlo_runs.csv", &all_runs)],
        seeds,
        deferred: None,
    })
}
