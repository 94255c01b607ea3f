//! Closed-loop simulation of the integrated control and communication loop.

mod config;
mod dynamics;
mod engine;
mod metrics;
mod montecarlo;

pub use config::{AgentNoise, JammingEvent, PowerMode, ScenarioConfig};
pub use dynamics::{sample_noise, step_dynamics, NoiseDraw};
pub use engine::{
    run_scenario, update_edges, ContainmentViolation, DecodeFailure, PlannerFault, RangeKind, StepRecord,
    Trace, WindowRecord,
};
pub use metrics::{formation_error, RunSummary};
pub use montecarlo::{aggregate, monte_carlo, McRow};
