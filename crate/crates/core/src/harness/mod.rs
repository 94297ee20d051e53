//! Instance generation, batch experiments and Gantt rendering.

mod experiment;
mod gantt;
mod generator;
mod verify;

pub use experiment::{
    render_table, run_experiment, AlgorithmSummary, ExperimentReport, InstanceResult, Suite, SuiteEntry,
};
pub use gantt::{layout_offsets, render_gantt};
pub use generator::{generate_instance, DemandDistribution, GeneratorConfig};
pub use verify::{verify_schedule, PackChecks, VerifyReport};

use std::sync::Arc;

use crate::error::Result;
use crate::model::{Instance, Schedule};
use crate::schedulers::{hybrid_schedule_with, wspt_schedule, wsvf_schedule, Algorithm};
use crate::single_machine::pack_and_schedule;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Runs one algorithm. `pack` ignores `machines` and needs a
/// single-machine instance.
pub fn run_algorithm(
    inst: &Arc<Instance>,
    algorithm: Algorithm,
    machines: usize,
    epsilon: f64,
    rebalance: bool,
) -> Result<Schedule> {
    match algorithm {
        Algorithm::Wsvf => wsvf_schedule(inst, machines),
        Algorithm::Wspt => wspt_schedule(inst, machines),
        Algorithm::Hybrid => hybrid_schedule_with(inst, machines, rebalance),
        Algorithm::Pack => pack_and_schedule(inst, epsilon),
    }
}
