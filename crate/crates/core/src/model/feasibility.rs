use serde::Serialize;

use super::{CapacityProfile, Schedule, CAPACITY_TOLERANCE};
use crate::error::{Error, Result};

/// A piece of a machine's timeline where demand exceeds capacity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityViolation {
    pub machine: usize,
    pub start: f64,
    pub end: f64,
    pub demand: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub violations: Vec<CapacityViolation>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Step function of used capacity on `machine`.
pub fn capacity_profile(schedule: &Schedule, machine: usize) -> CapacityProfile {
    let inst = schedule.instance();
    let jobs: Vec<(f64, f64, f64)> = schedule
        .on_machine(machine)
        .map(|a| {
            let job = inst.job(a.job);
            (a.start, job.p, job.d)
        })
        .collect();
    CapacityProfile::from_jobs(machine, inst.horizon(), &jobs)
}

/// Checks the capacity constraint on every machine. Structural problems
/// (unassigned jobs) are errors rather than violations.
pub fn check_feasibility(schedule: &Schedule) -> Result<FeasibilityReport> {
    if let Some(j) = (0..schedule.instance().len()).find(|&j| schedule.assignment(j).is_none()) {
        return Err(Error::MissingAssignment(schedule.instance().job(j).id.clone()));
    }
    let mut report = FeasibilityReport::default();
    for machine in 0..schedule.machines() {
        for seg in capacity_profile(schedule, machine).segments() {
            if seg.usage > 1.0 + CAPACITY_TOLERANCE {
                report.violations.push(CapacityViolation {
                    machine,
                    start: seg.start,
                    end: seg.end,
                    demand: seg.usage,
                });
            }
        }
    }
    Ok(report)
}
