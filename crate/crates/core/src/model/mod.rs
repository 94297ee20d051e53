//! Instances, schedules and the capacity model they share.
//!
//! A machine has unit capacity; every job occupies a fraction `d` of it for
//! `p` consecutive time units. A schedule is feasible when, on every machine
//! and at every instant, the demands of the running jobs sum to at most one.

mod feasibility;
mod profile;

pub use feasibility::{capacity_profile, check_feasibility, CapacityViolation, FeasibilityReport};
pub use profile::{earliest_feasible_start, CapacityProfile, Segment};

use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute slack applied to every capacity comparison.
pub const CAPACITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Job {
    pub id: String,
    /// Duration.
    pub p: f64,
    /// Demand as a fraction of one machine's capacity.
    pub d: f64,
    /// Weight.
    pub w: f64,
}

impl Job {
    pub fn new(id: impl Into<String>, p: f64, d: f64, w: f64) -> Self {
        Job { id: id.into(), p, d, w }
    }

    /// Time-capacity area `p * d`.
    pub fn volume(&self) -> f64 {
        self.p * self.d
    }

    fn validate(&self, min_duration: f64) -> Result<()> {
        let id = Some(self.id.as_str());
        if !self.p.is_finite() || self.p < min_duration {
            return Err(Error::domain(id, "p", format!("duration {} is below {min_duration}", self.p)));
        }
        if !self.d.is_finite() || self.d <= 0.0 || self.d > 1.0 {
            return Err(Error::domain(id, "d", format!("demand {} is outside (0, 1]", self.d)));
        }
        if !self.w.is_finite() || self.w <= 0.0 {
            return Err(Error::domain(id, "w", format!("weight {} is not positive", self.w)));
        }
        Ok(())
    }
}

/// A validated job set together with its machine count.
///
/// Job order is the input order; every index-based API in the crate refers
/// to positions in [`Instance::jobs`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Instance {
    machines: usize,
    jobs: Vec<Job>,
}

impl Instance {
    /// Validates and builds an instance. Durations must be at least one.
    pub fn new(jobs: Vec<Job>, machines: usize) -> Result<Self> {
        Self::build(jobs, machines, 1.0)
    }

    /// Like [`Instance::new`] but only requires positive durations. Used for
    /// derived instances such as compressed ones, whose durations are volumes.
    pub fn with_positive_durations(jobs: Vec<Job>, machines: usize) -> Result<Self> {
        Self::build(jobs, machines, f64::MIN_POSITIVE)
    }

    fn build(jobs: Vec<Job>, machines: usize, min_duration: f64) -> Result<Self> {
        if machines < 1 {
            return Err(Error::domain(None, "machines", "at least one machine is required"));
        }
        if jobs.is_empty() {
            return Err(Error::domain(None, "jobs", "job list is empty"));
        }
        let mut seen = HashSet::with_capacity(jobs.len());
        for job in &jobs {
            job.validate(min_duration)?;
            if !seen.insert(job.id.as_str()) {
                return Err(Error::domain(Some(&job.id), "id", "duplicate job id"));
            }
        }
        Ok(Instance { machines, jobs })
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn job(&self, index: usize) -> &Job {
        &self.jobs[index]
    }

    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    pub fn machines(&self) -> usize {
        self.machines
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.jobs.iter().position(|j| j.id == id)
    }

    /// Maximum demand over all jobs.
    pub fn alpha(&self) -> f64 {
        self.jobs.iter().map(|j| j.d).fold(0.0, f64::max)
    }

    pub fn total_volume(&self) -> f64 {
        self.jobs.iter().map(Job::volume).sum()
    }

    /// Serial-placement upper bound on any schedule's makespan.
    pub fn horizon(&self) -> f64 {
        self.jobs.iter().map(|j| j.p).sum()
    }

    /// Total weight.
    pub fn total_weight(&self) -> f64 {
        self.jobs.iter().map(|j| j.w).sum()
    }

    /// The instance restricted to `indices` (in that order) on `machines`
    /// machines. Returns `None` when `indices` is empty.
    pub fn subset(&self, indices: &[usize], machines: usize) -> Option<Instance> {
        if indices.is_empty() || machines == 0 {
            return None;
        }
        Some(Instance {
            machines,
            jobs: indices.iter().map(|&i| self.jobs[i].clone()).collect(),
        })
    }

    /// Same jobs on a different machine count.
    pub fn with_machines(&self, machines: usize) -> Result<Instance> {
        if machines < 1 {
            return Err(Error::domain(None, "machines", "at least one machine is required"));
        }
        Ok(Instance { machines, jobs: self.jobs.clone() })
    }
}

/// Unvalidated instance data as read from JSON.
#[derive(Debug, Clone, Deserialize)]
pub struct RawInstance {
    pub machines: Option<i64>,
    #[serde(default)]
    pub jobs: Vec<Job>,
}

/// Checks raw input and builds an [`Instance`], preserving job order.
pub fn validate_instance(raw: RawInstance) -> Result<Instance> {
    let machines = raw
        .machines
        .ok_or_else(|| Error::domain(None, "machines", "field is missing"))?;
    if machines < 1 {
        return Err(Error::domain(None, "machines", format!("{machines} is below 1")));
    }
    Instance::new(raw.jobs, machines as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub job: usize,
    pub machine: usize,
    pub start: f64,
}

/// How the machines were divided by the hybrid algorithm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HybridInfo {
    pub low: Vec<usize>,
    pub high: Vec<usize>,
    pub m_low: usize,
    pub m_high: usize,
    pub rebalanced: bool,
}

/// Optional provenance a scheduler attaches to its output.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScheduleMeta {
    /// WSVF priority order (job indices), present on WSVF output.
    pub priority: Option<Vec<usize>>,
    pub hybrid: Option<HybridInfo>,
    pub pack: Option<crate::single_machine::PackTrace>,
    /// Set by the exact search: `Some(false)` when it stopped early.
    pub optimal: Option<bool>,
}

/// One placement per job; completion times are derived, never stored.
#[derive(Debug, Clone)]
pub struct Schedule {
    instance: Arc<Instance>,
    machines: usize,
    algorithm: String,
    slots: Vec<Option<(usize, f64)>>,
    pub meta: ScheduleMeta,
}

impl Schedule {
    pub fn new(instance: Arc<Instance>, machines: usize, algorithm: impl Into<String>) -> Self {
        let slots = vec![None; instance.len()];
        Schedule {
            instance,
            machines,
            algorithm: algorithm.into(),
            slots,
            meta: ScheduleMeta::default(),
        }
    }

    pub fn assign(&mut self, job: usize, machine: usize, start: f64) -> Result<()> {
        if job >= self.slots.len() {
            return Err(Error::UnknownJob(format!("#{job}")));
        }
        if machine >= self.machines {
            return Err(Error::MachineOutOfRange { machine, machines: self.machines });
        }
        if !start.is_finite() || start < 0.0 {
            return Err(Error::domain(Some(&self.instance.job(job).id), "start", format!("{start} is not a valid start time")));
        }
        if self.slots[job].is_some() {
            return Err(Error::DuplicateAssignment { job });
        }
        self.slots[job] = Some((machine, start));
        Ok(())
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn instance_arc(&self) -> &Arc<Instance> {
        &self.instance
    }

    pub fn machines(&self) -> usize {
        self.machines
    }

    pub fn algorithm(&self) -> &str {
        &self.algorithm
    }

    pub fn assignment(&self, job: usize) -> Option<Assignment> {
        self.slots[job].map(|(machine, start)| Assignment { job, machine, start })
    }

    pub fn start(&self, job: usize) -> Option<f64> {
        self.slots[job].map(|(_, s)| s)
    }

    pub fn completion(&self, job: usize) -> Option<f64> {
        self.slots[job].map(|(_, s)| s + self.instance.job(job).p)
    }

    /// Assignments in job order, skipping unassigned jobs.
    pub fn assignments(&self) -> impl Iterator<Item = Assignment> + '_ {
        (0..self.slots.len()).filter_map(|j| self.assignment(j))
    }

    /// Assignments on one machine, in job order.
    pub fn on_machine(&self, machine: usize) -> impl Iterator<Item = Assignment> + '_ {
        self.assignments().filter(move |a| a.machine == machine)
    }

    pub fn is_complete(&self) -> bool {
        self.slots.iter().all(Option::is_some)
    }

    fn first_missing(&self) -> Option<usize> {
        self.slots.iter().position(Option::is_none)
    }

    pub fn makespan(&self) -> f64 {
        (0..self.slots.len()).filter_map(|j| self.completion(j)).fold(0.0, f64::max)
    }
}

/// Weighted sum of completion times, summed in job input order.
pub fn evaluate_cost(schedule: &Schedule) -> Result<f64> {
    if let Some(j) = schedule.first_missing() {
        return Err(Error::MissingAssignment(schedule.instance.job(j).id.clone()));
    }
    let jobs = schedule.instance.jobs();
    Ok(schedule
        .slots
        .iter()
        .zip(jobs)
        .map(|(slot, job)| job.w * (slot.expect("checked above").1 + job.p))
        .sum())
}
