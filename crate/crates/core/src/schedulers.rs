//! List-scheduling algorithms: WSVF, WSPT and their hybrid.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CapacityProfile, HybridInfo, Instance, Schedule};

/// Demand threshold separating the hybrid algorithm's two job classes.
pub const HIGH_DEMAND_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Wsvf,
    Wspt,
    Hybrid,
    Pack,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Wsvf => "wsvf",
            Algorithm::Wspt => "wspt",
            Algorithm::Hybrid => "hybrid",
            Algorithm::Pack => "pack",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wsvf" => Ok(Algorithm::Wsvf),
            "wspt" => Ok(Algorithm::Wspt),
            "hybrid" => Ok(Algorithm::Hybrid),
            "pack" => Ok(Algorithm::Pack),
            other => Err(Error::Config(format!("unknown algorithm {other:?}"))),
        }
    }
}

/// Job indices sorted by a key, ties kept in input order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PriorityOrder {
    pub jobs: Vec<usize>,
    /// `keys[k]` belongs to `jobs[k]`.
    pub keys: Vec<f64>,
}

impl PriorityOrder {
    fn by_key(inst: &Instance, key: impl Fn(usize) -> f64) -> Self {
        let all: Vec<f64> = (0..inst.len()).map(key).collect();
        let mut jobs: Vec<usize> = (0..inst.len()).collect();
        jobs.sort_by(|&a, &b| all[a].total_cmp(&all[b]));
        let keys = jobs.iter().map(|&j| all[j]).collect();
        PriorityOrder { jobs, keys }
    }
}

/// Non-decreasing volume-to-weight order.
pub fn wsvf_order(inst: &Instance) -> PriorityOrder {
    PriorityOrder::by_key(inst, |j| inst.job(j).volume() / inst.job(j).w)
}

/// Non-decreasing duration-to-weight order.
pub fn wspt_order(inst: &Instance) -> PriorityOrder {
    PriorityOrder::by_key(inst, |j| inst.job(j).p / inst.job(j).w)
}

fn require_machines(machines: usize) -> Result<()> {
    if machines == 0 {
        return Err(Error::domain(None, "machines", "at least one machine is required"));
    }
    Ok(())
}

/// Weighted smallest volume first: each job in priority order goes to the
/// machine offering the earliest capacity-feasible start, lowest index on ties.
pub fn wsvf_schedule(inst: &Arc<Instance>, machines: usize) -> Result<Schedule> {
    require_machines(machines)?;
    let order = wsvf_order(inst);
    let horizon = inst.horizon();
    let mut profiles: Vec<CapacityProfile> =
        (0..machines).map(|m| CapacityProfile::empty(m, horizon)).collect();
    let mut schedule = Schedule::new(Arc::clone(inst), machines, Algorithm::Wsvf.as_str());

    for &j in &order.jobs {
        let job = inst.job(j);
        let (machine, start) = profiles
            .iter()
            .map(|prof| prof.earliest_feasible_start(job.p, job.d))
            .enumerate()
            .fold((0, f64::INFINITY), |best, (m, t)| if t < best.1 { (m, t) } else { best });
        profiles[machine].insert(start, job.p, job.d);
        schedule.assign(j, machine, start)?;
    }
    schedule.meta.priority = Some(order.jobs);
    Ok(schedule)
}

/// Weighted shortest processing time, treating every job as occupying the
/// whole machine: each job starts on the machine that frees up first.
pub fn wspt_schedule(inst: &Arc<Instance>, machines: usize) -> Result<Schedule> {
    require_machines(machines)?;
    let order = wspt_order(inst);
    let mut finish = vec![0.0_f64; machines];
    let mut schedule = Schedule::new(Arc::clone(inst), machines, Algorithm::Wspt.as_str());
    for &j in &order.jobs {
        let (machine, start) = finish
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::INFINITY), |best, (m, t)| if t < best.1 { (m, t) } else { best });
        schedule.assign(j, machine, start)?;
        finish[machine] = start + inst.job(j).p;
    }
    Ok(schedule)
}

/// Low/high demand partition with its machine split.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JobSplit {
    /// Jobs with `d <= 1/2`, input order.
    pub low: Vec<usize>,
    /// Jobs with `d > 1/2`, input order.
    pub high: Vec<usize>,
    pub m_low: usize,
    pub m_high: usize,
}

/// `(M1, M2)` with `M1 = ceil(2(M - 2) / 3) + 1` and `M2 = M - M1`.
pub fn machine_split(machines: usize) -> Result<(usize, usize)> {
    if machines < 2 {
        return Err(Error::InsufficientMachines(machines));
    }
    let m_low = (2 * (machines - 2)).div_ceil(3) + 1;
    Ok((m_low, machines - m_low))
}

pub fn split_jobs(inst: &Instance, machines: usize) -> Result<JobSplit> {
    let (m_low, m_high) = machine_split(machines)?;
    let (low, high) = (0..inst.len()).partition(|&j| inst.job(j).d <= HIGH_DEMAND_THRESHOLD);
    Ok(JobSplit { low, high, m_low, m_high })
}

/// Hybrid-WSVF with the fixed machine split.
pub fn hybrid_schedule(inst: &Arc<Instance>, machines: usize) -> Result<Schedule> {
    hybrid_schedule_with(inst, machines, false)
}

/// Hybrid-WSVF: low-demand jobs by WSVF on machines `[0, M1)`, high-demand
/// jobs by WSPT on `[M1, M)`. With `rebalance`, an empty class hands all
/// machines to the other one.
pub fn hybrid_schedule_with(inst: &Arc<Instance>, machines: usize, rebalance: bool) -> Result<Schedule> {
    let split = split_jobs(inst, machines)?;
    let (m_low, m_high, rebalanced) = match (split.low.is_empty(), split.high.is_empty()) {
        (false, true) if rebalance => (machines, 0, true),
        (true, false) if rebalance => (0, machines, true),
        _ => (split.m_low, split.m_high, false),
    };

    let mut schedule = Schedule::new(Arc::clone(inst), machines, Algorithm::Hybrid.as_str());
    if let Some(sub) = inst.subset(&split.low, m_low) {
        let part = wsvf_schedule(&Arc::new(sub), m_low)?;
        for a in part.assignments() {
            schedule.assign(split.low[a.job], a.machine, a.start)?;
        }
    }
    if let Some(sub) = inst.subset(&split.high, m_high) {
        let part = wspt_schedule(&Arc::new(sub), m_high)?;
        for a in part.assignments() {
            schedule.assign(split.high[a.job], m_low + a.machine, a.start)?;
        }
    }
    schedule.meta.hybrid = Some(HybridInfo {
        low: split.low,
        high: split.high,
        m_low,
        m_high,
        rebalanced,
    });
    Ok(schedule)
}
