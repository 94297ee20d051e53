//! Exact minimum-cost schedules for small instances.
//!
//! The main search enumerates active schedules: a job sequence per machine,
//! each job placed at its earliest capacity-feasible start given the jobs
//! before it on that machine. Regular objectives such as weighted completion
//! time always have an optimal active schedule. A brute-force search over
//! integer start vectors certifies that restriction on tiny instances.

use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{CapacityProfile, Instance, Schedule, CAPACITY_TOLERANCE};

pub const SEARCH_SPACE_NOTE: &str =
    "active schedules: per-machine job sequences with earliest feasible placement";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleLimits {
    pub max_jobs: usize,
    pub max_time: Duration,
    /// The grid check refuses non-integer durations when set.
    pub require_integer_p: bool,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_jobs: 7,
            max_time: Duration::from_secs(60),
            require_integer_p: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OracleOutcome {
    pub schedule: Schedule,
    pub cost: f64,
    /// False when the time limit cut the search short.
    pub optimal: bool,
    pub nodes: u64,
}

struct Search<'a> {
    inst: &'a Instance,
    machines: usize,
    weighted_p: Vec<f64>,
    deadline: Instant,
    nodes: u64,
    timed_out: bool,
    best_cost: f64,
    best: Vec<(usize, f64)>,
    current: Vec<(usize, f64)>,
    placed: Vec<bool>,
}

impl Search<'_> {
    fn lowest_unplaced(&self) -> Option<usize> {
        self.placed.iter().position(|&p| !p)
    }

    /// `anchor` is the lowest unplaced job when `machine` was opened; it must
    /// land on `machine` before the next machine opens, which fixes one
    /// labelling of identical machines.
    fn dfs(&mut self, machine: usize, profile: &CapacityProfile, anchor: usize, cost: f64, rest: f64) {
        self.nodes += 1;
        if self.nodes.is_multiple_of(1024) && Instant::now() >= self.deadline {
            self.timed_out = true;
        }
        if self.timed_out {
            return;
        }
        let Some(first_free) = self.lowest_unplaced() else {
            if cost < self.best_cost {
                self.best_cost = cost;
                self.best = self.current.clone();
            }
            return;
        };
        if cost + rest >= self.best_cost {
            return;
        }

        for j in first_free..self.inst.len() {
            if self.placed[j] {
                continue;
            }
            let job = self.inst.job(j);
            let start = profile.earliest_feasible_start(job.p, job.d);
            let mut next = profile.clone();
            next.insert(start, job.p, job.d);
            self.placed[j] = true;
            self.current.push((j, start));
            self.dfs(machine, &next, anchor, cost + job.w * (start + job.p), rest - self.weighted_p[j]);
            self.current.pop();
            self.placed[j] = false;
        }

        if self.placed[anchor] && machine + 1 < self.machines {
            let fresh = CapacityProfile::empty(machine + 1, profile.horizon());
            self.current.push((usize::MAX, 0.0));
            self.dfs(machine + 1, &fresh, first_free, cost, rest);
            self.current.pop();
        }
    }
}

/// Minimum-cost schedule of `inst` on `machines` machines.
///
/// Prunes with the partial cost plus `sum w_j p_j` over unplaced jobs, which
/// stays valid however later jobs interleave with earlier ones.
pub fn optimal_schedule(inst: &Arc<Instance>, machines: usize, limits: &OracleLimits) -> Result<OracleOutcome> {
    if inst.len() > limits.max_jobs {
        return Err(Error::TooLarge {
            reason: format!("{} jobs exceed the limit of {}", inst.len(), limits.max_jobs),
        });
    }
    if machines == 0 {
        return Err(Error::domain(None, "machines", "at least one machine is required"));
    }
    let weighted_p: Vec<f64> = inst.jobs().iter().map(|j| j.w * j.p).collect();
    let rest = weighted_p.iter().sum();
    let mut search = Search {
        inst,
        machines,
        weighted_p,
        deadline: Instant::now() + limits.max_time,
        nodes: 0,
        timed_out: false,
        best_cost: f64::INFINITY,
        best: Vec::new(),
        current: Vec::with_capacity(inst.len() + machines),
        placed: vec![false; inst.len()],
    };
    search.dfs(0, &CapacityProfile::empty(0, inst.horizon()), 0, 0.0, rest);

    if search.best.is_empty() {
        // Timed out before any leaf: fall back to running jobs back to back.
        let mut t = 0.0;
        search.best = (0..inst.len())
            .map(|j| {
                let s = t;
                t += inst.job(j).p;
                (j, s)
            })
            .collect();
    }

    let mut schedule = Schedule::new(Arc::clone(inst), machines, "oracle");
    let mut machine = 0;
    for &(j, start) in &search.best {
        if j == usize::MAX {
            machine += 1;
        } else {
            schedule.assign(j, machine, start)?;
        }
    }
    let cost = crate::model::evaluate_cost(&schedule)?;
    let optimal = !search.timed_out;
    schedule.meta.optimal = Some(optimal);
    Ok(OracleOutcome { schedule, cost, optimal, nodes: search.nodes })
}

/// Exhaustive minimum over integer start times in `[0, sum p]` and all
/// machine assignments, with capacity checked directly on the placements.
/// Limited to five jobs on at most two machines.
pub fn optimal_grid_check(inst: &Instance, machines: usize, limits: &OracleLimits) -> Result<f64> {
    if inst.len() > 5 || machines > 2 || inst.len() > limits.max_jobs {
        return Err(Error::TooLarge {
            reason: format!("grid check handles at most 5 jobs on 2 machines, got {} on {machines}", inst.len()),
        });
    }
    if machines == 0 {
        return Err(Error::domain(None, "machines", "at least one machine is required"));
    }
    if limits.require_integer_p && inst.jobs().iter().any(|j| j.p.fract() != 0.0) {
        return Err(Error::domain(None, "p", "grid check requires integer durations"));
    }

    let horizon = inst.horizon().floor() as u64;
    let jobs: Vec<(f64, f64, f64)> = inst.jobs().iter().map(|j| (j.p, j.d, j.w)).collect();
    let tail: Vec<f64> = (0..=jobs.len())
        .map(|k| jobs[k..].iter().map(|&(p, _, w)| w * p).sum())
        .collect();

    // Back-to-back on one machine is a grid point, so it seeds the search.
    let mut best = {
        let mut t = 0.0;
        jobs.iter()
            .map(|&(p, _, w)| {
                t += p;
                w * t
            })
            .sum::<f64>()
    };
    let mut placed: Vec<(usize, f64)> = Vec::with_capacity(jobs.len());
    grid_dfs(&jobs, machines, horizon, &tail, &mut placed, 0.0, &mut best);
    Ok(best)
}

fn grid_dfs(
    jobs: &[(f64, f64, f64)],
    machines: usize,
    horizon: u64,
    tail: &[f64],
    placed: &mut Vec<(usize, f64)>,
    cost: f64,
    best: &mut f64,
) {
    let k = placed.len();
    if k == jobs.len() {
        if cost < *best {
            *best = cost;
        }
        return;
    }
    let (p, d, w) = jobs[k];
    let used = placed.iter().map(|&(m, _)| m + 1).max().unwrap_or(0);
    for machine in 0..machines.min(used + 1) {
        for s in 0..=horizon {
            let start = s as f64;
            let c = cost + w * (start + p) + tail[k + 1];
            if c >= *best {
                break;
            }
            if !grid_fits(jobs, placed, machine, start, p, d) {
                continue;
            }
            placed.push((machine, start));
            grid_dfs(jobs, machines, horizon, tail, placed, cost + w * (start + p), best);
            placed.pop();
        }
    }
}

/// Peak demand over `[start, start + p)` can only occur at `start` or where
/// another job starts inside that window.
fn grid_fits(jobs: &[(f64, f64, f64)], placed: &[(usize, f64)], machine: usize, start: f64, p: f64, d: f64) -> bool {
    let end = start + p;
    let on_machine = || placed.iter().enumerate().filter(|(_, &(m, _))| m == machine);
    let probes = std::iter::once(start).chain(on_machine().map(|(_, &(_, s))| s).filter(|&s| s > start && s < end));
    for t in probes {
        let load: f64 = on_machine()
            .filter(|(i, &(_, s))| s <= t && t < s + jobs[*i].0)
            .map(|(i, _)| jobs[i].1)
            .sum();
        if load + d > 1.0 + CAPACITY_TOLERANCE {
            return false;
        }
    }
    true
}
