//! Single-machine scheduling by repeated knapsack selection and strip
//! packing into geometrically growing time intervals.

mod knapsack;
mod strip;

pub use knapsack::{knapsack_augmented, KnapsackItem, KnapsackSelection};
pub use strip::{shelf_pack, strip_pack, Rect, RectPlacement, Shelf, StripPlacement};

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Instance, Schedule, CAPACITY_TOLERANCE};

pub const DEFAULT_EPSILON: f64 = 0.1;

/// How the last level is chosen; recorded in every trace.
pub const LEVEL_MAX_RULE: &str = "ceil(log2(max(sum v, max p / (1 + eps), 1)))";

/// Extra levels tolerated past the computed last one before giving up.
const LEVEL_SLACK: u32 = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PackIteration {
    pub level: u32,
    /// Volume budget `2^level`.
    pub budget: f64,
    /// Knapsack selection over all eligible jobs, as job indices.
    pub selected: Vec<usize>,
    /// Total weight of `selected`.
    pub selected_weight: f64,
    /// `selected` minus jobs placed at earlier levels.
    pub newly_packed: Vec<usize>,
    /// `[3(1+eps)(2^level - 1), 3(1+eps)(2^(level+1) - 1))`.
    pub interval: [f64; 2],
    pub strip_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PackTrace {
    pub eps: f64,
    pub level_max: u32,
    pub level_max_rule: &'static str,
    pub total_weight: f64,
    pub iterations: Vec<PackIteration>,
}

impl PackTrace {
    /// `3(1+eps) * sum_l (2^(l+1) - 1)(W - W_(l-1))` with `W_(-1) = 0`.
    pub fn algorithm_cost_bound(&self) -> f64 {
        let w = self.total_weight;
        let mut prev = 0.0;
        let mut sum = 0.0;
        for it in &self.iterations {
            sum += (2f64.powi(it.level as i32 + 1) - 1.0) * (w - prev);
            prev = it.selected_weight;
        }
        3.0 * (1.0 + self.eps) * sum
    }

    /// `W + sum_l 2^l (W - W_l)`, the claimed lower bound on the optimum.
    pub fn optimum_lower_bound(&self) -> f64 {
        let w = self.total_weight;
        w + self
            .iterations
            .iter()
            .map(|it| 2f64.powi(it.level as i32) * (w - it.selected_weight))
            .sum::<f64>()
    }

    /// `W + sum_(l>=1) 2^(l-1) (W - W_l)`: at least `W - W_l` of weight is
    /// still unfinished throughout `[2^(l-1), 2^l)` in any schedule.
    pub fn optimum_lower_bound_halved(&self) -> f64 {
        let w = self.total_weight;
        w + self
            .iterations
            .iter()
            .filter(|it| it.level >= 1)
            .map(|it| 2f64.powi(it.level as i32 - 1) * (w - it.selected_weight))
            .sum::<f64>()
    }
}

pub fn interval_start(level: u32, eps: f64) -> f64 {
    3.0 * (1.0 + eps) * (2f64.powi(level as i32) - 1.0)
}

fn level_max(inst: &Instance, eps: f64) -> u32 {
    let longest = inst.jobs().iter().map(|j| j.p).fold(0.0, f64::max);
    let reach = inst.total_volume().max(longest / (1.0 + eps)).max(1.0);
    reach.log2().ceil() as u32
}

/// Schedules a single-machine instance level by level. At level `l` the
/// jobs no longer than `(1+eps) 2^l` compete in an augmented knapsack with
/// volume budget `2^l`; selected jobs not yet placed are shelf-packed and
/// shifted to the level's interval.
pub fn pack_and_schedule(inst: &Arc<Instance>, eps: f64) -> Result<Schedule> {
    if inst.machines() != 1 {
        return Err(Error::NotSingleMachine(inst.machines()));
    }
    if eps <= 0.0 || !eps.is_finite() {
        return Err(Error::Config(format!("epsilon must be positive, got {eps}")));
    }

    let mut schedule = Schedule::new(Arc::clone(inst), 1, "pack");
    let mut placed = vec![false; inst.len()];
    let mut remaining = inst.len();
    let last = level_max(inst, eps);
    let mut iterations = Vec::new();

    let mut level = 0u32;
    let mut level_end = 0.0f64;
    while level <= last || remaining > 0 {
        if level > last + LEVEL_SLACK {
            return Err(Error::Config("pack-and-schedule failed to place every job".into()));
        }
        let budget = 2f64.powi(level as i32);
        let eligible: Vec<usize> = (0..inst.len())
            .filter(|&j| inst.job(j).p <= (1.0 + eps) * budget + CAPACITY_TOLERANCE)
            .collect();
        let items: Vec<KnapsackItem> = eligible
            .iter()
            .map(|&j| KnapsackItem { volume: inst.job(j).volume(), weight: inst.job(j).w })
            .collect();
        let choice = knapsack_augmented(&items, budget, eps)?;
        let selected: Vec<usize> = choice.selected.iter().map(|&k| eligible[k]).collect();
        let newly: Vec<usize> = selected.iter().copied().filter(|&j| !placed[j]).collect();

        let rects: Vec<Rect> = newly
            .iter()
            .map(|&j| Rect { width: inst.job(j).p, height: inst.job(j).d })
            .collect();
        let strip = strip_pack(&rects, eps, budget)?;
        let offset = interval_start(level, eps);
        // Shelf starts are accumulated rather than added to the interval
        // start, so rounding can never let a shelf begin before the jobs of
        // the previous one end.
        let mut shelf_start = Vec::with_capacity(strip.shelves.len());
        let mut t = offset.max(level_end);
        for shelf in &strip.shelves {
            shelf_start.push(t);
            t += shelf.width;
        }
        level_end = t;
        for (&j, pos) in newly.iter().zip(&strip.placements) {
            schedule.assign(j, 0, shelf_start[pos.shelf])?;
            placed[j] = true;
        }
        remaining -= newly.len();

        iterations.push(PackIteration {
            level,
            budget,
            selected,
            selected_weight: choice.total_weight,
            newly_packed: newly,
            interval: [offset, interval_start(level + 1, eps)],
            strip_width: strip.width,
        });
        level += 1;
    }

    schedule.meta.pack = Some(PackTrace {
        eps,
        level_max: last,
        level_max_rule: LEVEL_MAX_RULE,
        total_weight: inst.total_weight(),
        iterations,
    });
    Ok(schedule)
}
