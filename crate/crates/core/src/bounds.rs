//! Lower bounds on the optimal cost, approximation factors, and runtime
//! checks of the WSVF start-time invariants.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{evaluate_cost, CapacityProfile, Instance, Job, Schedule};
use crate::schedulers::{machine_split, wsvf_order, HIGH_DEMAND_THRESHOLD};

/// Slack allowed on every certified inequality.
pub const BOUND_TOLERANCE: f64 = 1e-9;

/// Slack allowed when comparing a ratio with its factor.
pub const RATIO_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompressedJob {
    /// Index of the job in the source instance.
    pub source: usize,
    pub id: String,
    /// Compressed duration, the source job's volume.
    pub p_hat: f64,
    pub w: f64,
}

/// Source jobs in WSVF order with duration `p * d` and full demand.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompressedInstance {
    pub jobs: Vec<CompressedJob>,
}

impl CompressedInstance {
    /// The compressed jobs as an ordinary instance with unit demands, in
    /// compressed order.
    pub fn to_instance(&self, machines: usize) -> Result<Instance> {
        let jobs = self
            .jobs
            .iter()
            .map(|c| Job::new(c.id.clone(), c.p_hat, 1.0, c.w))
            .collect();
        Instance::with_positive_durations(jobs, machines)
    }

    pub fn total_duration(&self) -> f64 {
        self.jobs.iter().map(|c| c.p_hat).sum()
    }
}

pub fn compress(inst: &Instance) -> CompressedInstance {
    let jobs = wsvf_order(inst)
        .jobs
        .into_iter()
        .map(|j| {
            let job = inst.job(j);
            CompressedJob { source: j, id: job.id.clone(), p_hat: job.volume(), w: job.w }
        })
        .collect();
    CompressedInstance { jobs }
}

/// Single-machine cost of the compressed jobs in their given order; optimal
/// by Smith's rule since that order is also by `p_hat / w`.
pub fn smith_cost(compressed: &CompressedInstance) -> f64 {
    let mut elapsed = 0.0;
    compressed
        .jobs
        .iter()
        .map(|c| {
            elapsed += c.p_hat;
            c.w * elapsed
        })
        .sum()
}

/// `sum w_j p_j`: every job at time zero on its own machine.
pub fn cn_lower_bound(inst: &Instance) -> f64 {
    inst.jobs().iter().map(|j| j.w * j.p).sum()
}

/// Single-machine compressed optimum divided by the machine count.
pub fn eastman_lower_bound(inst: &Instance, machines: usize) -> f64 {
    smith_cost(&compress(inst)) / machines as f64
}

/// The sharper form `C1/M + (1/2) CN(compressed) (1 - 1/M)`; reported, not
/// used for certificates.
pub fn eastman_sharp_bound(inst: &Instance, machines: usize) -> f64 {
    let compressed = compress(inst);
    let m = machines as f64;
    let cn_hat: f64 = compressed.jobs.iter().map(|c| c.w * c.p_hat).sum();
    smith_cost(&compressed) / m + 0.5 * cn_hat * (1.0 - 1.0 / m)
}

/// `1 + 1/(1 - alpha)`, defined for `alpha < 1`.
pub fn theorem1_factor(alpha: f64) -> Option<f64> {
    (alpha > 0.0 && alpha < 1.0).then(|| 1.0 + 1.0 / (1.0 - alpha))
}

/// `B(M) = max(1 + 2M/M1, 1 + M/M2)` for the hybrid algorithm's split.
pub fn hybrid_factor(machines: usize) -> Option<f64> {
    let (m_low, m_high) = machine_split(machines).ok()?;
    let m = machines as f64;
    Some(f64::max(1.0 + 2.0 * m / m_low as f64, 1.0 + m / m_high as f64))
}

/// Guarantee of the single-machine pack-and-schedule algorithm.
pub fn pack_factor(eps: f64) -> f64 {
    12.0 * (1.0 + eps)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TheoremBounds {
    pub theorem1_factor: f64,
    pub hybrid_factor: Option<f64>,
}

pub fn theorem_bounds(alpha: f64, machines: usize) -> Result<TheoremBounds> {
    let theorem1_factor = theorem1_factor(alpha)
        .ok_or_else(|| Error::domain(None, "alpha", format!("{alpha} is outside (0, 1)")))?;
    Ok(TheoremBounds { theorem1_factor, hybrid_factor: hybrid_factor(machines) })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub machines: usize,
    pub alpha: f64,
    pub cn: f64,
    pub c1_hat: f64,
    pub eastman_lb: f64,
    pub eastman_sharp: f64,
    pub combined_lb: f64,
    pub theorem1_factor: Option<f64>,
    pub hybrid_factor: Option<f64>,
}

pub fn bound_report(inst: &Instance, machines: usize) -> BoundReport {
    let compressed = compress(inst);
    let c1_hat = smith_cost(&compressed);
    let cn = cn_lower_bound(inst);
    let eastman_lb = c1_hat / machines as f64;
    BoundReport {
        machines,
        alpha: inst.alpha(),
        cn,
        c1_hat,
        eastman_lb,
        eastman_sharp: eastman_sharp_bound(inst, machines),
        combined_lb: cn.max(eastman_lb),
        theorem1_factor: theorem1_factor(inst.alpha()),
        hybrid_factor: hybrid_factor(machines),
    }
}

/// Largest certified lower bound on the optimal cost.
pub fn combined_lower_bound(inst: &Instance, machines: usize) -> f64 {
    cn_lower_bound(inst).max(eastman_lower_bound(inst, machines))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StartBound {
    pub job: String,
    pub start: f64,
    pub bound: f64,
    /// `bound - start`; negative beyond tolerance is a violation.
    pub slack: f64,
}

/// A time before a job's start at which higher-priority jobs left more than
/// `alpha` of a machine free.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UtilizationViolation {
    pub job: String,
    pub machine: usize,
    pub time: f64,
    pub demand: f64,
}

/// A point where `min(D(t), 1 - alpha)` increased.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityViolation {
    pub prefix: usize,
    pub machine: usize,
    pub time: f64,
    pub before: f64,
    pub after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WsvfInvariantReport {
    pub alpha: f64,
    pub machines: usize,
    pub start_bounds: Vec<StartBound>,
    pub start_bound_violations: usize,
    pub utilization_violations: Vec<UtilizationViolation>,
    pub monotonicity_violations: Vec<MonotonicityViolation>,
}

impl WsvfInvariantReport {
    pub fn violation_count(&self) -> usize {
        self.start_bound_violations + self.utilization_violations.len() + self.monotonicity_violations.len()
    }

    pub fn is_clean(&self) -> bool {
        self.violation_count() == 0
    }
}

/// Replays a WSVF schedule in priority order and checks, for each job `j`:
///
/// * the start-time bound `s_j <= sum_{h<j} v_h / ((1 - alpha) M)`;
/// * every machine is more than `1 - alpha` busy with higher-priority jobs
///   at every event time before `s_j`;
/// * `min(D_j(t), 1 - alpha)` is non-increasing in `t` on every machine.
pub fn verify_wsvf_invariants(schedule: &Schedule) -> Result<WsvfInvariantReport> {
    let order = schedule.meta.priority.as_ref().ok_or(Error::NotWsvfSchedule)?;
    let inst = schedule.instance();
    let machines = schedule.machines();
    let alpha = inst.alpha();
    let floor = 1.0 - alpha;
    let denom = floor * machines as f64;

    let mut report = WsvfInvariantReport {
        alpha,
        machines,
        start_bounds: Vec::with_capacity(order.len()),
        start_bound_violations: 0,
        utilization_violations: Vec::new(),
        monotonicity_violations: Vec::new(),
    };
    let mut profiles: Vec<CapacityProfile> =
        (0..machines).map(|m| CapacityProfile::empty(m, inst.horizon())).collect();
    let mut prefix_volume = 0.0;

    for (k, &j) in order.iter().enumerate() {
        let job = inst.job(j);
        let a = schedule
            .assignment(j)
            .ok_or_else(|| Error::MissingAssignment(job.id.clone()))?;

        let bound = if denom > 0.0 { prefix_volume / denom } else { f64::INFINITY };
        let slack = bound - a.start;
        if slack < -BOUND_TOLERANCE {
            report.start_bound_violations += 1;
        }
        report.start_bounds.push(StartBound { job: job.id.clone(), start: a.start, bound, slack });

        for prof in &profiles {
            let events = std::iter::once(0.0).chain(prof.breakpoints().iter().copied());
            for t in events.filter(|&t| t < a.start) {
                let demand = prof.usage_at(t);
                if demand <= floor - BOUND_TOLERANCE {
                    report.utilization_violations.push(UtilizationViolation {
                        job: job.id.clone(),
                        machine: prof.machine(),
                        time: t,
                        demand,
                    });
                }
            }
        }

        let prof = &mut profiles[a.machine];
        prof.insert(a.start, job.p, job.d);
        let segs = prof.segments();
        for pair in segs.windows(2) {
            let before = pair[0].usage.min(floor);
            let after = pair[1].usage.min(floor);
            if after > before + BOUND_TOLERANCE {
                report.monotonicity_violations.push(MonotonicityViolation {
                    prefix: k + 1,
                    machine: a.machine,
                    time: pair[1].start,
                    before,
                    after,
                });
            }
        }
        prefix_volume += job.volume();
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LowerBoundKind {
    Oracle,
    CombinedLb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Ratio within the factor.
    Certified,
    /// Ratio above the factor against a denominator that proves a breach.
    Violated,
    /// Ratio above the factor, but only against a loose lower bound.
    Inconclusive,
    /// No guarantee applies to this algorithm and instance.
    NoBound,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport {
    pub algorithm: String,
    pub cost: f64,
    pub lower_bound: f64,
    pub lower_bound_kind: LowerBoundKind,
    pub ratio: f64,
    pub factor: Option<f64>,
    pub factor_source: &'static str,
    pub pass: bool,
    pub verdict: Verdict,
}

/// The guarantee that applies to `schedule`, with a short label.
pub fn applicable_factor(schedule: &Schedule) -> (Option<f64>, &'static str) {
    let inst = schedule.instance();
    match schedule.algorithm() {
        "wsvf" => (theorem1_factor(inst.alpha()), "1 + 1/(1 - alpha)"),
        "hybrid" => (hybrid_factor(schedule.machines()), "B(M)"),
        "pack" => (schedule.meta.pack.as_ref().map(|t| pack_factor(t.eps)), "12(1 + eps)"),
        "wspt" if inst.jobs().iter().all(|j| j.d > HIGH_DEMAND_THRESHOLD) => (Some(2.0), "list bound, d > 1/2"),
        "oracle" => (Some(1.0), "exact"),
        _ => (None, "none"),
    }
}

/// Ratio of the schedule's cost to the oracle cost when given, otherwise to
/// the combined lower bound, checked against the applicable guarantee.
pub fn ratio_certificate(schedule: &Schedule, oracle_cost: Option<f64>) -> Result<RatioReport> {
    let cost = evaluate_cost(schedule)?;
    let inst = schedule.instance();
    let (lower_bound, kind) = match oracle_cost {
        Some(c) => (c, LowerBoundKind::Oracle),
        None => (combined_lower_bound(inst, schedule.machines()), LowerBoundKind::CombinedLb),
    };
    let ratio = cost / lower_bound;
    let (factor, factor_source) = applicable_factor(schedule);
    let pass = factor.is_none_or(|f| ratio <= f + RATIO_TOLERANCE);
    // WSVF's guarantee is proved against the combined bound itself, so a
    // breach there is conclusive too.
    let conclusive = kind == LowerBoundKind::Oracle || schedule.algorithm() == "wsvf";
    let verdict = match (factor, pass) {
        (None, _) => Verdict::NoBound,
        (Some(_), true) => Verdict::Certified,
        (Some(_), false) if conclusive => Verdict::Violated,
        (Some(_), false) => Verdict::Inconclusive,
    };
    Ok(RatioReport {
        algorithm: schedule.algorithm().to_owned(),
        cost,
        lower_bound,
        lower_bound_kind: kind,
        ratio,
        factor,
        factor_source,
        pass,
        verdict,
    })
}
