use serde::Serialize;

use crate::bounds::{ratio_certificate, verify_wsvf_invariants, RatioReport, Verdict, BOUND_TOLERANCE, RATIO_TOLERANCE};
use crate::error::Result;
use crate::model::{check_feasibility, evaluate_cost, FeasibilityReport, Schedule};

/// Per-run checks of the pack scheduler's cost accounting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PackChecks {
    pub algorithm_bound: f64,
    pub upper_bound_holds: bool,
    pub optimum_lower_bound: f64,
    pub optimum_lower_bound_halved: f64,
    /// Only known when an optimum was supplied.
    pub lower_bound_holds: Option<bool>,
    pub halved_lower_bound_holds: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub algorithm: String,
    pub cost: f64,
    pub stored_cost: Option<f64>,
    pub cost_consistent: bool,
    pub feasibility: FeasibilityReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invariants: Option<crate::bounds::WsvfInvariantReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pack: Option<PackChecks>,
    pub ratio: RatioReport,
}

impl VerifyReport {
    /// Infeasible, inconsistent, or breaking a structural invariant.
    pub fn has_violation(&self) -> bool {
        !self.feasibility.is_feasible()
            || !self.cost_consistent
            || self.invariants.as_ref().is_some_and(|r| !r.is_clean())
            || self.pack.as_ref().is_some_and(|p| !p.upper_bound_holds)
    }

    pub fn ratio_violated(&self) -> bool {
        self.ratio.verdict == Verdict::Violated
    }
}

/// Checks a complete schedule. `stored_cost` is the cost recorded alongside
/// it; `optimum` an exact optimal cost for the same instance and machines.
pub fn verify_schedule(schedule: &Schedule, stored_cost: Option<f64>, optimum: Option<f64>) -> Result<VerifyReport> {
    let cost = evaluate_cost(schedule)?;
    let feasibility = check_feasibility(schedule)?;
    let cost_consistent = stored_cost.is_none_or(|c| (c - cost).abs() <= RATIO_TOLERANCE * cost.abs().max(1.0));
    let invariants = match schedule.meta.priority {
        Some(_) => Some(verify_wsvf_invariants(schedule)?),
        None => None,
    };
    let pack = schedule.meta.pack.as_ref().map(|trace| {
        let algorithm_bound = trace.algorithm_cost_bound();
        let optimum_lower_bound = trace.optimum_lower_bound();
        let optimum_lower_bound_halved = trace.optimum_lower_bound_halved();
        PackChecks {
            algorithm_bound,
            upper_bound_holds: cost <= algorithm_bound + BOUND_TOLERANCE * algorithm_bound.max(1.0),
            optimum_lower_bound,
            optimum_lower_bound_halved,
            lower_bound_holds: optimum.map(|o| o >= optimum_lower_bound - BOUND_TOLERANCE),
            halved_lower_bound_holds: optimum.map(|o| o >= optimum_lower_bound_halved - BOUND_TOLERANCE),
        }
    });
    let ratio = ratio_certificate(schedule, optimum)?;
    Ok(VerifyReport {
        algorithm: schedule.algorithm().to_owned(),
        cost,
        stored_cost,
        cost_consistent,
        feasibility,
        invariants,
        pack,
        ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::worked_example_schedule;

    #[test]
    fn worked_example_is_clean() {
        let mut s = worked_example_schedule();
        s.meta.priority = Some(crate::schedulers::wsvf_order(s.instance()).jobs);
        let r = verify_schedule(&s, Some(135.2), None).unwrap();
        assert!(!r.has_violation() && !r.ratio_violated());
        assert!(r.invariants.is_some());
    }

    #[test]
    fn stored_cost_mismatch_is_a_violation() {
        let s = worked_example_schedule();
        let r = verify_schedule(&s, Some(100.0), None).unwrap();
        assert!(!r.cost_consistent && r.has_violation());
    }
}
