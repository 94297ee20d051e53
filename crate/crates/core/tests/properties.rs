use std::sync::Arc;
use std::time::Duration;

use proptest::prelude::*;

use capsched::bounds::{combined_lower_bound, compress, smith_cost, verify_wsvf_invariants, BOUND_TOLERANCE};
use capsched::harness::run_algorithm;
use capsched::io::{inline_instance, to_json, ScheduleDoc};
use capsched::model::capacity_profile;
use capsched::oracle::{optimal_schedule, OracleLimits};
use capsched::{check_feasibility, evaluate_cost, Algorithm, Instance, Job, Schedule};

fn job() -> impl Strategy<Value = (f64, f64, f64)> {
    (1.0f64..12.0, 0.01f64..=1.0, 0.1f64..10.0)
}

fn integer_job() -> impl Strategy<Value = (f64, f64, f64)> {
    (1u8..=4, 1u16..=100, 1u16..=100).prop_map(|(p, d, w)| (p as f64, d as f64 / 100.0, w as f64 / 10.0))
}

fn build(raw: &[(f64, f64, f64)], machines: usize) -> Arc<Instance> {
    let jobs = raw.iter().enumerate().map(|(i, &(p, d, w))| Job::new(format!("j{i}"), p, d, w)).collect();
    Arc::new(Instance::new(jobs, machines).unwrap())
}

fn all_schedules(inst: &Arc<Instance>, machines: usize) -> Vec<Schedule> {
    let mut out = vec![
        run_algorithm(inst, Algorithm::Wsvf, machines, 0.1, false).unwrap(),
        run_algorithm(inst, Algorithm::Wspt, machines, 0.1, false).unwrap(),
    ];
    if machines >= 2 {
        out.push(run_algorithm(inst, Algorithm::Hybrid, machines, 0.1, false).unwrap());
        out.push(run_algorithm(inst, Algorithm::Hybrid, machines, 0.1, true).unwrap());
    }
    if machines == 1 {
        out.push(run_algorithm(inst, Algorithm::Pack, 1, 0.1, false).unwrap());
        out.push(run_algorithm(inst, Algorithm::Pack, 1, 0.7, false).unwrap());
    }
    out
}

fn oracle_limits() -> OracleLimits {
    OracleLimits { max_jobs: 6, max_time: Duration::from_secs(60), require_integer_p: true }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn every_schedule_is_complete_and_feasible(raw in prop::collection::vec(job(), 1..25), machines in 1usize..5) {
        let inst = build(&raw, machines);
        for s in all_schedules(&inst, machines) {
            prop_assert!(s.is_complete(), "{}", s.algorithm());
            prop_assert!(check_feasibility(&s).unwrap().is_feasible(), "{}", s.algorithm());
            prop_assert!(s.assignments().all(|a| a.start >= 0.0));
        }
    }

    #[test]
    fn placed_volume_is_conserved(raw in prop::collection::vec(job(), 1..25), machines in 1usize..5) {
        let inst = build(&raw, machines);
        for s in all_schedules(&inst, machines) {
            let placed: f64 = (0..s.machines()).map(|m| capacity_profile(&s, m).integral()).sum();
            prop_assert!((placed - inst.total_volume()).abs() <= 1e-9 * inst.total_volume().max(1.0));
        }
    }

    #[test]
    fn cost_at_least_lower_bounds(raw in prop::collection::vec(job(), 1..25), machines in 1usize..5) {
        let inst = build(&raw, machines);
        let cn: f64 = inst.jobs().iter().map(|j| j.w * j.p).sum();
        let lb = combined_lower_bound(&inst, machines);
        for s in all_schedules(&inst, machines) {
            let cost = evaluate_cost(&s).unwrap();
            prop_assert!(cost >= cn - BOUND_TOLERANCE * cn);
            prop_assert!(cost >= lb - BOUND_TOLERANCE * lb);
        }
    }

    #[test]
    fn wsvf_invariants_hold(raw in prop::collection::vec(job(), 1..40), machines in 1usize..6, cap in 0.05f64..0.99) {
        let scaled: Vec<_> = raw.iter().map(|&(p, d, w)| (p, (d * cap).max(1e-3), w)).collect();
        let inst = build(&scaled, machines);
        let s = run_algorithm(&inst, Algorithm::Wsvf, machines, 0.1, false).unwrap();
        let report = verify_wsvf_invariants(&s).unwrap();
        prop_assert!(report.is_clean(), "{report:?}");
    }

    #[test]
    fn schedule_json_round_trip(raw in prop::collection::vec(job(), 1..15), machines in 1usize..4) {
        let inst = build(&raw, machines);
        for s in all_schedules(&inst, machines) {
            // The first write rounds to 12 digits; after that the text is a fixed point.
            let doc = ScheduleDoc::from_schedule(&s, inline_instance(&inst).unwrap()).unwrap();
            let text = to_json(&doc).unwrap();
            let back: ScheduleDoc = serde_json::from_str(&text).unwrap();
            let again = back.to_schedule(None).unwrap();
            let (a, b) = (evaluate_cost(&s).unwrap(), evaluate_cost(&again).unwrap());
            prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
            let second = to_json(&ScheduleDoc::from_schedule(&again, back.instance.clone()).unwrap()).unwrap();
            let third_doc: ScheduleDoc = serde_json::from_str(&second).unwrap();
            let third = third_doc.to_schedule(None).unwrap();
            prop_assert_eq!(to_json(&ScheduleDoc::from_schedule(&third, third_doc.instance.clone()).unwrap()).unwrap(), second);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn oracle_beats_every_algorithm(raw in prop::collection::vec(integer_job(), 1..=5), machines in 1usize..=3) {
        let inst = build(&raw, machines);
        let out = optimal_schedule(&inst, machines, &oracle_limits()).unwrap();
        prop_assert!(out.optimal);
        prop_assert!(check_feasibility(&out.schedule).unwrap().is_feasible());
        for s in all_schedules(&inst, machines) {
            prop_assert!(out.cost <= evaluate_cost(&s).unwrap() + 1e-9, "{}", s.algorithm());
        }
        let lb = combined_lower_bound(&inst, machines);
        prop_assert!(out.cost >= lb - 1e-9);
    }

    #[test]
    fn compressed_optimum_sits_between_bounds(raw in prop::collection::vec(integer_job(), 1..=5), machines in 1usize..=3) {
        let inst = build(&raw, machines);
        let hat = compress(&inst);
        let hat_inst = Arc::new(hat.to_instance(machines).unwrap());
        let c_hat = optimal_schedule(&hat_inst, machines, &oracle_limits()).unwrap().cost;
        let c = optimal_schedule(&inst, machines, &oracle_limits()).unwrap().cost;
        prop_assert!(c_hat <= c + 1e-9);
        prop_assert!(c_hat >= smith_cost(&hat) / machines as f64 - 1e-9);
    }
}
