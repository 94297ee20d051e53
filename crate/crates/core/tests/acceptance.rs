//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use capsched::bounds::{
    compress, hybrid_factor, smith_cost, theorem1_factor, verify_wsvf_invariants, RATIO_TOLERANCE,
};
use capsched::harness::{generate_instance, DemandDistribution, GeneratorConfig};
use capsched::oracle::{optimal_grid_check, optimal_schedule, OracleLimits};
use capsched::schedulers::{hybrid_schedule, wsvf_schedule};
use capsched::single_machine::{knapsack_augmented, pack_and_schedule, shelf_pack, KnapsackItem, Rect};
use capsched::{check_feasibility, evaluate_cost, Instance, Job};

const SLACK: f64 = 1e-9;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn limits() -> OracleLimits {
    OracleLimits { max_jobs: 7, max_time: Duration::from_secs(120), require_integer_p: true }
}

/// Exact optimum, or an error message when the search was cut short.
fn exact(inst: &Arc<Instance>, machines: usize) -> Result<f64, String> {
    let out = optimal_schedule(inst, machines, &limits()).map_err(|e| e.to_string())?;
    if out.optimal {
        Ok(out.cost)
    } else {
        Err("oracle hit its time limit".into())
    }
}

fn small_instance(seed: u64, n_max: usize, machines: usize, alpha: f64, distribution: DemandDistribution) -> Instance {
    let mut r = rng(seed ^ 0x5eed);
    let config = GeneratorConfig {
        n: r.gen_range(1..=n_max),
        machines,
        alpha_max: alpha,
        p_range: [1.0, 4.0],
        w_range: [0.1, 10.0],
        seed,
        distribution,
        integer_p: true,
    };
    generate_instance(&config).expect("valid generator config")
}

fn worked_example() -> Arc<Instance> {
    let raw = [
        (4.0, 0.4, 8.0),
        (3.0, 0.4, 5.0),
        (2.0, 0.25, 1.5),
        (1.0, 0.45, 1.0),
        (7.0, 0.4, 4.0),
        (7.0, 0.5, 4.0),
        (5.0, 0.45, 2.0),
        (1.0, 0.28, 0.2),
    ];
    let jobs = raw.iter().enumerate().map(|(i, &(p, d, w))| Job::new(format!("j{}", i + 1), p, d, w)).collect();
    Arc::new(Instance::new(jobs, 2).unwrap())
}

fn worked_example_golden() -> Outcome {
    let inst = worked_example();
    let _ = wsvf_schedule(&inst, 2).unwrap();
    let clock = Instant::now();
    let s = wsvf_schedule(&inst, 2).unwrap();
    let cost = evaluate_cost(&s).unwrap();
    let elapsed = clock.elapsed();
    let expected = [0.0, 0.0, 0.0, 0.0, 1.0, 2.0, 3.0, 0.0];
    let starts: Vec<f64> = (0..8).map(|j| s.start(j).unwrap()).collect();
    let starts_ok = starts.iter().zip(expected).all(|(a, b)| (a - b).abs() <= SLACK);
    let cost_ok = (cost - 135.2).abs() <= SLACK;
    let fast = elapsed < Duration::from_millis(1);
    outcome(
        starts_ok && cost_ok && fast,
        format!("starts {starts:?}, cost {cost}, runtime {:.1} us", elapsed.as_secs_f64() * 1e6),
    )
}

fn wsvf_ratio_suite() -> Outcome {
    let clock = Instant::now();
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    let mut runs = 0;
    for (k, alpha) in [0.3, 0.5, 0.8].into_iter().enumerate() {
        let bound = theorem1_factor(alpha).unwrap();
        for i in 0..500u64 {
            let seed = 10_000 * (k as u64 + 1) + i;
            let machines = 1 + (i % 2) as usize;
            let inst = Arc::new(small_instance(seed, 7, machines, alpha, DemandDistribution::Uniform));
            let s = wsvf_schedule(&inst, machines).unwrap();
            let cost = evaluate_cost(&s).unwrap();
            match exact(&inst, machines) {
                Ok(opt) => {
                    let ratio = cost / opt;
                    worst = worst.max(ratio / bound);
                    if ratio > bound + RATIO_TOLERANCE || !check_feasibility(&s).unwrap().is_feasible() {
                        bad.push(format!("alpha {alpha} seed {seed}: ratio {ratio}"));
                    }
                }
                Err(e) => bad.push(format!("alpha {alpha} seed {seed}: {e}")),
            }
            runs += 1;
        }
    }
    let elapsed = clock.elapsed();
    let pass = bad.is_empty() && elapsed < Duration::from_secs(600);
    outcome(
        pass,
        format!(
            "{runs} instances, worst ratio/factor {worst:.4}, {} failures{}, {:.1} s",
            bad.len(),
            bad.first().map(|b| format!(" (first: {b})")).unwrap_or_default(),
            elapsed.as_secs_f64()
        ),
    )
}

fn hybrid_ratio_suite() -> Outcome {
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    for i in 0..300u64 {
        let seed = 50_000 + i;
        let machines = 2 + (i % 2) as usize;
        let inst = Arc::new(small_instance(seed, 7, machines, 1.0, DemandDistribution::Bimodal));
        let bound = hybrid_factor(machines).unwrap();
        let s = hybrid_schedule(&inst, machines).unwrap();
        let cost = evaluate_cost(&s).unwrap();
        match exact(&inst, machines) {
            Ok(opt) => {
                let ratio = cost / opt;
                worst = worst.max(ratio);
                if ratio > bound + RATIO_TOLERANCE || !check_feasibility(&s).unwrap().is_feasible() {
                    bad.push(format!("seed {seed}: ratio {ratio} > {bound}"));
                }
            }
            Err(e) => bad.push(format!("seed {seed}: {e}")),
        }
    }
    outcome(bad.is_empty(), format!("300 instances, max ratio {worst:.4}, {} failures", bad.len()))
}

fn hybrid_factor_pins() -> Outcome {
    let b2 = hybrid_factor(2).unwrap();
    let b3 = hybrid_factor(3).unwrap();
    let pass = (b2 - 5.0).abs() <= SLACK && (b3 - 5.0).abs() <= SLACK;
    outcome(pass, format!("B(2) = {b2} (expected 5), B(3) = {b3} (expected 5)"))
}

fn hybrid_factor_monotone() -> Outcome {
    let mut rises = Vec::new();
    let mut prev = hybrid_factor(2).unwrap();
    for m in 3..=10_000 {
        let b = hybrid_factor(m).unwrap();
        if b > prev + SLACK {
            rises.push((m, prev, b));
        }
        prev = b;
    }
    let limit_gap = (prev - 4.0).abs();
    let pass = rises.is_empty() && limit_gap < 1e-3;
    let first = rises.first().map(|(m, a, b)| format!(", first rise at M={m}: {a} -> {b}")).unwrap_or_default();
    outcome(pass, format!("B(10^4) - 4 = {limit_gap:.2e}, {} increases{first}", rises.len()))
}

struct PackRun {
    ratio_bad: Vec<String>,
    upper_bad: Vec<String>,
    lower_bad: Vec<String>,
    halved_bad: usize,
    worst: f64,
    runs: usize,
}

fn pack_runs() -> PackRun {
    let mut out =
        PackRun { ratio_bad: Vec::new(), upper_bad: Vec::new(), lower_bad: Vec::new(), halved_bad: 0, worst: 0.0, runs: 0 };
    for i in 0..300u64 {
        let seed = 70_000 + i;
        let inst = Arc::new(small_instance(seed, 6, 1, 1.0, DemandDistribution::Uniform));
        let opt = match exact(&inst, 1) {
            Ok(o) => o,
            Err(e) => {
                out.ratio_bad.push(format!("seed {seed}: {e}"));
                continue;
            }
        };
        for eps in [0.1, 0.5] {
            out.runs += 1;
            let s = pack_and_schedule(&inst, eps).unwrap();
            let cost = evaluate_cost(&s).unwrap();
            let trace = s.meta.pack.as_ref().unwrap();
            let ratio = cost / opt;
            out.worst = out.worst.max(ratio);
            if ratio > 12.0 * (1.0 + eps) + RATIO_TOLERANCE || !check_feasibility(&s).unwrap().is_feasible() {
                out.ratio_bad.push(format!("seed {seed} eps {eps}: ratio {ratio}"));
            }
            if cost > trace.algorithm_cost_bound() + SLACK {
                out.upper_bad.push(format!("seed {seed} eps {eps}: {cost} > {}", trace.algorithm_cost_bound()));
            }
            if opt < trace.optimum_lower_bound() - SLACK {
                out.lower_bad.push(format!("seed {seed} eps {eps}: optimum {opt} < {}", trace.optimum_lower_bound()));
            }
            if opt < trace.optimum_lower_bound_halved() - SLACK {
                out.halved_bad += 1;
            }
        }
    }
    out
}

fn first(v: &[String]) -> String {
    v.first().map(|b| format!(" (first: {b})")).unwrap_or_default()
}

fn wsvf_invariant_suite() -> Outcome {
    let clock = Instant::now();
    let mut violations = 0;
    let mut infeasible = 0;
    for i in 0..1000u64 {
        let mut r = rng(90_000 + i);
        let config = GeneratorConfig {
            n: r.gen_range(1..=200),
            machines: r.gen_range(1..=8),
            alpha_max: [0.2, 0.5, 0.8, 0.95][i as usize % 4],
            p_range: [1.0, 20.0],
            w_range: [0.1, 10.0],
            seed: 90_000 + i,
            distribution: DemandDistribution::Uniform,
            integer_p: i % 2 == 0,
        };
        let inst = Arc::new(generate_instance(&config).unwrap());
        let s = wsvf_schedule(&inst, config.machines).unwrap();
        violations += verify_wsvf_invariants(&s).unwrap().violation_count();
        infeasible += usize::from(!check_feasibility(&s).unwrap().is_feasible());
    }
    let elapsed = clock.elapsed();
    outcome(
        violations == 0 && infeasible == 0 && elapsed < Duration::from_secs(60),
        format!("1000 runs, {violations} violations, {infeasible} infeasible, {:.1} s", elapsed.as_secs_f64()),
    )
}

fn compression_chain_suite() -> Outcome {
    let mut bad = Vec::new();
    for i in 0..200u64 {
        let seed = 110_000 + i;
        let machines = 1 + (i % 3) as usize;
        let inst = Arc::new(small_instance(seed, 6, machines, 0.9, DemandDistribution::Uniform));
        let compressed = compress(&inst);
        let hat = Arc::new(compressed.to_instance(machines).unwrap());
        match (exact(&hat, machines), exact(&inst, machines)) {
            (Ok(c_hat), Ok(c)) => {
                let floor = smith_cost(&compressed) / machines as f64;
                if c_hat > c + SLACK {
                    bad.push(format!("seed {seed}: compressed optimum {c_hat} > {c}"));
                }
                if c_hat < floor - SLACK {
                    bad.push(format!("seed {seed}: compressed optimum {c_hat} < {floor}"));
                }
            }
            (a, b) => bad.push(format!("seed {seed}: {:?} {:?}", a.err(), b.err())),
        }
    }
    outcome(bad.is_empty(), format!("200 instances, {} failures{}", bad.len(), first(&bad)))
}

fn brute_force_knapsack(items: &[KnapsackItem], budget: f64) -> f64 {
    let n = items.len();
    let mut best = 0.0f64;
    for mask in 0u32..(1 << n) {
        let (mut v, mut w) = (0.0, 0.0);
        for (i, it) in items.iter().enumerate() {
            if mask >> i & 1 == 1 {
                v += it.volume;
                w += it.weight;
            }
        }
        if v <= budget {
            best = best.max(w);
        }
    }
    best
}

fn knapsack_suite() -> Outcome {
    let mut bad = Vec::new();
    for seed in 0..200u64 {
        let mut r = rng(130_000 + seed);
        let n = r.gen_range(1..=15);
        let items: Vec<KnapsackItem> = (0..n)
            .map(|_| KnapsackItem { volume: r.gen_range(0.01..5.0), weight: r.gen_range(0.1..10.0) })
            .collect();
        let budget = r.gen_range(0.5..15.0);
        let eps = [0.05, 0.1, 0.25, 0.5][seed as usize % 4];
        let sel = knapsack_augmented(&items, budget, eps).unwrap();
        let opt = brute_force_knapsack(&items, budget);
        if sel.total_weight < opt - SLACK {
            bad.push(format!("seed {seed}: weight {} < {opt}", sel.total_weight));
        }
        if sel.total_volume > (1.0 + eps) * budget + SLACK {
            bad.push(format!("seed {seed}: volume {} > {}", sel.total_volume, (1.0 + eps) * budget));
        }
    }
    outcome(bad.is_empty(), format!("200 inputs, {} failures{}", bad.len(), first(&bad)))
}

fn strip_suite() -> Outcome {
    let mut bad = Vec::new();
    for seed in 0..500u64 {
        let mut r = rng(150_000 + seed);
        let k = r.gen_range(1..=40);
        let rects: Vec<Rect> =
            (0..k).map(|_| Rect { width: r.gen_range(0.1..10.0), height: r.gen_range(0.01..=1.0) }).collect();
        let out = shelf_pack(&rects);
        let area: f64 = rects.iter().map(|r| r.width * r.height).sum();
        let widest = rects.iter().map(|r| r.width).fold(0.0, f64::max);
        for (a, (ra, pa)) in rects.iter().zip(&out.placements).enumerate() {
            if pa.capacity_offset + ra.height > 1.0 + SLACK || pa.capacity_offset < 0.0 || pa.time_offset < 0.0 {
                bad.push(format!("seed {seed}: rect {a} leaves the strip"));
            }
            for (b, (rb, pb)) in rects.iter().zip(&out.placements).enumerate().skip(a + 1) {
                let time = pa.time_offset + ra.width > pb.time_offset + SLACK
                    && pb.time_offset + rb.width > pa.time_offset + SLACK;
                let cap = pa.capacity_offset + ra.height > pb.capacity_offset + SLACK
                    && pb.capacity_offset + rb.height > pa.capacity_offset + SLACK;
                if time && cap {
                    bad.push(format!("seed {seed}: rects {a} and {b} overlap"));
                }
            }
        }
        if out.width > 2.0 * area + widest + SLACK {
            bad.push(format!("seed {seed}: width {} > {}", out.width, 2.0 * area + widest));
        }
    }
    outcome(bad.is_empty(), format!("500 sets, {} failures{}", bad.len(), first(&bad)))
}

fn oracle_certification_suite() -> Outcome {
    let clock = Instant::now();
    let mut bad = Vec::new();
    for i in 0..200u64 {
        let seed = 170_000 + i;
        let machines = 1 + (i % 2) as usize;
        let inst = Arc::new(small_instance(seed, 5, machines, 0.9, DemandDistribution::Uniform));
        let grid = optimal_grid_check(&inst, machines, &limits()).unwrap();
        match exact(&inst, machines) {
            Ok(c) if (c - grid).abs() <= SLACK => {}
            Ok(c) => bad.push(format!("seed {seed}: search {c} vs grid {grid}")),
            Err(e) => bad.push(format!("seed {seed}: {e}")),
        }
    }
    let elapsed = clock.elapsed();
    outcome(
        bad.is_empty() && elapsed < Duration::from_secs(300),
        format!("200 instances, {} mismatches{}, {:.1} s", bad.len(), first(&bad), elapsed.as_secs_f64()),
    )
}

fn cli(args: &[&str], dir: &Path) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_capsched"))
        .args(args)
        .current_dir(dir)
        .env_remove("CAPSCHED_SEED")
        .output()
        .expect("capsched runs");
    assert!(out.status.code().is_some_and(|c| c <= 3), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn determinism_suite() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("suite.json"),
        r#"{"entries": [
            {"generator": {"n": 6, "machines": 2, "alpha_max": 0.5, "p_range": [1, 4], "w_range": [0.1, 10],
                           "seed": 3, "integer_p": true},
             "count": 6, "algorithms": ["wsvf", "wspt", "hybrid"], "oracle": true},
            {"generator": {"n": 5, "machines": 1, "alpha_max": 0.9, "p_range": [1, 4], "w_range": [0.1, 10],
                           "seed": 9, "integer_p": true},
             "count": 4, "algorithms": ["pack", "wsvf"], "oracle": true, "epsilon": 0.5}
        ]}"#,
    )
    .unwrap();
    let gen = ["generate", "--n", "7", "--machines", "2", "--alpha-max", "0.8", "--seed", "42", "--integer-p"];
    std::fs::write(d.join("inst.json"), cli(&gen, d)).unwrap();
    std::fs::write(d.join("single.json"), cli(&["generate", "--n", "6", "--machines", "1", "--seed", "5"], d)).unwrap();
    for (alg, inst) in [("wsvf", "inst.json"), ("wspt", "inst.json"), ("hybrid", "inst.json"), ("pack", "single.json")] {
        std::fs::write(d.join(format!("{alg}.json")), cli(&["run", inst, "--alg", alg], d)).unwrap();
    }
    std::fs::write(d.join("oracle.json"), cli(&["oracle", "inst.json"], d)).unwrap();

    let commands: Vec<Vec<&str>> = vec![
        gen.to_vec(),
        vec!["generate", "--n", "12", "--alpha-max", "0.9", "--distribution", "bimodal", "--seed", "1"],
        vec!["run", "inst.json", "--alg", "wsvf"],
        vec!["run", "inst.json", "--alg", "wspt"],
        vec!["run", "inst.json", "--alg", "hybrid"],
        vec!["run", "single.json", "--alg", "pack", "--epsilon", "0.5"],
        vec!["bounds", "inst.json"],
        vec!["verify", "wsvf.json"],
        vec!["verify", "pack.json", "--oracle"],
        vec!["verify", "hybrid.json", "--oracle"],
        vec!["oracle", "inst.json"],
        vec!["gantt", "wsvf.json"],
        vec!["gantt", "pack.json"],
        vec!["bench", "--suite", "suite.json"],
        vec!["bench", "--suite", "suite.json", "--parallel", "4"],
    ];
    let mut differing = Vec::new();
    for args in &commands {
        if cli(args, d) != cli(args, d) {
            differing.push(args.join(" "));
        }
    }
    let par = cli(&["bench", "--suite", "suite.json", "--parallel", "4"], d);
    let seq = cli(&["bench", "--suite", "suite.json"], d);
    if par != seq {
        differing.push("bench parallel vs sequential".into());
    }
    outcome(
        differing.is_empty(),
        format!("{} commands rerun, {} differ{}", commands.len() + 1, differing.len(), first(&differing)),
    )
}

fn main() -> ExitCode {
    let pack = std::cell::OnceCell::new();
    let pack_runs = || pack.get_or_init(pack_runs);
    type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);
    let criteria: Vec<Criterion> = vec![
        ("worked-example golden schedule", Box::new(worked_example_golden)),
        ("wsvf ratio vs oracle <= 1 + 1/(1 - alpha)", Box::new(wsvf_ratio_suite)),
        ("hybrid ratio vs oracle <= B(M)", Box::new(hybrid_ratio_suite)),
        ("hybrid factor pinned values B(2) = B(3) = 5", Box::new(hybrid_factor_pins)),
        ("hybrid factor decreases monotonically to 4", Box::new(hybrid_factor_monotone)),
        (
            "pack ratio vs oracle <= 12(1 + eps)",
            Box::new(|| {
                let r = pack_runs();
                outcome(
                    r.ratio_bad.is_empty(),
                    format!("{} runs, max ratio {:.4}, {} failures{}", r.runs, r.worst, r.ratio_bad.len(), first(&r.ratio_bad)),
                )
            }),
        ),
        (
            "pack cost <= per-level upper bound",
            Box::new(|| {
                let r = pack_runs();
                outcome(r.upper_bad.is_empty(), format!("{} runs, {} failures{}", r.runs, r.upper_bad.len(), first(&r.upper_bad)))
            }),
        ),
        (
            "pack optimum >= W + sum_l 2^l (W - W_l)",
            Box::new(|| {
                let r = pack_runs();
                outcome(
                    r.lower_bad.is_empty(),
                    format!(
                        "{} runs, {} failures{}; halved form W + sum_(l>=1) 2^(l-1) (W - W_l) fails {}",
                        r.runs,
                        r.lower_bad.len(),
                        first(&r.lower_bad),
                        r.halved_bad
                    ),
                )
            }),
        ),
        ("wsvf invariants on large runs", Box::new(wsvf_invariant_suite)),
        ("compressed optimum chain", Box::new(compression_chain_suite)),
        ("knapsack vs brute force", Box::new(knapsack_suite)),
        ("strip packing contract", Box::new(strip_suite)),
        ("oracle vs integer grid search", Box::new(oracle_certification_suite)),
        ("cli determinism", Box::new(determinism_suite)),
    ];

    let mut failed = 0;
    for (name, run) in &criteria {
        let result = catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|e| {
                let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
                outcome(false, format!("panicked: {}", msg.unwrap_or_default()))
            });
        failed += usize::from(!result.pass);
        println!("{} {name}: {}", if result.pass { "PASS" } else { "FAIL" }, result.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
