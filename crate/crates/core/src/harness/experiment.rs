use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{generate_instance, run_algorithm, GeneratorConfig, VERSION};
use crate::bounds::{combined_lower_bound, ratio_certificate, LowerBoundKind, RatioReport, Verdict, RATIO_TOLERANCE};
use crate::error::{Error, Result};
use crate::model::{check_feasibility, Instance};
use crate::oracle::{optimal_schedule, OracleLimits};
use crate::schedulers::Algorithm;
use crate::single_machine::DEFAULT_EPSILON;

fn one() -> usize {
    1
}

fn default_epsilon() -> f64 {
    DEFAULT_EPSILON
}

fn default_max_n() -> usize {
    OracleLimits::default().max_jobs
}

fn default_timeout() -> f64 {
    OracleLimits::default().max_time.as_secs_f64()
}

/// `count` instances drawn with seeds `generator.seed`, `generator.seed + 1`, ...
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub generator: GeneratorConfig,
    #[serde(default = "one")]
    pub count: usize,
    pub algorithms: Vec<Algorithm>,
    #[serde(default)]
    pub oracle: bool,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub rebalance: bool,
    #[serde(default = "default_max_n")]
    pub oracle_max_n: usize,
    #[serde(default = "default_timeout")]
    pub oracle_timeout: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Suite {
    #[serde(default)]
    pub entries: Vec<SuiteEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InstanceResult {
    pub entry: usize,
    pub seed: u64,
    pub n: usize,
    pub machines: usize,
    pub alpha: f64,
    pub combined_lb: f64,
    pub oracle_cost: Option<f64>,
    pub oracle_optimal: Option<bool>,
    pub reports: Vec<RatioReport>,
    pub errors: Vec<String>,
    /// Ratios below one against the oracle.
    pub anomalies: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgorithmSummary {
    pub algorithm: String,
    pub runs: usize,
    pub max_ratio: Option<f64>,
    pub mean_ratio: Option<f64>,
    pub failures: usize,
    pub violations: usize,
    pub errors: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub version: &'static str,
    pub suite: Suite,
    pub results: Vec<InstanceResult>,
    pub summary: Vec<AlgorithmSummary>,
}

impl ExperimentReport {
    /// Some ratio breached its guarantee against a conclusive denominator.
    pub fn has_violation(&self) -> bool {
        self.results.iter().flat_map(|r| &r.reports).any(|r| r.verdict == Verdict::Violated)
    }

    pub fn has_anomaly(&self) -> bool {
        self.results.iter().any(|r| !r.anomalies.is_empty())
    }
}

fn run_one(entry_index: usize, entry: &SuiteEntry, seed: u64) -> InstanceResult {
    let config = GeneratorConfig { seed, ..entry.generator.clone() };
    let mut result = InstanceResult {
        entry: entry_index,
        seed,
        n: config.n,
        machines: config.machines,
        alpha: 0.0,
        combined_lb: 0.0,
        oracle_cost: None,
        oracle_optimal: None,
        reports: Vec::new(),
        errors: Vec::new(),
        anomalies: Vec::new(),
    };
    let inst: Arc<Instance> = match generate_instance(&config) {
        Ok(i) => Arc::new(i),
        Err(e) => {
            result.errors.push(format!("generate: {e}"));
            return result;
        }
    };
    result.alpha = inst.alpha();
    result.combined_lb = combined_lower_bound(&inst, config.machines);

    if entry.oracle {
        let limits = OracleLimits {
            max_jobs: entry.oracle_max_n,
            max_time: Duration::from_secs_f64(entry.oracle_timeout.max(0.0)),
            ..OracleLimits::default()
        };
        match optimal_schedule(&inst, config.machines, &limits) {
            Ok(out) => {
                result.oracle_optimal = Some(out.optimal);
                result.oracle_cost = Some(out.cost);
                if !out.optimal {
                    result.errors.push("oracle: time limit reached, falling back to combined_lb".into());
                }
            }
            Err(e) => result.errors.push(format!("oracle: {e}")),
        }
    }
    let denominator = result.oracle_cost.filter(|_| result.oracle_optimal == Some(true));

    for &alg in &entry.algorithms {
        let outcome = run_algorithm(&inst, alg, config.machines, entry.epsilon, entry.rebalance).and_then(|s| {
            let feasibility = check_feasibility(&s)?;
            if !feasibility.is_feasible() {
                return Err(Error::Config(format!("{} violations of capacity", feasibility.violations.len())));
            }
            ratio_certificate(&s, denominator)
        });
        match outcome {
            Ok(report) => {
                if report.lower_bound_kind == LowerBoundKind::Oracle && report.ratio < 1.0 - RATIO_TOLERANCE {
                    result.anomalies.push(format!("{alg}: ratio {} below 1 against the oracle", report.ratio));
                }
                result.reports.push(report);
            }
            Err(e) => result.errors.push(format!("{alg}: {e}")),
        }
    }
    result
}

fn summarize(suite: &Suite, results: &[InstanceResult]) -> Vec<AlgorithmSummary> {
    let mut by_alg: BTreeMap<String, AlgorithmSummary> = BTreeMap::new();
    for r in results {
        for alg in &suite.entries[r.entry].algorithms {
            let s = by_alg.entry(alg.to_string()).or_insert_with(|| AlgorithmSummary {
                algorithm: alg.to_string(),
                runs: 0,
                max_ratio: None,
                mean_ratio: None,
                failures: 0,
                violations: 0,
                errors: 0,
            });
            match r.reports.iter().find(|rep| rep.algorithm == alg.as_str()) {
                Some(rep) => {
                    s.runs += 1;
                    s.max_ratio = Some(s.max_ratio.map_or(rep.ratio, |m| m.max(rep.ratio)));
                    // running sum until the final division below
                    s.mean_ratio = Some(s.mean_ratio.unwrap_or(0.0) + rep.ratio);
                    s.failures += usize::from(!rep.pass);
                    s.violations += usize::from(rep.verdict == Verdict::Violated);
                }
                None => s.errors += 1,
            }
        }
    }
    by_alg
        .into_values()
        .map(|mut s| {
            s.mean_ratio = s.mean_ratio.map(|sum| sum / s.runs as f64);
            s
        })
        .collect()
}

/// Runs every suite entry. Per-instance errors are recorded, never fatal.
/// Results are ordered by entry and seed whatever `parallel` is.
pub fn run_experiment(suite: &Suite, parallel: usize) -> Result<ExperimentReport> {
    let tasks: Vec<(usize, u64)> = suite
        .entries
        .iter()
        .enumerate()
        .flat_map(|(i, e)| (0..e.count as u64).map(move |k| (i, e.generator.seed.wrapping_add(k))))
        .collect();
    let work = |&(i, seed): &(usize, u64)| run_one(i, &suite.entries[i], seed);
    let results: Vec<InstanceResult> = if parallel <= 1 {
        tasks.iter().map(work).collect()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(parallel)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(|| tasks.par_iter().map(work).collect())
    };
    let summary = summarize(suite, &results);
    Ok(ExperimentReport { version: VERSION, suite: suite.clone(), results, summary })
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_owned(), |v| format!("{v:.4}"))
}

fn aligned(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> =
        (0..cols).map(|c| rows.iter().filter_map(|r| r.get(c)).map(String::len).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for row in rows {
        let line: Vec<String> = row.iter().zip(&widths).map(|(cell, w)| format!("{cell:>w$}")).collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    }
    out
}

pub fn render_table(report: &ExperimentReport) -> String {
    let mut rows = vec![["entry", "seed", "algorithm", "cost", "lower_bound", "kind", "ratio", "factor", "verdict"]
        .map(String::from)
        .to_vec()];
    let mut notes = Vec::new();
    for r in &report.results {
        for rep in &r.reports {
            rows.push(vec![
                r.entry.to_string(),
                r.seed.to_string(),
                rep.algorithm.clone(),
                format!("{:.4}", rep.cost),
                format!("{:.4}", rep.lower_bound),
                match rep.lower_bound_kind {
                    LowerBoundKind::Oracle => "oracle".into(),
                    LowerBoundKind::CombinedLb => "combined_lb".into(),
                },
                format!("{:.4}", rep.ratio),
                fmt_opt(rep.factor),
                format!("{:?}", rep.verdict).to_lowercase(),
            ]);
        }
        for e in r.errors.iter().chain(&r.anomalies) {
            notes.push(format!("entry {} seed {}: {e}", r.entry, r.seed));
        }
    }
    let mut out = format!("capsched {}\n\n", report.version);
    if report.results.is_empty() {
        out.push_str("no instances\n");
        return out;
    }
    out.push_str(&aligned(&rows));

    let mut sums = vec![["algorithm", "runs", "max_ratio", "mean_ratio", "failures", "violations", "errors"]
        .map(String::from)
        .to_vec()];
    for s in &report.summary {
        sums.push(vec![
            s.algorithm.clone(),
            s.runs.to_string(),
            fmt_opt(s.max_ratio),
            fmt_opt(s.mean_ratio),
            s.failures.to_string(),
            s.violations.to_string(),
            s.errors.to_string(),
        ]);
    }
    out.push('\n');
    out.push_str(&aligned(&sums));
    if !notes.is_empty() {
        out.push('\n');
        for n in notes {
            let _ = writeln!(out, "{n}");
        }
    }
    out
}
