//! JSON file formats for instances and schedules.
//!
//! Every floating-point number written by this crate is first rounded to 12
//! significant digits, so reruns produce byte-identical files.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::model::{evaluate_cost, validate_instance, HybridInfo, Instance, RawInstance, Schedule};
use crate::oracle::SEARCH_SPACE_NOTE;
use crate::schedulers::{split_jobs, wsvf_order};
use crate::single_machine::{PackIteration, PackTrace, LEVEL_MAX_RULE};

pub const SIGNIFICANT_DIGITS: usize = 12;

pub fn round_significant(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

fn round_numbers(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64().map(round_significant).and_then(serde_json::Number::from_f64) {
                *n = x;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_numbers),
        Value::Object(map) => map.values_mut().for_each(round_numbers),
        _ => {}
    }
}

/// Pretty JSON with rounded numbers and a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_numbers(&mut v);
    let mut out = serde_json::to_string_pretty(&v)?;
    out.push('\n');
    Ok(out)
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let raw: RawInstance = serde_json::from_str(text)?;
    validate_instance(raw)
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    parse_instance(&fs::read_to_string(path)?)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InstanceRef {
    Path(String),
    Inline(Value),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AssignmentDoc {
    pub job: String,
    pub machine: usize,
    pub start: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IterationDoc {
    pub level: u32,
    pub budget: f64,
    pub interval: [f64; 2],
    pub selected_weight: f64,
    pub selected: Vec<String>,
    pub newly_packed: Vec<String>,
    pub strip_width: f64,
}

/// On-disk schedule. Optional keys carry per-algorithm audit data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScheduleDoc {
    pub algorithm: String,
    pub instance: InstanceRef,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub machines: Option<usize>,
    pub assignments: Vec<AssignmentDoc>,
    pub cost: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimal: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search_space: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rebalanced: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level_max: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level_max_rule: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<Vec<IterationDoc>>,
}

impl ScheduleDoc {
    pub fn from_schedule(schedule: &Schedule, instance: InstanceRef) -> Result<Self> {
        let inst = schedule.instance();
        let ids = |js: &[usize]| js.iter().map(|&j| inst.job(j).id.clone()).collect::<Vec<_>>();
        let assignments = schedule
            .assignments()
            .map(|a| AssignmentDoc { job: inst.job(a.job).id.clone(), machine: a.machine, start: a.start })
            .collect();
        let pack = schedule.meta.pack.as_ref();
        Ok(ScheduleDoc {
            algorithm: schedule.algorithm().to_owned(),
            instance,
            machines: Some(schedule.machines()),
            assignments,
            cost: evaluate_cost(schedule)?,
            optimal: schedule.meta.optimal,
            search_space: schedule.meta.optimal.map(|_| SEARCH_SPACE_NOTE.to_owned()),
            rebalanced: schedule.meta.hybrid.as_ref().map(|h| h.rebalanced),
            epsilon: pack.map(|t| t.eps),
            level_max: pack.map(|t| t.level_max),
            level_max_rule: pack.map(|t| t.level_max_rule.to_owned()),
            iterations: pack.map(|t| {
                t.iterations
                    .iter()
                    .map(|it| IterationDoc {
                        level: it.level,
                        budget: it.budget,
                        interval: it.interval,
                        selected_weight: it.selected_weight,
                        selected: ids(&it.selected),
                        newly_packed: ids(&it.newly_packed),
                        strip_width: it.strip_width,
                    })
                    .collect()
            }),
        })
    }

    /// Resolves the instance (paths relative to `base` when not found as
    /// given) and rebuilds the schedule with its algorithm metadata.
    pub fn to_schedule(&self, base: Option<&Path>) -> Result<Schedule> {
        let inst = Arc::new(match &self.instance {
            InstanceRef::Inline(v) => validate_instance(serde_json::from_value(v.clone())?)?,
            InstanceRef::Path(p) => read_instance(&resolve(p, base))?,
        });
        let machines = self.machines.unwrap_or(inst.machines());
        let index: HashMap<&str, usize> = inst.jobs().iter().enumerate().map(|(i, j)| (j.id.as_str(), i)).collect();
        let lookup = |id: &str| index.get(id).copied().ok_or_else(|| Error::UnknownJob(id.to_owned()));

        let mut schedule = Schedule::new(Arc::clone(&inst), machines, self.algorithm.clone());
        for a in &self.assignments {
            schedule.assign(lookup(&a.job)?, a.machine, a.start)?;
        }
        schedule.meta.optimal = self.optimal;
        match self.algorithm.as_str() {
            "wsvf" => schedule.meta.priority = Some(wsvf_order(&inst).jobs),
            "hybrid" => {
                let split = split_jobs(&inst, machines)?;
                let rebalanced = self.rebalanced.unwrap_or(false);
                let (m_low, m_high) = match (rebalanced, split.low.is_empty(), split.high.is_empty()) {
                    (true, false, true) => (machines, 0),
                    (true, true, false) => (0, machines),
                    _ => (split.m_low, split.m_high),
                };
                schedule.meta.hybrid = Some(HybridInfo { low: split.low, high: split.high, m_low, m_high, rebalanced });
            }
            "pack" => {
                if let (Some(eps), Some(its)) = (self.epsilon, &self.iterations) {
                    let to_idx = |ids: &[String]| ids.iter().map(|id| lookup(id)).collect::<Result<Vec<_>>>();
                    let iterations = its
                        .iter()
                        .map(|it| {
                            Ok(PackIteration {
                                level: it.level,
                                budget: it.budget,
                                selected: to_idx(&it.selected)?,
                                selected_weight: it.selected_weight,
                                newly_packed: to_idx(&it.newly_packed)?,
                                interval: it.interval,
                                strip_width: it.strip_width,
                            })
                        })
                        .collect::<Result<Vec<_>>>()?;
                    schedule.meta.pack = Some(PackTrace {
                        eps,
                        level_max: self.level_max.unwrap_or_default(),
                        level_max_rule: LEVEL_MAX_RULE,
                        total_weight: inst.total_weight(),
                        iterations,
                    });
                }
            }
            _ => {}
        }
        Ok(schedule)
    }
}

fn resolve(path: &str, base: Option<&Path>) -> PathBuf {
    let p = PathBuf::from(path);
    match base {
        Some(b) if !p.is_absolute() && !p.exists() => b.join(p),
        _ => p,
    }
}

pub fn read_schedule(path: &Path) -> Result<Schedule> {
    let doc: ScheduleDoc = serde_json::from_str(&fs::read_to_string(path)?)?;
    doc.to_schedule(path.parent())
}

pub fn inline_instance(inst: &Instance) -> Result<InstanceRef> {
    let mut v = serde_json::to_value(inst)?;
    round_numbers(&mut v);
    Ok(InstanceRef::Inline(v))
}
