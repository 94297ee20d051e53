use serde::Serialize;

use super::CAPACITY_TOLERANCE;

/// One constant piece of a [`CapacityProfile`]. `end` is infinite for the
/// trailing piece.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub usage: f64,
}

/// Used capacity of one machine as a right-continuous step function.
///
/// `usage[i]` holds on `[breakpoints[i], breakpoints[i + 1])`; the last entry
/// holds up to infinity and time before the first breakpoint has zero usage.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityProfile {
    machine: usize,
    breakpoints: Vec<f64>,
    usage: Vec<f64>,
    horizon: f64,
}

impl CapacityProfile {
    pub fn empty(machine: usize, horizon: f64) -> Self {
        CapacityProfile {
            machine,
            breakpoints: Vec::new(),
            usage: Vec::new(),
            horizon,
        }
    }

    pub fn machine(&self) -> usize {
        self.machine
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Builds a profile from `(start, duration, demand)` triples. Usage on each
    /// piece is the demand sum of the covering jobs, taken in input order.
    pub fn from_jobs(machine: usize, horizon: f64, jobs: &[(f64, f64, f64)]) -> Self {
        let mut breakpoints: Vec<f64> = jobs.iter().flat_map(|&(s, p, _)| [s, s + p]).collect();
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        let usage = breakpoints
            .iter()
            .map(|&t| {
                jobs.iter()
                    .filter(|&&(s, p, _)| s <= t && t < s + p)
                    .map(|&(_, _, d)| d)
                    .sum()
            })
            .collect();
        CapacityProfile { machine, breakpoints, usage, horizon }
    }

    /// Adds a job occupying `demand` on `[start, start + duration)`.
    pub fn insert(&mut self, start: f64, duration: f64, demand: f64) {
        let end = start + duration;
        let first = self.split_at(start);
        let last = self.split_at(end);
        for u in &mut self.usage[first..last] {
            *u += demand;
        }
    }

    /// Ensures `t` is a breakpoint and returns its index.
    fn split_at(&mut self, t: f64) -> usize {
        let i = self.breakpoints.partition_point(|&b| b < t);
        if self.breakpoints.get(i) != Some(&t) {
            let carried = if i > 0 { self.usage[i - 1] } else { 0.0 };
            self.breakpoints.insert(i, t);
            self.usage.insert(i, carried);
        }
        i
    }

    pub fn usage_at(&self, t: f64) -> f64 {
        let i = self.breakpoints.partition_point(|&b| b <= t);
        if i == 0 {
            0.0
        } else {
            self.usage[i - 1]
        }
    }

    /// All constant pieces from time zero onwards.
    pub fn segments(&self) -> Vec<Segment> {
        let mut out = Vec::with_capacity(self.breakpoints.len() + 1);
        match self.breakpoints.first() {
            None => {
                out.push(Segment { start: 0.0, end: f64::INFINITY, usage: 0.0 });
                return out;
            }
            Some(&b) if b > 0.0 => out.push(Segment { start: 0.0, end: b, usage: 0.0 }),
            _ => {}
        }
        for (i, (&b, &u)) in self.breakpoints.iter().zip(&self.usage).enumerate() {
            let end = self.breakpoints.get(i + 1).copied().unwrap_or(f64::INFINITY);
            out.push(Segment { start: b, end, usage: u });
        }
        out
    }

    /// Peak usage over `[start, end)`.
    pub fn max_usage(&self, start: f64, end: f64) -> f64 {
        let mut peak = self.usage_at(start);
        let from = self.breakpoints.partition_point(|&b| b <= start);
        for (&b, &u) in self.breakpoints[from..].iter().zip(&self.usage[from..]) {
            if b >= end {
                break;
            }
            peak = peak.max(u);
        }
        peak
    }

    /// Integral of usage over time, which equals the total volume placed.
    pub fn integral(&self) -> f64 {
        self.segments()
            .iter()
            .filter(|s| s.end.is_finite())
            .map(|s| s.usage * (s.end - s.start))
            .sum()
    }

    pub fn fits(&self, start: f64, duration: f64, demand: f64) -> bool {
        self.max_usage(start, start + duration) + demand <= 1.0 + CAPACITY_TOLERANCE
    }

    /// Earliest `t >= 0` at which a job of the given shape fits. Only time
    /// zero and the breakpoints need checking since usage is a step function
    /// that drops to zero after the last breakpoint.
    pub fn earliest_feasible_start(&self, duration: f64, demand: f64) -> f64 {
        std::iter::once(0.0)
            .chain(self.breakpoints.iter().copied())
            .find(|&t| self.fits(t, duration, demand))
            .expect("usage is zero after the last breakpoint")
    }
}

/// Free-function form of [`CapacityProfile::earliest_feasible_start`].
pub fn earliest_feasible_start(profile: &CapacityProfile, duration: f64, demand: f64) -> f64 {
    profile.earliest_feasible_start(duration, demand)
}
