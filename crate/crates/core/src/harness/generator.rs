use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Instance, Job};
use crate::schedulers::HIGH_DEMAND_THRESHOLD;

// Sampled values sit on fixed grids so they survive a JSON round trip.
const DEMAND_STEPS: f64 = 10_000.0;
const VALUE_STEPS: f64 = 1_000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DemandDistribution {
    /// `d` uniform in `(0, alpha_max]`.
    #[default]
    Uniform,
    /// Even mix of `d` in `(0, 1/2]` and `d` in `(1/2, alpha_max]`.
    Bimodal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub n: usize,
    pub machines: usize,
    pub alpha_max: f64,
    pub p_range: [f64; 2],
    pub w_range: [f64; 2],
    pub seed: u64,
    #[serde(default)]
    pub distribution: DemandDistribution,
    /// Draw integer durations.
    #[serde(default)]
    pub integer_p: bool,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            n: 8,
            machines: 2,
            alpha_max: 0.5,
            p_range: [1.0, 10.0],
            w_range: [0.1, 10.0],
            seed: 0,
            distribution: DemandDistribution::Uniform,
            integer_p: false,
        }
    }
}

fn grid(range: [f64; 2], steps: f64, field: &str) -> Result<(i64, i64)> {
    let lo = (range[0] * steps - 1e-6).ceil() as i64;
    let hi = (range[1] * steps + 1e-6).floor() as i64;
    if !(range[0].is_finite() && range[1].is_finite()) || lo > hi {
        return Err(Error::Config(format!("{field} range {range:?} contains no sample point")));
    }
    Ok((lo, hi))
}

impl GeneratorConfig {
    fn check(&self) -> Result<()> {
        if self.machines == 0 {
            return Err(Error::Config("machines must be at least 1".into()));
        }
        if !(self.alpha_max > 0.0 && self.alpha_max <= 1.0) {
            return Err(Error::Config(format!("alpha_max must lie in (0, 1], got {}", self.alpha_max)));
        }
        if self.p_range[0] < 1.0 {
            return Err(Error::Config(format!("durations must be at least 1, got range {:?}", self.p_range)));
        }
        if self.w_range[0].is_nan() || self.w_range[0] <= 0.0 {
            return Err(Error::Config(format!("weights must be positive, got range {:?}", self.w_range)));
        }
        if self.distribution == DemandDistribution::Bimodal && self.alpha_max <= HIGH_DEMAND_THRESHOLD {
            return Err(Error::Config("bimodal demands need alpha_max above 1/2".into()));
        }
        Ok(())
    }
}

/// Same config and seed give the same instance, bit for bit.
pub fn generate_instance(config: &GeneratorConfig) -> Result<Instance> {
    config.check()?;
    let (p_lo, p_hi) = if config.integer_p {
        grid(config.p_range, 1.0, "p")?
    } else {
        grid(config.p_range, VALUE_STEPS, "p")?
    };
    let p_scale = if config.integer_p { 1.0 } else { VALUE_STEPS };
    let (w_lo, w_hi) = grid(config.w_range, VALUE_STEPS, "w")?;
    let d_top = (config.alpha_max * DEMAND_STEPS + 1e-6).floor() as i64;
    let d_mid = (HIGH_DEMAND_THRESHOLD * DEMAND_STEPS) as i64;
    if d_top < 1 {
        return Err(Error::Config(format!("alpha_max {} is below the demand resolution", config.alpha_max)));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let jobs = (0..config.n)
        .map(|i| {
            let d = match config.distribution {
                DemandDistribution::Uniform => rng.gen_range(1..=d_top),
                DemandDistribution::Bimodal if rng.gen_bool(0.5) => rng.gen_range(1..=d_mid),
                DemandDistribution::Bimodal => rng.gen_range(d_mid + 1..=d_top),
            };
            let p = rng.gen_range(p_lo..=p_hi);
            let w = rng.gen_range(w_lo..=w_hi);
            Job::new(format!("j{}", i + 1), p as f64 / p_scale, d as f64 / DEMAND_STEPS, w as f64 / VALUE_STEPS)
        })
        .collect();
    Instance::new(jobs, config.machines)
}
