//! Seeded synthetic workloads for desk-scale experiments.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp;
use serde::{Deserialize, Serialize};

use super::{Job, JobSet, SECONDS_PER_DAY};
use crate::error::{Error, Result};

const MAX_SIZE: u32 = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SizeDistribution {
    Constant {
        value: u32,
    },
    /// Inclusive on both ends.
    Uniform {
        min: u32,
        max: u32,
    },
    Weighted {
        values: Vec<u32>,
        weights: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RuntimeDistribution {
    Constant {
        value: f64,
    },
    Uniform {
        min: f64,
        max: f64,
    },
    /// Log-uniform on `[min, max]`, i.e. heavy on short jobs.
    LogUniform {
        min: f64,
        max: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub seed: u64,
    pub rate_per_hour: f64,
    pub duration_s: f64,
    pub size: SizeDistribution,
    pub runtime: RuntimeDistribution,
    #[serde(default = "default_users")]
    pub users: u64,
    /// Floor submit times and ceil runtimes to whole seconds.
    #[serde(default)]
    pub integer_times: bool,
}

fn default_users() -> u64 {
    20
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rate_per_hour > 0.0 && self.rate_per_hour.is_finite()) {
            return Err(Error::Config(format!(
                "rate must be positive, got {}",
                self.rate_per_hour
            )));
        }
        if !(self.duration_s >= 0.0 && self.duration_s.is_finite()) {
            return Err(Error::Config(format!("duration must be >= 0, got {}", self.duration_s)));
        }
        if self.users == 0 {
            return Err(Error::Config("at least one user is required".into()));
        }
        let size_ok = |v: u32| (1..=MAX_SIZE).contains(&v);
        match &self.size {
            SizeDistribution::Constant { value } if !size_ok(*value) => {
                return Err(Error::Config(format!("size {value} outside [1, {MAX_SIZE}]")))
            }
            SizeDistribution::Uniform { min, max } if !(size_ok(*min) && size_ok(*max) && min <= max) => {
                return Err(Error::Config(format!(
                    "size range [{min}, {max}] outside [1, {MAX_SIZE}]"
                )))
            }
            SizeDistribution::Weighted { values, weights } => {
                if values.is_empty() || values.len() != weights.len() || !values.iter().all(|v| size_ok(*v)) {
                    return Err(Error::Config(
                        "weighted sizes must be non-empty, within [1, 16] and match weights".into(),
                    ));
                }
                WeightedIndex::new(weights).map_err(|e| Error::Config(format!("size weights: {e}")))?;
            }
            _ => {}
        }
        let runtime_ok = |v: f64| v > 0.0 && v <= SECONDS_PER_DAY;
        let ok = match self.runtime {
            RuntimeDistribution::Constant { value } => runtime_ok(value),
            RuntimeDistribution::Uniform { min, max } | RuntimeDistribution::LogUniform { min, max } => {
                runtime_ok(min) && runtime_ok(max) && min <= max
            }
        };
        if !ok {
            return Err(Error::Config(format!(
                "runtime distribution {:?} must stay within (0, {SECONDS_PER_DAY}]",
                self.runtime
            )));
        }
        Ok(())
    }
}

/// Poisson arrivals over `[0, duration)` with sizes and runtimes drawn from
/// the configured distributions. A pure function of `spec`.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<JobSet> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let gaps = Exp::new(spec.rate_per_hour / 3600.0).map_err(|e| Error::Config(e.to_string()))?;
    let weighted = match &spec.size {
        SizeDistribution::Weighted { weights, .. } => {
            Some(WeightedIndex::new(weights).map_err(|e| Error::Config(e.to_string()))?)
        }
        _ => None,
    };

    let mut jobs = Vec::new();
    let mut t = 0.0;
    loop {
        t += gaps.sample(&mut rng);
        if t >= spec.duration_s {
            break;
        }
        let size = match (&spec.size, &weighted) {
            (SizeDistribution::Constant { value }, _) => *value,
            (SizeDistribution::Uniform { min, max }, _) => rng.random_range(*min..=*max),
            (SizeDistribution::Weighted { values, .. }, Some(index)) => values[index.sample(&mut rng)],
            (SizeDistribution::Weighted { .. }, None) => unreachable!("weights validated above"),
        };
        let runtime = match spec.runtime {
            RuntimeDistribution::Constant { value } => value,
            RuntimeDistribution::Uniform { min, max } => rng.random_range(min..=max),
            RuntimeDistribution::LogUniform { min, max } => (min.ln() + rng.random::<f64>() * (max.ln() - min.ln()))
                .exp()
                .clamp(min, max),
        };
        let user = rng.random_range(1..=spec.users);
        let (submit, runtime) = if spec.integer_times {
            (t.floor(), runtime.ceil())
        } else {
            (t, runtime)
        };
        jobs.push(Job::new(jobs.len() as u64 + 1, user, submit, runtime, size)?);
    }
    Ok(JobSet::from_unique(jobs))
}
