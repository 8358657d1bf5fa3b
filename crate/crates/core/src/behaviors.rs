//! User submission behaviors applied inside the demand-response window.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::workload::{ExperimentWorkload, Job, JobSet, UserId};

/// Half-open interval `[start, end)` in experiment seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DemandResponseWindow {
    pub start: f64,
    pub end: f64,
}

impl DemandResponseWindow {
    pub fn new(start: f64, end: f64) -> Result<Self> {
        if !(start >= 0.0 && start < end && end.is_finite()) {
            return Err(Error::Config(format!("invalid window [{start}, {end})")));
        }
        Ok(DemandResponseWindow { start, end })
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.start && t < self.end
    }

    pub fn length(&self) -> f64 {
        self.end - self.start
    }

    /// Length of `[from, to) ∩ [start, end)`.
    pub fn overlap(&self, from: f64, to: f64) -> f64 {
        (to.min(self.end) - from.max(self.start)).max(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Behavior {
    Rigid,
    Renounce,
    Delay,
    Degrad,
    Reconfig,
}

impl Behavior {
    pub const ALL: [Behavior; 5] = [
        Behavior::Rigid,
        Behavior::Renounce,
        Behavior::Delay,
        Behavior::Degrad,
        Behavior::Reconfig,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Behavior::Rigid => "rigid",
            Behavior::Renounce => "renounce",
            Behavior::Delay => "delay",
            Behavior::Degrad => "degrad",
            Behavior::Reconfig => "reconfig",
        }
    }
}

impl fmt::Display for Behavior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Behavior {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Behavior::ALL
            .into_iter()
            .find(|b| b.as_str() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::Config(format!("unknown behavior {s:?}")))
    }
}

/// Resolves each user to one behavior: a default plus optional overrides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BehaviorAssignment {
    pub default: Behavior,
    pub per_user: BTreeMap<UserId, Behavior>,
}

impl BehaviorAssignment {
    pub fn uniform(behavior: Behavior) -> Self {
        BehaviorAssignment {
            default: behavior,
            per_user: BTreeMap::new(),
        }
    }

    pub fn with_override(mut self, user: UserId, behavior: Behavior) -> Self {
        self.per_user.insert(user, behavior);
        self
    }

    pub fn resolve(&self, user: UserId) -> Behavior {
        self.per_user.get(&user).copied().unwrap_or(self.default)
    }
}

fn half_up(size: u32) -> u32 {
    size.div_ceil(2)
}

/// Applies one behavior to one job. Jobs submitted outside the window pass
/// through untouched; `None` means the job is not submitted at all.
pub fn apply_behavior(job: &Job, behavior: Behavior, window: &DemandResponseWindow) -> Option<Job> {
    if !window.contains(job.submit_time) {
        return Some(job.clone());
    }
    let mut out = job.clone();
    match behavior {
        Behavior::Rigid => {}
        Behavior::Renounce => return None,
        Behavior::Delay => {
            out.original_submit_time = Some(job.original_submit());
            out.submit_time = window.end;
        }
        Behavior::Degrad => out.size = half_up(job.size),
        Behavior::Reconfig => {
            out.size = half_up(job.size);
            out.execution_time = f64::from(job.size) * job.execution_time / f64::from(out.size);
        }
    }
    Some(out)
}

pub fn transform_workload(workload: &ExperimentWorkload, assignment: &BehaviorAssignment) -> ExperimentWorkload {
    let jobs = workload
        .jobs
        .iter()
        .filter_map(|j| apply_behavior(j, assignment.resolve(j.user), &workload.window))
        .collect();
    ExperimentWorkload {
        jobs: JobSet::from_unique(jobs),
        horizon: workload.horizon,
        window: workload.window,
    }
}
