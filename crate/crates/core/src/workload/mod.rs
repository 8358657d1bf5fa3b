//! Jobs, job sets and the per-experiment workload slice.
//!
//! A trace (parsed from SWF or generated synthetically) is filtered, then
//! cut into three-day experiments centered on a demand-response window.

mod swf;
mod synthetic;

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::behaviors::DemandResponseWindow;
use crate::error::{Error, Result};

pub use swf::{parse_swf, parse_swf_str, write_swf, ParsedSwf, ProcessorField, SwfOptions};
pub use synthetic::{generate_synthetic, RuntimeDistribution, SizeDistribution, SyntheticSpec};

pub const SECONDS_PER_DAY: f64 = 86_400.0;
/// Experiments cover day 1 (warm-up), day 2 (event) and day 3 (recovery).
pub const EXPERIMENT_HORIZON: f64 = 3.0 * SECONDS_PER_DAY;
/// 16:00 expressed as seconds into the day.
pub const DEFAULT_WINDOW_ANCHOR: f64 = 16.0 * 3600.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct JobId(pub u64);

impl fmt::Display for JobId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct UserId(pub u64);

impl fmt::Display for UserId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// One job submission. Times are in seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct Job {
    pub id: JobId,
    pub user: UserId,
    pub submit_time: f64,
    pub execution_time: f64,
    /// Number of cores, all on a single machine.
    pub size: u32,
    /// Submission time before a behavior moved the job. `None` when the job
    /// was never moved.
    pub original_submit_time: Option<f64>,
}

impl Job {
    pub fn new(id: u64, user: u64, submit_time: f64, execution_time: f64, size: u32) -> Result<Self> {
        if !(submit_time.is_finite() && submit_time >= 0.0) {
            return Err(Error::Config(format!(
                "job {id}: submit time {submit_time} must be >= 0"
            )));
        }
        if !(execution_time.is_finite() && execution_time > 0.0) {
            return Err(Error::Config(format!(
                "job {id}: execution time {execution_time} must be > 0"
            )));
        }
        if size == 0 {
            return Err(Error::Config(format!("job {id}: size must be >= 1")));
        }
        Ok(Job {
            id: JobId(id),
            user: UserId(user),
            submit_time,
            execution_time,
            size,
            original_submit_time: None,
        })
    }

    /// Submission time used for FCFS ordering and corrected metrics.
    pub fn original_submit(&self) -> f64 {
        self.original_submit_time.unwrap_or(self.submit_time)
    }

    pub fn mass_core_seconds(&self) -> f64 {
        f64::from(self.size) * self.execution_time
    }

    pub fn mass_core_hours(&self) -> f64 {
        self.mass_core_seconds() / 3600.0
    }

    fn stream_order(&self, other: &Job) -> Ordering {
        self.submit_time
            .total_cmp(&other.submit_time)
            .then_with(|| self.id.cmp(&other.id))
    }
}

/// Jobs sorted by submit time, ties broken by id. Ids are unique.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct JobSet {
    jobs: Vec<Job>,
}

impl JobSet {
    pub fn new(mut jobs: Vec<Job>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(jobs.len());
        for job in &jobs {
            if !seen.insert(job.id) {
                return Err(Error::Config(format!("duplicate job id {}", job.id)));
            }
        }
        jobs.sort_by(Job::stream_order);
        Ok(JobSet { jobs })
    }

    pub fn empty() -> Self {
        JobSet::default()
    }

    /// Builds a set from jobs already known to have unique ids.
    pub(crate) fn from_unique(mut jobs: Vec<Job>) -> Self {
        jobs.sort_by(Job::stream_order);
        JobSet { jobs }
    }

    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Job> {
        self.jobs.iter()
    }

    pub fn as_slice(&self) -> &[Job] {
        &self.jobs
    }

    pub fn into_vec(self) -> Vec<Job> {
        self.jobs
    }

    pub fn total_mass_core_hours(&self) -> f64 {
        self.jobs.iter().map(Job::mass_core_hours).sum()
    }
}

impl<'a> IntoIterator for &'a JobSet {
    type Item = &'a Job;
    type IntoIter = std::slice::Iter<'a, Job>;

    fn into_iter(self) -> Self::IntoIter {
        self.jobs.iter()
    }
}

/// Limits applied to a raw trace before slicing. Boundary values are kept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JobFilter {
    pub max_execution_time: f64,
    pub max_size: u32,
}

impl Default for JobFilter {
    fn default() -> Self {
        JobFilter {
            max_execution_time: SECONDS_PER_DAY,
            max_size: 16,
        }
    }
}

impl JobFilter {
    pub fn accepts(&self, job: &Job) -> bool {
        job.execution_time <= self.max_execution_time && job.size <= self.max_size
    }

    pub fn apply(&self, jobs: &JobSet) -> JobSet {
        JobSet {
            jobs: jobs.iter().filter(|j| self.accepts(j)).cloned().collect(),
        }
    }
}

/// Drops jobs longer than one day or wider than 16 cores.
pub fn filter_jobs(jobs: &JobSet) -> JobSet {
    JobFilter::default().apply(jobs)
}

/// Three days of jobs rebased so that the experiment starts at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentWorkload {
    pub jobs: JobSet,
    pub horizon: f64,
    pub window: DemandResponseWindow,
}

/// Cuts a three-day experiment out of a trace.
///
/// `window_start_abs` is the window start in trace time and `anchor` the
/// number of seconds between day-2 midnight and the window start. The kept
/// range is `[window_start_abs - anchor - 1 day, ... + 3 days)`; the rebased
/// window starts at `1 day + anchor`.
pub fn slice_experiment(
    jobs: &JobSet,
    window_start_abs: f64,
    window_length: f64,
    anchor: f64,
) -> Result<ExperimentWorkload> {
    if window_length.is_nan() || window_length <= 0.0 {
        return Err(Error::Config(format!(
            "window length must be positive, got {window_length}"
        )));
    }
    if !(0.0..SECONDS_PER_DAY).contains(&anchor) {
        return Err(Error::Config(format!("window anchor {anchor} must lie within one day")));
    }
    let window = DemandResponseWindow::new(SECONDS_PER_DAY + anchor, SECONDS_PER_DAY + anchor + window_length)?;
    if window.end > EXPERIMENT_HORIZON {
        return Err(Error::Config(format!(
            "window [{}, {}) extends past the experiment horizon {}",
            window.start, window.end, EXPERIMENT_HORIZON
        )));
    }
    let origin = window_start_abs - window.start;
    let end = origin + EXPERIMENT_HORIZON;
    let sliced = jobs
        .iter()
        .filter(|j| j.submit_time >= origin && j.submit_time < end)
        .map(|j| {
            let mut job = j.clone();
            job.submit_time -= origin;
            job.original_submit_time = job.original_submit_time.map(|t| t - origin);
            job
        })
        .collect();
    Ok(ExperimentWorkload {
        jobs: JobSet { jobs: sliced },
        horizon: EXPERIMENT_HORIZON,
        window,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowStats {
    pub n_jobs_in_window: usize,
    pub fluid_mass_core_h: f64,
}

/// Count and computing mass of the jobs submitted inside the window.
pub fn window_stats(workload: &ExperimentWorkload) -> WindowStats {
    let (n, mass) = workload
        .jobs
        .iter()
        .filter(|j| workload.window.contains(j.submit_time))
        .fold((0, 0.0), |(n, mass), j| (n + 1, mass + j.mass_core_hours()));
    WindowStats {
        n_jobs_in_window: n,
        fluid_mass_core_h: mass,
    }
}
