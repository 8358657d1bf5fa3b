//! Experiment matrix execution: every (experiment, window length, behavior)
//! combination is simulated and compared against the rigid baseline of the
//! same experiment and window.

mod config;
mod output;
mod summary;

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Datelike, NaiveDate, Weekday};
use rayon::prelude::*;

pub use config::{default_synthetic, CampaignConfig, ExperimentSelection, FilterConfig, WorkloadSource};
pub use output::{
    emit_csv, emit_failures, emit_summary, emit_trace, format_float, parse_csv, read_csv, write_csv, RESULTS_HEADER,
};
pub use summary::{summarize, SummaryMetric, SummaryRow};

use crate::behaviors::{transform_workload, Behavior, BehaviorAssignment};
use crate::engine::{run, SimulationTrace};
use crate::error::{Error, Result};
use crate::metrics::{relative_gain, ExperimentResult};
use crate::workload::{
    generate_synthetic, parse_swf, slice_experiment, window_stats, JobSet, SwfOptions, UserId, EXPERIMENT_HORIZON,
    SECONDS_PER_DAY,
};

/// A filtered trace ready to be sliced.
#[derive(Debug, Clone)]
pub struct LoadedTrace {
    pub jobs: JobSet,
    /// Unix time of trace second 0, if known.
    pub epoch: Option<i64>,
    pub utc_offset_s: i64,
    /// SWF records dropped at parse time.
    pub skipped: usize,
    /// Jobs removed by the size/runtime filter.
    pub filtered_out: usize,
}

pub fn load_trace(config: &CampaignConfig) -> Result<LoadedTrace> {
    let source = &config.workload;
    let (jobs, epoch, skipped) = match (&source.swf, &source.synthetic) {
        (Some(path), _) => {
            let file = File::open(path).map_err(|e| Error::io(path, e))?;
            let options = SwfOptions {
                processor_field: source.processor_field,
            };
            let parsed = parse_swf(BufReader::new(file), &options).map_err(|e| match e {
                Error::Parse { line, message } => Error::Parse {
                    line,
                    message: format!("{}: {message}", path.display()),
                },
                other => other,
            })?;
            (
                parsed.jobs,
                source.unix_start_time.or(parsed.unix_start_time),
                parsed.skipped,
            )
        }
        (None, Some(spec)) => (generate_synthetic(spec)?, source.unix_start_time, 0),
        (None, None) => return Err(Error::Config("no workload configured".into())),
    };
    let before = jobs.len();
    let jobs = if config.filter.enabled {
        config.filter.limits.apply(&jobs)
    } else {
        jobs
    };
    Ok(LoadedTrace {
        filtered_out: before - jobs.len(),
        jobs,
        epoch,
        utc_offset_s: source.utc_offset_s,
        skipped,
    })
}

/// One three-day slice of the trace.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub id: String,
    /// Trace time of day-1 midnight.
    pub day1_start: f64,
}

impl ExperimentSpec {
    pub fn window_start(&self, anchor: f64) -> f64 {
        self.day1_start + SECONDS_PER_DAY + anchor
    }
}

impl LoadedTrace {
    /// Trace time of the first local midnight at or after trace start.
    fn day_origin(&self) -> f64 {
        match self.epoch {
            Some(epoch) => {
                let local = epoch + self.utc_offset_s;
                ((86_400 - local.rem_euclid(86_400)) % 86_400) as f64
            }
            None => 0.0,
        }
    }

    fn date_of(&self, trace_time: f64) -> Option<NaiveDate> {
        let epoch = self.epoch?;
        let local = epoch + self.utc_offset_s + trace_time.floor() as i64;
        DateTime::from_timestamp(local, 0).map(|d| d.date_naive())
    }

    fn spec_for_day(&self, day: u32) -> ExperimentSpec {
        let day1_start = self.day_origin() + f64::from(day) * SECONDS_PER_DAY;
        let id = match self.date_of(day1_start + SECONDS_PER_DAY) {
            Some(date) => date.format("%Y-%m-%d").to_string(),
            None => format!("day{day:04}"),
        };
        ExperimentSpec { id, day1_start }
    }

    fn last_submit(&self) -> f64 {
        self.jobs.as_slice().last().map_or(0.0, |j| j.submit_time)
    }

    pub fn experiments(&self, selection: &ExperimentSelection) -> Result<Vec<ExperimentSpec>> {
        let specs = match selection {
            ExperimentSelection::Days(days) => {
                let mut days = days.clone();
                days.sort_unstable();
                days.dedup();
                days.into_iter().map(|d| self.spec_for_day(d)).collect()
            }
            ExperimentSelection::All => {
                let origin = self.day_origin();
                let mut out = Vec::new();
                let mut day = 0u32;
                while origin + f64::from(day) * SECONDS_PER_DAY + EXPERIMENT_HORIZON <= self.last_submit() {
                    out.push(self.spec_for_day(day));
                    day += 1;
                }
                out
            }
            ExperimentSelection::Weekdays { from, to } => {
                if self.epoch.is_none() {
                    return Err(Error::Config(
                        "weekday selection needs the trace epoch (UnixStartTime header or unix_start_time)".into(),
                    ));
                }
                let first_date = self
                    .date_of(self.day_origin())
                    .ok_or_else(|| Error::Config("trace epoch out of range".into()))?;
                let mut out = Vec::new();
                for start_day in from.iter_days().take_while(|d| d <= to) {
                    let event_day = start_day.succ_opt().expect("date in range");
                    if matches!(event_day.weekday(), Weekday::Sat | Weekday::Sun) {
                        continue;
                    }
                    let offset = (start_day - first_date).num_days();
                    if offset < 0 {
                        return Err(Error::Config(format!(
                            "{start_day} precedes the first day of the trace"
                        )));
                    }
                    out.push(self.spec_for_day(offset as u32));
                }
                out
            }
        };
        Ok(specs)
    }
}

/// One row of the results table.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment_id: String,
    /// Window start in trace time.
    pub window_start: f64,
    pub window_length_s: f64,
    pub behavior: Behavior,
    pub result: ExperimentResult,
    pub gain_energy_in_pct: Option<f64>,
    pub gain_energy_after_pct: Option<f64>,
    pub gain_energy_overall_pct: Option<f64>,
    pub n_jobs_window: usize,
}

/// Rows sorted by experiment, window length, then behavior.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultsTable {
    pub rows: Vec<ResultRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FailedRun {
    pub experiment_id: String,
    pub window_length_s: f64,
    pub behavior: Behavior,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct CampaignOutcome {
    pub table: ResultsTable,
    pub failures: Vec<FailedRun>,
}

struct WorkItem<'a> {
    order: usize,
    experiment: &'a ExperimentSpec,
    window_length: f64,
}

fn run_item(
    item: &WorkItem<'_>,
    trace: &LoadedTrace,
    config: &CampaignConfig,
    behaviors: &[Behavior],
) -> (Vec<ResultRow>, Vec<FailedRun>) {
    let fail_all = |message: String| {
        behaviors
            .iter()
            .map(|&behavior| FailedRun {
                experiment_id: item.experiment.id.clone(),
                window_length_s: item.window_length,
                behavior,
                message: message.clone(),
            })
            .collect()
    };

    let window_start = item.experiment.window_start(config.window_anchor_s);
    let workload = match slice_experiment(&trace.jobs, window_start, item.window_length, config.window_anchor_s) {
        Ok(w) => w,
        Err(e) => return (Vec::new(), fail_all(e.to_string())),
    };
    let baseline = match run(&workload, &config.platform) {
        Ok(t) => t,
        Err(e) => return (Vec::new(), fail_all(format!("baseline: {e}"))),
    };
    let stats = window_stats(&workload);
    let base_result = ExperimentResult::compute(&baseline, &baseline, &workload.window, workload.horizon);

    let mut rows = Vec::with_capacity(behaviors.len());
    let mut failures = Vec::new();
    for &behavior in behaviors {
        let behavior_trace;
        let trace_ref: &SimulationTrace = if behavior == Behavior::Rigid {
            &baseline
        } else {
            let mut assignment = BehaviorAssignment::uniform(behavior);
            for (&user, &b) in &config.per_user {
                assignment = assignment.with_override(UserId(user), b);
            }
            match run(&transform_workload(&workload, &assignment), &config.platform) {
                Ok(t) => {
                    behavior_trace = t;
                    &behavior_trace
                }
                Err(e) => {
                    failures.push(FailedRun {
                        experiment_id: item.experiment.id.clone(),
                        window_length_s: item.window_length,
                        behavior,
                        message: e.to_string(),
                    });
                    continue;
                }
            }
        };

        if config.dump_traces {
            let stem = format!("{}_{}s_{}", item.experiment.id, item.window_length, behavior);
            if let Err(e) = emit_trace(trace_ref, &config.output_dir.join("traces"), &stem) {
                failures.push(FailedRun {
                    experiment_id: item.experiment.id.clone(),
                    window_length_s: item.window_length,
                    behavior,
                    message: e.to_string(),
                });
                continue;
            }
        }

        let result = ExperimentResult::compute(trace_ref, &baseline, &workload.window, workload.horizon);
        let gain = |value: f64, base: f64| {
            if behavior == Behavior::Rigid {
                Some(0.0)
            } else {
                relative_gain(value, base)
            }
        };
        rows.push(ResultRow {
            experiment_id: item.experiment.id.clone(),
            window_start,
            window_length_s: item.window_length,
            behavior,
            gain_energy_in_pct: gain(result.energy_in_kwh, base_result.energy_in_kwh),
            gain_energy_after_pct: gain(result.energy_after_kwh, base_result.energy_after_kwh),
            gain_energy_overall_pct: gain(result.energy_overall_kwh, base_result.energy_overall_kwh),
            n_jobs_window: stats.n_jobs_in_window,
            result,
        });
    }
    (rows, failures)
}

/// Runs the full cross-product described by `config` on an already loaded
/// trace. Output order does not depend on the worker count.
pub fn run_campaign_on(config: &CampaignConfig, trace: &LoadedTrace) -> Result<CampaignOutcome> {
    config.validate()?;
    let experiments = trace.experiments(&config.experiments)?;
    let windows = config.window_length_list();
    let behaviors = config.behavior_list();
    let items: Vec<WorkItem<'_>> = experiments
        .iter()
        .flat_map(|e| windows.iter().map(move |&w| (e, w)))
        .enumerate()
        .map(|(order, (experiment, window_length))| WorkItem {
            order,
            experiment,
            window_length,
        })
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let mut results: Vec<(usize, Vec<ResultRow>, Vec<FailedRun>)> = pool.install(|| {
        items
            .par_iter()
            .map(|item| {
                let (rows, failures) = run_item(item, trace, config, &behaviors);
                (item.order, rows, failures)
            })
            .collect()
    });
    results.sort_by_key(|(order, _, _)| *order);

    let mut outcome = CampaignOutcome::default();
    for (_, rows, failures) in results {
        outcome.table.rows.extend(rows);
        outcome.failures.extend(failures);
    }
    Ok(outcome)
}

pub fn run_campaign(config: &CampaignConfig) -> Result<CampaignOutcome> {
    config.validate()?;
    let trace = load_trace(config)?;
    run_campaign_on(config, &trace)
}

/// Paths of the files written by [`run_campaign_to_dir`].
#[derive(Debug, Clone)]
pub struct CampaignFiles {
    pub results: PathBuf,
    pub summary: PathBuf,
    pub failures: PathBuf,
}

/// Runs the campaign and writes `results.csv`, `summary.csv` and
/// `failures.csv` into the configured output directory.
pub fn run_campaign_to_dir(config: &CampaignConfig) -> Result<(CampaignOutcome, CampaignFiles)> {
    let dir: &Path = &config.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let outcome = run_campaign(config)?;
    let files = CampaignFiles {
        results: dir.join("results.csv"),
        summary: dir.join("summary.csv"),
        failures: dir.join("failures.csv"),
    };
    emit_csv(&outcome.table, &files.results)?;
    emit_summary(&summarize(&outcome.table), &files.summary)?;
    emit_failures(&outcome.failures, &files.failures)?;
    Ok((outcome, files))
}
