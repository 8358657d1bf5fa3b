//! Energy and scheduling metrics, relative gains and the fluid/residual
//! decomposition of the in-window computing mass.
//!
//! Means over an empty job set are `None` (reported as NA) rather than 0.

use crate::behaviors::DemandResponseWindow;
use crate::engine::{JobRecord, SimulationTrace};

const JOULES_PER_KWH: f64 = 3.6e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentResult {
    pub energy_in_kwh: f64,
    pub energy_after_kwh: f64,
    pub energy_overall_kwh: f64,
    pub mean_wait_s: Option<f64>,
    pub mean_slowdown: Option<f64>,
    pub mean_wait_corrected_s: Option<f64>,
    pub mean_slowdown_corrected: Option<f64>,
    pub fluid_core_h: f64,
    pub residual_core_h: f64,
    pub fluid_ratio: Option<f64>,
}

impl ExperimentResult {
    /// Metrics of `trace`, with the fluid/residual split taken from the
    /// rigid `baseline` of the same scenario.
    pub fn compute(
        trace: &SimulationTrace,
        baseline: &SimulationTrace,
        window: &DemandResponseWindow,
        horizon: f64,
    ) -> Self {
        let energy_in_kwh = energy_in(trace, window);
        let energy_after_kwh = energy_after(trace, window, horizon);
        let split = fluid_residual(baseline, window);
        ExperimentResult {
            energy_in_kwh,
            energy_after_kwh,
            energy_overall_kwh: energy_in_kwh + energy_after_kwh,
            mean_wait_s: mean_waiting_time(trace, window.start, horizon, false),
            mean_slowdown: mean_slowdown(trace, window.start, horizon, false),
            mean_wait_corrected_s: mean_waiting_time(trace, window.start, horizon, true),
            mean_slowdown_corrected: mean_slowdown(trace, window.start, horizon, true),
            fluid_core_h: split.fluid_core_h,
            residual_core_h: split.residual_core_h,
            fluid_ratio: split.fluid_ratio(),
        }
    }
}

pub fn energy_in(trace: &SimulationTrace, window: &DemandResponseWindow) -> f64 {
    trace.energy_between(window.start, window.end) / JOULES_PER_KWH
}

/// Energy from the end of the window to `horizon`, in kWh.
pub fn energy_after(trace: &SimulationTrace, window: &DemandResponseWindow, horizon: f64) -> f64 {
    trace.energy_between(window.end, horizon) / JOULES_PER_KWH
}

fn submit_basis(job: &JobRecord, corrected: bool) -> f64 {
    if corrected {
        job.original_submit
    } else {
        job.submit
    }
}

fn mean_over<F>(trace: &SimulationTrace, from: f64, horizon: f64, corrected: bool, value: F) -> Option<f64>
where
    F: Fn(&JobRecord, f64) -> f64,
{
    let (n, sum) = trace
        .jobs
        .iter()
        .filter(|j| {
            let basis = submit_basis(j, corrected);
            basis >= from && basis < horizon
        })
        .fold((0usize, 0.0), |(n, sum), j| {
            (n + 1, sum + value(j, submit_basis(j, corrected)))
        });
    (n > 0).then(|| sum / n as f64)
}

/// Mean of `start - submit` over jobs submitted in `[from, horizon)`.
/// The corrected variant uses the submission time before any delay.
pub fn mean_waiting_time(trace: &SimulationTrace, from: f64, horizon: f64, corrected: bool) -> Option<f64> {
    mean_over(trace, from, horizon, corrected, |j, submit| j.start - submit)
}

/// Mean of `(finish - submit) / execution_time` over the same jobs as
/// [`mean_waiting_time`].
pub fn mean_slowdown(trace: &SimulationTrace, from: f64, horizon: f64, corrected: bool) -> Option<f64> {
    mean_over(trace, from, horizon, corrected, |j, submit| {
        (j.finish - submit) / j.execution_time
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidResidual {
    pub fluid_core_h: f64,
    pub residual_core_h: f64,
}

impl FluidResidual {
    pub fn fluid_ratio(&self) -> Option<f64> {
        let total = self.fluid_core_h + self.residual_core_h;
        (total > 0.0).then(|| self.fluid_core_h / total)
    }
}

/// Fluid mass: full mass of jobs submitted in the window. Residual mass:
/// the part of pre-window jobs' execution that overlaps the window.
pub fn fluid_residual(baseline: &SimulationTrace, window: &DemandResponseWindow) -> FluidResidual {
    let mut split = FluidResidual {
        fluid_core_h: 0.0,
        residual_core_h: 0.0,
    };
    for job in &baseline.jobs {
        if window.contains(job.submit) {
            split.fluid_core_h += job.mass_core_hours();
        } else if job.submit < window.start {
            split.residual_core_h += f64::from(job.size) * window.overlap(job.start, job.finish) / 3600.0;
        }
    }
    split
}

/// Saving in percent of the baseline; positive means the behavior uses less.
pub fn relative_gain(value: f64, baseline: f64) -> Option<f64> {
    (baseline > 0.0).then(|| 100.0 * (baseline - value) / baseline)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::PowerSegment;
    use crate::platform::MachineId;
    use crate::workload::{JobId, UserId};

    fn record(submit: f64, original: f64, start: f64, exec: f64, size: u32) -> JobRecord {
        JobRecord {
            id: JobId(1),
            user: UserId(1),
            submit,
            original_submit: original,
            start,
            finish: start + exec,
            size,
            execution_time: exec,
            machine: MachineId(0),
        }
    }

    fn trace(jobs: Vec<JobRecord>, power: Vec<PowerSegment>, final_watts: f64) -> SimulationTrace {
        let end_time = power.last().map_or(0.0, |s| s.end);
        SimulationTrace {
            jobs,
            power,
            state_changes: vec![],
            energy_joules: 0.0,
            end_time,
            final_watts,
        }
    }

    fn window(len: f64) -> DemandResponseWindow {
        DemandResponseWindow::new(144_000.0, 144_000.0 + len).unwrap()
    }

    #[test]
    fn energy_all_off() {
        let off = 104.0 * 9.75;
        let t = trace(
            vec![],
            vec![PowerSegment {
                start: 0.0,
                end: 259_200.0,
                watts: off,
            }],
            off,
        );
        assert!((energy_in(&t, &window(3600.0)) - 1.014).abs() < 1e-12);
        let expected_after = off * (259_200.0 - 158_400.0) / 3.6e6;
        assert!((energy_after(&t, &window(14_400.0), 259_200.0) - expected_after).abs() < 1e-12);
        let w = DemandResponseWindow::new(144_000.0, 259_200.0).unwrap();
        assert_eq!(energy_after(&t, &w, 259_200.0), 0.0);
    }

    #[test]
    fn energy_one_idle_machine() {
        let watts = 100.0 + 103.0 * 9.75;
        let t = trace(
            vec![],
            vec![PowerSegment {
                start: 0.0,
                end: 259_200.0,
                watts,
            }],
            104.0 * 9.75,
        );
        assert!((energy_in(&t, &window(3600.0)) - watts / 1000.0).abs() < 1e-12);
    }

    #[test]
    fn waiting_and_slowdown_definitions() {
        let t = trace(vec![record(100.0, 100.0, 250.0, 100.0, 1)], vec![], 0.0);
        assert_eq!(mean_waiting_time(&t, 0.0, 259_200.0, false), Some(150.0));
        let t = trace(vec![record(0.0, 0.0, 150.0, 100.0, 1)], vec![], 0.0);
        assert_eq!(mean_slowdown(&t, 0.0, 259_200.0, false), Some(2.5));
        let t = trace(vec![record(0.0, 0.0, 0.0, 100.0, 1)], vec![], 0.0);
        assert_eq!(mean_slowdown(&t, 0.0, 259_200.0, false), Some(1.0));
    }

    #[test]
    fn corrected_uses_original_submission() {
        let t = trace(vec![record(147_600.0, 145_800.0, 147_600.0, 60.0, 1)], vec![], 0.0);
        assert_eq!(mean_waiting_time(&t, 144_000.0, 259_200.0, false), Some(0.0));
        assert_eq!(mean_waiting_time(&t, 144_000.0, 259_200.0, true), Some(1800.0));
    }

    #[test]
    fn empty_scope_is_undefined() {
        let t = trace(vec![record(10.0, 10.0, 10.0, 5.0, 1)], vec![], 0.0);
        assert_eq!(mean_waiting_time(&t, 144_000.0, 259_200.0, false), None);
        assert_eq!(mean_slowdown(&t, 144_000.0, 259_200.0, true), None);
    }

    #[test]
    fn residual_counts_window_overlap() {
        let t = trace(vec![record(140_000.0, 140_000.0, 143_000.0, 2000.0, 4)], vec![], 0.0);
        let split = fluid_residual(&t, &window(3600.0));
        assert_eq!(split.fluid_core_h, 0.0);
        assert!((split.residual_core_h - 4.0 * 1000.0 / 3600.0).abs() < 1e-12);
        assert_eq!(split.fluid_ratio(), Some(0.0));

        let none = fluid_residual(
            &trace(vec![record(10.0, 10.0, 10.0, 5.0, 1)], vec![], 0.0),
            &window(3600.0),
        );
        assert_eq!(
            (none.fluid_core_h, none.residual_core_h, none.fluid_ratio()),
            (0.0, 0.0, None)
        );

        let fluid = fluid_residual(
            &trace(vec![record(144_100.0, 144_100.0, 144_100.0, 1800.0, 4)], vec![], 0.0),
            &window(3600.0),
        );
        assert_eq!(fluid.fluid_core_h, 2.0);
        assert_eq!(fluid.fluid_ratio(), Some(1.0));
    }

    #[test]
    fn gain_sign_convention() {
        assert_eq!(relative_gain(5.0, 5.0), Some(0.0));
        assert!((relative_gain(6.7, 10.0).unwrap() - 33.0).abs() < 1e-9);
        assert!(relative_gain(12.0, 10.0).unwrap() < 0.0);
        assert_eq!(relative_gain(1.0, 0.0), None);
    }
}
