//! Splits the in-window computing mass into fluid (submitted during the
//! window) and residual (still running from before) parts, and compares the
//! fluid share with the energy saved by renouncing.

use drsim::behaviors::{transform_workload, Behavior, BehaviorAssignment, DemandResponseWindow};
use drsim::engine::run;
use drsim::metrics::{energy_in, fluid_residual, relative_gain};
use drsim::workload::EXPERIMENT_HORIZON;
use drsim::{ExperimentWorkload, Job, JobSet, PlatformConfig};

fn main() -> drsim::Result<()> {
    let window = DemandResponseWindow::new(144_000.0, 147_600.0)?;
    let mut jobs = Vec::new();
    for i in 0..4 {
        jobs.push(Job::new(i + 1, 1, 140_000.0, 10_000.0, 16)?);
    }
    for i in 0..8 {
        jobs.push(Job::new(10 + i, 2, 144_000.0 + 60.0 * i as f64, 3600.0, 8)?);
    }
    let experiment = ExperimentWorkload {
        jobs: JobSet::new(jobs)?,
        horizon: EXPERIMENT_HORIZON,
        window,
    };
    let platform = PlatformConfig::default();

    let baseline = run(&experiment, &platform)?;
    let split = fluid_residual(&baseline, &window);
    let renounced = run(
        &transform_workload(&experiment, &BehaviorAssignment::uniform(Behavior::Renounce)),
        &platform,
    )?;
    let gain = relative_gain(energy_in(&renounced, &window), energy_in(&baseline, &window));

    println!("fluid mass    {:>7.1} core-h", split.fluid_core_h);
    println!("residual mass {:>7.1} core-h", split.residual_core_h);
    println!("fluid ratio   {:>7.3}", split.fluid_ratio().unwrap_or(f64::NAN));
    println!("renounce gain {:>7.2} %", gain.unwrap_or(f64::NAN));
    Ok(())
}
