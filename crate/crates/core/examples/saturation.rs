//! A platform with a deep queue at the window start: jobs submitted during
//! the window never reach a machine before it closes, so renouncing them
//! saves nothing even though they carry most of the in-window mass.

use drsim::behaviors::{transform_workload, Behavior, BehaviorAssignment, DemandResponseWindow};
use drsim::engine::run;
use drsim::metrics::{energy_in, fluid_residual, relative_gain};
use drsim::workload::EXPERIMENT_HORIZON;
use drsim::{ExperimentWorkload, Job, JobSet, PlatformConfig};

fn main() -> drsim::Result<()> {
    let window = DemandResponseWindow::new(144_000.0, 147_600.0)?;
    let mut jobs = Vec::new();
    for i in 0..104 {
        jobs.push(Job::new(1 + i, 1, 100_000.0, 30_000.0, 16)?);
    }
    for i in 0..200 {
        jobs.push(Job::new(1000 + i, 2, 100_000.0 + i as f64, 20_000.0, 16)?);
    }
    for i in 0..240 {
        jobs.push(Job::new(5000 + i, 3, 144_000.0 + 15.0 * i as f64, 3600.0, 8)?);
    }
    let experiment = ExperimentWorkload {
        jobs: JobSet::new(jobs)?,
        horizon: EXPERIMENT_HORIZON,
        window,
    };
    let platform = PlatformConfig::default();

    let baseline = run(&experiment, &platform)?;
    let queued = baseline
        .jobs
        .iter()
        .filter(|j| j.submit < window.start && j.start >= window.start)
        .count();
    let split = fluid_residual(&baseline, &window);
    let renounced = run(
        &transform_workload(&experiment, &BehaviorAssignment::uniform(Behavior::Renounce)),
        &platform,
    )?;

    println!("queued at window start: {queued} jobs");
    println!("fluid ratio:            {:.3}", split.fluid_ratio().unwrap_or(f64::NAN));
    println!(
        "renounce gain:          {:.3} %",
        relative_gain(energy_in(&renounced, &window), energy_in(&baseline, &window)).unwrap_or(f64::NAN)
    );
    Ok(())
}
