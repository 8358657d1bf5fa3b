//! Slices a synthetic trace around one demand-response window and compares
//! every behavior against the rigid baseline.

use drsim::behaviors::{transform_workload, Behavior, BehaviorAssignment};
use drsim::engine::run;
use drsim::metrics::{relative_gain, ExperimentResult};
use drsim::workload::{generate_synthetic, slice_experiment, DEFAULT_WINDOW_ANCHOR};
use drsim::{campaign::default_synthetic, PlatformConfig};

fn main() -> drsim::Result<()> {
    let jobs = generate_synthetic(&default_synthetic())?;
    // Window at 16:00 on day 3 of the trace, one hour long.
    let window_start = 3.0 * 86_400.0 + DEFAULT_WINDOW_ANCHOR;
    let experiment = slice_experiment(&jobs, window_start, 3600.0, DEFAULT_WINDOW_ANCHOR)?;
    let platform = PlatformConfig::default();
    let baseline = run(&experiment, &platform)?;

    println!("{} jobs in the three-day slice", experiment.jobs.len());
    println!(
        "{:<9} {:>9} {:>8} {:>10} {:>9} {:>10}",
        "behavior", "E_in kWh", "gain %", "E_after", "wait s", "corr. wait"
    );
    for behavior in Behavior::ALL {
        let variant = transform_workload(&experiment, &BehaviorAssignment::uniform(behavior));
        let trace = run(&variant, &platform)?;
        let r = ExperimentResult::compute(&trace, &baseline, &experiment.window, experiment.horizon);
        let base = ExperimentResult::compute(&baseline, &baseline, &experiment.window, experiment.horizon);
        println!(
            "{:<9} {:>9.2} {:>8.2} {:>10.1} {:>9.1} {:>10.1}",
            behavior,
            r.energy_in_kwh,
            relative_gain(r.energy_in_kwh, base.energy_in_kwh).unwrap_or(f64::NAN),
            r.energy_after_kwh,
            r.mean_wait_s.unwrap_or(f64::NAN),
            r.mean_wait_corrected_s.unwrap_or(f64::NAN),
        );
    }
    Ok(())
}
