//! Shows what each user behavior does to jobs inside and outside a window.

use drsim::behaviors::{apply_behavior, Behavior, DemandResponseWindow};
use drsim::Job;

fn main() -> drsim::Result<()> {
    let window = DemandResponseWindow::new(1000.0, 4600.0)?;
    let jobs = [
        Job::new(1, 1, 500.0, 1200.0, 16)?,
        Job::new(2, 1, 1000.0, 1200.0, 16)?,
        Job::new(3, 2, 3000.0, 900.0, 5)?,
        Job::new(4, 2, 4600.0, 600.0, 3)?,
    ];
    for behavior in Behavior::ALL {
        println!("{behavior}:");
        for job in &jobs {
            match apply_behavior(job, behavior, &window) {
                None => println!("  job {} dropped", job.id),
                Some(j) => println!(
                    "  job {} submit {:>6} (orig {:>6})  {:>2} cores x {:>7.1} s = {:>5.2} core-h",
                    j.id,
                    j.submit_time,
                    j.original_submit(),
                    j.size,
                    j.execution_time,
                    j.mass_core_hours()
                ),
            }
        }
    }
    Ok(())
}
