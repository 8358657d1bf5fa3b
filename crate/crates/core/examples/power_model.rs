//! Drives one machine through a boot, a job and a shutdown, printing power
//! and accumulated energy at each step.

use drsim::platform::{MachineId, Platform, PlatformConfig};

fn main() -> drsim::Result<()> {
    let mut platform = Platform::new(&PlatformConfig::with_machines(2))?;
    let m = MachineId(0);
    let report = |p: &Platform, label: &str| {
        println!(
            "{label:<24} t={:>6}  {:<12} {:>8.2} W  {:>10.1} J",
            p.last_update(),
            p.machine(m).state,
            p.power(),
            p.energy_joules()
        );
    };

    report(&platform, "start");
    platform.begin_switch_on(m, 0.0)?;
    platform.reserve(m, 12)?;
    report(&platform, "boot requested");
    platform.complete_switch_on(m, 150.0)?;
    platform.commit(m, 12)?;
    report(&platform, "booted, job running");
    platform.release(m, 12)?;
    platform.accumulate_energy(3750.0)?;
    platform.begin_switch_off(m, 3750.0)?;
    report(&platform, "job done, switching off");
    platform.complete_switch_off(m, 3756.0)?;
    report(&platform, "off");
    Ok(())
}
