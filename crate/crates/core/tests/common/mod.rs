//! Independent checkers shared by the integration and acceptance suites.
#![allow(dead_code)]

use drsim::behaviors::DemandResponseWindow;
use drsim::engine::{PassObserver, SimulationTrace};
use drsim::platform::{MachineState, Platform, PowerParams};
use drsim::scheduler::{Decisions, WaitQueue};
use drsim::workload::{
    generate_synthetic, slice_experiment, ExperimentWorkload, JobSet, RuntimeDistribution, SizeDistribution,
    SyntheticSpec, DEFAULT_WINDOW_ANCHOR,
};

/// Steps time in 1 s increments and sums machine power, rebuilding each
/// machine's state from the transition log and its busy cores from the job
/// records. Exact when every event time is an integer.
pub fn brute_force_energy(trace: &SimulationTrace, params: &PowerParams, machines: usize, end: f64) -> f64 {
    let end = end.ceil() as i64;
    let mut changes: Vec<Vec<(f64, MachineState)>> = vec![Vec::new(); machines];
    for c in &trace.state_changes {
        changes[c.machine.0].push((c.time, c.state));
    }
    let mut deltas: Vec<Vec<(f64, i64)>> = vec![Vec::new(); machines];
    for j in &trace.jobs {
        deltas[j.machine.0].push((j.start, i64::from(j.size)));
        deltas[j.machine.0].push((j.finish, -i64::from(j.size)));
    }
    for d in &mut deltas {
        d.sort_by(|a, b| a.0.total_cmp(&b.0));
    }

    let mut total = 0.0;
    for m in 0..machines {
        let (mut ci, mut di) = (0usize, 0usize);
        let mut state = MachineState::Off;
        let mut busy = 0i64;
        for t in 0..end {
            let t = t as f64;
            while ci < changes[m].len() && changes[m][ci].0 <= t {
                state = changes[m][ci].1;
                ci += 1;
            }
            while di < deltas[m].len() && deltas[m][di].0 <= t {
                busy += deltas[m][di].1;
                di += 1;
            }
            total += match state {
                MachineState::Off => params.p_off,
                MachineState::SwitchingOn => params.p_son,
                MachineState::SwitchingOff => params.p_soff,
                MachineState::On => params.p_idle + busy as f64 * params.p_core,
            };
        }
    }
    total
}

/// Checks per-pass invariants: capacity, state/core consistency, no idle
/// machine left on, placement timing and work conservation.
#[derive(Debug, Default)]
pub struct SafetyChecker {
    pub passes: usize,
    pub violations: Vec<String>,
}

impl PassObserver for SafetyChecker {
    fn after_pass(&mut self, now: f64, platform: &Platform, queue: &WaitQueue, decisions: &Decisions) {
        self.passes += 1;
        for m in platform.machines() {
            if m.busy_cores + m.reserved_cores > m.capacity {
                self.violations.push(format!("t={now}: machine {} over capacity", m.id));
            }
            if m.busy_cores > 0 && m.state != MachineState::On {
                self.violations
                    .push(format!("t={now}: machine {} busy while {}", m.id, m.state));
            }
            if m.reserved_cores > 0 && !matches!(m.state, MachineState::On | MachineState::SwitchingOn) {
                self.violations
                    .push(format!("t={now}: machine {} reserved while {}", m.id, m.state));
            }
            if m.state == MachineState::On && m.busy_cores == 0 && m.reserved_cores == 0 {
                self.violations
                    .push(format!("t={now}: machine {} idle and on after pass", m.id));
            }
        }
        for p in &decisions.placements {
            if p.start_time < p.job.submit_time || p.start_time < now {
                self.violations
                    .push(format!("t={now}: job {} starts at {}", p.job.id, p.start_time));
            }
        }
        for job in queue.iter() {
            let fits = platform.machines().iter().any(|m| {
                matches!(m.state, MachineState::On | MachineState::SwitchingOn)
                    && m.capacity - m.busy_cores - m.reserved_cores >= job.size
            });
            let bootable = platform
                .machines()
                .iter()
                .any(|m| m.state == MachineState::Off && m.capacity >= job.size);
            if fits || bootable {
                self.violations
                    .push(format!("t={now}: job {} left queued with room available", job.id));
            }
        }
    }
}

/// Each machine must follow Off (SwitchingOn On SwitchingOff Off)*, possibly
/// stopping mid-cycle.
pub fn state_sequences_legal(trace: &SimulationTrace, machines: usize) -> Result<(), String> {
    let mut seqs: Vec<Vec<MachineState>> = vec![Vec::new(); machines];
    for c in &trace.state_changes {
        seqs[c.machine.0].push(c.state);
    }
    for (m, seq) in seqs.iter().enumerate() {
        if seq.first() != Some(&MachineState::Off) {
            return Err(format!("machine {m} does not start off: {seq:?}"));
        }
        for pair in seq.windows(2) {
            let ok = matches!(
                (pair[0], pair[1]),
                (MachineState::Off, MachineState::SwitchingOn)
                    | (MachineState::SwitchingOn, MachineState::On)
                    | (MachineState::On, MachineState::SwitchingOff)
                    | (MachineState::SwitchingOff, MachineState::Off)
            );
            if !ok {
                return Err(format!(
                    "machine {m}: illegal transition {:?} -> {:?}",
                    pair[0], pair[1]
                ));
            }
        }
    }
    Ok(())
}

/// Three days of Poisson arrivals on integer seconds, window at 16:00 on day 2.
pub fn synthetic_experiment(seed: u64, rate_per_hour: f64, window_length: f64) -> ExperimentWorkload {
    let spec = SyntheticSpec {
        seed,
        rate_per_hour,
        duration_s: 3.0 * 86_400.0,
        size: SizeDistribution::Uniform { min: 1, max: 16 },
        runtime: RuntimeDistribution::LogUniform {
            min: 60.0,
            max: 14_400.0,
        },
        users: 10,
        integer_times: true,
    };
    let jobs = generate_synthetic(&spec).expect("valid spec");
    slice_experiment(&jobs, 144_000.0, window_length, DEFAULT_WINDOW_ANCHOR).expect("valid window")
}

pub fn workload(jobs: JobSet, window: DemandResponseWindow) -> ExperimentWorkload {
    ExperimentWorkload {
        jobs,
        horizon: drsim::workload::EXPERIMENT_HORIZON,
        window,
    }
}

/// Sum of size × execution time in core-hours, accumulated in job-id order
/// so that reordered streams sum identically.
pub fn mass_by_id(jobs: &JobSet) -> f64 {
    let mut masses: Vec<(u64, f64)> = jobs.iter().map(|j| (j.id.0, j.mass_core_hours())).collect();
    masses.sort_by_key(|(id, _)| *id);
    masses.into_iter().map(|(_, m)| m).sum()
}
