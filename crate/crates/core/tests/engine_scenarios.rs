mod common;

use drsim::behaviors::{transform_workload, Behavior, BehaviorAssignment, DemandResponseWindow};
use drsim::campaign::emit_trace;
use drsim::engine::run;
use drsim::metrics::{energy_in, relative_gain, ExperimentResult};
use drsim::platform::{MachineId, PlatformConfig};
use drsim::workload::{Job, JobSet};

use common::{brute_force_energy, workload};

fn job(id: u64, submit: f64, exec: f64, size: u32) -> Job {
    Job::new(id, id, submit, exec, size).unwrap()
}

fn window() -> DemandResponseWindow {
    DemandResponseWindow::new(144_000.0, 147_600.0).unwrap()
}

#[test]
fn small_jobs_share_one_machine() {
    let wl = workload(
        JobSet::new(vec![
            job(1, 0.0, 1000.0, 8),
            job(2, 0.0, 1000.0, 4),
            job(3, 10.0, 500.0, 4),
        ])
        .unwrap(),
        window(),
    );
    let trace = run(&wl, &PlatformConfig::with_machines(4)).unwrap();
    for j in &trace.jobs {
        assert_eq!(j.machine, MachineId(0), "job {}", j.id);
    }
    // Jobs 1 and 2 wait for the boot; job 3 arrives while the machine boots.
    let starts: Vec<f64> = trace.jobs.iter().map(|j| j.start).collect();
    assert_eq!(starts, vec![150.0, 150.0, 150.0]);
}

#[test]
fn freed_cores_are_reused_at_the_same_instant() {
    // Job 1 fills machine 0 until 1150; job 2 arrives exactly then.
    let wl = workload(
        JobSet::new(vec![job(1, 0.0, 1000.0, 16), job(2, 1150.0, 100.0, 16)]).unwrap(),
        window(),
    );
    let trace = run(&wl, &PlatformConfig::with_machines(2)).unwrap();
    assert_eq!(trace.jobs[1].start, 1150.0);
    assert_eq!(trace.jobs[1].machine, MachineId(0));
    let boots = trace
        .state_changes
        .iter()
        .filter(|c| c.state == drsim::platform::MachineState::SwitchingOn)
        .count();
    assert_eq!(boots, 1);
}

#[test]
fn delayed_jobs_start_at_window_end() {
    let w = window();
    let wl = workload(
        JobSet::new(vec![job(1, 144_100.0, 600.0, 2), job(2, 145_000.0, 600.0, 2)]).unwrap(),
        w,
    );
    let delayed = transform_workload(&wl, &BehaviorAssignment::uniform(Behavior::Delay));
    let base = run(&wl, &PlatformConfig::default()).unwrap();
    let trace = run(&delayed, &PlatformConfig::default()).unwrap();
    for j in &trace.jobs {
        assert_eq!(j.submit, w.end);
        assert_eq!(j.start, w.end + 150.0);
    }
    let r = ExperimentResult::compute(&trace, &base, &w, wl.horizon);
    assert_eq!(r.mean_wait_s, Some(150.0));
    // Corrected waits: 147600 + 150 - 144100 and 147600 + 150 - 145000.
    assert_eq!(r.mean_wait_corrected_s, Some((3650.0 + 2750.0) / 2.0));
    assert_eq!(
        r.energy_in_kwh,
        energy_in(
            &run(
                &transform_workload(&wl, &BehaviorAssignment::uniform(Behavior::Renounce)),
                &PlatformConfig::default()
            )
            .unwrap(),
            &w
        )
    );
}

#[test]
fn power_timeline_is_contiguous_and_integrates_to_total() {
    let wl = common::synthetic_experiment(42, 10.0, 3600.0);
    let cfg = PlatformConfig::with_machines(6);
    let trace = run(&wl, &cfg).unwrap();
    assert_eq!(trace.power.first().unwrap().start, 0.0);
    assert_eq!(trace.power.last().unwrap().end, trace.end_time);
    for pair in trace.power.windows(2) {
        assert_eq!(pair[0].end, pair[1].start);
        assert!(pair[0].end > pair[0].start);
    }
    let total = trace.energy_between(0.0, trace.end_time);
    assert!((total - trace.energy_joules).abs() <= 1e-9 * trace.energy_joules);
    let oracle = brute_force_energy(&trace, &cfg.power, cfg.machines, trace.end_time);
    assert!((oracle - trace.energy_joules).abs() <= 1e-6 * oracle);
}

#[test]
fn renounce_beats_degrad_when_unsaturated() {
    let mut jobs = vec![job(1, 50_000.0, 3600.0, 16)];
    jobs.extend((0..12).map(|i| job(10 + i, 144_000.0 + 200.0 * i as f64, 2400.0, 6)));
    let wl = workload(JobSet::new(jobs).unwrap(), window());
    let cfg = PlatformConfig::default();
    let base = run(&wl, &cfg).unwrap();
    let base_in = energy_in(&base, &wl.window);
    let gain = |b: Behavior| {
        let t = run(&transform_workload(&wl, &BehaviorAssignment::uniform(b)), &cfg).unwrap();
        relative_gain(energy_in(&t, &wl.window), base_in).unwrap()
    };
    let (renounce, degrad, rigid) = (gain(Behavior::Renounce), gain(Behavior::Degrad), gain(Behavior::Rigid));
    assert_eq!(rigid, 0.0);
    assert!(renounce >= degrad, "renounce {renounce} < degrad {degrad}");
    assert!(degrad > 0.0);
}

#[test]
fn trace_dump_writes_job_and_power_files() {
    let wl = workload(JobSet::new(vec![job(1, 0.0, 100.0, 1)]).unwrap(), window());
    let trace = run(&wl, &PlatformConfig::with_machines(1)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    emit_trace(&trace, dir.path(), "t").unwrap();
    let jobs = std::fs::read_to_string(dir.path().join("t_jobs.csv")).unwrap();
    assert_eq!(jobs.lines().count(), 2);
    assert!(jobs.lines().nth(1).unwrap().ends_with(",1,100,0"));
    let power = std::fs::read_to_string(dir.path().join("t_power.csv")).unwrap();
    assert_eq!(power.lines().next(), Some("start,end,watts"));
    assert_eq!(power.lines().nth(1), Some("0,150,100"));
}
