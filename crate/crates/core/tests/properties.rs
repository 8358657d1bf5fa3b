mod common;

use proptest::prelude::*;

use drsim::behaviors::{apply_behavior, Behavior, DemandResponseWindow};
use drsim::engine::run;
use drsim::platform::PlatformConfig;
use drsim::workload::{
    filter_jobs, parse_swf_str, slice_experiment, write_swf, Job, JobSet, SwfOptions, DEFAULT_WINDOW_ANCHOR,
    EXPERIMENT_HORIZON,
};

use common::{brute_force_energy, workload};

fn arb_jobs(max_exec: f64, max_size: u32, max_submit: f64) -> impl Strategy<Value = JobSet> {
    prop::collection::vec((0.0..max_submit, 1.0..max_exec, 1..=max_size, 0u64..20), 0..60).prop_map(|raw| {
        let jobs = raw
            .into_iter()
            .enumerate()
            .map(|(i, (s, e, p, u))| Job::new(i as u64 + 1, u, s.floor(), e.ceil(), p).unwrap())
            .collect();
        JobSet::new(jobs).unwrap()
    })
}

fn arb_behavior() -> impl Strategy<Value = Behavior> {
    prop::sample::select(Behavior::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn filter_is_idempotent(jobs in arb_jobs(200_000.0, 64, 1e6)) {
        let once = filter_jobs(&jobs);
        prop_assert!(once.iter().all(|j| j.execution_time <= 86_400.0 && j.size <= 16));
        prop_assert_eq!(filter_jobs(&once), once);
    }

    #[test]
    fn swf_round_trip(jobs in arb_jobs(100_000.0, 32, 1e7), epoch in 1_000_000_000i64..2_000_000_000) {
        let mut buf = Vec::new();
        write_swf(&jobs, Some(epoch), &mut buf).unwrap();
        let parsed = parse_swf_str(std::str::from_utf8(&buf).unwrap(), &SwfOptions::default()).unwrap();
        prop_assert_eq!(parsed.unix_start_time, Some(epoch));
        prop_assert_eq!(parsed.skipped, 0);
        prop_assert_eq!(parsed.jobs, jobs);
    }

    #[test]
    fn slice_keeps_three_days(jobs in arb_jobs(20_000.0, 16, 800_000.0), day in 0u32..5, len in 600u32..20_000) {
        let len = f64::from(len);
        let ws = 86_400.0 * (day as f64 + 1.0) + DEFAULT_WINDOW_ANCHOR;
        let wl = slice_experiment(&jobs, ws, len, DEFAULT_WINDOW_ANCHOR).unwrap();
        prop_assert_eq!(wl.window.start, 86_400.0 + DEFAULT_WINDOW_ANCHOR);
        prop_assert_eq!(wl.window.length(), len);
        let origin = ws - wl.window.start;
        let expected = jobs.iter().filter(|j| j.submit_time >= origin && j.submit_time < origin + EXPERIMENT_HORIZON).count();
        prop_assert_eq!(wl.jobs.len(), expected);
        prop_assert!(wl.jobs.iter().all(|j| j.submit_time >= 0.0 && j.submit_time < EXPERIMENT_HORIZON));
    }

    #[test]
    fn behaviors_only_touch_window_jobs(
        submit in 0.0..10_000.0f64, exec in 1.0..5000.0f64, size in 1u32..=16, b in arb_behavior()
    ) {
        let w = DemandResponseWindow::new(3000.0, 6000.0).unwrap();
        let j = Job::new(1, 1, submit, exec, size).unwrap();
        let out = apply_behavior(&j, b, &w);
        if !w.contains(submit) || b == Behavior::Rigid {
            prop_assert_eq!(out, Some(j));
            return Ok(());
        }
        match b {
            Behavior::Renounce => prop_assert!(out.is_none()),
            Behavior::Delay => {
                let o = out.unwrap();
                prop_assert_eq!(o.submit_time, w.end);
                prop_assert_eq!(o.original_submit(), submit);
                prop_assert_eq!((o.size, o.execution_time), (size, exec));
            }
            Behavior::Degrad => {
                let o = out.unwrap();
                prop_assert_eq!(o.size, size.div_ceil(2));
                prop_assert_eq!(o.execution_time, exec);
            }
            Behavior::Reconfig => {
                let o = out.unwrap();
                prop_assert_eq!(o.size, size.div_ceil(2));
                let rel = (o.mass_core_seconds() - j.mass_core_seconds()).abs() / j.mass_core_seconds();
                prop_assert!(rel <= 1e-12);
            }
            Behavior::Rigid => unreachable!(),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn energy_matches_oracle_and_timeline_boundaries_are_mutations(
        jobs in arb_jobs(30_000.0, 16, 250_000.0), machines in 1usize..5
    ) {
        let w = DemandResponseWindow::new(144_000.0, 147_600.0).unwrap();
        let wl = workload(jobs, w);
        let cfg = PlatformConfig::with_machines(machines);
        let trace = run(&wl, &cfg).unwrap();

        prop_assert!(trace.energy_joules >= 0.0);
        let mut last = 0.0;
        for t in [0.0, 1000.0, 144_000.0, 147_600.0, trace.end_time] {
            let e = trace.energy_between(0.0, t);
            prop_assert!(e >= last);
            last = e;
        }
        let oracle = brute_force_energy(&trace, &cfg.power, machines, trace.end_time);
        prop_assert!((oracle - trace.energy_joules).abs() <= 1e-6 * oracle.max(1.0));

        let mut mutations: Vec<f64> = trace.state_changes.iter().map(|c| c.time).collect();
        for j in &trace.jobs {
            mutations.push(j.start);
            mutations.push(j.finish);
        }
        for seg in trace.power.iter().skip(1) {
            prop_assert!(mutations.contains(&seg.start), "boundary {} is not a mutation instant", seg.start);
        }
    }
}
