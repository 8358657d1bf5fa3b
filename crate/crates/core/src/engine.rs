//! Discrete-event loop: submissions, scheduling passes, machine transitions
//! and energy accounting.
//!
//! Events are totally ordered by `(time, kind, payload, seq)`. All events
//! sharing a timestamp are applied together, then the scheduler runs once.
//! Finishes come before submissions so freed cores are visible to jobs
//! submitted at the same instant.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap};

use crate::error::{Error, Result};
use crate::platform::{MachineId, MachineState, Platform, PlatformConfig};
use crate::scheduler::{make_decisions, Decisions, Placement, PowerCommand, WaitQueue};
use crate::workload::{ExperimentWorkload, Job, JobId, UserId};

/// Listed in processing order for equal timestamps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventKind {
    JobFinish,
    BootComplete,
    OffComplete,
    JobSubmit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub time: f64,
    pub kind: EventKind,
    /// Job id for job events, machine id for machine events.
    pub payload: u64,
    pub seq: u64,
}

impl Eq for Event {}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.kind.cmp(&other.kind))
            .then(self.payload.cmp(&other.payload))
            .then(self.seq.cmp(&other.seq))
    }
}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Default)]
pub struct EventQueue {
    heap: BinaryHeap<Reverse<Event>>,
    next_seq: u64,
}

impl EventQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, time: f64, kind: EventKind, payload: u64) {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Reverse(Event {
            time,
            kind,
            payload,
            seq,
        }));
    }

    pub fn peek_time(&self) -> Option<f64> {
        self.heap.peek().map(|Reverse(e)| e.time)
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}

/// Pops every event sharing the earliest timestamp, in processing order.
pub fn equal_time_batching(queue: &mut EventQueue) -> Option<Vec<Event>> {
    let t = queue.peek_time()?;
    let mut batch = Vec::new();
    while queue.peek_time() == Some(t) {
        let Reverse(event) = queue.heap.pop().expect("peeked");
        batch.push(event);
    }
    Some(batch)
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobRecord {
    pub id: JobId,
    pub user: UserId,
    pub submit: f64,
    pub original_submit: f64,
    pub start: f64,
    pub finish: f64,
    pub size: u32,
    pub execution_time: f64,
    pub machine: MachineId,
}

impl JobRecord {
    pub fn waiting_time(&self) -> f64 {
        self.start - self.submit
    }

    pub fn mass_core_hours(&self) -> f64 {
        f64::from(self.size) * self.execution_time / 3600.0
    }
}

/// Platform power over `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSegment {
    pub start: f64,
    pub end: f64,
    pub watts: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateChange {
    pub time: f64,
    pub machine: MachineId,
    pub state: MachineState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationTrace {
    /// In submission order.
    pub jobs: Vec<JobRecord>,
    /// Contiguous segments covering `[0, end_time)`.
    pub power: Vec<PowerSegment>,
    /// Initial states at t = 0 followed by every transition.
    pub state_changes: Vec<StateChange>,
    pub energy_joules: f64,
    /// `max(horizon, last event)`.
    pub end_time: f64,
    /// Power from `end_time` on; every machine has settled by then.
    pub final_watts: f64,
}

impl SimulationTrace {
    /// Energy in joules over `[from, to)`, using `final_watts` past `end_time`.
    pub fn energy_between(&self, from: f64, to: f64) -> f64 {
        if to <= from {
            return 0.0;
        }
        let within: f64 = self
            .power
            .iter()
            .map(|s| s.watts * (s.end.min(to) - s.start.max(from)).max(0.0))
            .sum();
        within + self.final_watts * (to - from.max(self.end_time)).max(0.0)
    }

    /// Platform power at instant `t`.
    pub fn power_at(&self, t: f64) -> f64 {
        self.power
            .iter()
            .find(|s| t >= s.start && t < s.end)
            .map_or(self.final_watts, |s| s.watts)
    }
}

/// Hook called after every scheduling pass; used by invariant checkers.
pub trait PassObserver {
    fn after_pass(&mut self, now: f64, platform: &Platform, queue: &WaitQueue, decisions: &Decisions);
}

struct NoObserver;

impl PassObserver for NoObserver {
    fn after_pass(&mut self, _: f64, _: &Platform, _: &WaitQueue, _: &Decisions) {}
}

pub fn run(workload: &ExperimentWorkload, platform: &PlatformConfig) -> Result<SimulationTrace> {
    run_observed(workload, platform, &mut NoObserver)
}

struct Running {
    job: Job,
    start: Option<f64>,
    finish: Option<f64>,
    machine: Option<MachineId>,
}

struct Simulation {
    platform: Platform,
    queue: WaitQueue,
    events: EventQueue,
    jobs: Vec<Running>,
    index: HashMap<JobId, usize>,
    pending: Vec<Vec<Placement>>,
    state_changes: Vec<StateChange>,
    power: Vec<PowerSegment>,
    segment_start: f64,
    segment_watts: f64,
}

impl Simulation {
    fn record_state(&mut self, time: f64, machine: MachineId) {
        let state = self.platform.machine(machine).state;
        self.state_changes.push(StateChange { time, machine, state });
    }

    fn start_job(&mut self, job: JobId, machine: MachineId, now: f64) -> Result<()> {
        let idx = self.index[&job];
        let running = &mut self.jobs[idx];
        if running.start.is_some() {
            return Err(Error::Internal(format!("job {job} started twice")));
        }
        running.start = Some(now);
        running.machine = Some(machine);
        let finish = now + running.job.execution_time;
        self.events.push(finish, EventKind::JobFinish, job.0);
        Ok(())
    }

    fn close_segment(&mut self, now: f64) {
        let watts = self.platform.power();
        if now > self.segment_start {
            self.power.push(PowerSegment {
                start: self.segment_start,
                end: now,
                watts: self.segment_watts,
            });
        }
        self.segment_start = now;
        self.segment_watts = watts;
    }

    fn apply(&mut self, event: &Event, now: f64) -> Result<bool> {
        match event.kind {
            EventKind::JobSubmit => {
                let idx = *self
                    .index
                    .get(&JobId(event.payload))
                    .ok_or_else(|| Error::Internal(format!("unknown job {}", event.payload)))?;
                self.queue.enqueue(self.jobs[idx].job.clone())?;
                Ok(false)
            }
            EventKind::JobFinish => {
                let idx = self.index[&JobId(event.payload)];
                let running = &mut self.jobs[idx];
                let (Some(start), Some(machine), None) = (running.start, running.machine, running.finish) else {
                    return Err(Error::Internal(format!(
                        "job {} finished without running",
                        event.payload
                    )));
                };
                if now < start {
                    return Err(Error::Internal(format!(
                        "job {} finished before it started",
                        event.payload
                    )));
                }
                running.finish = Some(now);
                let size = running.job.size;
                self.platform.release(machine, size)?;
                Ok(true)
            }
            EventKind::BootComplete => {
                let machine = MachineId(event.payload as usize);
                self.platform.complete_switch_on(machine, now)?;
                self.record_state(now, machine);
                for placement in std::mem::take(&mut self.pending[machine.0]) {
                    self.platform.commit(machine, placement.job.size)?;
                    self.start_job(placement.job.id, machine, now)?;
                }
                Ok(true)
            }
            EventKind::OffComplete => {
                let machine = MachineId(event.payload as usize);
                self.platform.complete_switch_off(machine, now)?;
                self.record_state(now, machine);
                Ok(true)
            }
        }
    }

    fn schedule(&mut self, now: f64, observer: &mut dyn PassObserver) -> Result<bool> {
        let decisions = make_decisions(&mut self.queue, &mut self.platform, now)?;
        let mut mutated = false;
        for command in &decisions.power {
            match *command {
                PowerCommand::SwitchOn { machine, ready_at } => {
                    self.record_state(now, machine);
                    self.events.push(ready_at, EventKind::BootComplete, machine.0 as u64);
                }
                PowerCommand::SwitchOff { machine, off_at } => {
                    self.record_state(now, machine);
                    self.events.push(off_at, EventKind::OffComplete, machine.0 as u64);
                }
            }
            mutated = true;
        }
        for placement in &decisions.placements {
            if placement.start_time == now && self.platform.machine(placement.machine).state == MachineState::On {
                self.start_job(placement.job.id, placement.machine, now)?;
                mutated = true;
            } else {
                self.pending[placement.machine.0].push(placement.clone());
            }
        }
        observer.after_pass(now, &self.platform, &self.queue, &decisions);
        Ok(mutated)
    }
}

/// Simulates the workload until every job has finished, calling `observer`
/// after each scheduling pass.
pub fn run_observed(
    workload: &ExperimentWorkload,
    config: &PlatformConfig,
    observer: &mut dyn PassObserver,
) -> Result<SimulationTrace> {
    let platform = Platform::new(config)?;
    if let Some(job) = workload.jobs.iter().find(|j| j.size > config.cores_per_machine) {
        return Err(Error::Config(format!(
            "job {} needs {} cores but machines have {}",
            job.id, job.size, config.cores_per_machine
        )));
    }

    let mut events = EventQueue::new();
    let mut index = HashMap::with_capacity(workload.jobs.len());
    let mut jobs = Vec::with_capacity(workload.jobs.len());
    for job in &workload.jobs {
        events.push(job.submit_time, EventKind::JobSubmit, job.id.0);
        if index.insert(job.id, jobs.len()).is_some() {
            return Err(Error::Internal(format!("duplicate job id {}", job.id)));
        }
        jobs.push(Running {
            job: job.clone(),
            start: None,
            finish: None,
            machine: None,
        });
    }

    let state_changes = platform
        .machines()
        .iter()
        .map(|m| StateChange {
            time: 0.0,
            machine: m.id,
            state: m.state,
        })
        .collect();
    let segment_watts = platform.power();
    let mut sim = Simulation {
        pending: vec![Vec::new(); platform.machines().len()],
        platform,
        queue: WaitQueue::new(),
        events,
        jobs,
        index,
        state_changes,
        power: Vec::new(),
        segment_start: 0.0,
        segment_watts,
    };

    // Idle machines that start on are shut down by an initial pass.
    if config.initial_state == MachineState::On && sim.schedule(0.0, observer)? {
        sim.close_segment(0.0);
    }

    let mut now = 0.0;
    while let Some(batch) = equal_time_batching(&mut sim.events) {
        now = batch[0].time;
        sim.platform.accumulate_energy(now)?;
        let mut mutated = false;
        for event in &batch {
            mutated |= sim.apply(event, now)?;
        }
        mutated |= sim.schedule(now, observer)?;
        if mutated {
            sim.close_segment(now);
        }
    }

    if !sim.queue.is_empty() || sim.pending.iter().any(|p| !p.is_empty()) {
        return Err(Error::Internal("event queue drained with jobs still waiting".into()));
    }
    let end_time = now.max(workload.horizon);
    sim.platform.accumulate_energy(end_time)?;
    sim.close_segment(end_time);

    let jobs = sim
        .jobs
        .into_iter()
        .map(|r| match (r.start, r.finish, r.machine) {
            (Some(start), Some(finish), Some(machine)) => Ok(JobRecord {
                id: r.job.id,
                user: r.job.user,
                submit: r.job.submit_time,
                original_submit: r.job.original_submit(),
                start,
                finish,
                size: r.job.size,
                execution_time: r.job.execution_time,
                machine,
            }),
            _ => Err(Error::Internal(format!("job {} never completed", r.job.id))),
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SimulationTrace {
        jobs,
        power: sim.power,
        state_changes: sim.state_changes,
        energy_joules: sim.platform.energy_joules(),
        end_time,
        final_watts: sim.segment_watts,
    })
}
