//! Greedy bin-packing scheduler with immediate shutdown of idle machines.
//!
//! Every pass walks the wait queue (largest jobs first, FCFS on ties) and
//! puts each job on the powered machine with the fewest free cores that
//! still fits it. When nothing fits, one switched-off machine is booted and
//! the job is reserved on it. Idle machines are shut down at the end of the
//! pass.

use std::cmp::{Ordering, Reverse};
use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::platform::{MachineId, MachineState, Platform};
use crate::workload::{Job, JobId};

/// Waiting jobs by decreasing size, then original submit time, then id.
#[derive(Debug, Clone, Default)]
pub struct WaitQueue {
    jobs: Vec<Job>,
    ids: HashSet<JobId>,
}

fn queue_order(a: &Job, b: &Job) -> Ordering {
    Reverse(a.size)
        .cmp(&Reverse(b.size))
        .then_with(|| a.original_submit().total_cmp(&b.original_submit()))
        .then_with(|| a.id.cmp(&b.id))
}

impl WaitQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn enqueue(&mut self, job: Job) -> Result<()> {
        if !self.ids.insert(job.id) {
            return Err(Error::Internal(format!("job {} is already queued", job.id)));
        }
        let pos = self.jobs.partition_point(|q| queue_order(q, &job) == Ordering::Less);
        self.jobs.insert(pos, job);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Job> {
        self.jobs.iter()
    }

    pub fn as_slice(&self) -> &[Job] {
        &self.jobs
    }
}

/// A job assigned to a machine. On a booting machine the job starts when
/// the boot completes.
#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    pub job: Job,
    pub machine: MachineId,
    pub start_time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PowerCommand {
    SwitchOn { machine: MachineId, ready_at: f64 },
    SwitchOff { machine: MachineId, off_at: f64 },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Decisions {
    pub placements: Vec<Placement>,
    pub power: Vec<PowerCommand>,
}

/// Smallest-fitting powered machine, ties to the lowest id.
fn best_fit(platform: &Platform, size: u32) -> Option<MachineId> {
    platform
        .machines()
        .iter()
        .filter(|m| matches!(m.state, MachineState::On | MachineState::SwitchingOn))
        .filter(|m| m.free_cores() >= size)
        .min_by_key(|m| (m.free_cores(), m.id))
        .map(|m| m.id)
}

/// Runs one scheduling pass at `now`, mutating the queue and platform.
///
/// Jobs placed on an on machine have their cores committed immediately;
/// jobs placed on a booting machine only reserve them.
pub fn make_decisions(queue: &mut WaitQueue, platform: &mut Platform, now: f64) -> Result<Decisions> {
    let mut decisions = Decisions::default();
    let mut waiting = Vec::with_capacity(queue.jobs.len());

    for job in std::mem::take(&mut queue.jobs) {
        let target = match best_fit(platform, job.size) {
            Some(id) => Some(id),
            None => match platform.machines().iter().find(|m| m.state == MachineState::Off) {
                Some(off) if off.capacity >= job.size => {
                    let id = off.id;
                    let ready_at = platform.begin_switch_on(id, now)?;
                    decisions.power.push(PowerCommand::SwitchOn { machine: id, ready_at });
                    Some(id)
                }
                _ => None,
            },
        };

        let Some(machine) = target else {
            waiting.push(job);
            continue;
        };
        platform.reserve(machine, job.size)?;
        let start_time = match platform.machine(machine).state {
            MachineState::On => {
                platform.commit(machine, job.size)?;
                now
            }
            _ => platform
                .machine(machine)
                .transition_end
                .ok_or_else(|| Error::Internal(format!("booting machine {machine} has no completion time")))?,
        };
        queue.ids.remove(&job.id);
        decisions.placements.push(Placement {
            job,
            machine,
            start_time,
        });
    }
    queue.jobs = waiting;

    let idle: Vec<MachineId> = platform
        .machines()
        .iter()
        .filter(|m| m.is_idle_on())
        .map(|m| m.id)
        .collect();
    for id in idle {
        let off_at = platform.begin_switch_off(id, now)?;
        decisions.power.push(PowerCommand::SwitchOff { machine: id, off_at });
    }
    Ok(decisions)
}
