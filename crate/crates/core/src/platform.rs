//! Homogeneous multi-core machines, their power states and energy accounting.
//!
//! A machine draws `p_idle + n * p_core` when on with `n` cores running a
//! job, and a constant power in each of the other three states. Energy is
//! integrated exactly between state changes: the caller advances the
//! accumulator to `now` before mutating anything at `now`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Power draw (W) and transition durations (s) of one machine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PowerParams {
    pub p_idle: f64,
    pub p_core: f64,
    pub p_off: f64,
    pub p_son: f64,
    pub p_soff: f64,
    pub t_son: f64,
    pub t_soff: f64,
}

impl Default for PowerParams {
    /// Measured values for a Taurus Grid'5000 node.
    fn default() -> Self {
        PowerParams {
            p_idle: 100.0,
            p_core: 7.3125,
            p_off: 9.75,
            p_son: 100.0,
            p_soff: 125.0,
            t_son: 150.0,
            t_soff: 6.0,
        }
    }
}

impl PowerParams {
    pub fn validate(&self) -> Result<()> {
        let powers = [self.p_idle, self.p_core, self.p_off, self.p_son, self.p_soff];
        if powers.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::Config(format!("power values must be >= 0: {self:?}")));
        }
        if !(self.t_son > 0.0 && self.t_soff > 0.0 && self.t_son.is_finite() && self.t_soff.is_finite()) {
            return Err(Error::Config(format!("transition times must be > 0: {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MachineState {
    Off,
    SwitchingOn,
    On,
    SwitchingOff,
}

impl fmt::Display for MachineState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            MachineState::Off => "off",
            MachineState::SwitchingOn => "switching_on",
            MachineState::On => "on",
            MachineState::SwitchingOff => "switching_off",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MachineId(pub usize);

impl fmt::Display for MachineId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Machine {
    pub id: MachineId,
    pub state: MachineState,
    pub capacity: u32,
    /// Cores running a job.
    pub busy_cores: u32,
    /// Cores promised to jobs waiting for this machine to finish booting.
    pub reserved_cores: u32,
    /// Completion time of the ongoing switch-on or switch-off.
    pub transition_end: Option<f64>,
}

impl Machine {
    pub fn new(id: MachineId, capacity: u32, state: MachineState) -> Self {
        Machine {
            id,
            state,
            capacity,
            busy_cores: 0,
            reserved_cores: 0,
            transition_end: None,
        }
    }

    pub fn free_cores(&self) -> u32 {
        self.capacity - self.busy_cores - self.reserved_cores
    }

    pub fn is_idle_on(&self) -> bool {
        self.state == MachineState::On && self.busy_cores == 0 && self.reserved_cores == 0
    }
}

pub fn instantaneous_power(machine: &Machine, params: &PowerParams) -> f64 {
    match machine.state {
        MachineState::Off => params.p_off,
        MachineState::SwitchingOn => params.p_son,
        MachineState::SwitchingOff => params.p_soff,
        MachineState::On => params.p_idle + f64::from(machine.busy_cores) * params.p_core,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlatformConfig {
    pub machines: usize,
    pub cores_per_machine: u32,
    pub power: PowerParams,
    /// Either `off` or `on`; on machines are idle at t = 0.
    pub initial_state: MachineState,
}

impl Default for PlatformConfig {
    fn default() -> Self {
        PlatformConfig {
            machines: 104,
            cores_per_machine: 16,
            power: PowerParams::default(),
            initial_state: MachineState::Off,
        }
    }
}

impl PlatformConfig {
    pub fn with_machines(machines: usize) -> Self {
        PlatformConfig {
            machines,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.power.validate()?;
        if self.machines == 0 || self.cores_per_machine == 0 {
            return Err(Error::Config(
                "platform needs at least one machine with one core".into(),
            ));
        }
        if !matches!(self.initial_state, MachineState::Off | MachineState::On) {
            return Err(Error::Config(format!(
                "initial state must be off or on, got {}",
                self.initial_state
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Platform {
    machines: Vec<Machine>,
    params: PowerParams,
    energy_joules: f64,
    last_update: f64,
}

impl Platform {
    pub fn new(config: &PlatformConfig) -> Result<Self> {
        config.validate()?;
        let machines = (0..config.machines)
            .map(|i| Machine::new(MachineId(i), config.cores_per_machine, config.initial_state))
            .collect();
        Ok(Platform {
            machines,
            params: config.power,
            energy_joules: 0.0,
            last_update: 0.0,
        })
    }

    pub fn machines(&self) -> &[Machine] {
        &self.machines
    }

    pub fn machine(&self, id: MachineId) -> &Machine {
        &self.machines[id.0]
    }

    pub fn params(&self) -> &PowerParams {
        &self.params
    }

    pub fn energy_joules(&self) -> f64 {
        self.energy_joules
    }

    pub fn last_update(&self) -> f64 {
        self.last_update
    }

    /// Current platform power in watts.
    pub fn power(&self) -> f64 {
        self.machines.iter().map(|m| instantaneous_power(m, &self.params)).sum()
    }

    /// Integrates the current (constant) power over `[last_update, now)`.
    pub fn accumulate_energy(&mut self, now: f64) -> Result<f64> {
        if now < self.last_update {
            return Err(Error::Internal(format!(
                "energy accounting moved backwards from {} to {now}",
                self.last_update
            )));
        }
        let added = self.power() * (now - self.last_update);
        self.energy_joules += added;
        self.last_update = now;
        Ok(added)
    }

    fn get_mut(&mut self, id: MachineId) -> Result<&mut Machine> {
        self.machines
            .get_mut(id.0)
            .ok_or_else(|| Error::SchedulerLogic(format!("no machine {id}")))
    }

    fn expect_state(machine: &Machine, expected: MachineState, action: &str) -> Result<()> {
        if machine.state != expected {
            return Err(Error::SchedulerLogic(format!(
                "cannot {action} machine {} in state {}",
                machine.id, machine.state
            )));
        }
        Ok(())
    }

    /// Off → SwitchingOn. Returns the boot completion time.
    pub fn begin_switch_on(&mut self, id: MachineId, now: f64) -> Result<f64> {
        self.accumulate_energy(now)?;
        let t_son = self.params.t_son;
        let m = self.get_mut(id)?;
        Self::expect_state(m, MachineState::Off, "switch on")?;
        m.state = MachineState::SwitchingOn;
        m.transition_end = Some(now + t_son);
        Ok(now + t_son)
    }

    /// SwitchingOn → On.
    pub fn complete_switch_on(&mut self, id: MachineId, now: f64) -> Result<()> {
        self.accumulate_energy(now)?;
        let m = self.get_mut(id)?;
        Self::expect_state(m, MachineState::SwitchingOn, "finish booting")?;
        m.state = MachineState::On;
        m.transition_end = None;
        Ok(())
    }

    /// On → SwitchingOff, only when no core is busy or reserved. Returns
    /// the time at which the machine is off.
    pub fn begin_switch_off(&mut self, id: MachineId, now: f64) -> Result<f64> {
        self.accumulate_energy(now)?;
        let t_soff = self.params.t_soff;
        let m = self.get_mut(id)?;
        Self::expect_state(m, MachineState::On, "switch off")?;
        if m.busy_cores > 0 || m.reserved_cores > 0 {
            return Err(Error::SchedulerLogic(format!(
                "cannot switch off machine {id} with {} busy and {} reserved cores",
                m.busy_cores, m.reserved_cores
            )));
        }
        m.state = MachineState::SwitchingOff;
        m.transition_end = Some(now + t_soff);
        Ok(now + t_soff)
    }

    /// SwitchingOff → Off.
    pub fn complete_switch_off(&mut self, id: MachineId, now: f64) -> Result<()> {
        self.accumulate_energy(now)?;
        let m = self.get_mut(id)?;
        Self::expect_state(m, MachineState::SwitchingOff, "finish shutting down")?;
        m.state = MachineState::Off;
        m.transition_end = None;
        Ok(())
    }

    /// Sets aside free cores on an on or booting machine.
    pub fn reserve(&mut self, id: MachineId, cores: u32) -> Result<()> {
        let m = self.get_mut(id)?;
        if !matches!(m.state, MachineState::On | MachineState::SwitchingOn) {
            return Err(Error::SchedulerLogic(format!(
                "cannot reserve on machine {id} in state {}",
                m.state
            )));
        }
        if m.free_cores() < cores {
            return Err(Error::SchedulerLogic(format!(
                "machine {id} has {} free cores, {cores} requested",
                m.free_cores()
            )));
        }
        m.reserved_cores += cores;
        Ok(())
    }

    /// Turns reserved cores into busy ones once the machine is on.
    pub fn commit(&mut self, id: MachineId, cores: u32) -> Result<()> {
        let m = self.get_mut(id)?;
        Self::expect_state(m, MachineState::On, "start a job on")?;
        if m.reserved_cores < cores {
            return Err(Error::SchedulerLogic(format!(
                "machine {id} has {} reserved cores, {cores} committed",
                m.reserved_cores
            )));
        }
        m.reserved_cores -= cores;
        m.busy_cores += cores;
        Ok(())
    }

    pub fn release(&mut self, id: MachineId, cores: u32) -> Result<()> {
        let m = self.get_mut(id)?;
        if m.busy_cores < cores {
            return Err(Error::SchedulerLogic(format!(
                "machine {id} has {} busy cores, {cores} released",
                m.busy_cores
            )));
        }
        m.busy_cores -= cores;
        Ok(())
    }
}
