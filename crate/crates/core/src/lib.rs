//! Discrete-event simulation of a homogeneous data center during a
//! demand-response event.
//!
//! A workload trace is replayed on machines managed by a bin-packing
//! scheduler that powers machines on demand and shuts idle ones down. Inside
//! the demand-response window users follow one of five submission behaviors
//! ([`Behavior`]); the [`metrics`] module compares each behavior with the
//! rigid baseline in energy and scheduling terms, and [`campaign`] runs the
//! whole experiment matrix.
//!
//! ```no_run
//! use drsim::{campaign, CampaignConfig};
//!
//! let config = CampaignConfig::default();
//! let outcome = campaign::run_campaign(&config).unwrap();
//! println!("{} rows", outcome.table.rows.len());
//! ```

pub mod behaviors;
pub mod campaign;
pub mod engine;
pub mod error;
pub mod metrics;
pub mod platform;
pub mod scheduler;
pub mod workload;

pub use behaviors::{Behavior, BehaviorAssignment, DemandResponseWindow};
pub use campaign::{CampaignConfig, ResultsTable};
pub use engine::SimulationTrace;
pub use error::{Error, Result};
pub use metrics::ExperimentResult;
pub use platform::{PlatformConfig, PowerParams};
pub use workload::{ExperimentWorkload, Job, JobSet};
