use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::behaviors::Behavior;
use crate::error::{Error, Result};
use crate::platform::PlatformConfig;
use crate::workload::{
    JobFilter, ProcessorField, RuntimeDistribution, SizeDistribution, SyntheticSpec, DEFAULT_WINDOW_ANCHOR,
};

/// Everything a campaign run depends on. Loaded from TOML; every field has
/// a default reproducing the reference setup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignConfig {
    pub workload: WorkloadSource,
    pub filter: FilterConfig,
    pub experiments: ExperimentSelection,
    pub window_lengths_s: Vec<f64>,
    /// Seconds between day-2 midnight and the window start.
    pub window_anchor_s: f64,
    pub behaviors: Vec<Behavior>,
    /// Per-user behavior overrides, applied to every non-rigid run.
    pub per_user: BTreeMap<u64, Behavior>,
    pub platform: PlatformConfig,
    pub output_dir: PathBuf,
    /// Worker threads; 0 means one per available CPU.
    pub workers: usize,
    pub dump_traces: bool,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            workload: WorkloadSource::default(),
            filter: FilterConfig::default(),
            experiments: ExperimentSelection::default(),
            window_lengths_s: vec![3600.0, 14_400.0],
            window_anchor_s: DEFAULT_WINDOW_ANCHOR,
            behaviors: Behavior::ALL.to_vec(),
            per_user: BTreeMap::new(),
            platform: PlatformConfig::default(),
            output_dir: PathBuf::from("out"),
            workers: 0,
            dump_traces: false,
        }
    }
}

/// Either an SWF file or a synthetic generator. When both are given the
/// SWF file wins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorkloadSource {
    pub swf: Option<PathBuf>,
    pub processor_field: ProcessorField,
    /// Overrides the `UnixStartTime` header of the SWF file.
    pub unix_start_time: Option<i64>,
    /// Offset of the trace's local time from UTC, for day boundaries.
    pub utc_offset_s: i64,
    pub synthetic: Option<SyntheticSpec>,
}

impl Default for WorkloadSource {
    fn default() -> Self {
        WorkloadSource {
            swf: None,
            processor_field: ProcessorField::default(),
            unix_start_time: None,
            utc_offset_s: 0,
            synthetic: Some(default_synthetic()),
        }
    }
}

/// Two weeks of mixed jobs loading the default platform to roughly 40 %.
pub fn default_synthetic() -> SyntheticSpec {
    SyntheticSpec {
        seed: 1,
        rate_per_hour: 40.0,
        duration_s: 14.0 * 86_400.0,
        size: SizeDistribution::Weighted {
            values: vec![1, 2, 4, 8, 16],
            weights: vec![0.4, 0.15, 0.15, 0.15, 0.15],
        },
        runtime: RuntimeDistribution::LogUniform {
            min: 60.0,
            max: 86_400.0,
        },
        users: 50,
        integer_times: false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    pub enabled: bool,
    #[serde(flatten)]
    pub limits: JobFilter,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            enabled: true,
            limits: JobFilter::default(),
        }
    }
}

/// Which three-day slices to simulate.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ExperimentSelection {
    /// Every complete three-day slice of the trace, one per day.
    #[default]
    All,
    /// Day indices of the first experiment day, counted from the first
    /// local midnight of the trace.
    Days(Vec<u32>),
    /// Experiments starting on a day within `[from, to]` whose event day
    /// (day 2) is a Monday to Friday. Needs the trace epoch.
    Weekdays { from: NaiveDate, to: NaiveDate },
}

impl CampaignConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: CampaignConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        if !self.behaviors.contains(&Behavior::Rigid) {
            return Err(Error::Config(
                "behaviors must include rigid, the baseline for gains".into(),
            ));
        }
        if self.window_lengths_s.is_empty() {
            return Err(Error::Config("at least one window length is required".into()));
        }
        if let Some(bad) = self.window_lengths_s.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
            return Err(Error::Config(format!("window length {bad} must be positive")));
        }
        if self.workload.swf.is_none() && self.workload.synthetic.is_none() {
            return Err(Error::Config(
                "workload needs either an swf path or a synthetic spec".into(),
            ));
        }
        if let (None, Some(spec)) = (&self.workload.swf, &self.workload.synthetic) {
            spec.validate()?;
        }
        if let ExperimentSelection::Weekdays { from, to } = self.experiments {
            if from > to {
                return Err(Error::Config(format!("weekday range {from}..{to} is empty")));
            }
        }
        self.platform.validate()
    }

    /// Behaviors in canonical order without duplicates.
    pub fn behavior_list(&self) -> Vec<Behavior> {
        let mut list = self.behaviors.clone();
        list.sort();
        list.dedup();
        list
    }

    pub fn window_length_list(&self) -> Vec<f64> {
        let mut list = self.window_lengths_s.clone();
        list.sort_by(f64::total_cmp);
        list.dedup();
        list
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        CampaignConfig::default().validate().unwrap();
    }

    #[test]
    fn parses_full_file() {
        let text = r#"
            window_lengths_s = [3600]
            behaviors = ["rigid", "delay"]
            workers = 2
            output_dir = "results"

            [workload]
            swf = "trace.swf"
            processor_field = "requested"
            utc_offset_s = 7200

            [filter]
            enabled = true
            max_size = 8

            [experiments.weekdays]
            from = "2014-06-01"
            to = "2014-10-23"

            [platform]
            machines = 8

            [platform.power]
            p_idle = 90.0

            [per_user]
            42 = "renounce"
        "#;
        let c = CampaignConfig::from_toml_str(text).unwrap();
        assert_eq!(c.behaviors, vec![Behavior::Rigid, Behavior::Delay]);
        assert_eq!(c.workload.processor_field, ProcessorField::Requested);
        assert_eq!(c.filter.limits.max_size, 8);
        assert_eq!(c.filter.limits.max_execution_time, 86_400.0);
        assert_eq!(c.platform.machines, 8);
        assert_eq!(c.platform.power.p_idle, 90.0);
        assert_eq!(c.platform.power.p_core, 7.3125);
        assert_eq!(c.per_user.get(&42), Some(&Behavior::Renounce));
        assert!(matches!(c.experiments, ExperimentSelection::Weekdays { .. }));
        c.validate().unwrap();
    }

    #[test]
    fn rejects_missing_baseline() {
        let c = CampaignConfig::from_toml_str("behaviors = [\"delay\", \"renounce\"]").unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(CampaignConfig::from_toml_str("windows = [1]").is_err());
        assert!(CampaignConfig::from_toml_str("behaviors = [\"sleep\"]").is_err());
    }

    #[test]
    fn day_list_selection() {
        let c = CampaignConfig::from_toml_str("[experiments]\ndays = [0, 3]").unwrap();
        assert_eq!(c.experiments, ExperimentSelection::Days(vec![0, 3]));
    }
}
