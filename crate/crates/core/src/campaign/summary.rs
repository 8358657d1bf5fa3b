//! Box-plot statistics of relative gains per behavior and window length.

use std::collections::BTreeMap;

use crate::behaviors::Behavior;
use crate::metrics::relative_gain;

use super::{ResultRow, ResultsTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SummaryMetric {
    EnergyIn,
    EnergyAfter,
    EnergyOverall,
    MeanWait,
    MeanSlowdown,
    MeanWaitCorrected,
    MeanSlowdownCorrected,
}

impl SummaryMetric {
    pub const ALL: [SummaryMetric; 7] = [
        SummaryMetric::EnergyIn,
        SummaryMetric::EnergyAfter,
        SummaryMetric::EnergyOverall,
        SummaryMetric::MeanWait,
        SummaryMetric::MeanSlowdown,
        SummaryMetric::MeanWaitCorrected,
        SummaryMetric::MeanSlowdownCorrected,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SummaryMetric::EnergyIn => "energy_in",
            SummaryMetric::EnergyAfter => "energy_after",
            SummaryMetric::EnergyOverall => "energy_overall",
            SummaryMetric::MeanWait => "mean_wait",
            SummaryMetric::MeanSlowdown => "mean_slowdown",
            SummaryMetric::MeanWaitCorrected => "mean_wait_corrected",
            SummaryMetric::MeanSlowdownCorrected => "mean_slowdown_corrected",
        }
    }

    /// Gain of `row` against the rigid row of the same experiment and window.
    /// Corrected variants compare against the baseline's plain value, which
    /// is identical for a rigid run.
    fn gain(self, row: &ResultRow, rigid: &ResultRow) -> Option<f64> {
        let (r, b) = (&row.result, &rigid.result);
        let (value, base) = match self {
            SummaryMetric::EnergyIn => return row.gain_energy_in_pct,
            SummaryMetric::EnergyAfter => return row.gain_energy_after_pct,
            SummaryMetric::EnergyOverall => return row.gain_energy_overall_pct,
            SummaryMetric::MeanWait => (r.mean_wait_s, b.mean_wait_s),
            SummaryMetric::MeanSlowdown => (r.mean_slowdown, b.mean_slowdown),
            SummaryMetric::MeanWaitCorrected => (r.mean_wait_corrected_s, b.mean_wait_s),
            SummaryMetric::MeanSlowdownCorrected => (r.mean_slowdown_corrected, b.mean_slowdown),
        };
        if row.behavior == Behavior::Rigid {
            return Some(0.0);
        }
        relative_gain(value?, base?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxStats {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
}

impl BoxStats {
    /// Quartiles by linear interpolation between order statistics.
    pub fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let quantile = |p: f64| {
            let pos = p * (sorted.len() - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
        };
        Some(BoxStats {
            min: sorted[0],
            q1: quantile(0.25),
            median: quantile(0.5),
            q3: quantile(0.75),
            max: sorted[sorted.len() - 1],
            mean: sorted.iter().sum::<f64>() / sorted.len() as f64,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub behavior: Behavior,
    pub window_length_s: f64,
    pub metric: SummaryMetric,
    /// Number of defined gains aggregated.
    pub n: usize,
    pub stats: Option<BoxStats>,
}

/// Aggregates gains per (behavior, window length, metric). Undefined gains
/// are left out; a group with none has no statistics.
pub fn summarize(table: &ResultsTable) -> Vec<SummaryRow> {
    let mut rigid: BTreeMap<(&str, u64), &ResultRow> = BTreeMap::new();
    for row in table.rows.iter().filter(|r| r.behavior == Behavior::Rigid) {
        rigid.insert((row.experiment_id.as_str(), row.window_length_s.to_bits()), row);
    }

    let mut groups: BTreeMap<(Behavior, u64, SummaryMetric), Vec<f64>> = BTreeMap::new();
    for row in &table.rows {
        let Some(base) = rigid.get(&(row.experiment_id.as_str(), row.window_length_s.to_bits())) else {
            continue;
        };
        for metric in SummaryMetric::ALL {
            let values = groups
                .entry((row.behavior, row.window_length_s.to_bits(), metric))
                .or_default();
            if let Some(g) = metric.gain(row, base) {
                values.push(g);
            }
        }
    }

    let mut rows: Vec<SummaryRow> = groups
        .into_iter()
        .map(|((behavior, bits, metric), values)| SummaryRow {
            behavior,
            window_length_s: f64::from_bits(bits),
            metric,
            n: values.len(),
            stats: BoxStats::from_values(&values),
        })
        .collect();
    rows.sort_by(|a, b| {
        a.behavior
            .cmp(&b.behavior)
            .then(a.window_length_s.total_cmp(&b.window_length_s))
            .then(a.metric.cmp(&b.metric))
    });
    rows
}
