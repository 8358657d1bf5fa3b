//! Runs a campaign described by a TOML file and prints the median energy
//! gain per behavior and window length.
//!
//! `cargo run --release --example synthetic_campaign -- configs/synthetic.toml`

use std::path::PathBuf;

use drsim::campaign::{run_campaign_to_dir, summarize, SummaryMetric};
use drsim::CampaignConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/synthetic.toml"));
    let config = CampaignConfig::from_file(&path)?;
    let (outcome, files) = run_campaign_to_dir(&config)?;

    println!(
        "{} rows written to {}",
        outcome.table.rows.len(),
        files.results.display()
    );
    for row in summarize(&outcome.table)
        .iter()
        .filter(|r| r.metric == SummaryMetric::EnergyIn)
    {
        if let Some(s) = row.stats {
            println!(
                "{:<9} {:>5} h  median gain {:>6.2} %  (q1 {:>6.2}, q3 {:>6.2}, n={})",
                row.behavior,
                row.window_length_s / 3600.0,
                s.median,
                s.q1,
                s.q3,
                row.n
            );
        }
    }
    Ok(())
}
