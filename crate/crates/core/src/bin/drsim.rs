//! Runs a demand-response campaign and writes results.csv, summary.csv and
//! failures.csv into the output directory.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use drsim::campaign::{self, default_synthetic, CampaignConfig};
use drsim::Behavior;

#[derive(Debug, Parser)]
#[command(name = "drsim", version, about = "Demand-response user behavior campaign runner")]
struct Args {
    /// TOML campaign configuration; defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// SWF trace to replay.
    #[arg(long, conflicts_with = "synthetic")]
    workload: Option<PathBuf>,
    /// Use the synthetic generator (the config's spec, or the built-in one).
    #[arg(long)]
    synthetic: bool,
    /// Seed of the synthetic generator.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    /// Comma-separated window lengths in hours, e.g. `1,4`.
    #[arg(long, value_delimiter = ',')]
    window_hours: Option<Vec<f64>>,
    /// Comma-separated behaviors, e.g. `rigid,renounce,delay`.
    #[arg(long, value_delimiter = ',')]
    behaviors: Option<Vec<Behavior>>,
    /// Also write per-run job and power CSVs under <out>/traces.
    #[arg(long)]
    dump_traces: bool,
}

fn build_config(args: Args) -> drsim::Result<CampaignConfig> {
    let mut config = match &args.config {
        Some(path) => CampaignConfig::from_file(path)?,
        None => CampaignConfig::default(),
    };
    if let Some(path) = args.workload {
        config.workload.swf = Some(path);
    }
    if args.synthetic {
        config.workload.swf = None;
        config.workload.synthetic.get_or_insert_with(default_synthetic);
    }
    if let Some(seed) = args.seed {
        config.workload.synthetic.get_or_insert_with(default_synthetic).seed = seed;
    }
    if let Some(out) = args.out {
        config.output_dir = out;
    }
    if let Some(workers) = args.workers {
        config.workers = workers;
    }
    if let Some(hours) = args.window_hours {
        config.window_lengths_s = hours.into_iter().map(|h| h * 3600.0).collect();
    }
    if let Some(behaviors) = args.behaviors {
        config.behaviors = behaviors;
    }
    config.dump_traces |= args.dump_traces;
    config.validate()?;
    Ok(config)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = build_config(args).and_then(|config| campaign::run_campaign_to_dir(&config));
    match result {
        Ok((outcome, files)) => {
            eprintln!(
                "{} rows -> {}, summary -> {}",
                outcome.table.rows.len(),
                files.results.display(),
                files.summary.display()
            );
            if !outcome.failures.is_empty() {
                eprintln!("{} failed runs -> {}", outcome.failures.len(), files.failures.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("drsim: {e}");
            ExitCode::FAILURE
        }
    }
}
