//! Parses an SWF trace and applies the size/runtime filter.
//!
//! `cargo run --example swf_filter -- path/to/trace.swf` reads a file;
//! without an argument a small inline trace is used.

use drsim::workload::{filter_jobs, parse_swf, parse_swf_str, SwfOptions};

const SAMPLE: &str = "\
; UnixStartTime: 1401580800
1 0 5 3600 4 -1 -1 4 3600 -1 1 7 1 1 1 1 -1 -1
2 60 0 90000 8 -1 -1 8 90000 -1 1 3 1 1 1 1 -1 -1
3 120 2 600 32 -1 -1 32 600 -1 1 7 1 1 1 1 -1 -1
4 180 9 -1 4 -1 -1 4 100 -1 0 7 1 1 1 1 -1 -1
5 240 1 1200 16 -1 -1 16 1200 -1 1 9 1 1 1 1 -1 -1
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let options = SwfOptions::default();
    let parsed = match std::env::args().nth(1) {
        Some(path) => parse_swf(std::io::BufReader::new(std::fs::File::open(path)?), &options)?,
        None => parse_swf_str(SAMPLE, &options)?,
    };
    let kept = filter_jobs(&parsed.jobs);
    println!("epoch:    {:?}", parsed.unix_start_time);
    println!(
        "parsed:   {} jobs ({} records skipped)",
        parsed.jobs.len(),
        parsed.skipped
    );
    println!(
        "filtered: {} jobs, {:.1} core-hours",
        kept.len(),
        kept.total_mass_core_hours()
    );
    for job in kept.iter().take(10) {
        println!(
            "  job {:>6}  user {:>4}  submit {:>9}  {:>6} s x {:>2} cores",
            job.id, job.user, job.submit_time, job.execution_time, job.size
        );
    }
    Ok(())
}
