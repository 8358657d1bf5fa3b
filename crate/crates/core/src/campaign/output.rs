//! CSV files written by a campaign.

use std::io::{Read, Write};
use std::path::Path;

use crate::behaviors::Behavior;
use crate::engine::SimulationTrace;
use crate::error::{Error, Result};
use crate::metrics::ExperimentResult;

use super::{FailedRun, ResultRow, ResultsTable, SummaryRow};

pub const RESULTS_HEADER: [&str; 18] = [
    "experiment_id",
    "window_start",
    "window_length_s",
    "behavior",
    "energy_in_kwh",
    "energy_after_kwh",
    "energy_overall_kwh",
    "gain_energy_in_pct",
    "gain_energy_after_pct",
    "gain_energy_overall_pct",
    "mean_wait_s",
    "mean_slowdown",
    "mean_wait_corrected_s",
    "mean_slowdown_corrected",
    "fluid_core_h",
    "residual_core_h",
    "fluid_ratio",
    "n_jobs_window",
];

const NA: &str = "NA";

/// Six significant digits, `%g` style: fixed notation for exponents in
/// `[-5, 6)`, scientific otherwise, trailing zeros removed.
pub fn format_float(value: f64) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    if !value.is_finite() {
        return value.to_string();
    }
    let sci = format!("{value:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(format!("{value:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_string()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn opt(value: Option<f64>) -> String {
    value.map_or_else(|| NA.to_string(), format_float)
}

fn parse_opt(field: &str, line: usize) -> Result<Option<f64>> {
    if field == NA {
        return Ok(None);
    }
    field.parse().map(Some).map_err(|_| Error::Parse {
        line,
        message: format!("invalid number {field:?}"),
    })
}

fn parse_req(field: &str, line: usize) -> Result<f64> {
    parse_opt(field, line)?.ok_or_else(|| Error::Parse {
        line,
        message: "unexpected NA".into(),
    })
}

fn row_record(row: &ResultRow) -> Vec<String> {
    let r = &row.result;
    vec![
        row.experiment_id.clone(),
        row.window_start.to_string(),
        row.window_length_s.to_string(),
        row.behavior.to_string(),
        format_float(r.energy_in_kwh),
        format_float(r.energy_after_kwh),
        format_float(r.energy_overall_kwh),
        opt(row.gain_energy_in_pct),
        opt(row.gain_energy_after_pct),
        opt(row.gain_energy_overall_pct),
        opt(r.mean_wait_s),
        opt(r.mean_slowdown),
        opt(r.mean_wait_corrected_s),
        opt(r.mean_slowdown_corrected),
        format_float(r.fluid_core_h),
        format_float(r.residual_core_h),
        opt(r.fluid_ratio),
        row.n_jobs_window.to_string(),
    ]
}

/// Writes the results table. Window start and length are written exactly;
/// metric floats use six significant digits.
pub fn write_csv<W: Write>(table: &ResultsTable, out: W) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(RESULTS_HEADER)?;
    for row in &table.rows {
        writer.write_record(row_record(row))?;
    }
    writer.flush()?;
    Ok(())
}

pub fn emit_csv(table: &ResultsTable, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(table, std::io::BufWriter::new(file)).map_err(|e| Error::csv(path, e))
}

pub fn parse_csv<R: Read>(input: R) -> Result<ResultsTable> {
    let mut reader = csv::Reader::from_reader(input);
    let header = reader.headers().map_err(|e| Error::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    if header.iter().ne(RESULTS_HEADER) {
        return Err(Error::Parse {
            line: 1,
            message: format!("unexpected header {header:?}"),
        });
    }
    let mut rows = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let line = idx + 2;
        let rec = record.map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        let f = |i: usize| &rec[i];
        rows.push(ResultRow {
            experiment_id: f(0).to_string(),
            window_start: parse_req(f(1), line)?,
            window_length_s: parse_req(f(2), line)?,
            behavior: f(3).parse::<Behavior>().map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?,
            result: ExperimentResult {
                energy_in_kwh: parse_req(f(4), line)?,
                energy_after_kwh: parse_req(f(5), line)?,
                energy_overall_kwh: parse_req(f(6), line)?,
                mean_wait_s: parse_opt(f(10), line)?,
                mean_slowdown: parse_opt(f(11), line)?,
                mean_wait_corrected_s: parse_opt(f(12), line)?,
                mean_slowdown_corrected: parse_opt(f(13), line)?,
                fluid_core_h: parse_req(f(14), line)?,
                residual_core_h: parse_req(f(15), line)?,
                fluid_ratio: parse_opt(f(16), line)?,
            },
            gain_energy_in_pct: parse_opt(f(7), line)?,
            gain_energy_after_pct: parse_opt(f(8), line)?,
            gain_energy_overall_pct: parse_opt(f(9), line)?,
            n_jobs_window: f(17).parse().map_err(|_| Error::Parse {
                line,
                message: format!("invalid job count {:?}", f(17)),
            })?,
        });
    }
    Ok(ResultsTable { rows })
}

pub fn read_csv(path: &Path) -> Result<ResultsTable> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_csv(std::io::BufReader::new(file))
}

pub fn emit_summary(rows: &[SummaryRow], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = csv::Writer::from_writer(std::io::BufWriter::new(file));
    let res = (|| -> csv::Result<()> {
        writer.write_record([
            "behavior",
            "window_length_s",
            "metric",
            "n",
            "min",
            "q1",
            "median",
            "q3",
            "max",
            "mean",
        ])?;
        for row in rows {
            let stats = row.stats;
            let cell = |f: fn(&super::summary::BoxStats) -> f64| {
                stats.as_ref().map_or_else(|| NA.into(), |s| format_float(f(s)))
            };
            writer.write_record([
                row.behavior.to_string(),
                row.window_length_s.to_string(),
                row.metric.as_str().to_string(),
                row.n.to_string(),
                cell(|s| s.min),
                cell(|s| s.q1),
                cell(|s| s.median),
                cell(|s| s.q3),
                cell(|s| s.max),
                cell(|s| s.mean),
            ])?;
        }
        writer.flush()?;
        Ok(())
    })();
    res.map_err(|e| Error::csv(path, e))
}

pub fn emit_failures(failures: &[FailedRun], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = csv::Writer::from_writer(std::io::BufWriter::new(file));
    let res = (|| -> csv::Result<()> {
        writer.write_record(["experiment_id", "window_length_s", "behavior", "message"])?;
        for f in failures {
            writer.write_record([
                f.experiment_id.clone(),
                f.window_length_s.to_string(),
                f.behavior.to_string(),
                f.message.clone(),
            ])?;
        }
        writer.flush()?;
        Ok(())
    })();
    res.map_err(|e| Error::csv(path, e))
}

/// Writes `<stem>_jobs.csv` and `<stem>_power.csv` under `dir`.
pub fn emit_trace(trace: &SimulationTrace, dir: &Path, stem: &str) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let jobs_path = dir.join(format!("{stem}_jobs.csv"));
    let file = std::fs::File::create(&jobs_path).map_err(|e| Error::io(&jobs_path, e))?;
    let mut jobs = std::io::BufWriter::new(file);
    let res = (|| -> std::io::Result<()> {
        writeln!(
            jobs,
            "job_id,user,submit,original_submit,start,finish,size,execution_time,machine_id"
        )?;
        for j in &trace.jobs {
            writeln!(
                jobs,
                "{},{},{},{},{},{},{},{},{}",
                j.id, j.user, j.submit, j.original_submit, j.start, j.finish, j.size, j.execution_time, j.machine
            )?;
        }
        jobs.flush()
    })();
    res.map_err(|e| Error::io(&jobs_path, e))?;

    let power_path = dir.join(format!("{stem}_power.csv"));
    let file = std::fs::File::create(&power_path).map_err(|e| Error::io(&power_path, e))?;
    let mut power = std::io::BufWriter::new(file);
    let res = (|| -> std::io::Result<()> {
        writeln!(power, "start,end,watts")?;
        for s in &trace.power {
            writeln!(power, "{},{},{}", s.start, s.end, s.watts)?;
        }
        power.flush()
    })();
    res.map_err(|e| Error::io(&power_path, e))
}
