//! Standard Workload Format reader and writer.
//!
//! SWF lines carry 18 whitespace-separated numeric fields; lines starting
//! with `;` are header comments. Field numbers below are 1-based.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{Job, JobSet};
use crate::error::{Error, Result};

const SWF_FIELDS: usize = 18;

const F_JOB_ID: usize = 0;
const F_SUBMIT: usize = 1;
const F_RUN_TIME: usize = 3;
const F_ALLOCATED_PROCS: usize = 4;
const F_REQUESTED_PROCS: usize = 7;
const F_USER_ID: usize = 11;

/// Which SWF column provides the job size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProcessorField {
    /// Field 5, falling back to field 8 when it is -1.
    #[default]
    Allocated,
    /// Field 8, falling back to field 5 when it is -1.
    Requested,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SwfOptions {
    pub processor_field: ProcessorField,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedSwf {
    pub jobs: JobSet,
    /// Records dropped for a non-positive run time, no processor count or no user.
    pub skipped: usize,
    /// `UnixStartTime` header value, if present.
    pub unix_start_time: Option<i64>,
}

pub fn parse_swf_str(text: &str, options: &SwfOptions) -> Result<ParsedSwf> {
    parse_swf(text.as_bytes(), options)
}

pub fn parse_swf<R: BufRead>(reader: R, options: &SwfOptions) -> Result<ParsedSwf> {
    let mut jobs = Vec::new();
    let mut skipped = 0;
    let mut unix_start_time = None;

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix(';') {
            if let Some(value) = header_value(comment, "UnixStartTime") {
                unix_start_time = Some(value.parse().map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("invalid UnixStartTime {value:?}"),
                })?);
            }
            continue;
        }

        let fields = trimmed
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>().map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("non-numeric field {tok:?}"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if fields.len() != SWF_FIELDS {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected {SWF_FIELDS} fields, found {}", fields.len()),
            });
        }

        let procs = match options.processor_field {
            ProcessorField::Allocated => fallback(fields[F_ALLOCATED_PROCS], fields[F_REQUESTED_PROCS]),
            ProcessorField::Requested => fallback(fields[F_REQUESTED_PROCS], fields[F_ALLOCATED_PROCS]),
        };
        let run_time = fields[F_RUN_TIME];
        let user = fields[F_USER_ID];
        let submit = fields[F_SUBMIT];
        if run_time <= 0.0 || procs <= 0.0 || user < 0.0 || submit < 0.0 {
            skipped += 1;
            continue;
        }
        let id = fields[F_JOB_ID];
        if id < 1.0 || id.fract() != 0.0 || procs.fract() != 0.0 || user.fract() != 0.0 {
            return Err(Error::Parse {
                line: lineno,
                message: "job id, processor count and user id must be integers".into(),
            });
        }
        jobs.push(
            Job::new(id as u64, user as u64, submit, run_time, procs as u32).map_err(|e| Error::Parse {
                line: lineno,
                message: e.to_string(),
            })?,
        );
    }

    let jobs = JobSet::new(jobs).map_err(|e| Error::Parse {
        line: 0,
        message: e.to_string(),
    })?;
    Ok(ParsedSwf {
        jobs,
        skipped,
        unix_start_time,
    })
}

fn fallback(primary: f64, secondary: f64) -> f64 {
    if primary == -1.0 {
        secondary
    } else {
        primary
    }
}

fn header_value<'a>(comment: &'a str, key: &str) -> Option<&'a str> {
    let (k, v) = comment.split_once(':')?;
    (k.trim() == key).then(|| v.trim())
}

/// Writes jobs as SWF records. Unknown fields are -1; the size goes into
/// both processor columns so either [`ProcessorField`] reads it back.
pub fn write_swf<W: Write>(jobs: &JobSet, unix_start_time: Option<i64>, mut out: W) -> std::io::Result<()> {
    writeln!(out, "; Version: 2.2")?;
    if let Some(t) = unix_start_time {
        writeln!(out, "; UnixStartTime: {t}")?;
    }
    for job in jobs {
        writeln!(
            out,
            "{} {} -1 {} {} -1 -1 {} -1 -1 1 {} -1 -1 -1 -1 -1 -1",
            job.id, job.submit_time, job.execution_time, job.size, job.size, job.user
        )?;
    }
    Ok(())
}
