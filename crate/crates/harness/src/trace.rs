//! CSV files: measurement traces in, trajectories out.

use std::io::{Read, Write};
use std::path::Path;

use multisine_core::pipeline::TrajectoryRecord;
use multisine_core::signal::SampledTrace;

use crate::HarnessError;

/// Relative slack on grid times before a row counts as off-grid.
const GRID_SLACK: f64 = 1e-6;

/// Shortest text that parses back to the same bits.
fn num(v: f64) -> String {
    format!("{v:?}")
}

fn csv_err(path: &Path, e: csv::Error) -> HarnessError {
    HarnessError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

/// Header matching [`TrajectoryRecord`] field order, one column per component.
pub fn trajectory_header(n: usize) -> Vec<String> {
    let mut h = vec!["time".to_string(), "y".to_string(), "Delta".to_string()];
    for prefix in ["theta_hat", "theta_ft", "omega_grad", "omega_ft"] {
        h.extend((1..=n).map(|i| format!("{prefix}_{i}")));
    }
    h
}

fn push_optional(row: &mut Vec<String>, v: Option<&Vec<f64>>, n: usize) {
    match v {
        Some(v) => row.extend(v.iter().map(|&x| num(x))),
        None => row.extend(std::iter::repeat_n(String::new(), n)),
    }
}

/// Writes trajectories; components not yet available are empty fields.
pub fn write_trajectory<W: Write>(w: W, n: usize, records: &[TrajectoryRecord]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(trajectory_header(n))?;
    let mut row = Vec::with_capacity(3 + 4 * n);
    for r in records {
        row.clear();
        row.extend([num(r.time), num(r.y), num(r.delta)]);
        row.extend(r.theta_hat.iter().map(|&x| num(x)));
        push_optional(&mut row, r.theta_ft.as_ref(), n);
        push_optional(&mut row, r.omega_grad.as_ref(), n);
        push_optional(&mut row, r.omega_ft.as_ref(), n);
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

/// Writes a `time,y` measurement file.
pub fn write_trace<W: Write>(w: W, trace: &SampledTrace) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["time", "y"])?;
    for (k, &y) in trace.values.iter().enumerate() {
        out.write_record([num(trace.time(k)), num(y)])?;
    }
    out.flush()?;
    Ok(())
}

/// Parses a CSV with `time` and `y` columns (others are ignored) and
/// checks that the times follow a uniform grid of `sample_period`.
///
/// Rows are numbered from 1, the header being row 0.
pub fn read_trace<R: Read>(r: R, sample_period: f64) -> Result<SampledTrace, HarnessError> {
    let mut input = csv::Reader::from_reader(r);
    let header = input
        .headers()
        .map_err(|e| HarnessError::Input {
            row: 0,
            reason: e.to_string(),
        })?
        .clone();
    let column = |name: &str| {
        header.iter().position(|h| h.trim() == name).ok_or_else(|| HarnessError::Input {
            row: 0,
            reason: format!("missing column `{name}`"),
        })
    };
    let (ti, yi) = (column("time")?, column("y")?);

    let mut start = 0.0;
    let mut values = Vec::new();
    for (k, rec) in input.records().enumerate() {
        let row = k + 1;
        let rec = rec.map_err(|e| HarnessError::Input {
            row,
            reason: e.to_string(),
        })?;
        let field = |i: usize, name: &str| -> Result<f64, HarnessError> {
            let text = rec.get(i).unwrap_or("").trim();
            text.parse::<f64>().map_err(|_| HarnessError::Input {
                row,
                reason: format!("`{name}` is not a number: {text:?}"),
            })
        };
        let t = field(ti, "time")?;
        let y = field(yi, "y")?;
        if k == 0 {
            start = t;
        } else {
            let expected = start + k as f64 * sample_period;
            if (t - expected).abs() > GRID_SLACK * sample_period {
                return Err(HarnessError::Input {
                    row,
                    reason: format!(
                        "time {t} is off the uniform grid of period {sample_period} (expected {expected})"
                    ),
                });
            }
        }
        values.push(y);
    }
    if values.is_empty() {
        return Err(HarnessError::Input {
            row: 1,
            reason: "no samples".into(),
        });
    }
    Ok(SampledTrace {
        sample_period,
        start_time: start,
        values,
    })
}

pub fn read_trace_file(path: &Path, sample_period: f64) -> Result<SampledTrace, HarnessError> {
    let file = std::fs::File::open(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_trace(std::io::BufReader::new(file), sample_period)
}

fn create(path: &Path) -> Result<std::io::BufWriter<std::fs::File>, HarnessError> {
    std::fs::File::create(path)
        .map(std::io::BufWriter::new)
        .map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })
}

pub fn write_trajectory_file(path: &Path, n: usize, records: &[TrajectoryRecord]) -> Result<(), HarnessError> {
    write_trajectory(create(path)?, n, records).map_err(|e| csv_err(path, e))
}

pub fn write_trace_file(path: &Path, trace: &SampledTrace) -> Result<(), HarnessError> {
    write_trace(create(path)?, trace).map_err(|e| csv_err(path, e))
}
