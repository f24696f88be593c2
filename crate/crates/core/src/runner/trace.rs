//! Entropy traces (CSV) and plateau detection.

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const TRACE_HEADER: &str = "t_fs,entropy_nats,slater_rank,norm,total_energy_meV,coulomb_energy_meV";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub entropy: f64,
    pub slater_rank: usize,
    pub norm: f64,
    pub total_energy: f64,
    pub coulomb_energy: f64,
}

impl TraceRow {
    /// Shortest round-trip formatting: rereading gives the same bits.
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.t, self.entropy, self.slater_rank, self.norm, self.total_energy, self.coulomb_energy
        )
    }

    fn parse(line: &str, lineno: usize) -> Result<Self> {
        let bad = |reason: String| Error::Parse { line: lineno, reason };
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 6 {
            return Err(bad(format!("expected 6 fields, found {}", f.len())));
        }
        let num = |s: &str| s.trim().parse::<f64>().map_err(|e| bad(format!("`{s}`: {e}")));
        Ok(TraceRow {
            t: num(f[0])?,
            entropy: num(f[1])?,
            slater_rank: f[2].trim().parse().map_err(|e| bad(format!("`{}`: {e}", f[2])))?,
            norm: num(f[3])?,
            total_energy: num(f[4])?,
            coulomb_energy: num(f[5])?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EntropyTrace {
    rows: Vec<TraceRow>,
}

impl EntropyTrace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a row; times must increase strictly.
    pub fn push(&mut self, row: TraceRow) -> Result<()> {
        if let Some(last) = self.rows.last() {
            if !(row.t > last.t) {
                return Err(Error::Format(format!(
                    "trace times must increase: {} after {}",
                    row.t, last.t
                )));
            }
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn rows(&self) -> &[TraceRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.t).collect()
    }

    pub fn entropies(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.entropy).collect()
    }

    /// Drops rows later than `t`.
    pub fn truncate_after(&mut self, t: f64) {
        self.rows.retain(|r| r.t <= t);
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(64 * (self.rows.len() + 1));
        s.push_str(TRACE_HEADER);
        s.push('\n');
        for r in &self.rows {
            let _ = writeln!(s, "{}", r.to_csv());
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let file = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut trace = EntropyTrace::new();
        for (i, line) in file.lines().enumerate() {
            let line = line?;
            if i == 0 {
                if line.trim() != TRACE_HEADER {
                    return Err(Error::Parse {
                        line: 1,
                        reason: format!("unexpected header `{line}`"),
                    });
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            trace.push(TraceRow::parse(&line, i + 1)?)?;
        }
        Ok(trace)
    }
}

/// Streams rows to a CSV file as they are produced.
pub(crate) struct TraceWriter {
    out: std::io::BufWriter<std::fs::File>,
}

impl TraceWriter {
    /// Starts a new file, rewriting any `existing` rows first.
    pub(crate) fn create(path: &Path, existing: &EntropyTrace) -> Result<Self> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        out.write_all(existing.to_csv().as_bytes())?;
        out.flush()?;
        Ok(TraceWriter { out })
    }

    pub(crate) fn append(&mut self, row: &TraceRow) -> Result<()> {
        writeln!(self.out, "{}", row.to_csv())?;
        self.out.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateauReport {
    /// Mean entropy over the trailing window, nats.
    pub stationary_value: f64,
    /// Earliest time from which the entropy stays within `tol` to the end, fs.
    pub onset_time: f64,
    /// fs
    pub window: f64,
    pub tol: f64,
    /// The trailing window is fully covered and its spread is ≤ `tol`.
    pub converged: bool,
}

impl PlateauReport {
    pub const CSV_HEADER: &'static str = "stationary_entropy_nats,onset_fs,window_fs,tol_nats,converged";

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.stationary_value, self.onset_time, self.window, self.tol, self.converged
        )
    }
}

/// Trailing-window plateau of a trace.
///
/// The window holds the rows with t ≥ t_last − `window`; it is converged when
/// it spans the full window and max − min ≤ `tol`. The onset is found by
/// growing the tail backwards while its spread stays within `tol`.
pub fn detect_plateau(trace: &EntropyTrace, window: f64, tol: f64) -> Result<PlateauReport> {
    let rows = trace.rows();
    let Some(last) = rows.last() else {
        return Err(Error::Degenerate("cannot detect a plateau in an empty trace".into()));
    };
    if !(window > 0.0) || !(tol > 0.0) {
        return Err(Error::config("plateau", "window and tolerance must be > 0"));
    }
    let start = last.t - window;
    let tail: Vec<&TraceRow> = rows.iter().filter(|r| r.t >= start - 1e-9 * window).collect();
    let (lo, hi) = tail
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r.entropy), hi.max(r.entropy)));
    let covered = rows[0].t <= start + 1e-9 * window && tail.len() >= 2;
    let stationary_value = tail.iter().map(|r| r.entropy).sum::<f64>() / tail.len() as f64;

    let (mut lo_o, mut hi_o) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut onset_time = last.t;
    for r in rows.iter().rev() {
        lo_o = lo_o.min(r.entropy);
        hi_o = hi_o.max(r.entropy);
        if hi_o - lo_o > tol {
            break;
        }
        onset_time = r.t;
    }
    Ok(PlateauReport {
        stationary_value,
        onset_time,
        window,
        tol,
        converged: covered && hi - lo <= tol,
    })
}
