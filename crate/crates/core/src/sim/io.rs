//! CSV form of sweep results and iteration tables.
//!
//! Sweep rows use the header
//! `sweep_variable,value,scheme,mean_snr_db,ser,mean_iterations`, one row per
//! scheme and sweep value. Floats carry ten significant digits; cells that do
//! not apply to a scheme are left empty.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::sim::iteration::IterationRow;
use crate::sim::scheme::Scheme;
use crate::sim::sweep::{SchemeStats, SimResult, SweepVariable};

pub const SWEEP_HEADER: [&str; 6] = [
    "sweep_variable",
    "value",
    "scheme",
    "mean_snr_db",
    "ser",
    "mean_iterations",
];
pub const ITERATION_HEADER: [&str; 5] = [
    "n_i",
    "robust_plain",
    "robust_accelerated",
    "nonrobust_plain",
    "nonrobust_accelerated",
];

pub fn format_float(x: f64) -> String {
    format!("{x:.9e}")
}

fn format_opt(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

/// Writes sweep rows as results arrive, flushing after each sweep point so a
/// run that fails midway leaves the completed points on disk.
pub struct SweepCsvWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> SweepCsvWriter<W> {
    pub fn new(out: W) -> Result<Self> {
        let mut inner = csv::Writer::from_writer(out);
        inner.write_record(SWEEP_HEADER)?;
        inner.flush()?;
        Ok(Self { inner })
    }

    pub fn write(&mut self, r: &SimResult) -> Result<()> {
        for s in &r.schemes {
            self.inner.write_record([
                r.sweep_variable.name().to_string(),
                format_float(r.sweep_value),
                s.scheme.name().to_string(),
                format_float(s.mean_snr_db),
                format_opt(s.ser),
                format_opt(s.mean_iterations),
            ])?;
        }
        self.inner.flush()?;
        Ok(())
    }
}

pub fn write_sweep_csv<W: Write>(results: &[SimResult], out: W) -> Result<()> {
    let mut w = SweepCsvWriter::new(out)?;
    for r in results {
        w.write(r)?;
    }
    Ok(())
}

fn parse_float(field: &str, what: &str) -> Result<f64> {
    field
        .parse()
        .map_err(|_| Error::Config(format!("bad {what} value {field:?}")))
}

fn parse_opt(field: &str, what: &str) -> Result<Option<f64>> {
    if field.is_empty() {
        Ok(None)
    } else {
        parse_float(field, what).map(Some)
    }
}

/// Reads a sweep CSV back. Consecutive rows with the same variable and value
/// form one result.
pub fn read_sweep_csv<R: Read>(input: R) -> Result<Vec<SimResult>> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers()?.clone();
    if header.iter().ne(SWEEP_HEADER) {
        return Err(Error::Config(format!("unexpected CSV header {header:?}")));
    }
    let mut out: Vec<SimResult> = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let variable: SweepVariable = rec[0].parse()?;
        let value = parse_float(&rec[1], "value")?;
        let stats = SchemeStats {
            scheme: rec[2].parse::<Scheme>()?,
            mean_snr_db: parse_float(&rec[3], "mean_snr_db")?,
            ser: parse_opt(&rec[4], "ser")?,
            mean_iterations: parse_opt(&rec[5], "mean_iterations")?,
        };
        match out.last_mut() {
            Some(last) if last.sweep_variable == variable && last.sweep_value == value => last.schemes.push(stats),
            _ => out.push(SimResult {
                sweep_variable: variable,
                sweep_value: value,
                schemes: vec![stats],
            }),
        }
    }
    Ok(out)
}

pub fn write_iteration_csv<W: Write>(rows: &[IterationRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ITERATION_HEADER)?;
    for r in rows {
        w.write_record([
            r.n_i.to_string(),
            format_float(r.robust_plain),
            format_float(r.robust_accelerated),
            format_float(r.nonrobust_plain),
            format_float(r.nonrobust_accelerated),
        ])?;
    }
    w.flush()?;
    Ok(())
}
