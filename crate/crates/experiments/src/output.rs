use std::io::Write;
use std::path::Path;

use crate::error::{ExpError, Result};

/// Trace tolerance applied to every emitted row.
pub const ROW_TRACE_TOL: f64 = 1e-8;

/// One sample: steady state at a sweep value, or a trajectory point at time `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResultRow {
    pub x: f64,
    pub s22: f64,
    pub s33: f64,
    pub s11: f64,
    pub s32_re: f64,
    pub s32_im: f64,
    pub j_h: f64,
    pub j_c: f64,
    pub entropy_rate: f64,
    pub min_eigenvalue: f64,
}

impl ResultRow {
    pub const HEADER: [&'static str; 9] =
        ["s22", "s33", "s11", "s32_re", "s32_im", "j_h", "j_c", "entropy_rate", "min_eigenvalue"];

    pub fn values(&self) -> [f64; 9] {
        [self.s22, self.s33, self.s11, self.s32_re, self.s32_im, self.j_h, self.j_c, self.entropy_rate, self.min_eigenvalue]
    }

    pub fn excited_sum(&self) -> f64 {
        self.s22 + self.s33
    }

    pub fn check(&self) -> Result<()> {
        if !self.x.is_finite() || self.values().iter().any(|v| !v.is_finite()) {
            return Err(ExpError::Invariant(format!("non-finite entry in row at {}", self.x)));
        }
        let tr = self.s11 + self.s22 + self.s33;
        if (tr - 1.0).abs() > ROW_TRACE_TOL {
            return Err(ExpError::Invariant(format!("populations sum to {tr} at {}", self.x)));
        }
        Ok(())
    }
}

/// Column-named numeric table, written as CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn format_value(v: f64) -> String {
    format!("{v:.11e}")
}

impl Table {
    pub fn new(header: Vec<String>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn write_to<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        wtr.write_record(&self.header)?;
        for row in &self.rows {
            wtr.write_record(row.iter().map(|v| format_value(*v)))?;
        }
        wtr.flush().map_err(|source| ExpError::Io { path: "<output>".into(), source })?;
        Ok(())
    }

    /// Writes to `path`, or stdout when `None`.
    pub fn write(&self, path: Option<&Path>) -> Result<()> {
        match path {
            Some(p) => {
                let f = std::fs::File::create(p).map_err(|source| ExpError::Io { path: p.display().to_string(), source })?;
                self.write_to(std::io::BufWriter::new(f))
            }
            None => self.write_to(std::io::stdout().lock()),
        }
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_to(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is ascii"))
    }
}
