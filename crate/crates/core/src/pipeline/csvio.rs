//! Comma-separated data files: `#` comment lines, one header row, '.' as the
//! decimal point.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fit::{Histogram, Scan, ScanMeta};
use crate::units::{ghz_to_rad_s, rad_s_to_ghz, wavelength_offset_to_omega};

/// A parsed table: header names and numeric rows with their line numbers.
pub struct NumericTable {
    pub path: String,
    pub headers: Vec<String>,
    pub rows: Vec<(u64, Vec<f64>)>,
}

impl NumericTable {
    pub fn read(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        Self::parse(&path.display().to_string(), &bytes)
    }

    pub fn parse(path: &str, bytes: &[u8]) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(bytes);
        let err = |line: u64, message: String| Error::Parse {
            path: path.into(),
            line,
            message,
        };
        let headers: Vec<String> = rdr
            .headers()
            .map_err(|e| err(e.position().map_or(1, |p| p.line()), e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        if headers.iter().all(|h| h.is_empty()) {
            return Err(err(1, "empty file: no header row".into()));
        }
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| err(e.position().map_or(0, |p| p.line()), e.to_string()))?;
            let line = rec.position().map_or(0, |p| p.line());
            let values = rec
                .iter()
                .enumerate()
                .map(|(i, field)| {
                    field
                        .parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| err(line, format!("column {}: '{field}' is not a number", i + 1)))
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push((line, values));
        }
        if rows.is_empty() {
            return Err(err(2, "no data rows".into()));
        }
        Ok(Self {
            path: path.into(),
            headers,
            rows,
        })
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    pub fn require_column(&self, name: &str) -> Result<usize> {
        self.column_index(name).ok_or_else(|| Error::Parse {
            path: self.path.clone(),
            line: 1,
            message: format!("missing column '{name}' (have {})", self.headers.join(",")),
        })
    }

    pub fn column(&self, idx: usize) -> Vec<f64> {
        self.rows.iter().map(|(_, r)| r[idx]).collect()
    }

    fn at_line(&self, row: usize, message: String) -> Error {
        Error::Parse {
            path: self.path.clone(),
            line: self.rows[row].0,
            message,
        }
    }
}

fn check_counts(t: &NumericTable, counts: &[f64]) -> Result<()> {
    if let Some(i) = counts.iter().position(|c| *c < 0.0) {
        return Err(t.at_line(i, format!("negative count {}", counts[i])));
    }
    Ok(())
}

fn check_increasing(t: &NumericTable, axis: &[f64], what: &str) -> Result<()> {
    if let Some(i) = axis.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(t.at_line(i + 1, format!("{what} not strictly increasing")));
    }
    Ok(())
}

/// Columns `t_ns,counts`.
pub fn read_histogram(path: &Path) -> Result<Histogram> {
    let t = NumericTable::read(path)?;
    let times = t.column(t.require_column("t_ns")?);
    let counts = t.column(t.require_column("counts")?);
    check_counts(&t, &counts)?;
    check_increasing(&t, &times, "t_ns")?;
    Histogram::new(times, counts, path.display().to_string()).map_err(|e| Error::Parse {
        path: t.path.clone(),
        line: 1,
        message: e.to_string(),
    })
}

/// Columns `freq_ghz,counts`; further columns are ignored.
pub fn read_scan(path: &Path) -> Result<Scan> {
    let t = NumericTable::read(path)?;
    let f = t.column(t.require_column("freq_ghz")?);
    let counts = t.column(t.require_column("counts")?);
    check_counts(&t, &counts)?;
    check_increasing(&t, &f, "freq_ghz")?;
    Scan::new(
        f,
        counts,
        ScanMeta {
            tag: path.display().to_string(),
            ..ScanMeta::default()
        },
    )
}

/// Detuning column unit of a lifetime-vs-detuning file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetuningUnit {
    Nanometers,
    Gigahertz,
}

/// Rows of (delta, tau_ns, sigma_tau_ns) with delta in the file's unit.
pub struct DetuningTable {
    pub unit: DetuningUnit,
    pub delta: Vec<f64>,
    pub tau_ns: Vec<f64>,
    pub sigma_tau_ns: Vec<f64>,
}

impl DetuningTable {
    /// Detunings as frequency offsets in GHz. Wavelength offsets need the
    /// reference wavelength.
    pub fn delta_ghz(&self, lambda_nm: Option<f64>) -> Result<Vec<f64>> {
        match self.unit {
            DetuningUnit::Gigahertz => Ok(self.delta.clone()),
            DetuningUnit::Nanometers => {
                let lambda = lambda_nm
                    .filter(|l| *l > 0.0)
                    .ok_or_else(|| Error::Input("delta_nm columns need a positive --lambda-nm".into()))?;
                Ok(self
                    .delta
                    .iter()
                    .map(|d| rad_s_to_ghz(wavelength_offset_to_omega(d * 1e-9, lambda * 1e-9)))
                    .collect())
            }
        }
    }
}

/// Columns `delta_nm` or `delta_ghz` (not both), `tau_ns`, `sigma_tau_ns`.
pub fn read_detuning(path: &Path) -> Result<DetuningTable> {
    let t = NumericTable::read(path)?;
    let (unit, col) = match (t.column_index("delta_nm"), t.column_index("delta_ghz")) {
        (Some(_), Some(_)) => {
            return Err(Error::UnitMismatch(format!(
                "{}: both delta_nm and delta_ghz columns present",
                t.path
            )))
        }
        (Some(i), None) => (DetuningUnit::Nanometers, i),
        (None, Some(i)) => (DetuningUnit::Gigahertz, i),
        (None, None) => {
            return Err(Error::Parse {
                path: t.path.clone(),
                line: 1,
                message: "need a delta_nm or delta_ghz column".into(),
            })
        }
    };
    let tau = t.column(t.require_column("tau_ns")?);
    let sigma = t.column(t.require_column("sigma_tau_ns")?);
    for (i, (tau, s)) in tau.iter().zip(&sigma).enumerate() {
        if !(*tau > 0.0) || !(*s > 0.0) {
            return Err(t.at_line(i, "tau_ns and sigma_tau_ns must be positive".into()));
        }
    }
    Ok(DetuningTable {
        unit,
        delta: t.column(col),
        tau_ns: tau,
        sigma_tau_ns: sigma,
    })
}

/// Shortest text that parses back to the same float.
fn num(v: f64) -> String {
    format!("{v}")
}

pub fn write_histogram<W: Write>(mut out: W, comments: &[String], hist: &Histogram) -> Result<()> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    writeln!(out, "t_ns,counts")?;
    for (t, c) in hist.bin_centers.iter().zip(&hist.counts) {
        writeln!(out, "{},{}", num(*t), num(*c))?;
    }
    Ok(())
}

/// The integrated scan as `freq_ghz,counts` followed by one column per scan.
pub fn write_scans<W: Write>(mut out: W, comments: &[String], integrated: &Scan, scans: &[Scan]) -> Result<()> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    write!(out, "freq_ghz,counts")?;
    if scans.len() > 1 {
        for s in scans {
            write!(out, ",scan_{:03}", s.meta.index)?;
        }
    }
    writeln!(out)?;
    for (i, f) in integrated.frequency_offsets.iter().enumerate() {
        write!(out, "{},{}", num(*f), num(integrated.counts[i]))?;
        if scans.len() > 1 {
            for s in scans {
                write!(out, ",{}", num(s.counts[i]))?;
            }
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn write_detuning<W: Write>(mut out: W, comments: &[String], delta_ghz: &[f64], tau: &[f64], sigma: &[f64]) -> Result<()> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    writeln!(out, "delta_ghz,tau_ns,sigma_tau_ns")?;
    for i in 0..delta_ghz.len() {
        writeln!(out, "{},{},{}", num(delta_ghz[i]), num(tau[i]), num(sigma[i]))?;
    }
    Ok(())
}

/// GHz detuning → rad/s, for feeding model code.
pub fn detuning_rad_s(delta_ghz: f64) -> f64 {
    ghz_to_rad_s(delta_ghz)
}
