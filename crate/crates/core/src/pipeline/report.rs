//! Versioned JSON (or flat CSV) reports.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::measurement::Measurement;

pub const SCHEMA_VERSION: u32 = 1;

/// Full-precision text for a float: 17 significant digits, round-trips
/// exactly through parsing.
pub fn exact_text(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// One reported number. `sigma` is either a 17-digit value or "exact".
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultValue {
    pub name: String,
    pub value: String,
    pub sigma: String,
    /// Rounded to `decimals` places, with the sigma when one exists.
    pub display: String,
    pub decimals: usize,
    pub unit: String,
}

impl ResultValue {
    pub fn measured(name: &str, m: Measurement, decimals: usize, unit: &str) -> Self {
        Self {
            name: name.into(),
            value: exact_text(m.value),
            sigma: exact_text(m.sigma),
            display: format!("{:.*} ± {:.*}", decimals, m.value, decimals, m.sigma),
            decimals,
            unit: unit.into(),
        }
    }

    pub fn exact(name: &str, v: f64, decimals: usize, unit: &str) -> Self {
        Self {
            name: name.into(),
            value: exact_text(v),
            sigma: "exact".into(),
            display: format!("{v:.decimals$}"),
            decimals,
            unit: unit.into(),
        }
    }

    pub fn value_f64(&self) -> f64 {
        self.value.parse().unwrap_or(f64::NAN)
    }

    pub fn sigma_f64(&self) -> Option<f64> {
        self.sigma.parse().ok()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: String,
    pub tool_version: String,
    pub command: String,
    /// The argument list that reproduces this report.
    pub argv: Vec<String>,
    /// Resolved inputs, including defaults and file digests.
    pub inputs: BTreeMap<String, String>,
    pub results: Vec<ResultValue>,
    /// Identifiers of the relations used, in order of use.
    pub provenance: Vec<String>,
    pub warnings: Vec<String>,
    /// Present for commands that fit; false marks a partial report.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    /// Tabular attachments (validation tables, per-point residuals).
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub tables: BTreeMap<String, Table>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    pub fn new(command: &str, argv: Vec<String>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool: env!("CARGO_PKG_NAME").into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            argv,
            inputs: BTreeMap::new(),
            results: Vec::new(),
            provenance: Vec::new(),
            warnings: Vec::new(),
            converged: None,
            tables: BTreeMap::new(),
        }
    }

    pub fn input(&mut self, key: &str, value: impl ToString) {
        self.inputs.insert(key.into(), value.to_string());
    }

    pub fn push(&mut self, r: ResultValue) {
        self.results.push(r);
    }

    pub fn cite(&mut self, id: &str) {
        if !self.provenance.iter().any(|p| p == id) {
            self.provenance.push(id.into());
        }
    }

    pub fn result(&self, name: &str) -> Option<&ResultValue> {
        self.results.iter().find(|r| r.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// name,value,sigma,display,unit rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["name", "value", "sigma", "display", "unit"])
            .map_err(csv_err)?;
        for r in &self.results {
            w.write_record([&r.name, &r.value, &r.sigma, &r.display, &r.unit])
                .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub(crate) fn csv_err(e: csv::Error) -> crate::error::Error {
    crate::error::Error::Input(e.to_string())
}
