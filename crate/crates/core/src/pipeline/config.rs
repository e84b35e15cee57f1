//! Flat `key = value` files. Units live in key names (`kappa_mhz`), `#`
//! starts a comment, and every key must be consumed or the file is rejected.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug)]
pub struct KeyValues {
    path: String,
    entries: BTreeMap<String, (String, u64)>,
    used: RefCell<BTreeSet<String>>,
}

impl KeyValues {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&path.display().to_string(), &text)
    }

    pub fn parse(path: &str, text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = (i + 1) as u64;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse {
                path: path.into(),
                line,
                message,
            };
            let (k, v) = content
                .split_once('=')
                .ok_or_else(|| err(format!("expected key = value, got '{content}'")))?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() || v.is_empty() {
                return Err(err("empty key or value".into()));
            }
            if entries.insert(k.to_string(), (v.to_string(), line)).is_some() {
                return Err(err(format!("duplicate key '{k}'")));
            }
        }
        Ok(Self {
            path: path.into(),
            entries,
            used: RefCell::new(BTreeSet::new()),
        })
    }

    fn raw(&self, key: &str) -> Option<(&str, u64)> {
        let (v, line) = self.entries.get(key)?;
        self.used.borrow_mut().insert(key.to_string());
        Some((v.as_str(), *line))
    }

    fn parse_err(&self, line: u64, message: String) -> Error {
        Error::Parse {
            path: self.path.clone(),
            line,
            message,
        }
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse()
                .map(Some)
                .map_err(|_| self.parse_err(line, format!("cannot parse '{v}' for '{key}'"))),
        }
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?
            .ok_or_else(|| Error::Input(format!("{}: missing required key '{key}'", self.path)))
    }

    pub fn list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, line)) => v
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|_| self.parse_err(line, format!("cannot parse '{s}' in '{key}'")))
                })
                .collect::<Result<Vec<f64>>>()
                .map(Some),
        }
    }

    /// A quantity that may be given under one of several unit-tagged keys;
    /// each key comes with the factor converting it to the common unit.
    pub fn quantity(&self, options: &[(&str, f64)]) -> Result<Option<f64>> {
        let present: Vec<&(&str, f64)> = options.iter().filter(|(k, _)| self.entries.contains_key(*k)).collect();
        match present.as_slice() {
            [] => Ok(None),
            [(k, factor)] => Ok(self.get::<f64>(k)?.map(|v| v * factor)),
            many => Err(Error::UnitMismatch(format!(
                "{}: give only one of {}",
                self.path,
                many.iter().map(|(k, _)| *k).collect::<Vec<_>>().join(", ")
            ))),
        }
    }

    pub fn require_quantity(&self, options: &[(&str, f64)]) -> Result<f64> {
        self.quantity(options)?.ok_or_else(|| {
            Error::Input(format!(
                "{}: missing one of {}",
                self.path,
                options.iter().map(|(k, _)| *k).collect::<Vec<_>>().join(", ")
            ))
        })
    }

    /// Rejects any key that no getter asked for.
    pub fn finish(&self) -> Result<()> {
        let used = self.used.borrow();
        match self.entries.iter().find(|(k, _)| !used.contains(*k)) {
            Some((k, (_, line))) => Err(self.parse_err(*line, format!("unknown key '{k}'"))),
            None => Ok(()),
        }
    }

    /// Key/value pairs in key order, for echoing into reports.
    pub fn echo(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, (v, _))| (k.as_str(), v.as_str()))
    }
}
