//! Line-oriented JSON records and plain-text summary tables.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::Result;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// One output record. Every record names the model, the truncation
/// parameter the value stabilized at (when there is one), the seed and
/// the tool version.
#[derive(Clone, Debug, Serialize)]
pub struct Record<'a, T: Serialize> {
    pub record: &'a str,
    pub model: String,
    pub n_star: Option<u64>,
    pub seed: u64,
    pub version: &'static str,
    pub data: &'a T,
}

impl<'a, T: Serialize> Record<'a, T> {
    pub fn new(record: &'a str, model: impl ToString, n_star: Option<u64>, seed: u64, data: &'a T) -> Self {
        Record { record, model: model.to_string(), n_star, seed, version: VERSION, data }
    }

    /// The record as a single JSON line, without the trailing newline.
    pub fn to_line(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

/// A left-aligned text table.
#[derive(Clone, Debug, Default)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: ToString>(header: impl IntoIterator<Item = S>) -> Self {
        Table { header: header.into_iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn row<S: ToString>(&mut self, cells: impl IntoIterator<Item = S>) {
        self.rows.push(cells.into_iter().map(|s| s.to_string()).collect());
    }

    pub fn render(&self) -> String {
        let cols = self.rows.iter().map(Vec::len).chain([self.header.len()]).max().unwrap_or(0);
        let mut width = vec![0; cols];
        for r in std::iter::once(&self.header).chain(&self.rows) {
            for (i, c) in r.iter().enumerate() {
                width[i] = width[i].max(c.chars().count());
            }
        }
        let mut out = String::new();
        let mut line = |r: &[String]| {
            let cells: Vec<String> = (0..cols)
                .map(|i| {
                    let c = r.get(i).map(String::as_str).unwrap_or("");
                    format!("{c}{}", " ".repeat(width[i] - c.chars().count()))
                })
                .collect();
            let _ = writeln!(out, "{}", cells.join("  ").trim_end());
        };
        line(&self.header);
        line(&width.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>());
        for r in &self.rows {
            line(r);
        }
        out
    }
}
