//! Tabular experiment output as CSV or JSON.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::kernel::IndexConvention;
use crate::oracle::{BatteryReport, GENERATOR_NAME};

use super::config::ExperimentConfig;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Number(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Number(x) => render_number(*x),
            Cell::Text(s) => s.clone(),
        }
    }
}

fn render_number(x: f64) -> String {
    let mag = x.abs();
    if mag == 0.0 {
        return "0".to_string();
    }
    if x.is_finite() && !(1e-6..1e15).contains(&mag) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Number(x)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Number(if b { 1.0 } else { 0.0 })
    }
}

impl From<usize> for Cell {
    fn from(k: usize) -> Self {
        Cell::Number(k as f64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cell::Number(x) if x.is_finite() => serializer.serialize_f64(*x),
            Cell::Number(x) => serializer.serialize_str(&render_number(*x)),
            Cell::Text(s) => serializer.serialize_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Appends a row, rejecting a wrong width or a NaN.
    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::domain(
                "Table::push",
                format!("expected {} cells, got {}", self.columns.len(), row.len()),
            ));
        }
        if row.iter().any(|c| matches!(c, Cell::Number(x) if x.is_nan())) {
            return Err(Error::NonFinite("experiment row"));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match &r[i] {
                    Cell::Number(x) => *x,
                    Cell::Text(_) => f64::NAN,
                })
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentOutput {
    pub config: ExperimentConfig,
    pub index_convention: &'static str,
    pub generator_name: &'static str,
    pub table: Table,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub battery: Option<BatteryReport>,
}

impl ExperimentOutput {
    pub fn new(config: ExperimentConfig, table: Table, checks: Vec<Check>) -> Self {
        ExperimentOutput {
            config,
            index_convention: IndexConvention::RESOLVED.describe(),
            generator_name: GENERATOR_NAME,
            table,
            checks,
            battery: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed_checks(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect()
    }

    /// CSV with `# ` header lines carrying the resolved configuration and the checks.
    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::new();
        out.push_str(&format!("# config: {}\n", serde_json::to_string(&self.config)?));
        out.push_str(&format!("# index_convention: {}\n", self.index_convention));
        out.push_str(&format!("# generator: {}\n", self.generator_name));
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("# check {}: {} ({})\n", c.name, status, c.detail));
        }
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        writer.write_record(&self.table.columns)?;
        for row in &self.table.rows {
            writer.write_record(row.iter().map(Cell::render))?;
        }
        let bytes = writer.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        out.push_str(&String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))?);
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}
