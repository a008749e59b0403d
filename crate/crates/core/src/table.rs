//! Column-oriented result tables with CSV and JSON emission.
//!
//! Numbers are written with 12 significant digits in CSV and with the
//! shortest round-trip representation in JSON. Neither format contains
//! anything run-dependent except the optional timestamp in the header.

use std::fmt::Write as _;
use std::path::Path;

use indexmap::IndexMap;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::params::SystemParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Column {
    Integer(Vec<i64>),
    Real(Vec<f64>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Integer(v) => v.len(),
            Column::Real(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn format_cell(&self, row: usize, out: &mut String) {
        match self {
            Column::Integer(v) => {
                let _ = write!(out, "{}", v[row]);
            }
            Column::Real(v) => {
                let _ = write!(out, "{:.11e}", v[row]);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub params: String,
    pub params_hash: String,
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

impl Provenance {
    pub fn new(params: &SystemParams) -> Self {
        Self {
            params: params.to_config_string(),
            params_hash: params.hash(),
            version: concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION")).to_string(),
            timestamp: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "RawTable", into = "RawTable")]
pub struct SweepTable {
    pub swept: String,
    pub provenance: Provenance,
    /// Scalars that do not vary along the sweep (thresholds, radii, ...).
    pub summary: IndexMap<String, Value>,
    pub columns: IndexMap<String, Column>,
}

/// On-disk layout. Integer columns are listed by name so that an empty
/// column keeps its type when read back.
#[derive(Serialize, Deserialize)]
struct RawTable {
    swept: String,
    #[serde(flatten)]
    provenance: Provenance,
    #[serde(default)]
    summary: IndexMap<String, Value>,
    columns: IndexMap<String, Column>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    integer_columns: Vec<String>,
}

impl From<SweepTable> for RawTable {
    fn from(t: SweepTable) -> Self {
        let integer_columns = t
            .columns
            .iter()
            .filter(|(_, c)| matches!(c, Column::Integer(_)))
            .map(|(name, _)| name.clone())
            .collect();
        Self { swept: t.swept, provenance: t.provenance, summary: t.summary, columns: t.columns, integer_columns }
    }
}

impl From<RawTable> for SweepTable {
    fn from(raw: RawTable) -> Self {
        let columns = raw
            .columns
            .into_iter()
            .map(|(name, col)| {
                let integer = raw.integer_columns.contains(&name);
                let col = match col {
                    Column::Integer(v) if !integer => Column::Real(v.into_iter().map(|x| x as f64).collect()),
                    Column::Real(v) if integer => Column::Integer(v.into_iter().map(|x| x as i64).collect()),
                    c => c,
                };
                (name, col)
            })
            .collect();
        Self { swept: raw.swept, provenance: raw.provenance, summary: raw.summary, columns }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl SweepTable {
    pub fn new(swept: impl Into<String>, params: &SystemParams) -> Self {
        Self {
            swept: swept.into(),
            provenance: Provenance::new(params),
            summary: IndexMap::new(),
            columns: IndexMap::new(),
        }
    }

    pub fn push_real(&mut self, name: &str, values: Vec<f64>) -> &mut Self {
        self.columns.insert(name.to_string(), Column::Real(values));
        self
    }

    pub fn push_integer(&mut self, name: &str, values: Vec<i64>) -> &mut Self {
        self.columns.insert(name.to_string(), Column::Integer(values));
        self
    }

    /// Adds `name_re` and `name_im`.
    pub fn push_complex(&mut self, name: &str, values: &[Complex64]) -> &mut Self {
        self.push_real(&format!("{name}_re"), values.iter().map(|z| z.re).collect());
        self.push_real(&format!("{name}_im"), values.iter().map(|z| z.im).collect())
    }

    pub fn set_summary(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.summary.insert(key.to_string(), value.into());
        self
    }

    pub fn n_rows(&self) -> usize {
        self.columns.values().next().map_or(0, Column::len)
    }

    pub fn real(&self, name: &str) -> Option<&[f64]> {
        match self.columns.get(name)? {
            Column::Real(v) => Some(v),
            Column::Integer(_) => None,
        }
    }

    pub fn integer(&self, name: &str) -> Option<&[i64]> {
        match self.columns.get(name)? {
            Column::Integer(v) => Some(v),
            Column::Real(_) => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let expected = self.n_rows();
        for (name, col) in &self.columns {
            if col.len() != expected {
                return Err(Error::RaggedTable {
                    name: name.clone(),
                    len: col.len(),
                    expected,
                });
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        self.validate()?;
        let mut out = String::new();
        for line in self.provenance.params.lines() {
            let _ = writeln!(out, "# params: {line}");
        }
        let _ = writeln!(out, "# params_hash: {}", self.provenance.params_hash);
        let _ = writeln!(out, "# version: {}", self.provenance.version);
        let _ = writeln!(out, "# swept: {}", self.swept);
        for (key, value) in &self.summary {
            let _ = writeln!(out, "# {key}: {value}");
        }
        if let Some(ts) = &self.provenance.timestamp {
            let _ = writeln!(out, "# timestamp: {ts}");
        }
        let names: Vec<&str> = self.columns.keys().map(String::as_str).collect();
        let _ = writeln!(out, "{}", names.join(","));
        for row in 0..self.n_rows() {
            for (k, col) in self.columns.values().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                col.format_cell(row, &mut out);
            }
            out.push('\n');
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String> {
        self.validate()?;
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let table: SweepTable = serde_json::from_str(text)?;
        table.validate()?;
        Ok(table)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn emit(&self, path: &Path, format: Format) -> Result<()> {
        std::fs::write(path, self.render(format)?)?;
        Ok(())
    }
}
