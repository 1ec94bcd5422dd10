use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::{Format, ScenarioConfig};
use super::error::HarnessError;

/// Variable consulted for the output directory when neither the flag nor the
/// document names a file.
pub const OUT_DIR_ENV: &str = "CCPLAB_OUT_DIR";

/// Column-named numeric table. Complex quantities occupy `*_re`/`*_im` pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| (*c).to_owned()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultEnvelope {
    pub scenario: String,
    pub version: String,
    pub scalar: String,
    pub config: ScenarioConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_seconds: Option<f64>,
    pub summary: BTreeMap<String, f64>,
    pub table: Table,
}

/// Seventeen significant digits, enough to round-trip any `f64`.
fn number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

pub fn render(envelope: &ResultEnvelope, format: Format) -> Result<String, HarnessError> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(envelope).map_err(|e| HarnessError::Io(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let mut s = envelope.table.columns.join(",");
            s.push('\n');
            for row in &envelope.table.rows {
                let cells: Vec<String> = row.iter().map(|&v| number(v)).collect();
                let _ = writeln!(s, "{}", cells.join(","));
            }
            Ok(s)
        }
    }
}

/// Where a run writes: explicit path, else `$CCPLAB_OUT_DIR/<scenario>.<ext>`,
/// else the working directory.
pub fn resolve_output(config: &ScenarioConfig) -> PathBuf {
    if let Some(p) = &config.output {
        return p.clone();
    }
    let file = format!("{}.{}", config.scenario.name(), config.format.extension());
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir).join(file),
        _ => PathBuf::from(file),
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never see a partial artifact.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), HarnessError> {
    let io = |e: std::io::Error| HarnessError::Io(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub fn emit(envelope: &ResultEnvelope, format: Format, path: &Path) -> Result<(), HarnessError> {
    write_atomic(path, &render(envelope, format)?)
}
