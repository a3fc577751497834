//! CSV and JSON artifacts with their run manifests.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lindblad::SpectrumResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// Twelve significant digits in scientific notation.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.11e}")
}

/// A header plus string cells, written as RFC 4180 CSV.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Table { header: header.iter().map(|h| h.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    pub fn push_numbers(&mut self, values: &[f64]) {
        self.rows.push(values.iter().map(|&v| fmt_num(v)).collect());
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn write_to<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_to(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        self.write_to(fs::File::create(path)?)
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Resolved inputs of one run, stored next to each artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub params: serde_json::Value,
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn new(command: &str, params: serde_json::Value) -> Self {
        Manifest { tool: "chiral-wgm".into(), version: crate::VERSION.into(), command: command.into(), params, outputs: Vec::new() }
    }
}

/// `dir/name.csv` → `dir/name.manifest.json`.
pub fn manifest_path(artifact: &Path) -> PathBuf {
    let stem = artifact.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "output".into());
    artifact.with_file_name(format!("{stem}.manifest.json"))
}

pub fn write_manifest(artifact: &Path, manifest: &Manifest) -> Result<PathBuf> {
    let path = manifest_path(artifact);
    write_json(&path, manifest)?;
    Ok(path)
}

/// Spectrum in powers with Δ in units of κ_0 and a trailing model column.
pub fn spectrum_table(spectrum: &SpectrumResult) -> Table {
    let mut header: Vec<&str> = SpectrumResult::HEADER.to_vec();
    header.push("model");
    let mut table = Table::new(&header);
    for p in &spectrum.points {
        let [tf, rf, tb, rb] = p.powers();
        let mut row: Vec<String> = [p.delta / spectrum.kappa_0, tf, rf, tb, rb].iter().map(|&v| fmt_num(v)).collect();
        row.push(spectrum.model.clone());
        table.push(row);
    }
    table
}
