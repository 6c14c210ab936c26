use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::config::{ExperimentConfig, TrialSeeds};
use crate::error::{invalid, Error, Result};

pub const DEFAULT_DECIMATION: usize = 10;

/// `v` rounded to 6 significant digits, printed in its shortest round-trip form.
pub fn format_sig6(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let rounded: f64 = format!("{v:.5e}").parse().expect("formatted float parses");
    // avoid "-0"
    if rounded == 0.0 {
        "0".to_string()
    } else {
        rounded.to_string()
    }
}

/// Writes `n,<label>...` and one row per decimated step. Rows are taken at
/// `n = 1, 1 + d, 1 + 2d, ...` and at the last step.
pub fn emit_csv<W: Write>(
    out: &mut W,
    labels: &[String],
    curves: &[Vec<f64>],
    decimation: usize,
) -> Result<()> {
    if curves.is_empty() {
        return Err(invalid("no curves to write"));
    }
    if labels.len() != curves.len() {
        return Err(invalid(format!(
            "{} labels for {} curves",
            labels.len(),
            curves.len()
        )));
    }
    if decimation == 0 {
        return Err(invalid("decimation must be at least 1"));
    }
    let len = curves[0].len();
    if let Some(c) = curves.iter().find(|c| c.len() != len) {
        return Err(invalid(format!(
            "curve lengths differ: {len} and {}",
            c.len()
        )));
    }
    if labels.iter().any(|l| l.contains([',', '"', '\n'])) {
        return Err(invalid("method labels must not contain commas, quotes or newlines"));
    }

    let mut text = String::from("n");
    for l in labels {
        text.push(',');
        text.push_str(l);
    }
    text.push('\n');
    let mut rows: Vec<usize> = (0..len).step_by(decimation).collect();
    if len > 0 && rows.last() != Some(&(len - 1)) {
        rows.push(len - 1);
    }
    for i in rows {
        text.push_str(&(i + 1).to_string());
        for c in curves {
            text.push(',');
            text.push_str(&format_sig6(c[i]));
        }
        text.push('\n');
    }
    out.write_all(text.as_bytes()).map_err(|source| Error::Io {
        path: "<csv writer>".into(),
        source,
    })
}

pub fn write_csv(path: &Path, labels: &[String], curves: &[Vec<f64>], decimation: usize) -> Result<()> {
    let mut buf = Vec::new();
    emit_csv(&mut buf, labels, curves, decimation)?;
    write_file(path, &buf)
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Provenance written next to the CSV.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest<'a> {
    pub build_id: &'a str,
    pub config: &'a ExperimentConfig,
    pub methods: Vec<String>,
    pub trial_seeds: &'a [TrialSeeds],
}

impl Manifest<'_> {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }
}
