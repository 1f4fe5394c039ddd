//! Output artifacts: full-precision CSV and JSON with embedded config.
//!
//! Every emitted file carries the resolved configuration and a content hash
//! of the numerical payload so that a rerun of the same config can be checked
//! for byte-identical output.

use crate::error::{Error, Result};
use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::Path;

/// Scientific notation with 17 significant digits: lossless f64 round-trip.
pub fn fmt_full(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

pub fn sha256_hex(payload: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(payload.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// A CSV table with comment-line metadata header.
pub struct CsvTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn new(columns: &[&str]) -> Self {
        CsvTable {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn payload(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|&v| fmt_full(v)).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    /// Render with `# config = ...` and `# payload_sha256 = ...` header lines.
    pub fn render(&self, config_json: &str) -> String {
        let payload = self.payload();
        format!(
            "# config = {config_json}\n# payload_sha256 = {}\n{payload}",
            sha256_hex(&payload)
        )
    }

    pub fn write_to(&self, path: &Path, config_json: &str) -> Result<()> {
        let mut file = std::fs::File::create(path)
            .map_err(|e| Error::numerical(format!("cannot create {}: {e}", path.display())))?;
        file.write_all(self.render(config_json).as_bytes())
            .map_err(|e| Error::numerical(format!("cannot write {}: {e}", path.display())))?;
        Ok(())
    }
}

/// Attach `config` and a payload hash to a JSON value and pretty-print it.
/// Fields listed in `volatile` are excluded from the hash (e.g. runtimes).
pub fn render_json_report(
    mut body: serde_json::Value,
    config: &serde_json::Value,
    volatile: &[&str],
) -> String {
    let obj = body.as_object_mut().expect("report body must be an object");
    obj.insert("config".to_string(), config.clone());
    let mut hashable = obj.clone();
    for key in volatile {
        hashable.remove(*key);
    }
    hashable.remove("payload_sha256");
    let canonical = serde_json::to_string(&serde_json::Value::Object(hashable)).unwrap();
    obj.insert(
        "payload_sha256".to_string(),
        serde_json::Value::String(sha256_hex(&canonical)),
    );
    serde_json::to_string_pretty(&body).unwrap()
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)
        .map_err(|e| Error::numerical(format!("cannot write {}: {e}", path.display())))
}
