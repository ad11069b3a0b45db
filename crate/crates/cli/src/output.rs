use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};
use torus_breakup::trigpoly::fmt_real;

use crate::config::Format;
use crate::error::CliError;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn real(x: f64) -> String {
    fmt_real(x)
}

/// A table of preformatted cells, written as CSV or as a JSON array.
#[derive(Debug, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn to_csv(&self, hash: &str) -> String {
        let mut out = format!("# config_sha256={hash}\n{}\n", self.columns.join(","));
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    fn to_structured(&self, hash: &str) -> String {
        let mut out = format!("{{\n  \"config_sha256\": \"{hash}\",\n  \"rows\": [");
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str(if i == 0 { "\n    {" } else { ",\n    {" });
            let fields: Vec<String> = self
                .columns
                .iter()
                .zip(row)
                .map(|(c, v)| {
                    let value = if v.parse::<f64>().is_ok() && !v.contains(['i', 'n', 'N']) {
                        v.clone()
                    } else {
                        format!("\"{v}\"")
                    };
                    format!("\"{c}\": {value}")
                })
                .collect();
            out.push_str(&fields.join(", "));
            out.push('}');
        }
        out.push_str(if self.rows.is_empty() { "]\n}\n" } else { "\n  ]\n}\n" });
        out
    }
}

#[derive(Debug, Serialize)]
pub struct ArtifactRecord {
    pub file: String,
    pub sha256: String,
}

/// Writes artifacts into the output directory, stamping each with the hash
/// of the configuration that produced it.
pub struct Artifacts {
    dir: PathBuf,
    config_hash: String,
    format: Format,
    pub written: Vec<ArtifactRecord>,
}

impl Artifacts {
    pub fn new(dir: &Path, config_hash: &str, format: Format) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            config_hash: config_hash.to_string(),
            format,
            written: Vec::new(),
        })
    }

    pub fn config_hash(&self) -> &str {
        &self.config_hash
    }

    pub fn write_raw(&mut self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        self.written.push(ArtifactRecord {
            file: name.to_string(),
            sha256: sha256_hex(contents.as_bytes()),
        });
        Ok(path)
    }

    /// Writes `stem.csv` or `stem.json` depending on the configured format.
    pub fn table(&mut self, stem: &str, table: &Table) -> Result<PathBuf, CliError> {
        match self.format {
            Format::Csv => {
                let text = table.to_csv(&self.config_hash);
                self.write_raw(&format!("{stem}.csv"), &text)
            }
            Format::StructuredText => {
                let text = table.to_structured(&self.config_hash);
                self.write_raw(&format!("{stem}.json"), &text)
            }
        }
    }

    /// Writes a JSON document whose first field is the config hash.
    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let body = serde_json::to_string_pretty(value).map_err(|e| CliError::Format(e.to_string()))?;
        let text = stamp_json(&body, &self.config_hash);
        self.write_raw(name, &text)
    }

    /// Inserts the config hash as the first field of an already formatted
    /// JSON object.
    pub fn stamped(&mut self, name: &str, json_object: &str) -> Result<PathBuf, CliError> {
        let text = stamp_json(json_object, &self.config_hash);
        self.write_raw(name, &text)
    }
}

fn stamp_json(object: &str, hash: &str) -> String {
    let rest = object.trim_start().strip_prefix('{').unwrap_or(object).trim_start_matches([' ', '\n']);
    let mut out = format!("{{\n  \"config_sha256\": \"{hash}\"");
    if rest.starts_with('}') {
        out.push_str("\n}\n");
    } else {
        out.push_str(",\n  ");
        out.push_str(rest);
        if !out.ends_with('\n') {
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stamping_keeps_valid_json() {
        let v: serde_json::Value = serde_json::from_str(&stamp_json("{\n  \"a\": 1\n}", "abc")).unwrap();
        assert_eq!(v["config_sha256"], "abc");
        assert_eq!(v["a"], 1);
        let v: serde_json::Value = serde_json::from_str(&stamp_json("{}", "abc")).unwrap();
        assert_eq!(v["config_sha256"], "abc");
    }

    #[test]
    fn structured_tables_parse() {
        let mut t = Table::new(["k1", "value", "kind"]);
        t.push(vec!["-3".into(), real(0.1), "inf".into()]);
        let v: serde_json::Value = serde_json::from_str(&t.to_structured("h")).unwrap();
        assert_eq!(v["rows"][0]["k1"], -3);
        assert_eq!(v["rows"][0]["kind"], "inf");
    }
}
