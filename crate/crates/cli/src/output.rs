//! Run directory layout: `config-resolved.json`, `tables/*.json`, data files
//! with a `<name>.meta.json` sidecar, and `summary.json`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use crate::config::{ExperimentConfig, Format};
use crate::error::CliError;

pub struct RunDir {
    root: PathBuf,
    command: &'static str,
    format: Format,
    config: serde_json::Value,
}

impl RunDir {
    pub fn create(cfg: &ExperimentConfig, command: &'static str) -> Result<Self, CliError> {
        let root = cfg.output.directory.clone();
        fs::create_dir_all(root.join("tables"))?;
        let config = serde_json::to_value(cfg)?;
        let dir = Self { root, command, format: cfg.output.format, config };
        dir.write_json("config-resolved.json", &dir.config)?;
        Ok(dir)
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write_json<T: Serialize + ?Sized>(&self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(self.path(name), text)?;
        Ok(())
    }

    /// Writes `rows` as `<name>.csv` or `<name>.json` plus the sidecar.
    pub fn write_rows<T: Serialize>(&self, name: &str, rows: &[T]) -> Result<PathBuf, CliError> {
        let bytes = csv_bytes(rows)?;
        let columns: Vec<String> = String::from_utf8_lossy(&bytes)
            .lines()
            .next()
            .map(|h| h.split(',').map(str::to_owned).collect())
            .unwrap_or_default();
        let file = match self.format {
            Format::Csv => {
                let file = format!("{name}.csv");
                fs::write(self.path(&file), &bytes)?;
                file
            }
            Format::Json => {
                let file = format!("{name}.json");
                self.write_json(&file, rows)?;
                file
            }
        };
        let meta = json!({
            "command": self.command,
            "file": file,
            "columns": columns,
            "rows": rows.len(),
            "config": self.config,
        });
        self.write_json(&format!("{name}.meta.json"), &meta)?;
        Ok(self.path(&file))
    }
}

pub fn csv_bytes<T: Serialize>(rows: &[T]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| CliError::Serialize(e.to_string()))
}

pub fn read_json(path: &Path) -> Option<serde_json::Value> {
    let text = fs::read_to_string(path).ok()?;
    serde_json::from_str(&text).ok()
}
