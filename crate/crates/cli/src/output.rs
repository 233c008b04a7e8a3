//! Output files. Every CSV starts with a `#` line carrying the command, the
//! SHA-256 of the resolved config, crate versions and the config itself;
//! JSON files carry the same data under `meta`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use crate::config::CampaignConfig;
use crate::error::CliError;

/// Shortest round-trip decimal, switching to exponent form for very large
/// or very small magnitudes.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub struct Sink<'a> {
    command: &'static str,
    config: &'a CampaignConfig,
    dir: &'a Path,
    written: Vec<PathBuf>,
}

impl<'a> Sink<'a> {
    pub fn new(command: &'static str, config: &'a CampaignConfig) -> Result<Sink<'a>, CliError> {
        let dir = config.output.dir.as_path();
        fs::create_dir_all(dir)
            .map_err(|e| CliError::Output(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Sink {
            command,
            config,
            dir,
            written: Vec::new(),
        })
    }

    pub fn header_line(&self) -> String {
        format!(
            "# qpco {} config_sha256={} qpcocycle={} qpco={} config={}",
            self.command,
            self.config.hash(),
            qpcocycle::VERSION,
            env!("CARGO_PKG_VERSION"),
            self.config.resolved_json()
        )
    }

    fn write(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, body)
            .map_err(|e| CliError::Output(format!("cannot write {}: {e}", path.display())))?;
        self.written.push(path);
        Ok(())
    }

    pub fn csv(&mut self, name: &str, columns: &str, rows: &[String]) -> Result<(), CliError> {
        let mut body = self.header_line();
        body.push('\n');
        body.push_str(columns);
        body.push('\n');
        for r in rows {
            body.push_str(r);
            body.push('\n');
        }
        self.write(name, &body)
    }

    pub fn json(&mut self, name: &str, result: &impl Serialize) -> Result<(), CliError> {
        let config: serde_json::Value =
            serde_json::from_str(&self.config.resolved_json()).expect("round trip");
        let doc = json!({
            "meta": {
                "command": self.command,
                "config_sha256": self.config.hash(),
                "qpcocycle": qpcocycle::VERSION,
                "qpco": env!("CARGO_PKG_VERSION"),
                "config": config,
            },
            "result": result,
        });
        let mut body = serde_json::to_string_pretty(&doc).expect("serializable");
        body.push('\n');
        self.write(name, &body)
    }

    pub fn svg(&mut self, name: &str, body: impl FnOnce() -> String) -> Result<(), CliError> {
        if self.config.output.plots {
            self.write(name, &body())?;
        }
        Ok(())
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}
