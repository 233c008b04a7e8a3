//! Campaign configuration: a TOML file, `--set key=value` overrides, and
//! the resolved form embedded in every output.
//!
//! Precedence, lowest first: built-in defaults, the config file, `--set`
//! overrides, then the dedicated flags (`--out`, `--workers`, `--seed`).

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use qpcocycle::arithmetic::{make_liouville, Frequency};
use qpcocycle::fourier::FourierSeries;
use qpcocycle::model::{default_f, normalize_c1, ModelParams, DEFAULT_STRIP};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct CampaignConfig {
    pub model: ModelConfig,
    pub run: RunConfig,
    pub output: OutputConfig,
    pub lyapunov: LyapunovConfig,
    pub spectrum: SpectrumConfig,
    pub reduce: ReduceConfig,
    pub gordon: GordonConfig,
    pub classify: ClassifyConfig,
    pub phase_diagram: PhaseDiagramConfig,
}

/// `ω` by name (`golden`, `silver`, `liouville:<β>[:<terms>]`) or by
/// continued fraction (`{ cf = [...], repeat = [...] }`).
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum OmegaConfig {
    Named(String),
    Explicit(Frequency),
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    #[serde(rename = "K")]
    pub coupling: f64,
    pub omega: OmegaConfig,
    /// `[k, re, im]` triples for `f`; empty selects `cos(2πθ)/(1+2π)`.
    pub f_modes: Vec<(i64, f64, f64)>,
    pub strip: f64,
    /// Rescale `f` to `‖f‖_C¹ = 1`.
    pub normalize: bool,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            coupling: 1.0,
            omega: OmegaConfig::Named("golden".into()),
            f_modes: Vec::new(),
            strip: DEFAULT_STRIP,
            normalize: true,
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    /// 0 lets the thread pool pick.
    pub workers: usize,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub plots: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("out"),
            plots: true,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct LyapunovConfig {
    pub e_min: f64,
    pub e_max: f64,
    pub e_step: f64,
    pub n: usize,
    pub phases: usize,
}

impl Default for LyapunovConfig {
    fn default() -> Self {
        LyapunovConfig {
            e_min: -1.0,
            e_max: 6.0,
            e_step: 0.05,
            n: 100_000,
            phases: 64,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumConfig {
    #[serde(rename = "N")]
    pub sites: usize,
    pub thetas: usize,
    /// Draw phases from the seeded generator instead of an even grid.
    pub random_thetas: bool,
    /// Energy window; missing bounds default to the Gershgorin enclosure.
    pub e_min: Option<f64>,
    pub e_max: Option<f64>,
    pub tol: f64,
    pub gap_resolution: f64,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        SpectrumConfig {
            sites: 500,
            thetas: 4,
            random_thetas: false,
            e_min: None,
            e_max: None,
            tol: 1e-12,
            gap_resolution: 0.01,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReduceConfig {
    pub divisor_floor: f64,
    /// Upper end of the probe grid `(0, e_max]`.
    pub e_max: f64,
    pub probe_points: usize,
    pub n: usize,
    pub phases: usize,
}

impl Default for ReduceConfig {
    fn default() -> Self {
        ReduceConfig {
            divisor_floor: qpcocycle::reducibility::DEFAULT_DIVISOR_FLOOR,
            e_max: 0.05,
            probe_points: 10,
            n: 20_000,
            phases: 16,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct GordonConfig {
    pub energy: f64,
    pub theta: f64,
    pub stages: Vec<usize>,
}

impl Default for GordonConfig {
    fn default() -> Self {
        GordonConfig {
            energy: 1.0,
            theta: 0.0,
            stages: (1..=8).collect(),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClassifyConfig {
    pub n_max: usize,
    pub kappa: f64,
    pub tau: f64,
    pub dc_range: u64,
    pub convergents: usize,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            n_max: qpcocycle::arithmetic::BETA_PROXY_STAGES,
            kappa: 0.1,
            tau: 2.0,
            dc_range: 10_000,
            convergents: 12,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhaseDiagramConfig {
    #[serde(rename = "K_list")]
    pub k_list: Vec<f64>,
    pub e_min: f64,
    pub e_max: f64,
    pub e_step: f64,
    pub n: usize,
    pub phases: usize,
}

impl Default for PhaseDiagramConfig {
    fn default() -> Self {
        PhaseDiagramConfig {
            k_list: vec![0.0, 2.0, 4.0, 6.0, 8.0],
            e_min: 0.0,
            e_max: 8.0,
            e_step: 0.1,
            n: 10_000,
            phases: 16,
        }
    }
}

/// Reads the optional config file and applies `key=value` overrides.
pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<CampaignConfig, CliError> {
    let mut table = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
            text.parse::<toml::Table>()
                .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
        }
        None => toml::Table::new(),
    };
    for item in overrides {
        apply_override(&mut table, item)?;
    }
    toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))
}

fn apply_override(table: &mut toml::Table, item: &str) -> Result<(), CliError> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{item}` is not key=value")))?;
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let parts: Vec<&str> = key.trim().split('.').collect();
    let (last, path) = parts.split_last().expect("split yields one part");
    let mut cur = table;
    for part in path {
        let entry = cur
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Config(format!("`{part}` in `{key}` is not a table")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

impl CampaignConfig {
    /// Canonical JSON of the resolved configuration.
    pub fn resolved_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.resolved_json().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn frequency(&self) -> Result<Frequency, CliError> {
        match &self.model.omega {
            OmegaConfig::Explicit(f) => Ok(f.clone()),
            OmegaConfig::Named(name) => named_frequency(name),
        }
    }

    /// Short label used in CSV rows.
    pub fn omega_id(&self) -> String {
        match &self.model.omega {
            OmegaConfig::Named(name) => name.clone(),
            OmegaConfig::Explicit(f) if !f.note().is_empty() => f.note().replace(',', ";"),
            OmegaConfig::Explicit(_) => "cf".into(),
        }
    }

    pub fn model_with(&self, coupling: f64) -> Result<ModelParams, CliError> {
        let m = &self.model;
        let f = if m.f_modes.is_empty() {
            default_f()
                .with_strip(m.strip)
                .map_err(|e| CliError::Config(format!("model.strip: {e}")))?
        } else {
            let modes: Vec<(i64, Complex64)> = m
                .f_modes
                .iter()
                .map(|&(k, re, im)| (k, Complex64::new(re, im)))
                .collect();
            FourierSeries::from_modes(&modes, m.strip)
                .map_err(|e| CliError::Config(format!("model.f_modes: {e}")))?
        };
        let omega = self.frequency()?;
        let params = if m.normalize {
            normalize_c1(&f).and_then(|f| ModelParams::new(f, coupling, omega))
        } else {
            ModelParams::unnormalized(f, coupling, omega)
        };
        params.map_err(|e| CliError::Config(format!("model: {e}")))
    }

    pub fn model(&self) -> Result<ModelParams, CliError> {
        self.model_with(self.model.coupling)
    }
}

fn named_frequency(name: &str) -> Result<Frequency, CliError> {
    let bad = || CliError::Config(format!("unknown frequency `{name}`"));
    let mut parts = name.split(':');
    match parts.next() {
        Some("golden") => Ok(Frequency::golden()),
        Some("silver") => Ok(Frequency::silver()),
        Some("liouville") => {
            let beta: f64 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let terms: usize = match parts.next() {
                Some(t) => t.parse().map_err(|_| bad())?,
                None => 12,
            };
            make_liouville(beta, terms).map_err(|e| CliError::numeric("arithmetic", e))
        }
        _ => Err(bad()),
    }
}

/// `min, min + step, …` up to `max` (inclusive within half a step).
pub fn grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0) || !(max >= min) {
        return Err(CliError::Config(format!(
            "grid needs step > 0 and max ≥ min (got {min}..{max} step {step})"
        )));
    }
    let count = ((max - min) / step + 0.5).floor() as usize + 1;
    Ok((0..count).map(|j| min + j as f64 * step).collect())
}
