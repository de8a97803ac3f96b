//! Run configuration: a flat JSON file, overridden field by field by
//! command-line flags, resolved into one concrete config per subcommand.
//!
//! The resolved configs are what output headers embed. Thread count and
//! output paths are not part of them, so parallel and serial runs write
//! identical files.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::angle::Angle;

/// Bad user input; maps to the usage exit code.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CenterKind {
    /// Seeded random non-Hermitian centers.
    Random,
    /// The flux-threaded triangle.
    Triangle,
    /// Two sites with balanced gain and loss.
    PtDimer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum LeadSide {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Incidence {
    Left,
    Right,
    Both,
}

/// Everything a `--config` file may set. Unknown keys are rejected.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub j: Option<f64>,
    pub gamma: Option<Angle>,
    pub phi: Option<Angle>,
    pub k_min: Option<Angle>,
    pub k_max: Option<Angle>,
    pub k_steps: Option<usize>,
    pub check: Option<bool>,
    pub allow_singular: Option<bool>,
    pub k: Option<Angle>,
    pub phi_steps: Option<usize>,
    pub gamma_min: Option<Angle>,
    pub gamma_max: Option<Angle>,
    pub scan_k_min: Option<Angle>,
    pub scan_k_max: Option<Angle>,
    pub gamma_steps: Option<usize>,
    pub scan_k_steps: Option<usize>,
    pub center: Option<CenterKind>,
    pub seed: Option<u64>,
    pub centers: Option<usize>,
    pub max_center_sites: Option<usize>,
    pub k_points: Option<usize>,
    pub threshold: Option<f64>,
    pub k0: Option<Angle>,
    pub sigma: Option<f64>,
    pub sites: Option<usize>,
    pub distance: Option<i64>,
    pub tol: Option<f64>,
    pub samples: Option<usize>,
    pub duration: Option<f64>,
    pub cut: Option<LeadSide>,
    pub incidence: Option<Incidence>,
    pub threads: Option<usize>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub summary: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| usage(format!("config {}: {e}", path.display())))
    }
}

/// Output plumbing shared by every subcommand.
#[derive(Debug, Clone, Default)]
pub struct OutputOptions {
    pub format: Format,
    pub output: Option<PathBuf>,
    pub summary: Option<PathBuf>,
    pub stamp: bool,
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmplitudesConfig {
    pub j: f64,
    pub gamma: f64,
    pub phi: f64,
    pub k_min: f64,
    pub k_max: f64,
    pub k_steps: usize,
    pub check: bool,
    pub allow_singular: bool,
}

impl Default for AmplitudesConfig {
    fn default() -> Self {
        AmplitudesConfig {
            j: 1.0,
            gamma: 2.0 * PI / 3.0,
            phi: PI / 3.0,
            k_min: 0.01,
            k_max: 3.13,
            k_steps: 1000,
            check: false,
            allow_singular: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fig3Config {
    pub j: f64,
    pub gamma: f64,
    pub k: f64,
    pub phi_steps: usize,
    pub allow_singular: bool,
}

impl Default for Fig3Config {
    fn default() -> Self {
        Fig3Config {
            j: 1.0,
            gamma: PI / 6.0,
            k: PI / 6.0,
            phi_steps: 1000,
            allow_singular: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanConfig {
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub k_min: f64,
    pub k_max: f64,
    pub gamma_steps: usize,
    pub k_steps: usize,
    /// Print the transfer matrix at the diode point of `gamma` instead.
    pub diode_check: bool,
    pub gamma: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            gamma_min: 0.0,
            gamma_max: PI,
            k_min: -PI,
            k_max: 0.0,
            gamma_steps: 120,
            k_steps: 120,
            diode_check: false,
            gamma: PI / 6.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditConfig {
    pub center: CenterKind,
    pub seed: u64,
    pub centers: usize,
    pub max_center_sites: usize,
    pub k_points: usize,
    pub threshold: f64,
    pub j: f64,
    pub gamma: f64,
    pub phi: f64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            center: CenterKind::Random,
            seed: 7,
            centers: 200,
            max_center_sites: 6,
            k_points: 10,
            threshold: 1e-9,
            j: 1.0,
            gamma: 2.0 * PI / 3.0,
            phi: PI / 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolveConfig {
    pub j: f64,
    pub gamma: f64,
    pub phi: f64,
    pub k0: f64,
    pub sigma: f64,
    pub sites: usize,
    pub distance: i64,
    pub tol: f64,
    pub samples: usize,
    pub duration: Option<f64>,
    pub cut: Option<LeadSide>,
    pub incidence: Incidence,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        EvolveConfig {
            j: 1.0,
            gamma: 2.0 * PI / 3.0,
            phi: PI / 3.0,
            k0: 2.0 * PI / 3.0,
            sigma: 15.0,
            sites: 600,
            distance: 150,
            tol: 1e-9,
            samples: 50,
            duration: None,
            cut: None,
            incidence: Incidence::Both,
        }
    }
}

/// Thread count: `NH_DIODE_THREADS` beats flags and the config file.
pub fn resolve_threads(requested: Option<usize>) -> anyhow::Result<Option<usize>> {
    match std::env::var("NH_DIODE_THREADS") {
        Ok(v) if !v.trim().is_empty() => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(usage(format!("NH_DIODE_THREADS must be a positive integer, got '{v}'"))),
        },
        _ => Ok(requested),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_config_accepts_angle_strings() {
        let c: FileConfig =
            serde_json::from_str(r#"{"gamma": "2pi/3", "phi": 1.0, "k_steps": 10, "center": "pt-dimer"}"#).unwrap();
        assert_eq!(c.gamma, Some(Angle(2.0 * PI / 3.0)));
        assert_eq!(c.phi, Some(Angle(1.0)));
        assert_eq!(c.center, Some(CenterKind::PtDimer));
    }

    #[test]
    fn file_config_rejects_unknown_keys() {
        assert!(serde_json::from_str::<FileConfig>(r#"{"gama": 1.0}"#).is_err());
    }
}
