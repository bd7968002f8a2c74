//! Optional TOML configuration: a flat table whose keys mirror the long
//! command-line flags. Flags take precedence over file values.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::emit::Format;
use crate::error::{CliError, Result};

/// Fusion noise selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseArg {
    Ideal,
    Distinguishing,
    Depolarizing,
}

/// Noise families for entanglement-length sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepNoiseArg {
    Distinguishing,
    Depolarizing,
    Both,
}

/// Observable of a phase scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObservableArg {
    /// X on every photon
    Xn,
    /// (X I)^(n/2-1) X X, even photon counts only
    Svnp,
}

/// Efficiency budget presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PresetArg {
    /// eta_d 0.25, eta_s 0.7, eta_l 0.75, eta_b 0.15, eta_g 0.5, 81 MHz
    Paper,
    /// `paper` preset with eta_b 0.04
    PaperDim,
    /// unit efficiencies, eta_g 0.5
    IdealGate,
    /// all efficiencies 1
    Deterministic,
}

/// Contents of a configuration file. Every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub threads: Option<usize>,
    pub seed: Option<u64>,

    pub photons: Option<usize>,
    #[serde(rename = "M", alias = "m")]
    pub m: Option<f64>,
    pub g2: Option<f64>,
    pub delta: Option<f64>,
    /// Fusion noise, or the sweep noise family for `entlen`.
    pub noise: Option<String>,
    pub observable: Option<ObservableArg>,
    pub points: Option<usize>,
    pub phi_min: Option<f64>,
    pub phi_max: Option<f64>,
    pub phi: Option<f64>,

    pub v2: Option<Vec<f64>>,
    pub v2_grid: Option<String>,
    pub cap: Option<usize>,
    pub tolerance: Option<f64>,
    pub concurrences: Option<bool>,

    pub preset: Option<PresetArg>,
    pub fig4b: Option<bool>,
    pub rate: Option<f64>,
    pub eta_d: Option<f64>,
    pub eta_s: Option<f64>,
    pub eta_l: Option<f64>,
    pub eta_b: Option<f64>,
    pub eta_g: Option<f64>,
    pub n_max: Option<usize>,
    pub point_v2: Option<f64>,
    pub eta_d_extrapolate: Option<f64>,

    pub pattern: Option<String>,
    pub shots: Option<u64>,
    pub background: Option<f64>,
    pub extinction: Option<f64>,
    pub window_ns: Option<f64>,
    pub dead_time: Option<f64>,
    pub bin_ns: Option<f64>,
    pub subtract: Option<bool>,
}

impl FileConfig {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::ConfigFile {
            path: path.to_owned(),
            message: e.message().replace('\n', " "),
        })
    }

    /// Reads and parses `path`; a missing file is a runtime failure.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, path)
    }
}
