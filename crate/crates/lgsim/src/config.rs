//! TOML run configuration. Every key is optional and unknown keys are
//! rejected. Angles and dimensioned values may be bare SI numbers or text
//! with a unit (`"0.416pi"`, `"62us"`, `"30kHz"`).
//!
//! ```toml
//! seed = 7
//! format = "json"
//!
//! [imperfections]
//! preset = "nominal"
//! t2_star = "62us"      # or "none"
//! flip_prob_p = 0.995
//!
//! [nv]
//! theta = "0.416pi"
//! drive = "finite"
//! ```

use crate::cli::{AveragingName, DriveKind, Level, Preset};
use crate::error::{usage, CliError};
use crate::record::{Format, SchemeName};
use crate::units::{Unit, Value};
use serde::Deserialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub ideal: IdealSection,
    pub imperfections: ImperfectionSection,
    pub nv: NvSection,
    pub pulse: PulseSection,
    pub model: ModelSection,
    pub odmr: OdmrSection,
    pub cg_repeat: CgRepeatSection,
    pub fid: FidSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IdealSection {
    pub theta: Option<Value>,
    pub scheme: Option<SchemeName>,
    pub dim: Option<usize>,
    pub n: Option<usize>,
    pub sweep: Option<bool>,
    pub grid_points: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImperfectionSection {
    pub preset: Option<Preset>,
    pub t2_star: Option<Value>,
    pub pol_e: Option<f64>,
    pub pol_n: Option<f64>,
    pub flip_prob_p: Option<f64>,
    pub n_samples: Option<usize>,
    pub averaging: Option<AveragingName>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NvSection {
    pub theta: Option<Value>,
    pub drive: Option<DriveKind>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PulseSection {
    pub f_rabi: Option<Value>,
    pub cg_pi_duration: Option<Value>,
    pub sync_order: Option<u32>,
}

/// Overrides for the NV Hamiltonian constants, in Hz, gauss and Hz/G.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub d_zfs: Option<Value>,
    pub q_quad: Option<Value>,
    pub a_hf: Option<Value>,
    pub b_field: Option<f64>,
    pub gamma_e: Option<f64>,
    pub gamma_n: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OdmrSection {
    pub flip_prob_p: Option<f64>,
    pub protected: Option<Level>,
    pub nuclear_populations: Option<[f64; 3]>,
    pub start: Option<Value>,
    pub stop: Option<Value>,
    pub points: Option<usize>,
    pub pi_duration: Option<Value>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CgRepeatSection {
    pub flip_prob_p: Option<f64>,
    pub k_max: Option<usize>,
    pub readout_noise: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FidSection {
    pub t2_star: Option<Value>,
    pub delta_ref: Option<Value>,
    pub points: Option<usize>,
    pub span: Option<Value>,
    pub readout_noise: Option<f64>,
    pub n_samples: Option<usize>,
    pub averaging: Option<AveragingName>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            context: format!("reading {}", path.display()),
            source,
        })?;
        Self::parse(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }
}

/// Resolves an optional config value with a unit.
pub fn quantity(v: &Option<Value>, unit: Unit, key: &str) -> Result<Option<f64>, CliError> {
    v.as_ref()
        .map(|v| v.quantity(unit).map_err(|e| usage(format!("{key}: {e}"))))
        .transpose()
}

pub fn theta(v: &Option<Value>, key: &str) -> Result<Option<f64>, CliError> {
    v.as_ref()
        .map(|v| v.theta().map_err(|e| usage(format!("{key}: {e}"))))
        .transpose()
}
