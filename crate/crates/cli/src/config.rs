//! Run configuration shared by every subcommand.
//!
//! Flags and an optional JSON file both produce a [`RunConfig`]; fields set
//! in the file win. The resolved configuration, with the curvature function
//! inlined in canonical form, is embedded in every report.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use translab_core::curvature::GammaParams;
use translab_core::{GammaSpec, SymmetricCurvature};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// A curvature function given by name (`mean`, `h-times-sn`, ...) and the
/// `n`, `k`, `l` fields, or as a full JSON spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GammaChoice {
    Name(String),
    Spec(GammaSpec),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schema: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<GammaChoice>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_file: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    /// Radius budget of the profile integration.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<f64>,
    /// Start radius as a fraction of the apex radius.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    /// Command-specific tolerance, see the README.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Points per axis of the sampling grid.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub surface: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checks: Option<Vec<String>>,
    /// Radius of the sampled domain.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// Vertical shift used by `touch` and the ellipticity check.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shift: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_count: Option<usize>,
    /// Rotation about the vertical axis before a symmetry scan.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_min: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($f:ident),*) => {
        RunConfig { $($f: $top.$f.or($base.$f)),* }
    };
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Config(format!("bad config: {e}")))?;
        match cfg.schema {
            Some(SCHEMA_VERSION) => Ok(cfg),
            Some(v) => Err(CliError::Config(format!("unsupported config schema {v}, expected {SCHEMA_VERSION}"))),
            None => Err(CliError::Config(format!("config needs \"schema\": {SCHEMA_VERSION}"))),
        }
    }

    /// Fields set in `top` replace those of `self`.
    pub fn overlaid(self, top: Self) -> Self {
        // the struct literal fails to compile if a field is missed
        overlay!(
            self, top, schema, gamma, gamma_file, n, k, l, budget, eps, tol, grid, out, seed, surface, checks,
            radius, shift, t_count, angle, n_min, n_max
        )
    }

    /// The requested spec before building. `n` may be missing for sweeps.
    pub fn gamma_spec(&self, default_kind: &str) -> Result<GammaSpec, CliError> {
        let choice = match (&self.gamma, &self.gamma_file) {
            (Some(_), Some(_)) => return Err(CliError::Config("give either a gamma or a gamma file, not both".into())),
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("cannot read gamma file {}: {e}", path.display())))?;
                GammaChoice::Spec(GammaSpec::from_json(&text)?)
            }
            (Some(c), None) => c.clone(),
            (None, None) => GammaChoice::Name(default_kind.to_string()),
        };
        let mut spec = match choice {
            GammaChoice::Spec(spec) => spec,
            GammaChoice::Name(kind) => GammaSpec {
                kind,
                n: None,
                params: GammaParams { k: self.k, l: self.l, factors: None },
                scale: None,
            },
        };
        if spec.n.is_none() {
            spec.n = self.n;
        }
        Ok(spec)
    }

    /// Builds the curvature function and records it in canonical form.
    pub fn resolve(mut self, default_kind: &str) -> Result<(Self, SymmetricCurvature), CliError> {
        let mut spec = self.gamma_spec(default_kind)?;
        if spec.n.is_none() {
            spec.n = Some(2);
        }
        let gamma = spec.build()?;
        self.canonicalize(GammaSpec::from(&gamma));
        Ok((self, gamma))
    }

    /// Replaces the gamma fields by an inline spec.
    pub fn canonicalize(&mut self, spec: GammaSpec) {
        self.n = spec.n;
        self.gamma = Some(GammaChoice::Spec(spec));
        self.gamma_file = None;
        self.k = None;
        self.l = None;
        self.schema = Some(SCHEMA_VERSION);
    }
}
