//! Run configuration: command-line flags over a JSON config file over defaults.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use sectorial_core::flow::FlowSettings;
use sectorial_core::geometry::{SmoothingMode, SteinParams};
use sectorial_core::sector::LocalModel;

pub const DEFAULT_SEED: u64 = 20_240_917;

/// Optional settings as read from a config file or the command line.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    pub epsilon: Option<f64>,
    pub alpha: Option<f64>,
    pub band_tol: Option<f64>,
    pub grid: Option<usize>,
    pub c_grid: Option<usize>,
    pub psh_grid: Option<usize>,
    pub seed: Option<u64>,
    pub max_time: Option<f64>,
    pub escape_radius: Option<f64>,
    pub smoothing: Option<SmoothingMode>,
    pub extent: Option<f64>,
    pub out: Option<PathBuf>,
}

impl ConfigLayer {
    pub fn from_file(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// `self` wins wherever it is set.
    pub fn over(self, below: ConfigLayer) -> ConfigLayer {
        ConfigLayer {
            epsilon: self.epsilon.or(below.epsilon),
            alpha: self.alpha.or(below.alpha),
            band_tol: self.band_tol.or(below.band_tol),
            grid: self.grid.or(below.grid),
            c_grid: self.c_grid.or(below.c_grid),
            psh_grid: self.psh_grid.or(below.psh_grid),
            seed: self.seed.or(below.seed),
            max_time: self.max_time.or(below.max_time),
            escape_radius: self.escape_radius.or(below.escape_radius),
            smoothing: self.smoothing.or(below.smoothing),
            extent: self.extent.or(below.extent),
            out: self.out.or(below.out),
        }
    }
}

/// Fully resolved and validated settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub epsilon: f64,
    pub alpha: f64,
    pub band_tol: f64,
    /// Points per axis for grid exports and plots.
    pub grid: usize,
    /// Points per axis of the `sqrt(w0)` grid in the `c` suites.
    pub c_grid: usize,
    pub psh_grid: usize,
    pub seed: u64,
    pub max_time: f64,
    pub escape_radius: f64,
    pub smoothing: SmoothingMode,
    /// Half-width of slice windows, in units of epsilon.
    pub extent: f64,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig::resolve(ConfigLayer::default()).expect("defaults are valid")
    }
}

impl RunConfig {
    pub fn resolve(layer: ConfigLayer) -> anyhow::Result<Self> {
        let epsilon = layer.epsilon.unwrap_or(SteinParams::DEFAULT_EPSILON);
        let alpha = layer.alpha.unwrap_or(SteinParams::DEFAULT_ALPHA);
        let smoothing = layer.smoothing.unwrap_or(SmoothingMode::Cutoff);
        let params = SteinParams::new(alpha, epsilon, smoothing)?;
        let flow = FlowSettings::for_params(&params);
        let cfg = RunConfig {
            epsilon,
            alpha,
            band_tol: layer.band_tol.unwrap_or(1e-6 * epsilon.max(1.0)),
            grid: layer.grid.unwrap_or(201),
            c_grid: layer.c_grid.unwrap_or(101),
            psh_grid: layer.psh_grid.unwrap_or(401),
            seed: layer.seed.unwrap_or(DEFAULT_SEED),
            max_time: layer.max_time.unwrap_or(flow.max_time),
            escape_radius: layer.escape_radius.unwrap_or(flow.escape_radius),
            smoothing,
            extent: layer.extent.unwrap_or(3.0),
            out: layer.out,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> anyhow::Result<()> {
        if !(self.band_tol.is_finite() && self.band_tol >= 0.0) {
            bail!("band_tol must be a non-negative number (got {})", self.band_tol);
        }
        if self.grid < 1 {
            bail!("grid needs at least one point per axis");
        }
        if self.c_grid < 3 || self.psh_grid < 3 {
            bail!("c_grid and psh_grid need at least 3 points per axis");
        }
        if !(self.extent.is_finite() && self.extent > 0.0) {
            bail!("extent must be positive (got {})", self.extent);
        }
        self.settings().validate()?;
        Ok(())
    }

    pub fn params(&self) -> SteinParams {
        SteinParams::new(self.alpha, self.epsilon, self.smoothing).expect("validated")
    }

    pub fn settings(&self) -> FlowSettings {
        FlowSettings {
            max_time: self.max_time,
            escape_radius: self.escape_radius,
            ..FlowSettings::default()
        }
    }

    pub fn model(&self) -> LocalModel {
        LocalModel::new(self.params(), self.settings(), self.band_tol)
    }
}
