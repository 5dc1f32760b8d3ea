use crate::error::GeometryError;
use serde::{Deserialize, Serialize};

/// How the cone singularity of `|w|` at the diagonal is regularized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SmoothingMode {
    /// `sqrt(|w|^2 + eps)` everywhere. Closed forms for the Kahler data exist,
    /// but the perturbation never switches off.
    Pure,
    /// Compactly supported: the pure profile (at a much smaller inner scale) is
    /// blended back to `|w|` so that the potential is exactly unperturbed for
    /// `|sqrt(w)| >= eps / 2`.
    Cutoff,
}

impl std::str::FromStr for SmoothingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "pure" => Ok(SmoothingMode::Pure),
            "cutoff" => Ok(SmoothingMode::Cutoff),
            other => Err(format!("unknown smoothing mode `{other}` (expected pure|cutoff)")),
        }
    }
}

impl std::fmt::Display for SmoothingMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SmoothingMode::Pure => "pure",
            SmoothingMode::Cutoff => "cutoff",
        })
    }
}

/// Ratio between the inner smoothing scale and the outer support radius of
/// the cutoff profile. The lower bound `c >= |Re sqrt(w0)|` degrades by
/// roughly the square of this ratio inside the blend annulus.
pub const CUTOFF_INNER_RATIO: f64 = 1e-3;

/// Relative size of the perturbation `1 - N'(r)` below which the pure profile
/// is treated as unperturbed.
const PURE_NEGLIGIBLE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteinParams {
    alpha: f64,
    epsilon: f64,
    smoothing: SmoothingMode,
}

impl SteinParams {
    pub const DEFAULT_ALPHA: f64 = 1.5;
    pub const DEFAULT_EPSILON: f64 = 0.1;

    pub fn new(alpha: f64, epsilon: f64, smoothing: SmoothingMode) -> Result<Self, GeometryError> {
        if !(alpha.is_finite() && alpha > 1.0) {
            return Err(GeometryError::InvalidAlpha(alpha));
        }
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(GeometryError::InvalidEpsilon(epsilon));
        }
        Ok(SteinParams { alpha, epsilon, smoothing })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn smoothing(&self) -> SmoothingMode {
        self.smoothing
    }

    pub fn with_smoothing(self, smoothing: SmoothingMode) -> Self {
        SteinParams { smoothing, ..self }
    }

    /// Growth rate of the real part under the downward flow (`1/2` at `alpha = 3/2`).
    pub fn expanding_rate(&self) -> f64 {
        self.alpha - 1.0
    }

    /// Decay rate of the imaginary part under the downward flow (`3/2` at `alpha = 3/2`).
    pub fn contracting_rate(&self) -> f64 {
        self.alpha
    }

    /// Outer radius, in the `w` chart, of the cutoff blend: the potential equals
    /// the unsmoothed one for `|w|` at or beyond this radius.
    pub fn cutoff_outer(&self) -> f64 {
        0.25 * self.epsilon * self.epsilon
    }

    pub fn cutoff_inner(&self) -> f64 {
        0.5 * self.cutoff_outer()
    }

    /// Smoothing scale `delta` of the inner `sqrt(|w|^2 + delta^2)` profile.
    pub fn cutoff_delta(&self) -> f64 {
        CUTOFF_INNER_RATIO * self.cutoff_outer()
    }

    /// `|w|` beyond which the flow is the unsmoothed one (exactly for the
    /// cutoff profile, to 1e-12 relative for the pure profile).
    pub fn unperturbed_radius(&self) -> f64 {
        match self.smoothing {
            SmoothingMode::Cutoff => self.cutoff_outer(),
            SmoothingMode::Pure => (self.epsilon / (2.0 * PURE_NEGLIGIBLE)).sqrt(),
        }
    }

    /// Characteristic length of the smoothing in the `w` chart.
    pub fn smoothing_scale(&self) -> f64 {
        match self.smoothing {
            SmoothingMode::Pure => self.epsilon.sqrt(),
            SmoothingMode::Cutoff => self.cutoff_delta(),
        }
    }
}

impl Default for SteinParams {
    fn default() -> Self {
        SteinParams {
            alpha: Self::DEFAULT_ALPHA,
            epsilon: Self::DEFAULT_EPSILON,
            smoothing: SmoothingMode::Cutoff,
        }
    }
}
