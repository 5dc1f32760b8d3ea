//! The four subcommands as functions from configuration to output text.

use std::path::Path;

use sectorial_core::error::SurfaceError;
use sectorial_core::surface::{builtin, CombSurface, DecompositionReport, BUILTIN_NAMES};

use crate::config::RunConfig;
use crate::grid::{classify_grid, to_csv, to_svg, Slice};
use crate::verify::{run_all, VerifyReport};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

pub fn cmd_verify(cfg: &RunConfig) -> (VerifyReport, u8) {
    let report = run_all(cfg);
    let code = if report.passed { EXIT_OK } else { EXIT_FAILURE };
    (report, code)
}

pub fn cmd_classify_grid(cfg: &RunConfig, slice: Slice) -> String {
    to_csv(&classify_grid(cfg, slice))
}

pub fn cmd_slice_plot(cfg: &RunConfig, slice: Slice) -> String {
    to_svg(&classify_grid(cfg, slice))
}

/// A path to a JSON file, or one of the built-in names.
pub fn load_surface(spec: &str) -> Result<CombSurface, SurfaceError> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| SurfaceError::Json(serde_json::Error::io(e)))?;
        return CombSurface::from_json(&text);
    }
    if BUILTIN_NAMES.contains(&spec) {
        return builtin(spec);
    }
    Err(SurfaceError::UnknownBuiltin(spec.to_string()))
}

pub fn cmd_decompose(spec: &str) -> Result<String, SurfaceError> {
    let surface = load_surface(spec)?;
    let report = DecompositionReport::build(&surface)?;
    let value = serde_json::to_value(&report)?;
    let mut s = serde_json::to_string_pretty(&value)?;
    s.push('\n');
    Ok(s)
}
