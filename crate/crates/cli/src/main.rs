use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sectorial_cli::commands::{
    cmd_classify_grid, cmd_decompose, cmd_slice_plot, cmd_verify, EXIT_OK, EXIT_USAGE,
};
use sectorial_cli::config::{ConfigLayer, RunConfig};
use sectorial_cli::grid::Slice;
use sectorial_core::error::SurfaceError;
use sectorial_core::geometry::SmoothingMode;

#[derive(Parser)]
#[command(name = "sectorial", version, about = "Sectorial decompositions of symmetric squares of surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every property suite and write a JSON report.
    Verify(Common),
    /// Classify a slice grid and write CSV.
    ClassifyGrid {
        #[command(flatten)]
        common: Common,
        /// `im=<a>` (Im z1 = Im z2 = a) or `z1=<b>` (z1 = b, z2 plane).
        #[arg(long, default_value = "im=0")]
        slice: Slice,
    },
    /// Classify a slice grid and render it as SVG.
    SlicePlot {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "im=0")]
        slice: Slice,
    },
    /// Decompose Sym^2 of a surface given as a JSON file or built-in name.
    Decompose {
        #[arg(long)]
        surface: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    band_tol: Option<f64>,
    /// Points per axis of slice grids.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_time: Option<f64>,
    #[arg(long)]
    escape_radius: Option<f64>,
    #[arg(long)]
    smoothing: Option<SmoothingMode>,
    /// Half-width of the slice window in units of epsilon.
    #[arg(long)]
    extent: Option<f64>,
    /// Output directory; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn resolve(&self) -> anyhow::Result<RunConfig> {
        let cli = ConfigLayer {
            epsilon: self.epsilon,
            alpha: self.alpha,
            band_tol: self.band_tol,
            grid: self.grid,
            seed: self.seed,
            max_time: self.max_time,
            escape_radius: self.escape_radius,
            smoothing: self.smoothing,
            extent: self.extent,
            out: self.out.clone(),
            ..ConfigLayer::default()
        };
        let file = match &self.config {
            Some(path) => ConfigLayer::from_file(path)?,
            None => ConfigLayer::default(),
        };
        RunConfig::resolve(cli.over(file))
    }
}

fn emit(dir: Option<&Path>, name: &str, text: &str) -> anyhow::Result<()> {
    match dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(name), text)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Verify(common) => {
            let cfg = common.resolve()?;
            let (report, code) = cmd_verify(&cfg);
            for s in report.failures() {
                eprintln!("FAIL {}: worst {} vs limit {} ({} errors)", s.name, s.worst, s.limit, s.errors);
            }
            emit(cfg.out.as_deref(), "verify_report.json", &report.to_json())?;
            Ok(code)
        }
        Command::ClassifyGrid { common, slice } => {
            let cfg = common.resolve()?;
            emit(cfg.out.as_deref(), "classify_grid.csv", &cmd_classify_grid(&cfg, slice))?;
            Ok(EXIT_OK)
        }
        Command::SlicePlot { common, slice } => {
            let cfg = common.resolve()?;
            emit(cfg.out.as_deref(), "slice_plot.svg", &cmd_slice_plot(&cfg, slice))?;
            Ok(EXIT_OK)
        }
        Command::Decompose { surface, out } => match cmd_decompose(&surface) {
            Ok(json) => {
                emit(out.as_deref(), "decomposition.json", &json)?;
                Ok(EXIT_OK)
            }
            Err(SurfaceError::Invalid(violations)) => {
                eprintln!("surface is invalid:");
                for v in violations {
                    eprintln!("  {v}");
                }
                Ok(EXIT_USAGE)
            }
            Err(e) => Err(e.into()),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
