use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use voxbrick_core::pipeline::{
    cmd_bom, cmd_build, cmd_fill, cmd_legolize, cmd_metrics, cmd_quantize, cmd_voxelize,
    write_atomic, PipelineConfig, PipelineError, Stage,
};

#[derive(Parser)]
#[command(
    name = "voxbrick",
    version,
    about = "Turn meshes and voxel grids into brick models"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Voxel grid side length for mesh inputs (power of two)
    #[arg(long, global = true)]
    resolution: Option<usize>,
    /// Number of pyramid levels
    #[arg(long, global = true)]
    levels: Option<usize>,
    /// Number of k-means colors
    #[arg(long, global = true)]
    colors: Option<usize>,
    /// Skip filling interior cavities
    #[arg(long, global = true)]
    no_fill: bool,
    /// Do not alternate brick orientation between layers
    #[arg(long, global = true)]
    no_interlock: bool,
    /// Brick catalog file (`w d part_id` per line)
    #[arg(long, global = true)]
    catalog: Option<PathBuf>,
    /// Palette file (`code r g b name` per line)
    #[arg(long, global = true)]
    palette: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Surface samples per mesh
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Directory for build outputs and default output paths
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Flat `key = value` config file; command-line flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a mesh surface and write a VOXGRID file
    Voxelize {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Build LDraw models, instructions and parts lists at every pyramid level
    Build { input: PathBuf },
    /// Per-level IoU (and loss for VOXLOGIT predictions) as CSV
    Metrics {
        pred: PathBuf,
        target: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Merge a VOXGRID into bricks (`.ldr` output path for LDraw)
    Legolize {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Reduce grid colors to palette colors
    Quantize {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Fill enclosed cavities of a VOXGRID
    Fill {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Parts list of a `.ldr` or BRICKS file as CSV
    Bom {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn config(g: &GlobalArgs) -> Result<PipelineConfig, PipelineError> {
    let mut cfg = match &g.config {
        Some(p) => PipelineConfig::from_file(p).map_err(|source| PipelineError {
            stage: Stage::Config,
            source,
        })?,
        None => PipelineConfig::default(),
    };
    if let Some(v) = g.resolution {
        cfg.resolution = v;
    }
    if let Some(v) = g.levels {
        cfg.levels = v;
    }
    if let Some(v) = g.colors {
        cfg.k_colors = v;
    }
    if let Some(v) = g.seed {
        cfg.seed = v;
    }
    if let Some(v) = g.samples {
        cfg.samples = v;
    }
    if g.no_fill {
        cfg.fill_interior = false;
    }
    if g.no_interlock {
        cfg.interlock = false;
    }
    if g.catalog.is_some() {
        cfg.catalog.clone_from(&g.catalog);
    }
    if g.palette.is_some() {
        cfg.palette.clone_from(&g.palette);
    }
    Ok(cfg)
}

fn default_output(out_dir: &Path, input: &Path, suffix: &str) -> PathBuf {
    let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    out_dir.join(format!("{stem}{suffix}"))
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), PipelineError> {
    match output {
        Some(p) => write_atomic(p, text.as_bytes()).map_err(|source| PipelineError {
            stage: Stage::Write,
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    let cfg = config(&cli.global)?;
    let out_dir = &cli.global.out_dir;
    match cli.command {
        Command::Voxelize { input, output } => {
            let out = output.unwrap_or_else(|| default_output(out_dir, &input, ".voxgrid"));
            let grid = cmd_voxelize(&input, &cfg, &out)?;
            eprintln!(
                "{}: {} filled voxels at {}",
                out.display(),
                grid.filled_count(),
                grid.dims()
            );
        }
        Command::Build { input } => {
            let report = cmd_build(&input, &cfg, out_dir)?;
            for l in &report.levels {
                eprintln!(
                    "{}: {} bricks, {} components, {} floating",
                    l.ldr.display(),
                    l.bricks,
                    l.components,
                    l.floating_components
                );
            }
            eprintln!("{}", report.report.display());
        }
        Command::Metrics {
            pred,
            target,
            output,
        } => {
            emit(&cmd_metrics(&pred, &target, &cfg)?, output.as_deref())?;
        }
        Command::Legolize { input, output } => {
            let out = output.unwrap_or_else(|| default_output(out_dir, &input, ".bricks"));
            let model = cmd_legolize(&input, &cfg, &out)?;
            eprintln!("{}: {} bricks", out.display(), model.len());
        }
        Command::Quantize { input, output } => {
            let out =
                output.unwrap_or_else(|| default_output(out_dir, &input, "_quantized.voxgrid"));
            cmd_quantize(&input, &cfg, &out)?;
        }
        Command::Fill { input, output } => {
            let out = output.unwrap_or_else(|| default_output(out_dir, &input, "_filled.voxgrid"));
            let grid = cmd_fill(&input, &out)?;
            eprintln!("{}: {} filled voxels", out.display(), grid.filled_count());
        }
        Command::Bom { input, output } => {
            emit(&cmd_bom(&input, &cfg)?, output.as_deref())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
