//! End-to-end commands: mesh or grid in, brick models and reports out.
//!
//! Every command is a plain function over paths and a [`PipelineConfig`] so
//! the CLI stays a thin argument parser. Files are written atomically
//! (temporary file in the target directory, then rename).

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::color::{quantize_grid, Palette, QuantizeConfig};
use crate::error::{Error, Result};
use crate::grid::{Dims, VoxelGrid};
use crate::interchange::{parse_voxgrid, parse_voxlogit, write_voxgrid};
use crate::ldraw::{bom_csv, emit_instructions, emit_ldr_with_header, parse_ldr_str, LdrHeader};
use crate::legolize::{
    analyze_connectivity, bill_of_materials, cell_color_codes, fill_interior, merge_bricks,
    BrickCatalog, BrickModel, MergeOptions,
};
use crate::mesh::{parse_obj, parse_off, sample_surface, voxelize, TriangleMesh, DEFAULT_SAMPLES};
use crate::metrics::{cross_entropy_per_level, iou};
use crate::pyramid::{build_pyramid, check_ladder};

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub resolution: usize,
    pub levels: usize,
    pub k_colors: usize,
    pub fill_interior: bool,
    pub interlock: bool,
    pub seed: u64,
    pub samples: usize,
    pub catalog: Option<PathBuf>,
    pub palette: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            resolution: 32,
            levels: 4,
            k_colors: 4,
            fill_interior: true,
            interlock: true,
            seed: 0,
            samples: DEFAULT_SAMPLES,
            catalog: None,
            palette: None,
        }
    }
}

fn parse_bool(line: usize, v: &str) -> Result<bool> {
    match v {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(Error::parse(line, format!("invalid boolean `{v}`"))),
    }
}

fn parse_num<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::parse(line, format!("invalid value `{v}` for `{key}`")))
}

impl PipelineConfig {
    /// Applies `key = value` lines on top of `self`. `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let n = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::parse(n, format!("expected `key = value`, found `{line}`"))
            })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "resolution" => self.resolution = parse_num(n, key, value)?,
                "levels" => self.levels = parse_num(n, key, value)?,
                "colors" | "k_colors" => self.k_colors = parse_num(n, key, value)?,
                "fill_interior" | "fill" => self.fill_interior = parse_bool(n, value)?,
                "interlock" => self.interlock = parse_bool(n, value)?,
                "seed" => self.seed = parse_num(n, key, value)?,
                "samples" => self.samples = parse_num(n, key, value)?,
                "catalog" => self.catalog = Some(PathBuf::from(value)),
                "palette" => self.palette = Some(PathBuf::from(value)),
                _ => return Err(Error::parse(n, format!("unknown key `{key}`"))),
            }
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let mut cfg = PipelineConfig::default();
        cfg.apply_text(&read_text(path)?)?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolution == 0 {
            return Err(Error::Input("resolution must be at least 1".into()));
        }
        Dims::cube(self.resolution)
            .and_then(|d| check_ladder(d, self.levels))
            .map_err(|e| {
                Error::Input(format!(
                    "resolution {} with {} levels: {e}",
                    self.resolution, self.levels
                ))
            })?;
        if self.k_colors == 0 {
            return Err(Error::Input("colors must be at least 1".into()));
        }
        if self.samples == 0 {
            return Err(Error::Input("samples must be at least 1".into()));
        }
        Ok(())
    }

    pub fn quantize_config(&self) -> QuantizeConfig {
        QuantizeConfig {
            k: self.k_colors,
            seed: self.seed,
            ..QuantizeConfig::default()
        }
    }

    pub fn load_catalog(&self) -> Result<BrickCatalog> {
        match &self.catalog {
            Some(p) => BrickCatalog::parse(&read_text(p)?).map_err(|e| with_path(p, e)),
            None => Ok(BrickCatalog::standard()),
        }
    }

    pub fn load_palette(&self) -> Result<Palette> {
        match &self.palette {
            Some(p) => Palette::parse(&read_text(p)?).map_err(|e| with_path(p, e)),
            None => Ok(Palette::standard()),
        }
    }
}

/// Pipeline stage that produced an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Read,
    Voxelize,
    Pyramid,
    Quantize,
    Verify,
    Metrics,
    Write,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Stage::Config => "config",
            Stage::Read => "read",
            Stage::Voxelize => "voxelize",
            Stage::Pyramid => "pyramid",
            Stage::Quantize => "quantize",
            Stage::Verify => "verify",
            Stage::Metrics => "metrics",
            Stage::Write => "write",
        };
        f.write_str(s)
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{stage} stage failed: {source}")]
pub struct PipelineError {
    pub stage: Stage,
    #[source]
    pub source: Error,
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        self.source.exit_code()
    }
}

trait AtStage<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, PipelineError>;
}

impl<T> AtStage<T> for Result<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, PipelineError> {
        self.map_err(|source| PipelineError { stage, source })
    }
}

pub type PipelineResult<T> = std::result::Result<T, PipelineError>;

fn with_path(path: &Path, e: Error) -> Error {
    match e {
        Error::Parse { line, message } => Error::Parse {
            line,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Writes through a temporary file in the destination directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(contents).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

fn extension(path: &Path) -> String {
    path.extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase()
}

pub fn is_mesh_path(path: &Path) -> bool {
    matches!(extension(path).as_str(), "off" | "obj")
}

/// Reads an `.off` or `.obj` mesh.
pub fn load_mesh(path: &Path) -> Result<TriangleMesh> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = std::io::BufReader::new(file);
    let mesh = match extension(path).as_str() {
        "off" => parse_off(reader),
        "obj" => parse_obj(reader),
        other => {
            return Err(Error::Input(format!(
                "{}: unsupported mesh extension `{other}`",
                path.display()
            )))
        }
    };
    mesh.map_err(|e| with_path(path, e))
}

pub fn load_voxgrid(path: &Path) -> Result<VoxelGrid> {
    parse_voxgrid(&read_text(path)?).map_err(|e| with_path(path, e))
}

/// Samples the mesh surface and voxelizes at the configured resolution.
pub fn voxelize_mesh(mesh: &TriangleMesh, cfg: &PipelineConfig) -> Result<VoxelGrid> {
    let cloud = sample_surface(mesh, cfg.samples, cfg.seed)?;
    voxelize(&cloud, cfg.resolution)
}

fn load_input(input: &Path, cfg: &PipelineConfig) -> PipelineResult<VoxelGrid> {
    if is_mesh_path(input) {
        let mesh = load_mesh(input).at(Stage::Read)?;
        voxelize_mesh(&mesh, cfg).at(Stage::Voxelize)
    } else {
        load_voxgrid(input).at(Stage::Read)
    }
}

pub fn cmd_voxelize(
    input: &Path,
    cfg: &PipelineConfig,
    output: &Path,
) -> PipelineResult<VoxelGrid> {
    cfg.validate().at(Stage::Config)?;
    let mesh = load_mesh(input).at(Stage::Read)?;
    let grid = voxelize_mesh(&mesh, cfg).at(Stage::Voxelize)?;
    write_atomic(output, write_voxgrid(&grid).as_bytes()).at(Stage::Write)?;
    Ok(grid)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelReport {
    pub side: usize,
    pub filled_voxels: usize,
    pub bricks: usize,
    pub components: usize,
    pub floating_components: usize,
    pub ldr: PathBuf,
    pub instructions: PathBuf,
    pub bom: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuildReport {
    pub levels: Vec<LevelReport>,
    pub report: PathBuf,
}

impl BuildReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("side,filled_voxels,bricks,components,floating_components\n");
        for l in &self.levels {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                l.side, l.filled_voxels, l.bricks, l.components, l.floating_components
            );
        }
        out
    }
}

/// Checks that `model` covers exactly the filled cells of `grid` with
/// catalog bricks of a single color each.
pub fn verify_model(
    model: &BrickModel,
    grid: &VoxelGrid,
    catalog: &BrickCatalog,
    palette: &Palette,
) -> Result<()> {
    let checked = BrickModel::new(model.dims(), model.placements().to_vec())
        .map_err(|e| Error::Invariant(e.to_string()))?;
    let raster = checked.rasterize();
    if raster.occupancy() != grid.occupancy() {
        return Err(Error::Invariant(format!(
            "bricks cover {} cells, grid has {} filled (IoU {})",
            raster.filled_count(),
            grid.filled_count(),
            iou(&raster, grid)?
        )));
    }
    let codes = cell_color_codes(grid, palette);
    let d = grid.dims();
    for (i, p) in checked.placements().iter().enumerate() {
        if !p.matches_catalog(catalog) {
            return Err(Error::Invariant(format!(
                "brick {i} ({}) does not match the catalog",
                p.part_id
            )));
        }
        if p.cells()
            .any(|(x, y, z)| codes[d.index(x, y, z)] != Some(p.color_code))
        {
            return Err(Error::Invariant(format!("brick {i} spans several colors")));
        }
    }
    Ok(())
}

/// Converts one voxel grid into a verified brick model.
pub fn legolize_grid(
    grid: &VoxelGrid,
    cfg: &PipelineConfig,
    catalog: &BrickCatalog,
    palette: &Palette,
) -> PipelineResult<(VoxelGrid, BrickModel)> {
    let mut grid = grid.clone();
    if grid.has_colors() {
        grid = quantize_grid(&grid, &cfg.quantize_config(), palette).at(Stage::Quantize)?;
    }
    if cfg.fill_interior {
        grid = fill_interior(&grid);
    }
    let model = merge_bricks(
        &grid,
        catalog,
        palette,
        MergeOptions {
            interlock: cfg.interlock,
        },
    );
    verify_model(&model, &grid, catalog, palette).at(Stage::Verify)?;
    Ok((grid, model))
}

fn stem_of(path: &Path) -> String {
    path.file_stem()
        .and_then(|s| s.to_str())
        .filter(|s| !s.is_empty())
        .unwrap_or("model")
        .to_owned()
}

/// Builds brick models at every pyramid level of the input.
///
/// Writes `<stem>_<side>.ldr`, `<stem>_<side>_instructions.txt` and
/// `<stem>_<side>_bom.csv` per level plus `<stem>_report.csv` into `out_dir`.
/// Mesh inputs are voxelized at `cfg.resolution`; grid inputs keep their size.
pub fn cmd_build(
    input: &Path,
    cfg: &PipelineConfig,
    out_dir: &Path,
) -> PipelineResult<BuildReport> {
    cfg.validate().at(Stage::Config)?;
    let catalog = cfg.load_catalog().at(Stage::Config)?;
    let palette = cfg.load_palette().at(Stage::Config)?;
    let grid = load_input(input, cfg)?;
    let pyramid = build_pyramid(&grid, cfg.levels).at(Stage::Pyramid)?;
    fs::create_dir_all(out_dir)
        .map_err(|e| Error::io(out_dir, e))
        .at(Stage::Write)?;

    let stem = stem_of(input);
    let mut levels = Vec::new();
    for level in pyramid.levels() {
        let side = level.dims().nx;
        let (solid, model) = legolize_grid(level, cfg, &catalog, &palette)?;
        let conn = analyze_connectivity(&model);

        let base = format!("{stem}_{side}");
        let ldr = out_dir.join(format!("{base}.ldr"));
        let instructions = out_dir.join(format!("{base}_instructions.txt"));
        let bom = out_dir.join(format!("{base}_bom.csv"));
        let header = LdrHeader {
            title: format!("{stem} {side}x{side}x{side}"),
            name: format!("{base}.ldr"),
        };
        write_atomic(&ldr, emit_ldr_with_header(&model, &header).as_bytes()).at(Stage::Write)?;
        write_atomic(
            &instructions,
            emit_instructions(&model, &palette).as_bytes(),
        )
        .at(Stage::Write)?;
        write_atomic(
            &bom,
            bom_csv(&bill_of_materials(&model), &palette).as_bytes(),
        )
        .at(Stage::Write)?;

        levels.push(LevelReport {
            side,
            filled_voxels: solid.filled_count(),
            bricks: model.len(),
            components: conn.components,
            floating_components: conn.floating.len(),
            ldr,
            instructions,
            bom,
        });
    }

    let report = BuildReport {
        levels,
        report: out_dir.join(format!("{stem}_report.csv")),
    };
    write_atomic(&report.report, report.to_csv().as_bytes()).at(Stage::Write)?;
    Ok(report)
}

/// Per-level IoU (and cross-entropy for logit predictions) as CSV.
///
/// A `VOXGRID` prediction is compared over `cfg.levels` pyramid levels with
/// header `level,iou`. A `VOXLOGIT` prediction uses its own level count,
/// thresholds logits at zero for IoU, and adds a `bce` column plus a final
/// `total` row holding the summed loss.
pub fn cmd_metrics(pred: &Path, target: &Path, cfg: &PipelineConfig) -> PipelineResult<String> {
    let pred_text = read_text(pred).at(Stage::Read)?;
    let target = load_voxgrid(target).at(Stage::Read)?;
    let mut out = String::new();

    if pred_text.trim_start().starts_with("VOXLOGIT") {
        let logits = parse_voxlogit(&pred_text)
            .map_err(|e| with_path(pred, e))
            .at(Stage::Read)?;
        let bce = cross_entropy_per_level(&logits, &target).at(Stage::Metrics)?;
        let targets = build_pyramid(&target, logits.len()).at(Stage::Metrics)?;
        out.push_str("level,iou,bce\n");
        for ((l, t), b) in logits.levels().iter().zip(targets.levels()).zip(&bce) {
            let score = iou(&l.to_occupancy(), t).at(Stage::Metrics)?;
            let _ = writeln!(out, "{},{score},{b}", l.dims().nx);
        }
        let total = crate::metrics::multires_cross_entropy(&logits, &target).at(Stage::Metrics)?;
        let _ = writeln!(out, "total,,{total}");
    } else {
        let pred_grid = parse_voxgrid(&pred_text)
            .map_err(|e| with_path(pred, e))
            .at(Stage::Read)?;
        if pred_grid.dims() != target.dims() {
            return Err(Error::Dimension(format!(
                "prediction is {}, target is {}",
                pred_grid.dims(),
                target.dims()
            )))
            .at(Stage::Metrics);
        }
        let pp = build_pyramid(&pred_grid, cfg.levels).at(Stage::Metrics)?;
        let tp = build_pyramid(&target, cfg.levels).at(Stage::Metrics)?;
        out.push_str("level,iou\n");
        for (p, t) in pp.levels().iter().zip(tp.levels()) {
            let _ = writeln!(out, "{},{}", p.dims().nx, iou(p, t).at(Stage::Metrics)?);
        }
    }
    Ok(out)
}

pub fn cmd_quantize(
    input: &Path,
    cfg: &PipelineConfig,
    output: &Path,
) -> PipelineResult<VoxelGrid> {
    let palette = cfg.load_palette().at(Stage::Config)?;
    let grid = load_voxgrid(input).at(Stage::Read)?;
    let q = quantize_grid(&grid, &cfg.quantize_config(), &palette).at(Stage::Quantize)?;
    write_atomic(output, write_voxgrid(&q).as_bytes()).at(Stage::Write)?;
    Ok(q)
}

pub fn cmd_fill(input: &Path, output: &Path) -> PipelineResult<VoxelGrid> {
    let grid = load_voxgrid(input).at(Stage::Read)?;
    let filled = fill_interior(&grid);
    write_atomic(output, write_voxgrid(&filled).as_bytes()).at(Stage::Write)?;
    Ok(filled)
}

/// Merges a grid into bricks without quantizing or filling. The output is
/// LDraw when `output` ends in `.ldr`, otherwise a `BRICKS 1` dump.
pub fn cmd_legolize(
    input: &Path,
    cfg: &PipelineConfig,
    output: &Path,
) -> PipelineResult<BrickModel> {
    let catalog = cfg.load_catalog().at(Stage::Config)?;
    let palette = cfg.load_palette().at(Stage::Config)?;
    let grid = load_voxgrid(input).at(Stage::Read)?;
    let model = merge_bricks(
        &grid,
        &catalog,
        &palette,
        MergeOptions {
            interlock: cfg.interlock,
        },
    );
    verify_model(&model, &grid, &catalog, &palette).at(Stage::Verify)?;
    let text = if extension(output) == "ldr" {
        let stem = stem_of(output);
        emit_ldr_with_header(
            &model,
            &LdrHeader {
                title: stem.clone(),
                name: format!("{stem}.ldr"),
            },
        )
    } else {
        model.to_bricks_text()
    };
    write_atomic(output, text.as_bytes()).at(Stage::Write)?;
    Ok(model)
}

/// Reads a brick model from `.ldr` or a `BRICKS 1` dump.
pub fn load_model(path: &Path, catalog: &BrickCatalog) -> Result<BrickModel> {
    let text = read_text(path)?;
    let model = if extension(path) == "ldr" {
        parse_ldr_str(&text, catalog)?.to_model()
    } else {
        BrickModel::parse_bricks_text(&text)
    };
    model.map_err(|e| with_path(path, e))
}

/// Parts list CSV of a stored model.
pub fn cmd_bom(input: &Path, cfg: &PipelineConfig) -> PipelineResult<String> {
    let catalog = cfg.load_catalog().at(Stage::Config)?;
    let palette = cfg.load_palette().at(Stage::Config)?;
    let model = load_model(input, &catalog).at(Stage::Read)?;
    Ok(bom_csv(&bill_of_materials(&model), &palette))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_text_overrides() {
        let mut c = PipelineConfig::default();
        c.apply_text("# comment\nresolution = 16\nlevels=3\ncolors = 2\nfill_interior = false\ninterlock=no\nseed=9\n")
            .unwrap();
        assert_eq!((c.resolution, c.levels, c.k_colors, c.seed), (16, 3, 2, 9));
        assert!(!c.fill_interior && !c.interlock);
        assert_eq!(c.apply_text("\nbogus = 1\n").unwrap_err().line(), Some(2));
        assert_eq!(c.apply_text("levels\n").unwrap_err().line(), Some(1));
        assert_eq!(
            c.apply_text("interlock = maybe\n").unwrap_err().line(),
            Some(1)
        );
    }

    #[test]
    fn config_validation() {
        assert!(PipelineConfig::default().validate().is_ok());
        let bad = |f: fn(&mut PipelineConfig)| {
            let mut c = PipelineConfig::default();
            f(&mut c);
            c.validate().is_err()
        };
        assert!(bad(|c| c.resolution = 24));
        assert!(bad(|c| c.resolution = 4));
        assert!(bad(|c| c.levels = 0));
        assert!(bad(|c| c.k_colors = 0));
        assert!(bad(|c| c.resolution = 0));
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
