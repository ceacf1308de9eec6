//! LDraw model output and input, step-by-step instructions and parts lists.
//!
//! Coordinates follow LDraw conventions: one stud is 20 LDU, a brick is 24
//! LDU tall, and the y axis points down. A brick whose footprint center is at
//! `(cx, cz)` studs on layer `y` of an `nx x ny x nz` grid is written at
//!
//! ```text
//! px = 20 * (cx - nx / 2)    py = -24 * (y + 1)    pz = 20 * (cz - nz / 2)
//! ```
//!
//! so the model is centered on the origin and layer 0 rests on the ground
//! plane. Each layer is one `0 STEP`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::BufRead;

use crate::color::Palette;
use crate::error::{Error, Result};
use crate::grid::Dims;
use crate::legolize::{BomLine, BrickCatalog, BrickModel, BrickPlacement, Orientation};
use crate::lines::LineReader;

pub const STUD_LDU: f64 = 20.0;
pub const BRICK_HEIGHT_LDU: f64 = 24.0;

const IDENTITY: [f64; 9] = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
const QUARTER_TURN: [f64; 9] = [0.0, 0.0, 1.0, 0.0, 1.0, 0.0, -1.0, 0.0, 0.0];

/// Header comment written before the grid-size line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LdrHeader {
    pub title: String,
    pub name: String,
}

impl Default for LdrHeader {
    fn default() -> Self {
        LdrHeader {
            title: "Brick model".into(),
            name: "model.ldr".into(),
        }
    }
}

fn rotation(o: Orientation) -> &'static [f64; 9] {
    match o {
        Orientation::Deg0 => &IDENTITY,
        Orientation::Deg90 => &QUARTER_TURN,
    }
}

/// Shortest decimal that reads back to the same value; integers have no
/// fractional part and negative zero prints as `0`.
fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        "0".to_owned()
    } else {
        format!("{v}")
    }
}

pub fn emit_ldr(model: &BrickModel) -> String {
    emit_ldr_with_header(model, &LdrHeader::default())
}

pub fn emit_ldr_with_header(model: &BrickModel, header: &LdrHeader) -> String {
    let d = model.dims();
    let mut out = String::new();
    let _ = write!(out, "0 {}\r\n", header.title);
    let _ = write!(out, "0 Name: {}\r\n", header.name);
    let _ = write!(out, "0 // grid {} {} {}\r\n", d.nx, d.ny, d.nz);
    let (half_x, half_z) = (d.nx as f64 / 2.0, d.nz as f64 / 2.0);
    for (layer, bricks) in model.layers() {
        for p in bricks {
            let cx = p.origin[0] as f64 + p.size_x as f64 / 2.0;
            let cz = p.origin[2] as f64 + p.size_z as f64 / 2.0;
            let px = STUD_LDU * (cx - half_x);
            let py = -BRICK_HEIGHT_LDU * (layer as f64 + 1.0);
            let pz = STUD_LDU * (cz - half_z);
            let _ = write!(
                out,
                "1 {} {} {} {}",
                p.color_code,
                fmt_num(px),
                fmt_num(py),
                fmt_num(pz)
            );
            for v in rotation(p.orientation) {
                let _ = write!(out, " {}", fmt_num(*v));
            }
            let _ = write!(out, " {}.dat\r\n", p.part_id);
        }
        out.push_str("0 STEP\r\n");
    }
    out.push_str("0\r\n");
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LdrWarning {
    pub line: usize,
    pub message: String,
}

/// A parsed LDraw file: comments, placements grouped by step, and anything
/// that was skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct LDrawDocument {
    pub header: Vec<String>,
    pub steps: Vec<Vec<BrickPlacement>>,
    /// From the `0 // grid` line, or the bounding box of the bricks.
    pub grid_dims: Option<Dims>,
    pub warnings: Vec<LdrWarning>,
}

impl LDrawDocument {
    pub fn placements(&self) -> impl Iterator<Item = &BrickPlacement> {
        self.steps.iter().flatten()
    }

    /// Rebuilds a model, ordering bricks bottom layer first.
    pub fn to_model(&self) -> Result<BrickModel> {
        let dims = match self.grid_dims {
            Some(d) => d,
            None => Dims::cube(1)?,
        };
        let mut placements: Vec<BrickPlacement> = self.placements().cloned().collect();
        placements.sort_by_key(|p| p.layer());
        BrickModel::new(dims, placements)
    }
}

struct RawBrick {
    line: usize,
    step: usize,
    color: u32,
    pos: [f64; 3],
    orientation: Orientation,
    part_id: String,
    size: (usize, usize),
}

fn same_matrix(a: &[f64], b: &[f64; 9]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-6)
}

fn as_index(v: f64) -> Option<usize> {
    let r = v.round();
    ((v - r).abs() < 1e-6 && (0.0..1e9).contains(&r)).then_some(r as usize)
}

/// Parses the subset of LDraw that [`emit_ldr`] writes. Parts missing from
/// `catalog`, other rotations and other line types are skipped with a warning;
/// malformed type-1 lines are errors.
pub fn parse_ldr<R: BufRead>(reader: R, catalog: &BrickCatalog) -> Result<LDrawDocument> {
    let mut lines = LineReader::new(reader);
    let mut header = Vec::new();
    let mut warnings = Vec::new();
    let mut grid_dims = None;
    let mut raws: Vec<RawBrick> = Vec::new();
    let mut step = 0usize;
    let mut step_has_bricks = false;

    while let Some((n, line)) = lines.next_line()? {
        let line = line.trim_start_matches('\u{feff}');
        let toks: Vec<&str> = line.split_whitespace().collect();
        let Some(&kind) = toks.first() else { continue };
        match kind {
            "0" => {
                let rest = line.trim()[1..].trim();
                if rest == "STEP" {
                    if step_has_bricks {
                        step += 1;
                        step_has_bricks = false;
                    }
                } else if let Some(dims) = rest.strip_prefix("// grid") {
                    let v: Vec<Option<usize>> =
                        dims.split_whitespace().map(|t| t.parse().ok()).collect();
                    match v.as_slice() {
                        [Some(x), Some(y), Some(z)] => match Dims::new(*x, *y, *z) {
                            Ok(d) => grid_dims = Some(d),
                            Err(e) => warnings.push(LdrWarning {
                                line: n,
                                message: e.to_string(),
                            }),
                        },
                        _ => warnings.push(LdrWarning {
                            line: n,
                            message: "unreadable grid comment".into(),
                        }),
                    }
                } else if !rest.is_empty() && raws.is_empty() {
                    header.push(rest.to_owned());
                }
            }
            "1" => {
                if toks.len() != 15 {
                    return Err(Error::parse(
                        n,
                        format!("type-1 line needs 14 fields, found {}", toks.len() - 1),
                    ));
                }
                let color: u32 = toks[1]
                    .parse()
                    .map_err(|_| Error::parse(n, format!("invalid color `{}`", toks[1])))?;
                let mut nums = [0.0f64; 12];
                for (v, tok) in nums.iter_mut().zip(&toks[2..14]) {
                    *v = tok
                        .parse::<f64>()
                        .ok()
                        .filter(|x| x.is_finite())
                        .ok_or_else(|| Error::parse(n, format!("invalid number `{tok}`")))?;
                }
                let file = toks[14];
                let part_id = match file.len().checked_sub(4) {
                    Some(cut)
                        if file.is_char_boundary(cut)
                            && file[cut..].eq_ignore_ascii_case(".dat") =>
                    {
                        &file[..cut]
                    }
                    _ => file,
                };
                let Some(fp) = catalog.by_part(part_id) else {
                    warnings.push(LdrWarning {
                        line: n,
                        message: format!("part `{file}` is not in the catalog"),
                    });
                    continue;
                };
                let orientation = if same_matrix(&nums[3..], &IDENTITY) {
                    Orientation::Deg0
                } else if same_matrix(&nums[3..], &QUARTER_TURN) {
                    Orientation::Deg90
                } else {
                    warnings.push(LdrWarning {
                        line: n,
                        message: "unsupported rotation".into(),
                    });
                    continue;
                };
                raws.push(RawBrick {
                    line: n,
                    step,
                    color,
                    pos: [nums[0], nums[1], nums[2]],
                    orientation,
                    part_id: fp.part_id.clone(),
                    size: orientation.extents(fp.width, fp.depth),
                });
                step_has_bricks = true;
            }
            "2" | "3" | "4" | "5" => warnings.push(LdrWarning {
                line: n,
                message: format!("line type {kind} ignored"),
            }),
            other => warnings.push(LdrWarning {
                line: n,
                message: format!("unknown line type `{other}` ignored"),
            }),
        }
    }

    // Shift that turns `pos / 20 - size / 2` into a grid min-corner.
    let (shift_x, shift_z) = match grid_dims {
        Some(d) => (d.nx as f64 / 2.0, d.nz as f64 / 2.0),
        None => {
            let min_x = raws
                .iter()
                .map(|r| r.pos[0] / STUD_LDU - r.size.0 as f64 / 2.0)
                .fold(f64::INFINITY, f64::min);
            let min_z = raws
                .iter()
                .map(|r| r.pos[2] / STUD_LDU - r.size.1 as f64 / 2.0)
                .fold(f64::INFINITY, f64::min);
            (-min_x, -min_z)
        }
    };

    let mut steps: Vec<Vec<BrickPlacement>> = Vec::new();
    let mut extent = [0usize; 3];
    for r in raws {
        let x = as_index(r.pos[0] / STUD_LDU - r.size.0 as f64 / 2.0 + shift_x);
        let y = as_index(-r.pos[1] / BRICK_HEIGHT_LDU - 1.0);
        let z = as_index(r.pos[2] / STUD_LDU - r.size.1 as f64 / 2.0 + shift_z);
        let (Some(x), Some(y), Some(z)) = (x, y, z) else {
            warnings.push(LdrWarning {
                line: r.line,
                message: "brick is not aligned to the stud grid".into(),
            });
            continue;
        };
        extent[0] = extent[0].max(x + r.size.0);
        extent[1] = extent[1].max(y + 1);
        extent[2] = extent[2].max(z + r.size.1);
        if steps.len() <= r.step {
            steps.resize_with(r.step + 1, Vec::new);
        }
        steps[r.step].push(BrickPlacement {
            origin: [x, y, z],
            size_x: r.size.0,
            size_z: r.size.1,
            orientation: r.orientation,
            part_id: r.part_id,
            color_code: r.color,
        });
    }
    steps.retain(|s| !s.is_empty());
    if grid_dims.is_none() && !steps.is_empty() {
        grid_dims = Dims::new(extent[0], extent[1], extent[2]).ok();
    }

    Ok(LDrawDocument {
        header,
        steps,
        grid_dims,
        warnings,
    })
}

pub fn parse_ldr_str(text: &str, catalog: &BrickCatalog) -> Result<LDrawDocument> {
    parse_ldr(text.as_bytes(), catalog)
}

fn plural(n: usize) -> &'static str {
    if n == 1 {
        "brick"
    } else {
        "bricks"
    }
}

/// Human-readable build steps, one per nonempty layer.
pub fn emit_instructions(model: &BrickModel, palette: &Palette) -> String {
    let mut out = String::new();
    let mut total = 0;
    for (step, (layer, bricks)) in model.layers().into_iter().enumerate() {
        let _ = writeln!(out, "Step {} (layer {layer}):", step + 1);
        for p in bricks {
            let (a, b) = (p.size_x.min(p.size_z), p.size_x.max(p.size_z));
            let [x, y, z] = p.origin;
            let _ = writeln!(
                out,
                "  place {a}x{b} brick {} in {} ({}) at x={x} y={y} z={z}, rotated {}",
                p.part_id,
                palette.name_of(p.color_code),
                p.color_code,
                p.orientation.degrees()
            );
        }
        total += bricks.len();
        let _ = writeln!(
            out,
            "  added {} {}; total {total} {}",
            bricks.len(),
            plural(bricks.len()),
            plural(total)
        );
    }
    out
}

/// Parts list as CSV with header `part_id,color_code,color_name,count`.
pub fn bom_csv(bom: &[BomLine], palette: &Palette) -> String {
    let mut out = String::from("part_id,color_code,color_name,count\n");
    for l in bom {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            l.part_id,
            l.color_code,
            palette.name_of(l.color_code),
            l.count
        );
    }
    out
}

/// Number of bricks per LDraw color code.
pub fn color_usage(model: &BrickModel) -> BTreeMap<u32, usize> {
    let mut m = BTreeMap::new();
    for p in model.placements() {
        *m.entry(p.color_code).or_default() += 1;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::legolize::BrickPlacement;

    fn unit_model() -> BrickModel {
        BrickModel::new(
            Dims::cube(1).unwrap(),
            vec![BrickPlacement {
                origin: [0, 0, 0],
                size_x: 1,
                size_z: 1,
                orientation: Orientation::Deg0,
                part_id: "3005".into(),
                color_code: 7,
            }],
        )
        .unwrap()
    }

    #[test]
    fn number_formatting() {
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(-24.0), "-24");
        assert_eq!(fmt_num(10.0), "10");
        assert_eq!(fmt_num(2.5), "2.5");
    }

    #[test]
    fn unit_brick_line() {
        let text = emit_ldr(&unit_model());
        let lines: Vec<&str> = text.split("\r\n").collect();
        assert_eq!(lines[3], "1 7 0 -24 0 1 0 0 0 1 0 0 0 1 3005.dat");
        assert_eq!(lines[4], "0 STEP");
        assert_eq!(lines[5], "0");
        assert_eq!(lines[6], "");
    }

    #[test]
    fn empty_model_is_header_and_terminator() {
        let m = BrickModel::new(Dims::cube(2).unwrap(), vec![]).unwrap();
        assert_eq!(
            emit_ldr(&m),
            "0 Brick model\r\n0 Name: model.ldr\r\n0 // grid 2 2 2\r\n0\r\n"
        );
    }

    #[test]
    fn comments_only() {
        let doc = parse_ldr_str("0 Title\r\n0 Author: x\r\n", &BrickCatalog::standard()).unwrap();
        assert!(doc.steps.is_empty());
        assert_eq!(doc.header, vec!["Title", "Author: x"]);
    }

    #[test]
    fn wrong_field_count() {
        let text = "0 x\n1 7 0 -24 0 1 0 0 0 1 0 0 0 3005.dat\n";
        let e = parse_ldr_str(text, &BrickCatalog::standard()).unwrap_err();
        assert_eq!(e.line(), Some(2));
        assert!(e.to_string().contains("found 13"), "{e}");
    }

    #[test]
    fn unknown_parts_and_rotations_warn() {
        let text = "1 7 0 -24 0 1 0 0 0 1 0 0 0 1 9999.dat\n\
                    1 7 0 -24 0 0 0 -1 0 1 0 1 0 0 3005.dat\n\
                    2 24 0 0 0 1 1 1\n";
        let doc = parse_ldr_str(text, &BrickCatalog::standard()).unwrap();
        assert_eq!(doc.placements().count(), 0);
        assert_eq!(doc.warnings.len(), 3);
    }

    #[test]
    fn dims_inferred_without_grid_comment() {
        let text = "1 4 100 -48 -20 1 0 0 0 1 0 0 0 1 3001.dat\n0 STEP\n";
        let doc = parse_ldr_str(text, &BrickCatalog::standard()).unwrap();
        let p: Vec<_> = doc.placements().collect();
        assert_eq!(p[0].origin, [0, 1, 0]);
        assert_eq!((p[0].size_x, p[0].size_z), (4, 2));
        assert_eq!(doc.grid_dims, Some(Dims::new(4, 2, 2).unwrap()));
    }

    #[test]
    fn instructions_for_single_brick() {
        let text = emit_instructions(&unit_model(), &Palette::standard());
        assert_eq!(
            text,
            "Step 1 (layer 0):\n  place 1x1 brick 3005 in Light_Grey (7) at x=0 y=0 z=0, rotated 0\n  \
             added 1 brick; total 1 brick\n"
        );
    }

    #[test]
    fn bom_csv_layout() {
        let bom = vec![BomLine {
            part_id: "3001".into(),
            color_code: 4,
            count: 2,
        }];
        assert_eq!(
            bom_csv(&bom, &Palette::standard()),
            "part_id,color_code,color_name,count\n3001,4,Red,2\n"
        );
    }
}
