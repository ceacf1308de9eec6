//! Text interchange formats for occupancy grids (`VOXGRID 1`) and logit
//! pyramids (`VOXLOGIT 1`).
//!
//! ```text
//! VOXGRID 1
//! dims 4 4 4
//! color 1
//! 0 0 0 255 0 0
//! 1 0 0 0 0 255
//! ```
//!
//! Uncolored grids use `color 0` and three-field voxel lines. A logit file
//! starts with `VOXLOGIT 1 N` and holds N blocks `level s` followed by `s^3`
//! whitespace-separated reals in linear-index order, coarsest level first.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::grid::{channel_from_u8, channel_to_u8, Dims, VoxelGrid, MAX_CELLS};
use crate::pyramid::{LogitGrid, LogitPyramid};

pub fn write_voxgrid(grid: &VoxelGrid) -> String {
    let d = grid.dims();
    let mut out = String::new();
    out.push_str("VOXGRID 1\n");
    let _ = writeln!(out, "dims {} {} {}", d.nx, d.ny, d.nz);
    let _ = writeln!(out, "color {}", u8::from(grid.has_colors()));
    for i in grid.filled_indices() {
        let (x, y, z) = d.coords(i);
        match grid.color_index(i) {
            Some([r, g, b]) => {
                let _ = writeln!(
                    out,
                    "{x} {y} {z} {} {} {}",
                    channel_to_u8(r),
                    channel_to_u8(g),
                    channel_to_u8(b)
                );
            }
            None => {
                let _ = writeln!(out, "{x} {y} {z}");
            }
        }
    }
    out
}

fn numbered_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn parse_tok<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| Error::parse(line, format!("invalid {what} `{tok}`")))
}

pub fn parse_voxgrid(text: &str) -> Result<VoxelGrid> {
    let mut lines = numbered_lines(text);
    let last_line = text.lines().count();

    match lines.next() {
        Some((_, "VOXGRID 1")) => {}
        Some((n, l)) => {
            return Err(Error::parse(
                n,
                format!("expected `VOXGRID 1`, found `{l}`"),
            ))
        }
        None => return Err(Error::parse(1, "empty input, expected `VOXGRID 1`")),
    }

    let (n, l) = lines
        .next()
        .ok_or_else(|| Error::parse(last_line + 1, "missing `dims` line"))?;
    let toks: Vec<&str> = l.split_whitespace().collect();
    if toks.len() != 4 || toks[0] != "dims" {
        return Err(Error::parse(
            n,
            format!("expected `dims nx ny nz`, found `{l}`"),
        ));
    }
    let nx = parse_tok(n, toks[1], "dimension")?;
    let ny = parse_tok(n, toks[2], "dimension")?;
    let nz = parse_tok(n, toks[3], "dimension")?;
    let dims = Dims::new(nx, ny, nz).map_err(|e| Error::parse(n, e.to_string()))?;

    let (n, l) = lines
        .next()
        .ok_or_else(|| Error::parse(last_line + 1, "missing `color` line"))?;
    let colored = match l.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["color", "0"] => false,
        ["color", "1"] => true,
        _ => {
            return Err(Error::parse(
                n,
                format!("expected `color 0|1`, found `{l}`"),
            ))
        }
    };

    let mut grid = if colored {
        VoxelGrid::new_colored(dims)
    } else {
        VoxelGrid::new(dims)
    };
    let expected = if colored { 6 } else { 3 };
    for (n, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != expected {
            return Err(Error::parse(
                n,
                format!("expected {expected} fields, found {}", toks.len()),
            ));
        }
        let x: usize = parse_tok(n, toks[0], "coordinate")?;
        let y: usize = parse_tok(n, toks[1], "coordinate")?;
        let z: usize = parse_tok(n, toks[2], "coordinate")?;
        if x >= dims.nx || y >= dims.ny || z >= dims.nz {
            return Err(Error::parse(
                n,
                format!("voxel ({x}, {y}, {z}) outside {dims}"),
            ));
        }
        if colored {
            let r: u8 = parse_tok(n, toks[3], "channel")?;
            let g: u8 = parse_tok(n, toks[4], "channel")?;
            let b: u8 = parse_tok(n, toks[5], "channel")?;
            grid.set_color(
                x,
                y,
                z,
                [channel_from_u8(r), channel_from_u8(g), channel_from_u8(b)],
            );
        } else {
            grid.set_filled(x, y, z, true);
        }
    }
    Ok(grid)
}

pub fn write_voxlogit(pyramid: &LogitPyramid) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "VOXLOGIT 1 {}", pyramid.len());
    for level in pyramid.levels() {
        let side = level.dims().nx;
        let _ = writeln!(out, "level {side}");
        for row in level.values().chunks(side) {
            let mut first = true;
            for v in row {
                if !first {
                    out.push(' ');
                }
                first = false;
                let _ = write!(out, "{v:?}");
            }
            out.push('\n');
        }
    }
    out
}

pub fn parse_voxlogit(text: &str) -> Result<LogitPyramid> {
    let mut toks = text
        .lines()
        .enumerate()
        .flat_map(|(i, l)| l.split_whitespace().map(move |t| (i + 1, t)));
    let end_line = text.lines().count().max(1);
    let mut next = |what: &str| {
        toks.next().ok_or_else(|| {
            Error::parse(
                end_line,
                format!("unexpected end of input, expected {what}"),
            )
        })
    };

    let (n, magic) = next("`VOXLOGIT`")?;
    if magic != "VOXLOGIT" {
        return Err(Error::parse(
            n,
            format!("expected `VOXLOGIT`, found `{magic}`"),
        ));
    }
    let (n, version) = next("version")?;
    if version != "1" {
        return Err(Error::parse(n, format!("unsupported version `{version}`")));
    }
    let (n, count) = next("level count")?;
    let count: usize = parse_tok(n, count, "level count")?;
    if count == 0 || count > 32 {
        return Err(Error::parse(n, format!("level count {count} out of range")));
    }

    let mut levels = Vec::with_capacity(count);
    for _ in 0..count {
        let (n, kw) = next("`level`")?;
        if kw != "level" {
            return Err(Error::parse(n, format!("expected `level`, found `{kw}`")));
        }
        let (n, side) = next("level side")?;
        let side: usize = parse_tok(n, side, "level side")?;
        let dims = Dims::cube(side).map_err(|e| Error::parse(n, e.to_string()))?;
        let cells = dims.cell_count();
        let mut values = Vec::with_capacity(cells.min(MAX_CELLS / 64));
        for _ in 0..cells {
            let (n, tok) = next("logit value")?;
            let v: f64 = parse_tok(n, tok, "logit")?;
            if !v.is_finite() {
                return Err(Error::parse(n, format!("logit `{tok}` is not finite")));
            }
            values.push(v);
        }
        levels.push(LogitGrid::new(dims, values).map_err(|e| Error::parse(n, e.to_string()))?);
    }
    if let Some((n, tok)) = toks.next() {
        return Err(Error::parse(n, format!("trailing data `{tok}`")));
    }
    LogitPyramid::new(levels).map_err(|e| Error::parse(end_line, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn voxgrid_text_layout() {
        let mut g = VoxelGrid::new(Dims::new(2, 1, 2).unwrap());
        g.set_filled(1, 0, 0, true);
        g.set_filled(0, 0, 1, true);
        assert_eq!(
            write_voxgrid(&g),
            "VOXGRID 1\ndims 2 1 2\ncolor 0\n1 0 0\n0 0 1\n"
        );
        assert_eq!(parse_voxgrid(&write_voxgrid(&g)).unwrap(), g);
    }

    #[test]
    fn colored_voxgrid_round_trip() {
        let mut g = VoxelGrid::new_colored(Dims::cube(3).unwrap());
        g.set_color(2, 1, 0, [1.0, channel_from_u8(128), 0.0]);
        let text = write_voxgrid(&g);
        assert!(text.ends_with("2 1 0 255 128 0\n"));
        assert_eq!(parse_voxgrid(&text).unwrap(), g);
    }

    #[test]
    fn voxgrid_errors_carry_lines() {
        let cases = [
            ("VOXGRID 2\n", 1),
            ("VOXGRID 1\ndims 2 2\n", 2),
            ("VOXGRID 1\ndims 2 2 2\ncolor 3\n", 3),
            ("VOXGRID 1\ndims 2 2 2\ncolor 0\n0 0 0\n2 0 0\n", 5),
            ("VOXGRID 1\ndims 2 2 2\ncolor 1\n0 0 0\n", 4),
            ("VOXGRID 1\ndims 2 2 2\ncolor 1\n0 0 0 1 2 300\n", 4),
            ("VOXGRID 1\ndims 0 2 2\n", 2),
        ];
        for (text, line) in cases {
            let e = parse_voxgrid(text).unwrap_err();
            assert_eq!(e.line(), Some(line), "{text:?}: {e}");
        }
    }

    #[test]
    fn voxlogit_round_trip() {
        let l1 = LogitGrid::new(Dims::cube(1).unwrap(), vec![-0.25]).unwrap();
        let l2 = LogitGrid::new(
            Dims::cube(2).unwrap(),
            vec![0.1, -3.0, 7.5, 1e-300, 0.0, 2.0, 3.0, 4.0],
        )
        .unwrap();
        let p = LogitPyramid::new(vec![l1, l2]).unwrap();
        let text = write_voxlogit(&p);
        assert!(text.starts_with("VOXLOGIT 1 2\nlevel 1\n-0.25\nlevel 2\n"));
        assert_eq!(parse_voxlogit(&text).unwrap(), p);
    }

    #[test]
    fn voxlogit_errors() {
        assert_eq!(
            parse_voxlogit("VOXLOGIT 1 1\nlevel 2\n0 0 0\n")
                .unwrap_err()
                .line(),
            Some(3)
        );
        assert_eq!(
            parse_voxlogit("VOXLOGIT 1 1\nlevel 1\nnan\n")
                .unwrap_err()
                .line(),
            Some(3)
        );
        assert_eq!(
            parse_voxlogit("VOXLOGIT 1 1\nlevel 1\n1 2\n")
                .unwrap_err()
                .line(),
            Some(3)
        );
        assert!(parse_voxlogit("VOXLOGIT 1 2\nlevel 1\n0\nlevel 4\n").is_err());
        assert!(parse_voxlogit("").is_err());
    }
}
