use std::fmt::Write as _;

use super::catalog::BrickCatalog;
use crate::color::Palette;
use crate::error::{Error, Result};
use crate::grid::{Dims, VoxelGrid};

/// Rotation about the vertical axis. At `Deg0` a brick's long side runs
/// along x (the native LDraw orientation of rectangular bricks); at `Deg90`
/// it runs along z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    Deg0,
    Deg90,
}

impl Orientation {
    pub fn degrees(self) -> u32 {
        match self {
            Orientation::Deg0 => 0,
            Orientation::Deg90 => 90,
        }
    }

    pub fn from_degrees(d: u32) -> Option<Self> {
        match d {
            0 => Some(Orientation::Deg0),
            90 => Some(Orientation::Deg90),
            _ => None,
        }
    }

    /// `(x extent, z extent)` of a catalog footprint `width <= depth`.
    pub fn extents(self, width: usize, depth: usize) -> (usize, usize) {
        match self {
            Orientation::Deg0 => (depth, width),
            Orientation::Deg90 => (width, depth),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BrickPlacement {
    /// Min-corner cell `(x, y, z)`.
    pub origin: [usize; 3],
    /// Studs along x.
    pub size_x: usize,
    /// Studs along z.
    pub size_z: usize,
    pub orientation: Orientation,
    pub part_id: String,
    pub color_code: u32,
}

impl BrickPlacement {
    pub fn layer(&self) -> usize {
        self.origin[1]
    }

    /// Covered cells as `(x, y, z)`.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let [x0, y, z0] = self.origin;
        (z0..z0 + self.size_z).flat_map(move |z| (x0..x0 + self.size_x).map(move |x| (x, y, z)))
    }

    /// Checks the placement against a catalog footprint.
    pub fn matches_catalog(&self, catalog: &BrickCatalog) -> bool {
        catalog.by_part(&self.part_id).is_some_and(|f| {
            self.orientation.extents(f.width, f.depth) == (self.size_x, self.size_z)
        })
    }
}

/// Bricks in build order (bottom layer first) over a grid of `dims`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BrickModel {
    dims: Dims,
    placements: Vec<BrickPlacement>,
}

impl BrickModel {
    /// Checks bounds, pairwise disjointness and bottom-up ordering.
    pub fn new(dims: Dims, placements: Vec<BrickPlacement>) -> Result<Self> {
        let mut covered = vec![false; dims.cell_count()];
        let mut prev_layer = 0;
        for (i, p) in placements.iter().enumerate() {
            let [x, y, z] = p.origin;
            if p.size_x == 0 || p.size_z == 0 {
                return Err(Error::Input(format!("brick {i} has an empty footprint")));
            }
            if y >= dims.ny
                || x.checked_add(p.size_x).is_none_or(|e| e > dims.nx)
                || z.checked_add(p.size_z).is_none_or(|e| e > dims.nz)
            {
                return Err(Error::Input(format!(
                    "brick {i} at {:?} ({}x{}) leaves grid {dims}",
                    p.origin, p.size_x, p.size_z
                )));
            }
            if y < prev_layer {
                return Err(Error::Input(format!(
                    "brick {i} on layer {y} follows layer {prev_layer}"
                )));
            }
            prev_layer = y;
            for (cx, cy, cz) in p.cells() {
                let c = dims.index(cx, cy, cz);
                if covered[c] {
                    return Err(Error::Input(format!(
                        "brick {i} overlaps cell ({cx}, {cy}, {cz})"
                    )));
                }
                covered[c] = true;
            }
        }
        Ok(BrickModel { dims, placements })
    }

    pub(crate) fn new_unchecked(dims: Dims, placements: Vec<BrickPlacement>) -> Self {
        BrickModel { dims, placements }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn placements(&self) -> &[BrickPlacement] {
        &self.placements
    }

    pub fn len(&self) -> usize {
        self.placements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.placements.is_empty()
    }

    /// Placements grouped by layer, bottom first, skipping empty layers.
    pub fn layers(&self) -> Vec<(usize, &[BrickPlacement])> {
        let mut out = Vec::new();
        let mut start = 0;
        while start < self.placements.len() {
            let layer = self.placements[start].layer();
            let end = start
                + self.placements[start..]
                    .iter()
                    .take_while(|p| p.layer() == layer)
                    .count();
            out.push((layer, &self.placements[start..end]));
            start = end;
        }
        out
    }

    /// Occupancy covered by the bricks.
    pub fn rasterize(&self) -> VoxelGrid {
        let mut g = VoxelGrid::new(self.dims);
        for p in &self.placements {
            for (x, y, z) in p.cells() {
                g.set_filled(x, y, z, true);
            }
        }
        g
    }

    /// Occupancy plus palette colors; unknown codes read as black.
    pub fn rasterize_colored(&self, palette: &Palette) -> VoxelGrid {
        let mut g = VoxelGrid::new_colored(self.dims);
        for p in &self.placements {
            let rgb = palette.get(p.color_code).map_or([0.0; 3], |e| e.rgb);
            for (x, y, z) in p.cells() {
                g.set_color(x, y, z, rgb);
            }
        }
        g
    }

    /// `BRICKS 1` dump: a `dims` line, then `x y z w d orient part_id color_code`
    /// per placement.
    pub fn to_bricks_text(&self) -> String {
        let mut out = String::from("BRICKS 1\n");
        let _ = writeln!(
            out,
            "dims {} {} {}",
            self.dims.nx, self.dims.ny, self.dims.nz
        );
        for p in &self.placements {
            let [x, y, z] = p.origin;
            let _ = writeln!(
                out,
                "{x} {y} {z} {} {} {} {} {}",
                p.size_x,
                p.size_z,
                p.orientation.degrees(),
                p.part_id,
                p.color_code
            );
        }
        out
    }

    pub fn parse_bricks_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        match lines.next() {
            Some((_, "BRICKS 1")) => {}
            Some((n, l)) => {
                return Err(Error::parse(n, format!("expected `BRICKS 1`, found `{l}`")))
            }
            None => return Err(Error::parse(1, "empty input, expected `BRICKS 1`")),
        }
        let (n, l) = lines
            .next()
            .ok_or_else(|| Error::parse(2, "missing `dims` line"))?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 4 || toks[0] != "dims" {
            return Err(Error::parse(n, "expected `dims nx ny nz`"));
        }
        let num = |n: usize, t: &str| -> Result<usize> {
            t.parse()
                .map_err(|_| Error::parse(n, format!("invalid number `{t}`")))
        };
        let dims = Dims::new(num(n, toks[1])?, num(n, toks[2])?, num(n, toks[3])?)
            .map_err(|e| Error::parse(n, e.to_string()))?;
        let mut placements = Vec::new();
        let mut last = n;
        for (n, l) in lines {
            last = n;
            let t: Vec<&str> = l.split_whitespace().collect();
            if t.len() != 8 {
                return Err(Error::parse(
                    n,
                    format!("expected 8 fields, found {}", t.len()),
                ));
            }
            let orientation = t[5]
                .parse::<u32>()
                .ok()
                .and_then(Orientation::from_degrees)
                .ok_or_else(|| Error::parse(n, format!("orientation `{}` is not 0 or 90", t[5])))?;
            placements.push(BrickPlacement {
                origin: [num(n, t[0])?, num(n, t[1])?, num(n, t[2])?],
                size_x: num(n, t[3])?,
                size_z: num(n, t[4])?,
                orientation,
                part_id: t[6].to_owned(),
                color_code: t[7]
                    .parse()
                    .map_err(|_| Error::parse(n, format!("invalid color code `{}`", t[7])))?,
            });
        }
        BrickModel::new(dims, placements).map_err(|e| Error::parse(last, e.to_string()))
    }
}
