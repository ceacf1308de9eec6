use std::cmp::Reverse;

use super::catalog::BrickCatalog;
use super::model::{BrickModel, BrickPlacement, Orientation};
use crate::color::Palette;
use crate::grid::VoxelGrid;

/// LDraw code used for every brick of an uncolored grid (Light_Grey).
pub const DEFAULT_COLOR_CODE: u32 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MergeOptions {
    /// Alternate the preferred long axis between layers (x on even, z on odd).
    pub interlock: bool,
}

impl Default for MergeOptions {
    fn default() -> Self {
        MergeOptions { interlock: true }
    }
}

/// LDraw color code of every cell: `None` when empty, the default code for
/// uncolored grids, otherwise the nearest palette entry.
pub fn cell_color_codes(grid: &VoxelGrid, palette: &Palette) -> Vec<Option<u32>> {
    (0..grid.dims().cell_count())
        .map(|i| {
            if !grid.is_filled_index(i) {
                return None;
            }
            Some(match grid.color_index(i) {
                Some(rgb) => palette.nearest(rgb).map_or(DEFAULT_COLOR_CODE, |e| e.code),
                None => DEFAULT_COLOR_CODE,
            })
        })
        .collect()
}

#[derive(Debug, Clone)]
struct Candidate<'a> {
    size_x: usize,
    size_z: usize,
    orientation: Orientation,
    part_id: &'a str,
}

fn candidates(catalog: &BrickCatalog, layer: usize, opts: MergeOptions) -> Vec<Candidate<'_>> {
    let mut out = Vec::new();
    for f in catalog.footprints() {
        let orientations: &[Orientation] = if f.width == f.depth {
            &[Orientation::Deg0]
        } else {
            &[Orientation::Deg0, Orientation::Deg90]
        };
        for &o in orientations {
            let (size_x, size_z) = o.extents(f.width, f.depth);
            out.push(Candidate {
                size_x,
                size_z,
                orientation: o,
                part_id: &f.part_id,
            });
        }
    }
    if opts.interlock {
        let along_x = layer.is_multiple_of(2);
        out.sort_by_key(|c| {
            let preferred = if along_x {
                c.size_x >= c.size_z
            } else {
                c.size_z >= c.size_x
            };
            (
                Reverse(c.size_x * c.size_z),
                !preferred,
                c.part_id,
                c.orientation,
            )
        });
    } else {
        out.sort_by_key(|c| (Reverse(c.size_x * c.size_z), c.part_id, c.orientation));
    }
    out
}

/// Covers the filled cells with catalog bricks, one horizontal layer at a time.
///
/// Each layer is scanned z-major then x. At every filled cell not yet covered
/// the first candidate that fits is placed with its min corner on that cell.
/// Candidates are ordered by footprint area (largest first), then by the
/// interlock preference, then by part id. A candidate fits when all of its
/// cells are inside the grid, filled, uncovered, and share one color code.
/// The 1x1 brick always fits, so the result covers the grid exactly.
pub fn merge_bricks(
    grid: &VoxelGrid,
    catalog: &BrickCatalog,
    palette: &Palette,
    opts: MergeOptions,
) -> BrickModel {
    let d = grid.dims();
    let codes = cell_color_codes(grid, palette);
    let mut covered = vec![false; d.cell_count()];
    let mut placements = Vec::new();

    let per_parity = [candidates(catalog, 0, opts), candidates(catalog, 1, opts)];

    for y in 0..d.ny {
        let cands = &per_parity[y % 2];
        for z in 0..d.nz {
            for x in 0..d.nx {
                let start = d.index(x, y, z);
                let Some(code) = codes[start] else { continue };
                if covered[start] {
                    continue;
                }
                let fits = |c: &Candidate| -> bool {
                    if x + c.size_x > d.nx || z + c.size_z > d.nz {
                        return false;
                    }
                    (z..z + c.size_z).all(|cz| {
                        (x..x + c.size_x).all(|cx| {
                            let i = d.index(cx, y, cz);
                            !covered[i] && codes[i] == Some(code)
                        })
                    })
                };
                let chosen = cands
                    .iter()
                    .find(|c| fits(c))
                    .expect("catalog holds a 1x1 brick, which always fits");
                for cz in z..z + chosen.size_z {
                    for cx in x..x + chosen.size_x {
                        covered[d.index(cx, y, cz)] = true;
                    }
                }
                placements.push(BrickPlacement {
                    origin: [x, y, z],
                    size_x: chosen.size_x,
                    size_z: chosen.size_z,
                    orientation: chosen.orientation,
                    part_id: chosen.part_id.to_owned(),
                    color_code: code,
                });
            }
        }
    }
    BrickModel::new_unchecked(d, placements)
}
