//! Octree resolution pyramids built by 2x2x2 OR-pooling.

use crate::error::{Error, Result};
use crate::grid::{Dims, VoxelGrid};

/// Halves every axis. A coarse cell is filled iff any of its eight children is
/// filled; its color is the channel-wise mean over the filled children.
pub fn downsample(grid: &VoxelGrid) -> Result<VoxelGrid> {
    let d = grid.dims();
    if [d.nx, d.ny, d.nz].iter().any(|n| !n.is_multiple_of(2)) {
        return Err(Error::Dimension(format!(
            "downsample needs even dims, got {d}"
        )));
    }
    let out_dims = Dims::new(d.nx / 2, d.ny / 2, d.nz / 2)?;
    let mut out = if grid.has_colors() {
        VoxelGrid::new_colored(out_dims)
    } else {
        VoxelGrid::new(out_dims)
    };

    for z in 0..out_dims.nz {
        for y in 0..out_dims.ny {
            for x in 0..out_dims.nx {
                let mut any = false;
                let mut sum = [0.0f64; 3];
                let mut n = 0u32;
                for dz in 0..2 {
                    for dy in 0..2 {
                        for dx in 0..2 {
                            let i = d.index(2 * x + dx, 2 * y + dy, 2 * z + dz);
                            if grid.is_filled_index(i) {
                                any = true;
                                if let Some(c) = grid.color_index(i) {
                                    for ch in 0..3 {
                                        sum[ch] += c[ch];
                                    }
                                    n += 1;
                                }
                            }
                        }
                    }
                }
                if !any {
                    continue;
                }
                if n > 0 {
                    let n = f64::from(n);
                    out.set_color(x, y, z, [sum[0] / n, sum[1] / n, sum[2] / n]);
                } else {
                    out.set_filled(x, y, z, true);
                }
            }
        }
    }
    Ok(out)
}

/// Nearest-neighbour upsampling: every cell is copied to its eight children.
pub fn upsample_nearest(grid: &VoxelGrid) -> Result<VoxelGrid> {
    let d = grid.dims();
    let out_dims = Dims::new(d.nx * 2, d.ny * 2, d.nz * 2)?;
    let mut out = if grid.has_colors() {
        VoxelGrid::new_colored(out_dims)
    } else {
        VoxelGrid::new(out_dims)
    };
    for i in grid.filled_indices() {
        let (x, y, z) = d.coords(i);
        let color = grid.color_index(i);
        for dz in 0..2 {
            for dy in 0..2 {
                for dx in 0..2 {
                    let (cx, cy, cz) = (2 * x + dx, 2 * y + dy, 2 * z + dz);
                    match color {
                        Some(c) => out.set_color(cx, cy, cz, c),
                        None => out.set_filled(cx, cy, cz, true),
                    }
                }
            }
        }
    }
    Ok(out)
}

/// The same object at successively doubled resolutions, coarsest first.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolutionPyramid {
    levels: Vec<VoxelGrid>,
}

impl ResolutionPyramid {
    pub fn levels(&self) -> &[VoxelGrid] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// The finest (input) level.
    pub fn top(&self) -> &VoxelGrid {
        self.levels.last().expect("pyramid has at least one level")
    }

    pub fn into_levels(self) -> Vec<VoxelGrid> {
        self.levels
    }
}

/// Checks that `dims` is a cube with power-of-two side at least `2^(levels-1)`.
pub fn check_ladder(dims: Dims, num_levels: usize) -> Result<()> {
    if num_levels == 0 {
        return Err(Error::Dimension("pyramid needs at least one level".into()));
    }
    if !dims.is_cubic() {
        return Err(Error::Dimension(format!(
            "pyramid needs a cubic grid, got {dims}"
        )));
    }
    let side = dims.nx;
    if !side.is_power_of_two() {
        return Err(Error::Dimension(format!(
            "pyramid needs a power-of-two side, got {side}"
        )));
    }
    let needed = 1usize
        .checked_shl((num_levels - 1) as u32)
        .filter(|&n| n != 0 && num_levels <= usize::BITS as usize)
        .ok_or_else(|| Error::Dimension(format!("{num_levels} levels is too many")))?;
    if side < needed {
        return Err(Error::Dimension(format!(
            "side {side} is too small for {num_levels} levels (needs >= {needed})"
        )));
    }
    Ok(())
}

/// Builds `[downsample^(n-1)(grid), ..., downsample(grid), grid]`.
pub fn build_pyramid(grid: &VoxelGrid, num_levels: usize) -> Result<ResolutionPyramid> {
    check_ladder(grid.dims(), num_levels)?;
    let mut levels = Vec::with_capacity(num_levels);
    levels.push(grid.clone());
    for _ in 1..num_levels {
        let next = downsample(levels.last().expect("nonempty"))?;
        levels.push(next);
    }
    levels.reverse();
    Ok(ResolutionPyramid { levels })
}

/// Real-valued scores over a grid, in linear-index order.
#[derive(Debug, Clone, PartialEq)]
pub struct LogitGrid {
    dims: Dims,
    values: Vec<f64>,
}

impl LogitGrid {
    pub fn new(dims: Dims, values: Vec<f64>) -> Result<Self> {
        if values.len() != dims.cell_count() {
            return Err(Error::Input(format!(
                "logit grid {dims} needs {} values, got {}",
                dims.cell_count(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Input(format!("logit at index {i} is not finite")));
        }
        Ok(LogitGrid { dims, values })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Cells with positive score (sigmoid above one half) are filled.
    pub fn to_occupancy(&self) -> VoxelGrid {
        let occ = self.values.iter().map(|&v| v > 0.0).collect();
        VoxelGrid::from_occupancy(self.dims, occ).expect("dims match values")
    }
}

/// Pre-activation occupancy scores on a doubling ladder of cubic grids, coarsest first.
#[derive(Debug, Clone, PartialEq)]
pub struct LogitPyramid {
    levels: Vec<LogitGrid>,
}

impl LogitPyramid {
    pub fn new(levels: Vec<LogitGrid>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Input(
                "logit pyramid needs at least one level".into(),
            ));
        }
        for (r, level) in levels.iter().enumerate() {
            if !level.dims.is_cubic() {
                return Err(Error::Input(format!(
                    "logit level {r} is not cubic: {}",
                    level.dims
                )));
            }
            if r > 0 && level.dims.nx != levels[r - 1].dims.nx * 2 {
                return Err(Error::Input(format!(
                    "logit level {r} has side {}, expected {}",
                    level.dims.nx,
                    levels[r - 1].dims.nx * 2
                )));
            }
        }
        Ok(LogitPyramid { levels })
    }

    pub fn levels(&self) -> &[LogitGrid] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn top(&self) -> &LogitGrid {
        self.levels.last().expect("nonempty")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_grid(side: usize, density: f64, seed: u64) -> VoxelGrid {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = Dims::cube(side).unwrap();
        let occ = (0..d.cell_count())
            .map(|_| rng.random_bool(density))
            .collect();
        VoxelGrid::from_occupancy(d, occ).unwrap()
    }

    // Independent route: scatter every fine cell into its parent.
    fn or_pool_oracle(grid: &VoxelGrid) -> Vec<bool> {
        let d = grid.dims();
        let (px, py, pz) = (d.nx / 2, d.ny / 2, d.nz / 2);
        let mut out = vec![false; px * py * pz];
        for z in 0..d.nz {
            for y in 0..d.ny {
                for x in 0..d.nx {
                    if grid.is_filled(x, y, z) {
                        out[x / 2 + px * (y / 2 + py * (z / 2))] = true;
                    }
                }
            }
        }
        out
    }

    #[test]
    fn single_child_fills_parent() {
        let mut g = VoxelGrid::new(Dims::cube(2).unwrap());
        g.set_filled(1, 0, 1, true);
        let d = downsample(&g).unwrap();
        assert_eq!(d.dims(), Dims::cube(1).unwrap());
        assert!(d.is_filled(0, 0, 0));
    }

    #[test]
    fn empty_block_stays_empty() {
        let g = VoxelGrid::new(Dims::cube(2).unwrap());
        assert!(downsample(&g).unwrap().is_empty());
    }

    #[test]
    fn odd_dims_rejected() {
        let g = VoxelGrid::new(Dims::new(2, 3, 2).unwrap());
        assert!(matches!(downsample(&g), Err(Error::Dimension(_))));
    }

    #[test]
    fn matches_block_scan_oracle() {
        for seed in 0..20 {
            let g = random_grid(8, 0.1, seed);
            let d = downsample(&g).unwrap();
            assert_eq!(d.occupancy(), or_pool_oracle(&g).as_slice());
        }
    }

    #[test]
    fn mean_color_of_filled_children() {
        let mut g = VoxelGrid::new(Dims::cube(2).unwrap());
        g.set_color(0, 0, 0, [1.0, 0.0, 0.0]);
        g.set_color(1, 1, 1, [0.0, 0.0, 1.0]);
        let d = downsample(&g).unwrap();
        assert_eq!(d.color(0, 0, 0), Some([0.5, 0.0, 0.5]));
    }

    #[test]
    fn ladder_32_with_four_levels() {
        let g = random_grid(32, 0.05, 7);
        let p = build_pyramid(&g, 4).unwrap();
        let sides: Vec<_> = p.levels().iter().map(|l| l.dims().nx).collect();
        assert_eq!(sides, vec![4, 8, 16, 32]);
        assert_eq!(p.top(), &g);
    }

    #[test]
    fn one_level_is_identity() {
        let g = random_grid(4, 0.3, 1);
        let p = build_pyramid(&g, 1).unwrap();
        assert_eq!(p.levels(), &[g]);
    }

    #[test]
    fn single_voxel_ancestors() {
        let mut g = VoxelGrid::new(Dims::cube(8).unwrap());
        g.set_filled(5, 2, 7, true);
        let p = build_pyramid(&g, 3).unwrap();
        let expect = [(1, 0, 1), (2, 1, 3), (5, 2, 7)];
        for (level, &(x, y, z)) in p.levels().iter().zip(&expect) {
            assert_eq!(level.filled_count(), 1);
            assert!(level.is_filled(x, y, z));
        }
    }

    #[test]
    fn bad_ladders_rejected() {
        let g = VoxelGrid::new(Dims::new(8, 8, 4).unwrap());
        assert!(build_pyramid(&g, 2).is_err());
        let g = VoxelGrid::new(Dims::cube(6).unwrap());
        assert!(build_pyramid(&g, 2).is_err());
        let g = VoxelGrid::new(Dims::cube(4).unwrap());
        assert!(build_pyramid(&g, 4).is_err());
        assert!(build_pyramid(&g, 3).is_ok());
        assert!(build_pyramid(&g, 0).is_err());
        assert!(build_pyramid(&g, 200).is_err());
    }

    #[test]
    fn logit_ladder_validated() {
        let l1 = LogitGrid::new(Dims::cube(1).unwrap(), vec![0.0]).unwrap();
        let l4 = LogitGrid::new(Dims::cube(4).unwrap(), vec![0.0; 64]).unwrap();
        assert!(LogitPyramid::new(vec![l1, l4]).is_err());
        assert!(LogitGrid::new(Dims::cube(1).unwrap(), vec![f64::NAN]).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn upsample_then_downsample_is_identity(
                cells in proptest::collection::vec(any::<bool>(), 2 * 3 * 4)
            ) {
                let g = VoxelGrid::from_occupancy(Dims::new(2, 3, 4).unwrap(), cells).unwrap();
                let back = downsample(&upsample_nearest(&g).unwrap()).unwrap();
                prop_assert_eq!(back, g);
            }

            #[test]
            fn ancestors_of_filled_cells_are_filled(
                cells in proptest::collection::vec(prop::bool::weighted(0.05), 512)
            ) {
                let g = VoxelGrid::from_occupancy(Dims::cube(8).unwrap(), cells).unwrap();
                let p = build_pyramid(&g, 4).unwrap();
                for i in g.filled_indices() {
                    let (x, y, z) = g.dims().coords(i);
                    for (depth, level) in p.levels().iter().rev().enumerate() {
                        prop_assert!(level.is_filled(x >> depth, y >> depth, z >> depth));
                    }
                }
            }
        }
    }
}
