use super::PointCloud;
use crate::error::{Error, Result};
use crate::grid::{Dims, VoxelGrid};

/// Fraction of the unit cube left empty on each side after normalization.
pub const MARGIN: f64 = 0.02;

/// Rasterizes a point cloud into a `resolution^3` grid.
///
/// The cloud is translated and uniformly scaled so that its bounding box is
/// centered in the unit cube and its longest side spans `1 - 2 * MARGIN`.
/// Cells are half-open; a point on a cell's upper face belongs to the next
/// cell, except at the top of the grid, which clamps into the last cell.
pub fn voxelize(cloud: &PointCloud, resolution: usize) -> Result<VoxelGrid> {
    if resolution == 0 {
        return Err(Error::Input("resolution must be at least 1".into()));
    }
    if cloud.is_empty() {
        return Err(Error::Input("cannot voxelize an empty point cloud".into()));
    }
    if cloud.points().iter().flatten().any(|c| !c.is_finite()) {
        return Err(Error::Input(
            "point cloud has non-finite coordinates".into(),
        ));
    }
    let dims = Dims::cube(resolution)?;

    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in cloud.points() {
        for a in 0..3 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    let center = [0, 1, 2].map(|a| lo[a] / 2.0 + hi[a] / 2.0);
    let extent = (0..3).map(|a| hi[a] - lo[a]).fold(0.0, f64::max);
    let scale = if extent > 0.0 && extent.is_finite() {
        (1.0 - 2.0 * MARGIN) / extent
    } else {
        0.0
    };

    let res = resolution as f64;
    let cell_of = |v: f64, c: f64| -> usize {
        let t = ((v - c) * scale + 0.5) * res;
        (t.floor().max(0.0) as usize).min(resolution - 1)
    };

    let colors = cloud.colors();
    let mut sums = colors.map(|_| vec![[0.0f64; 4]; dims.cell_count()]);
    let mut occupancy = vec![false; dims.cell_count()];
    for (k, p) in cloud.points().iter().enumerate() {
        let i = dims.index(
            cell_of(p[0], center[0]),
            cell_of(p[1], center[1]),
            cell_of(p[2], center[2]),
        );
        occupancy[i] = true;
        if let (Some(sums), Some(colors)) = (sums.as_mut(), colors) {
            let c = colors[k];
            let s = &mut sums[i];
            s[0] += c[0];
            s[1] += c[1];
            s[2] += c[2];
            s[3] += 1.0;
        }
    }

    let mut grid = VoxelGrid::from_occupancy(dims, occupancy)?;
    if let Some(sums) = sums {
        for (i, s) in sums.iter().enumerate() {
            if s[3] > 0.0 {
                grid.set_color_index(i, [s[0] / s[3], s[1] / s[3], s[2] / s[3]]);
            }
        }
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_lands_in_center() {
        let g = voxelize(&PointCloud::new(vec![[3.0, -7.0, 1e6]]), 32).unwrap();
        assert_eq!(g.filled_count(), 1);
        assert!(g.is_filled(16, 16, 16));
    }

    #[test]
    fn resolution_one() {
        let pts = vec![[0.0, 0.0, 0.0], [5.0, 1.0, -2.0], [1.0, 1.0, 1.0]];
        let g = voxelize(&PointCloud::new(pts), 1).unwrap();
        assert_eq!(g.filled_count(), 1);
    }

    #[test]
    fn empty_cloud_rejected() {
        assert!(matches!(
            voxelize(&PointCloud::new(vec![]), 8),
            Err(Error::Input(_))
        ));
        assert!(voxelize(&PointCloud::new(vec![[0.0; 3]]), 0).is_err());
    }

    #[test]
    fn colors_are_averaged() {
        let cloud = PointCloud::with_colors(
            vec![[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [1.0, 1.0, 1.0]],
            vec![[1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]],
        )
        .unwrap();
        let g = voxelize(&cloud, 2).unwrap();
        assert_eq!(g.color(0, 0, 0), Some([0.5, 0.0, 0.5]));
        assert_eq!(g.color(1, 1, 1), Some([0.0, 1.0, 0.0]));
        assert_eq!(g.filled_count(), 2);
    }

    #[test]
    fn elongated_cloud_keeps_aspect() {
        // 4 units long in x, 1 in y: y spans only a quarter of the cube.
        let pts = vec![[0.0, 0.0, 0.0], [4.0, 1.0, 0.0]];
        let g = voxelize(&PointCloud::new(pts), 8).unwrap();
        assert!(g.is_filled(0, 3, 4));
        assert!(g.is_filled(7, 4, 4));
    }
}
