//! Dense voxel occupancy grids with optional per-cell color.
//!
//! Cells are addressed `(x, y, z)` with `y` the vertical (layer) axis. The
//! linear index of a cell is `x + nx * (y + ny * z)`.

use crate::error::{Error, Result};

/// Linear RGB triple, each channel in `[0, 1]`.
pub type Rgb = [f64; 3];

/// Upper bound on cell count accepted from external input.
pub const MAX_CELLS: usize = 1 << 28;

/// Voxels per axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
}

impl Dims {
    pub fn new(nx: usize, ny: usize, nz: usize) -> Result<Self> {
        if nx == 0 || ny == 0 || nz == 0 {
            return Err(Error::Dimension(format!(
                "dims must be positive, got {nx}x{ny}x{nz}"
            )));
        }
        match nx.checked_mul(ny).and_then(|v| v.checked_mul(nz)) {
            Some(c) if c <= MAX_CELLS => Ok(Dims { nx, ny, nz }),
            _ => Err(Error::Dimension(format!(
                "grid {nx}x{ny}x{nz} is too large"
            ))),
        }
    }

    pub fn cube(side: usize) -> Result<Self> {
        Dims::new(side, side, side)
    }

    pub fn cell_count(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn is_cubic(&self) -> bool {
        self.nx == self.ny && self.ny == self.nz
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        debug_assert!(x < self.nx && y < self.ny && z < self.nz);
        x + self.nx * (y + self.ny * z)
    }

    #[inline]
    pub fn coords(&self, index: usize) -> (usize, usize, usize) {
        let x = index % self.nx;
        let rest = index / self.nx;
        (x, rest % self.ny, rest / self.ny)
    }

    pub fn contains(&self, x: i64, y: i64, z: i64) -> bool {
        x >= 0
            && y >= 0
            && z >= 0
            && (x as usize) < self.nx
            && (y as usize) < self.ny
            && (z as usize) < self.nz
    }
}

impl std::fmt::Display for Dims {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}x{}", self.nx, self.ny, self.nz)
    }
}

/// Occupancy grid. Colors, when present, are only meaningful on filled cells;
/// empty cells always read back as uncolored.
#[derive(Debug, Clone, PartialEq)]
pub struct VoxelGrid {
    dims: Dims,
    occupancy: Vec<bool>,
    colors: Option<Vec<Rgb>>,
}

impl VoxelGrid {
    /// Empty, uncolored grid.
    pub fn new(dims: Dims) -> Self {
        VoxelGrid {
            dims,
            occupancy: vec![false; dims.cell_count()],
            colors: None,
        }
    }

    /// Empty grid that carries colors.
    pub fn new_colored(dims: Dims) -> Self {
        VoxelGrid {
            dims,
            occupancy: vec![false; dims.cell_count()],
            colors: Some(vec![[0.0; 3]; dims.cell_count()]),
        }
    }

    pub fn from_occupancy(dims: Dims, occupancy: Vec<bool>) -> Result<Self> {
        if occupancy.len() != dims.cell_count() {
            return Err(Error::Dimension(format!(
                "occupancy has {} cells, dims {dims} need {}",
                occupancy.len(),
                dims.cell_count()
            )));
        }
        Ok(VoxelGrid {
            dims,
            occupancy,
            colors: None,
        })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn has_colors(&self) -> bool {
        self.colors.is_some()
    }

    pub fn occupancy(&self) -> &[bool] {
        &self.occupancy
    }

    #[inline]
    pub fn is_filled_index(&self, index: usize) -> bool {
        self.occupancy[index]
    }

    #[inline]
    pub fn is_filled(&self, x: usize, y: usize, z: usize) -> bool {
        self.occupancy[self.dims.index(x, y, z)]
    }

    /// Color of a filled cell; `None` for empty cells or uncolored grids.
    #[inline]
    pub fn color_index(&self, index: usize) -> Option<Rgb> {
        match &self.colors {
            Some(c) if self.occupancy[index] => Some(c[index]),
            _ => None,
        }
    }

    pub fn color(&self, x: usize, y: usize, z: usize) -> Option<Rgb> {
        self.color_index(self.dims.index(x, y, z))
    }

    /// Sets occupancy. Clearing a cell also clears its color.
    pub fn set_filled(&mut self, x: usize, y: usize, z: usize, filled: bool) {
        let i = self.dims.index(x, y, z);
        self.set_filled_index(i, filled);
    }

    pub fn set_filled_index(&mut self, index: usize, filled: bool) {
        self.occupancy[index] = filled;
        if !filled {
            if let Some(c) = &mut self.colors {
                c[index] = [0.0; 3];
            }
        }
    }

    /// Fills the cell and assigns its color, turning the grid into a colored one
    /// if it was not already (other filled cells then read as black).
    pub fn set_color(&mut self, x: usize, y: usize, z: usize, rgb: Rgb) {
        let i = self.dims.index(x, y, z);
        self.set_color_index(i, rgb);
    }

    pub fn set_color_index(&mut self, index: usize, rgb: Rgb) {
        let n = self.dims.cell_count();
        let colors = self.colors.get_or_insert_with(|| vec![[0.0; 3]; n]);
        colors[index] = rgb;
        self.occupancy[index] = true;
    }

    /// Drops all color information.
    pub fn without_colors(&self) -> VoxelGrid {
        VoxelGrid {
            dims: self.dims,
            occupancy: self.occupancy.clone(),
            colors: None,
        }
    }

    pub fn filled_count(&self) -> usize {
        self.occupancy.iter().filter(|&&f| f).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.occupancy.iter().any(|&f| f)
    }

    /// Linear indices of filled cells in ascending order.
    pub fn filled_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.occupancy
            .iter()
            .enumerate()
            .filter_map(|(i, &f)| f.then_some(i))
    }

    /// Per-layer filled-cell counts, bottom (y = 0) first.
    pub fn layer_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.dims.ny];
        for i in self.filled_indices() {
            counts[self.dims.coords(i).1] += 1;
        }
        counts
    }
}

/// Converts an 8-bit channel to the `[0, 1]` range.
pub fn channel_from_u8(v: u8) -> f64 {
    f64::from(v) / 255.0
}

/// Converts a `[0, 1]` channel to the nearest 8-bit value.
pub fn channel_to_u8(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}
