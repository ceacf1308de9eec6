//! Turns triangle meshes and voxel grids into buildable brick models.
//!
//! The flow is mesh → surface samples → voxel grid → resolution pyramid →
//! color quantization → interior fill → per-layer brick merging → LDraw.

pub mod color;
pub mod error;
pub mod grid;
pub mod interchange;
pub mod ldraw;
pub mod legolize;
mod lines;
pub mod mesh;
pub mod metrics;
pub mod pipeline;
pub mod pyramid;

pub use error::{Error, Result};
pub use grid::{Dims, Rgb, VoxelGrid};
pub use pyramid::{build_pyramid, LogitGrid, LogitPyramid, ResolutionPyramid};
