//! Voxel-to-brick conversion: interior filling, per-layer greedy brick
//! merging, connectivity analysis and parts lists.

mod analysis;
mod catalog;
mod fill;
mod merge;
mod model;

pub use analysis::{analyze_connectivity, bill_of_materials, BomLine, ConnectivityReport};
pub use catalog::{BrickCatalog, Footprint};
pub use fill::{count_cavity_cells, exterior_mask, fill_interior};
pub use merge::{cell_color_codes, merge_bricks, MergeOptions, DEFAULT_COLOR_CODE};
pub use model::{BrickModel, BrickPlacement, Orientation};
