use std::collections::VecDeque;

use crate::grid::{Dims, VoxelGrid};

const NEIGHBORS: [(i64, i64, i64); 6] = [
    (-1, 0, 0),
    (1, 0, 0),
    (0, -1, 0),
    (0, 1, 0),
    (0, 0, -1),
    (0, 0, 1),
];

fn neighbors(d: Dims, i: usize) -> impl Iterator<Item = usize> {
    let (x, y, z) = d.coords(i);
    NEIGHBORS.iter().filter_map(move |&(dx, dy, dz)| {
        let (nx, ny, nz) = (x as i64 + dx, y as i64 + dy, z as i64 + dz);
        d.contains(nx, ny, nz)
            .then(|| d.index(nx as usize, ny as usize, nz as usize))
    })
}

/// Empty cells reachable by 6-connected moves from the grid boundary.
pub fn exterior_mask(grid: &VoxelGrid) -> Vec<bool> {
    let d = grid.dims();
    let mut outside = vec![false; d.cell_count()];
    let mut queue = VecDeque::new();
    for (i, out) in outside.iter_mut().enumerate() {
        let (x, y, z) = d.coords(i);
        let on_boundary =
            x == 0 || y == 0 || z == 0 || x + 1 == d.nx || y + 1 == d.ny || z + 1 == d.nz;
        if on_boundary && !grid.is_filled_index(i) {
            *out = true;
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        for n in neighbors(d, i) {
            if !outside[n] && !grid.is_filled_index(n) {
                outside[n] = true;
                queue.push_back(n);
            }
        }
    }
    outside
}

/// Number of empty cells enclosed by filled cells.
pub fn count_cavity_cells(grid: &VoxelGrid) -> usize {
    let outside = exterior_mask(grid);
    (0..grid.dims().cell_count())
        .filter(|&i| !grid.is_filled_index(i) && !outside[i])
        .count()
}

/// Fills every enclosed empty cell so the model is solid rather than a shell.
///
/// New cells of a colored grid take the color of the nearest original filled
/// cell, measured by breadth-first steps through the cavity; among equally
/// near cells the one with the lowest linear index wins.
pub fn fill_interior(grid: &VoxelGrid) -> VoxelGrid {
    let d = grid.dims();
    let outside = exterior_mask(grid);
    let cavity: Vec<bool> = (0..d.cell_count())
        .map(|i| !grid.is_filled_index(i) && !outside[i])
        .collect();
    let mut out = grid.clone();
    if !cavity.iter().any(|&c| c) {
        return out;
    }
    if !grid.has_colors() {
        for (i, &c) in cavity.iter().enumerate() {
            if c {
                out.set_filled_index(i, true);
            }
        }
        return out;
    }

    // Level-synchronous BFS carrying the lowest nearest-source index. A cell's
    // nearest sources are the union of those of its neighbors one step closer.
    let mut source = vec![usize::MAX; d.cell_count()];
    let mut frontier: Vec<usize> = grid.filled_indices().collect();
    for &i in &frontier {
        source[i] = i;
    }
    let mut depth = vec![u32::MAX; d.cell_count()];
    for &i in &frontier {
        depth[i] = 0;
    }
    let mut level = 0;
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &i in &frontier {
            for n in neighbors(d, i) {
                if !cavity[n] {
                    continue;
                }
                if depth[n] == u32::MAX {
                    depth[n] = level + 1;
                    source[n] = source[i];
                    next.push(n);
                } else if depth[n] == level + 1 && source[i] < source[n] {
                    source[n] = source[i];
                }
            }
        }
        frontier = next;
        level += 1;
    }

    for (i, &c) in cavity.iter().enumerate() {
        if c {
            let rgb = grid
                .color_index(source[i])
                .expect("source is a filled cell");
            out.set_color_index(i, rgb);
        }
    }
    out
}
