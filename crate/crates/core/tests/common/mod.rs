#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use voxbrick_core::pyramid::{LogitGrid, LogitPyramid};
use voxbrick_core::{Dims, Rgb, VoxelGrid};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_grid(rng: &mut ChaCha8Rng, dims: Dims, density: f64) -> VoxelGrid {
    let occ = (0..dims.cell_count())
        .map(|_| rng.random_bool(density))
        .collect();
    VoxelGrid::from_occupancy(dims, occ).unwrap()
}

/// Filled cells take one of `n_colors` random base colors plus a little noise.
pub fn random_colored_grid(
    rng: &mut ChaCha8Rng,
    dims: Dims,
    density: f64,
    n_colors: usize,
) -> VoxelGrid {
    let bases: Vec<Rgb> = (0..n_colors)
        .map(|_| [rng.random(), rng.random(), rng.random()])
        .collect();
    let mut g = VoxelGrid::new_colored(dims);
    for i in 0..dims.cell_count() {
        if rng.random_bool(density) {
            let b = bases[rng.random_range(0..n_colors)];
            let c = b.map(|v: f64| (v + rng.random_range(-0.03..0.03)).clamp(0.0, 1.0));
            g.set_color_index(i, c);
        }
    }
    g
}

/// Blocky random grid: runs of same-colored cells so larger bricks appear.
pub fn random_blocky_grid(rng: &mut ChaCha8Rng, dims: Dims, palette: &[Rgb]) -> VoxelGrid {
    let mut g = VoxelGrid::new_colored(dims);
    for _ in 0..(dims.cell_count() / 6).max(1) {
        let (w, h, d) = (
            rng.random_range(1..=4),
            rng.random_range(1..=2),
            rng.random_range(1..=4),
        );
        let x0 = rng.random_range(0..dims.nx);
        let y0 = rng.random_range(0..dims.ny);
        let z0 = rng.random_range(0..dims.nz);
        let c = palette[rng.random_range(0..palette.len())];
        for z in z0..(z0 + d).min(dims.nz) {
            for y in y0..(y0 + h).min(dims.ny) {
                for x in x0..(x0 + w).min(dims.nx) {
                    g.set_color(x, y, z, c);
                }
            }
        }
    }
    g
}

pub fn iou_oracle(a: &VoxelGrid, b: &VoxelGrid) -> f64 {
    let d = a.dims();
    let (mut inter, mut union) = (0u64, 0u64);
    for z in 0..d.nz {
        for y in 0..d.ny {
            for x in 0..d.nx {
                let (p, q) = (a.is_filled(x, y, z), b.is_filled(x, y, z));
                inter += (p && q) as u64;
                union += (p || q) as u64;
            }
        }
    }
    if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    }
}

/// Coarse cell is filled when any of its eight children is.
pub fn or_pool_oracle(g: &VoxelGrid) -> VoxelGrid {
    let d = g.dims();
    let c = Dims::new(d.nx / 2, d.ny / 2, d.nz / 2).unwrap();
    let mut out = VoxelGrid::new(c);
    for z in 0..c.nz {
        for y in 0..c.ny {
            for x in 0..c.nx {
                let mut any = false;
                for k in 0..8 {
                    any |= g.is_filled(2 * x + (k & 1), 2 * y + ((k >> 1) & 1), 2 * z + (k >> 2));
                }
                out.set_filled(x, y, z, any);
            }
        }
    }
    out
}

/// Target grids for a pyramid of `n` levels, coarsest first.
pub fn target_ladder_oracle(target: &VoxelGrid, n: usize) -> Vec<VoxelGrid> {
    let mut out = vec![target.without_colors()];
    while out.len() < n {
        let next = or_pool_oracle(out.last().unwrap());
        out.push(next);
    }
    out.reverse();
    out
}

fn sigmoid_clamped(x: f64) -> f64 {
    let s = 1.0 / (1.0 + (-x).exp());
    s.clamp(1e-12, 1.0 - 1e-12)
}

/// Summed per-cell binary cross-entropy over all levels, plain loops.
pub fn bce_oracle(logits: &LogitPyramid, target: &VoxelGrid) -> Vec<f64> {
    let targets = target_ladder_oracle(target, logits.len());
    let mut per_level = Vec::new();
    for (l, t) in logits.levels().iter().zip(&targets) {
        let d = l.dims();
        let mut sum = 0.0;
        for z in 0..d.nz {
            for y in 0..d.ny {
                for x in 0..d.nx {
                    let p = sigmoid_clamped(l.values()[d.index(x, y, z)]);
                    sum -= if t.is_filled(x, y, z) {
                        p.ln()
                    } else {
                        (1.0 - p).ln()
                    };
                }
            }
        }
        per_level.push(sum);
    }
    per_level
}

pub fn random_logits(rng: &mut ChaCha8Rng, top_side: usize, levels: usize) -> LogitPyramid {
    let mut grids = Vec::new();
    for l in 0..levels {
        let side = top_side >> (levels - 1 - l);
        let d = Dims::cube(side).unwrap();
        let vals = (0..d.cell_count())
            .map(|_| {
                if rng.random_bool(0.05) {
                    rng.random_range(-60.0..60.0)
                } else {
                    rng.random_range(-6.0..6.0)
                }
            })
            .collect();
        grids.push(LogitGrid::new(d, vals).unwrap());
    }
    LogitPyramid::new(grids).unwrap()
}

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
