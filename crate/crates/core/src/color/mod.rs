//! Color quantization: k-means over voxel colors followed by snapping each
//! centroid to the nearest brick color.
//!
//! Clustering runs in linear RGB with Euclidean distance over every filled
//! voxel, so frequent colors weigh more. Initialization is deterministic
//! farthest-point: the most frequent color first, then repeatedly the color
//! farthest from all chosen centroids.

mod palette;

pub use palette::{Palette, PaletteEntry};

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::grid::{Rgb, VoxelGrid};
use palette::dist2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizeConfig {
    pub k: usize,
    pub max_iters: usize,
    pub tol: f64,
    /// Kept for configuration symmetry; initialization does not consume randomness.
    pub seed: u64,
}

impl Default for QuantizeConfig {
    fn default() -> Self {
        QuantizeConfig {
            k: 4,
            max_iters: 100,
            tol: 1e-4,
            seed: 0,
        }
    }
}

impl QuantizeConfig {
    fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Input("k must be at least 1".into()));
        }
        if self.tol.is_nan() || self.tol < 0.0 {
            return Err(Error::Input(format!("tolerance {} must be >= 0", self.tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeans {
    pub centroids: Vec<Rgb>,
    /// Centroid index for each filled cell, in ascending linear-index order.
    pub assignment: Vec<usize>,
    /// Sum of squared distances from each filled cell to its centroid.
    pub inertia: f64,
    /// Inertia after every assignment step, starting with the initial one.
    pub inertia_history: Vec<f64>,
}

fn lex_cmp(a: &Rgb, b: &Rgb) -> Ordering {
    a[0].total_cmp(&b[0])
        .then(a[1].total_cmp(&b[1]))
        .then(a[2].total_cmp(&b[2]))
}

/// Index of the nearest centroid; ties go to the lowest index.
fn nearest(c: Rgb, centroids: &[Rgb]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, &m) in centroids.iter().enumerate() {
        let d = dist2(c, m);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

/// Distinct colors in lexicographic order with their frequencies.
fn histogram(colors: &[Rgb]) -> (Vec<Rgb>, Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..colors.len()).collect();
    order.sort_by(|&a, &b| lex_cmp(&colors[a], &colors[b]).then(a.cmp(&b)));
    let mut distinct: Vec<Rgb> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    let mut slot = vec![0; colors.len()];
    for i in order {
        let c = colors[i];
        if distinct
            .last()
            .is_none_or(|last| lex_cmp(last, &c) != Ordering::Equal)
        {
            distinct.push(c);
            weights.push(0.0);
        }
        *weights.last_mut().expect("pushed") += 1.0;
        slot[i] = distinct.len() - 1;
    }
    (distinct, weights, slot)
}

fn farthest_point_init(distinct: &[Rgb], weights: &[f64], k: usize) -> Vec<Rgb> {
    let mut first = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > weights[first] {
            first = i;
        }
    }
    let mut centroids = vec![distinct[first]];
    let mut min_d: Vec<f64> = distinct
        .iter()
        .map(|&c| dist2(c, distinct[first]))
        .collect();
    while centroids.len() < k {
        let mut pick = 0;
        for (i, &d) in min_d.iter().enumerate() {
            if d > min_d[pick] {
                pick = i;
            }
        }
        let chosen = distinct[pick];
        centroids.push(chosen);
        for (d, &c) in min_d.iter_mut().zip(distinct) {
            *d = d.min(dist2(c, chosen));
        }
    }
    centroids
}

/// Lloyd's algorithm over the colors of all filled cells.
///
/// `k` is reduced to the number of distinct colors when it exceeds it.
/// Iteration stops after `max_iters` updates or once no centroid moves by
/// `tol` or more. An empty cluster is moved onto the color farthest from its
/// current centroid.
pub fn kmeans_colors(grid: &VoxelGrid, cfg: &QuantizeConfig) -> Result<KMeans> {
    cfg.validate()?;
    if !grid.has_colors() {
        return Err(Error::Input("k-means needs a colored grid".into()));
    }
    let colors: Vec<Rgb> = grid
        .filled_indices()
        .map(|i| grid.color_index(i).expect("colored grid"))
        .collect();
    let (distinct, weights, slot) = histogram(&colors);
    let k = cfg.k.min(distinct.len());
    if k == 0 {
        return Ok(KMeans {
            centroids: Vec::new(),
            assignment: Vec::new(),
            inertia: 0.0,
            inertia_history: vec![0.0],
        });
    }

    let mut centroids = farthest_point_init(&distinct, &weights, k);
    let mut labels = vec![0usize; distinct.len()];
    let mut dists = vec![0.0f64; distinct.len()];
    let assign = |centroids: &[Rgb], labels: &mut [usize], dists: &mut [f64]| -> f64 {
        let mut inertia = 0.0;
        for (i, &c) in distinct.iter().enumerate() {
            let (j, d) = nearest(c, centroids);
            labels[i] = j;
            dists[i] = d;
            inertia += weights[i] * d;
        }
        inertia
    };

    let mut history = vec![assign(&centroids, &mut labels, &mut dists)];
    for _ in 0..cfg.max_iters {
        let mut sums = vec![[0.0f64; 3]; k];
        let mut mass = vec![0.0f64; k];
        let mut sole: Vec<Option<Option<usize>>> = vec![None; k];
        for (i, &c) in distinct.iter().enumerate() {
            let j = labels[i];
            for ch in 0..3 {
                sums[j][ch] += weights[i] * c[ch];
            }
            mass[j] += weights[i];
            sole[j] = match sole[j] {
                None => Some(Some(i)),
                Some(_) => Some(None),
            };
        }

        let mut next = centroids.clone();
        for j in 0..k {
            next[j] = match sole[j] {
                // One distinct color: use it exactly rather than w*c/w.
                Some(Some(i)) => distinct[i],
                Some(None) => [0, 1, 2].map(|ch| sums[j][ch] / mass[j]),
                None => {
                    let mut far = 0;
                    for (i, &d) in dists.iter().enumerate() {
                        if d > dists[far] {
                            far = i;
                        }
                    }
                    dists[far] = 0.0;
                    distinct[far]
                }
            };
        }
        let moved = centroids
            .iter()
            .zip(&next)
            .map(|(&a, &b)| dist2(a, b).sqrt())
            .fold(0.0, f64::max);
        centroids = next;
        history.push(assign(&centroids, &mut labels, &mut dists));
        if moved < cfg.tol {
            break;
        }
    }

    Ok(KMeans {
        centroids,
        assignment: slot.iter().map(|&s| labels[s]).collect(),
        inertia: *history.last().expect("nonempty"),
        inertia_history: history,
    })
}

/// Maps each centroid to the code of its nearest palette color.
pub fn snap_to_palette(centroids: &[Rgb], palette: &Palette) -> Result<Vec<u32>> {
    if palette.is_empty() {
        return Err(Error::Input("palette is empty".into()));
    }
    if centroids.is_empty() {
        return Err(Error::Input("no centroids to snap".into()));
    }
    Ok(centroids
        .iter()
        .map(|&c| palette.nearest(c).expect("nonempty palette").code)
        .collect())
}

/// Replaces every filled cell's color with the palette color of its
/// cluster. Occupancy is unchanged.
pub fn quantize_grid(
    grid: &VoxelGrid,
    cfg: &QuantizeConfig,
    palette: &Palette,
) -> Result<VoxelGrid> {
    if palette.is_empty() {
        return Err(Error::Input("palette is empty".into()));
    }
    let km = kmeans_colors(grid, cfg)?;
    let mut out = grid.clone();
    if km.centroids.is_empty() {
        return Ok(out);
    }
    let codes = snap_to_palette(&km.centroids, palette)?;
    let rgbs: Vec<Rgb> = codes
        .iter()
        .map(|&c| palette.get(c).expect("snapped code exists").rgb)
        .collect();
    let filled: Vec<usize> = grid.filled_indices().collect();
    for (&cell, &label) in filled.iter().zip(&km.assignment) {
        out.set_color_index(cell, rgbs[label]);
    }
    Ok(out)
}
