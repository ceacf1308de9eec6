//! Occupancy metrics: intersection-over-union and the multi-resolution
//! binary cross-entropy over a logit pyramid.

use crate::error::{Error, Result};
use crate::grid::VoxelGrid;
use crate::pyramid::{build_pyramid, LogitGrid, LogitPyramid};

/// Clamp applied to the sigmoid before taking logarithms.
pub const SIGMOID_EPS: f64 = 1e-12;

/// `|X ∩ Y| / |X ∪ Y|` over filled cells. Two empty grids score 1.0.
pub fn iou(pred: &VoxelGrid, target: &VoxelGrid) -> Result<f64> {
    if pred.dims() != target.dims() {
        return Err(Error::Dimension(format!(
            "iou of {} against {}",
            pred.dims(),
            target.dims()
        )));
    }
    let (mut inter, mut union) = (0usize, 0usize);
    for (&p, &t) in pred.occupancy().iter().zip(target.occupancy()) {
        inter += usize::from(p && t);
        union += usize::from(p || t);
    }
    if union == 0 {
        return Ok(1.0);
    }
    Ok(inter as f64 / union as f64)
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Cross-entropy of one level against a target of the same dims.
fn level_cross_entropy(logits: &LogitGrid, target: &VoxelGrid) -> f64 {
    let mut sum = NeumaierSum::default();
    for (&x, &y) in logits.values().iter().zip(target.occupancy()) {
        let s = sigmoid(x).clamp(SIGMOID_EPS, 1.0 - SIGMOID_EPS);
        let term = if y { s.ln() } else { (1.0 - s).ln() };
        sum.add(-term);
    }
    sum.value()
}

/// Per-level loss terms, coarsest first. The target pyramid is derived from
/// `target` by OR-pooling.
pub fn cross_entropy_per_level(logits: &LogitPyramid, target: &VoxelGrid) -> Result<Vec<f64>> {
    if logits.top().dims() != target.dims() {
        return Err(Error::Input(format!(
            "logit top level is {}, target is {}",
            logits.top().dims(),
            target.dims()
        )));
    }
    let targets = build_pyramid(target, logits.len())
        .map_err(|e| Error::Input(format!("target pyramid: {e}")))?;
    Ok(logits
        .levels()
        .iter()
        .zip(targets.levels())
        .map(|(l, t)| level_cross_entropy(l, t))
        .collect())
}

/// Unweighted sum over levels and cells of the binary cross-entropy between
/// the sigmoid of each logit and the target occupancy at that resolution.
pub fn multires_cross_entropy(logits: &LogitPyramid, target: &VoxelGrid) -> Result<f64> {
    let mut sum = NeumaierSum::default();
    for term in cross_entropy_per_level(logits, target)? {
        sum.add(term);
    }
    Ok(sum.value())
}

/// Compensated summation with a fixed order, so results are reproducible.
#[derive(Debug, Default, Clone, Copy)]
struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Dims;

    fn grid_with(side: usize, cells: &[(usize, usize, usize)]) -> VoxelGrid {
        let mut g = VoxelGrid::new(Dims::cube(side).unwrap());
        for &(x, y, z) in cells {
            g.set_filled(x, y, z, true);
        }
        g
    }

    #[test]
    fn iou_identical_and_disjoint() {
        let a = grid_with(4, &[(0, 0, 0), (1, 2, 3)]);
        let b = grid_with(4, &[(3, 3, 3)]);
        assert_eq!(iou(&a, &a).unwrap(), 1.0);
        assert_eq!(iou(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn iou_half_overlap() {
        let x = [(0, 0, 0), (1, 0, 0), (2, 0, 0), (3, 0, 0)];
        let mut y = x.to_vec();
        y.extend([(0, 1, 0), (1, 1, 0), (2, 1, 0), (3, 1, 0)]);
        assert_eq!(iou(&grid_with(4, &x), &grid_with(4, &y)).unwrap(), 0.5);
    }

    #[test]
    fn iou_empty_pair_is_one() {
        let e = grid_with(2, &[]);
        assert_eq!(iou(&e, &e).unwrap(), 1.0);
    }

    #[test]
    fn iou_dims_mismatch() {
        let a = grid_with(2, &[]);
        let b = grid_with(4, &[]);
        assert!(matches!(iou(&a, &b), Err(Error::Dimension(_))));
    }

    #[test]
    fn saturated_logit_is_nearly_free() {
        let l = LogitGrid::new(Dims::cube(1).unwrap(), vec![30.0]).unwrap();
        let p = LogitPyramid::new(vec![l]).unwrap();
        let loss = multires_cross_entropy(&p, &grid_with(1, &[(0, 0, 0)])).unwrap();
        assert!(loss <= 1e-12, "{loss}");
        assert!(loss >= 0.0);
    }

    #[test]
    fn saturated_wrong_logit_is_clamped() {
        let l = LogitGrid::new(Dims::cube(1).unwrap(), vec![-1000.0]).unwrap();
        let p = LogitPyramid::new(vec![l]).unwrap();
        let loss = multires_cross_entropy(&p, &grid_with(1, &[(0, 0, 0)])).unwrap();
        assert!((loss - (-SIGMOID_EPS.ln())).abs() < 1e-9);
    }

    #[test]
    fn zero_logits_cost_ln2_per_cell() {
        let levels = [1usize, 2, 4]
            .iter()
            .map(|&s| LogitGrid::new(Dims::cube(s).unwrap(), vec![0.0; s * s * s]).unwrap())
            .collect();
        let p = LogitPyramid::new(levels).unwrap();
        let loss = multires_cross_entropy(&p, &grid_with(4, &[(1, 1, 1)])).unwrap();
        let expect = std::f64::consts::LN_2 * 73.0;
        assert!((loss - expect).abs() <= 1e-12 * expect);
    }

    #[test]
    fn target_dims_must_match_top() {
        let l = LogitGrid::new(Dims::cube(2).unwrap(), vec![0.0; 8]).unwrap();
        let p = LogitPyramid::new(vec![l]).unwrap();
        assert!(matches!(
            multires_cross_entropy(&p, &grid_with(4, &[])),
            Err(Error::Input(_))
        ));
    }
}
