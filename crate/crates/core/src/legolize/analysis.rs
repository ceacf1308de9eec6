use std::collections::BTreeMap;

use petgraph::unionfind::UnionFind;

use super::model::BrickModel;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectivityReport {
    pub components: usize,
    /// Components with no brick on layer 0, as sorted brick indices.
    pub floating: Vec<Vec<usize>>,
    /// Bricks per layer, bottom first; one entry per grid layer.
    pub layer_counts: Vec<usize>,
}

/// Groups bricks joined by stud contact: two bricks are connected when one
/// covers a cell directly above a cell covered by the other.
pub fn analyze_connectivity(model: &BrickModel) -> ConnectivityReport {
    let d = model.dims();
    let n = model.len();
    let mut owner = vec![usize::MAX; d.cell_count()];
    for (b, p) in model.placements().iter().enumerate() {
        for (x, y, z) in p.cells() {
            owner[d.index(x, y, z)] = b;
        }
    }

    let mut sets = UnionFind::<usize>::new(n);
    for (b, p) in model.placements().iter().enumerate() {
        if p.layer() + 1 >= d.ny {
            continue;
        }
        for (x, y, z) in p.cells() {
            let above = owner[d.index(x, y + 1, z)];
            if above != usize::MAX {
                sets.union(b, above);
            }
        }
    }

    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for b in 0..n {
        groups.entry(sets.find(b)).or_default().push(b);
    }
    let mut floating: Vec<Vec<usize>> = groups
        .into_values()
        .filter(|bricks| bricks.iter().all(|&b| model.placements()[b].layer() > 0))
        .collect();
    floating.sort();

    let mut layer_counts = vec![0; d.ny];
    for p in model.placements() {
        layer_counts[p.layer()] += 1;
    }

    let components = (0..n).filter(|&b| sets.find(b) == b).count();
    ConnectivityReport {
        components,
        floating,
        layer_counts,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct BomLine {
    pub part_id: String,
    pub color_code: u32,
    pub count: usize,
}

/// Brick counts per `(part, color)`, sorted by part id then color code.
pub fn bill_of_materials(model: &BrickModel) -> Vec<BomLine> {
    let mut counts: BTreeMap<(&str, u32), usize> = BTreeMap::new();
    for p in model.placements() {
        *counts
            .entry((p.part_id.as_str(), p.color_code))
            .or_default() += 1;
    }
    counts
        .into_iter()
        .map(|((part, color), count)| BomLine {
            part_id: part.to_owned(),
            color_code: color,
            count,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Dims;
    use crate::legolize::model::{BrickPlacement, Orientation};

    fn unit(origin: [usize; 3], color: u32) -> BrickPlacement {
        BrickPlacement {
            origin,
            size_x: 1,
            size_z: 1,
            orientation: Orientation::Deg0,
            part_id: "3005".into(),
            color_code: color,
        }
    }

    fn model(ps: Vec<BrickPlacement>) -> BrickModel {
        BrickModel::new(Dims::new(3, 3, 3).unwrap(), ps).unwrap()
    }

    #[test]
    fn single_brick() {
        let r = analyze_connectivity(&model(vec![unit([0, 0, 0], 4)]));
        assert_eq!(r.components, 1);
        assert!(r.floating.is_empty());
        assert_eq!(r.layer_counts, vec![1, 0, 0]);
    }

    #[test]
    fn stacked_bricks_connect() {
        let r = analyze_connectivity(&model(vec![unit([1, 0, 1], 4), unit([1, 1, 1], 4)]));
        assert_eq!(r.components, 1);
        assert!(r.floating.is_empty());
    }

    #[test]
    fn side_by_side_on_ground() {
        let r = analyze_connectivity(&model(vec![unit([0, 0, 0], 4), unit([1, 0, 0], 4)]));
        assert_eq!(r.components, 2);
        assert!(r.floating.is_empty());
    }

    #[test]
    fn elevated_brick_floats() {
        let r = analyze_connectivity(&model(vec![unit([0, 0, 0], 4), unit([2, 2, 2], 4)]));
        assert_eq!(r.components, 2);
        assert_eq!(r.floating, vec![vec![1]]);

        let r = analyze_connectivity(&model(vec![unit([0, 1, 0], 4), unit([1, 1, 0], 4)]));
        assert_eq!(r.components, 2);
        assert_eq!(r.floating.len(), 2);
    }

    #[test]
    fn bom_grouping() {
        assert!(bill_of_materials(&model(vec![])).is_empty());
        let m = model(vec![
            unit([0, 0, 0], 4),
            unit([1, 0, 0], 4),
            unit([2, 0, 0], 4),
        ]);
        assert_eq!(
            bill_of_materials(&m),
            vec![BomLine {
                part_id: "3005".into(),
                color_code: 4,
                count: 3
            }]
        );
        let mut two = vec![unit([0, 0, 0], 15), unit([1, 0, 0], 4)];
        two.push(BrickPlacement {
            origin: [0, 1, 0],
            size_x: 2,
            size_z: 1,
            orientation: Orientation::Deg0,
            part_id: "3004".into(),
            color_code: 4,
        });
        let bom = bill_of_materials(&model(two));
        let keys: Vec<(&str, u32)> = bom
            .iter()
            .map(|l| (l.part_id.as_str(), l.color_code))
            .collect();
        assert_eq!(keys, vec![("3004", 4), ("3005", 4), ("3005", 15)]);
    }
}
