use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{PointCloud, TriangleMesh};
use crate::error::{Error, Result};

/// Default number of surface samples per mesh.
pub const DEFAULT_SAMPLES: usize = 100_000;

/// Draws `n` points uniformly over the mesh surface: a triangle is picked with
/// probability proportional to its area, then a point inside it is drawn with
/// the square-root barycentric map.
///
/// The generator is ChaCha8 seeded through `SeedableRng::seed_from_u64(seed)`,
/// so a seed reproduces the same points on every platform.
pub fn sample_surface(mesh: &TriangleMesh, n: usize, seed: u64) -> Result<PointCloud> {
    if n == 0 {
        return Err(Error::Input("sample count must be at least 1".into()));
    }
    let areas: Vec<f64> = (0..mesh.faces().len())
        .map(|f| mesh.triangle_area(f))
        .collect();
    let total: f64 = areas.iter().sum();
    if !total.is_finite() || total <= 0.0 {
        return Err(Error::Geometry(format!(
            "mesh surface area is {total}, cannot sample"
        )));
    }
    let pick = WeightedIndex::new(&areas)
        .map_err(|e| Error::Geometry(format!("triangle weights: {e}")))?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let [a, b, c] = mesh.triangle(pick.sample(&mut rng));
        let r1: f64 = rng.random();
        let r2: f64 = rng.random();
        let s = r1.sqrt();
        let (wa, wb, wc) = (1.0 - s, s * (1.0 - r2), s * r2);
        points.push([
            wa * a[0] + wb * b[0] + wc * c[0],
            wa * a[1] + wb * b[1] + wc * c[1],
            wa * a[2] + wb * b[2] + wc * c[2],
        ]);
    }
    Ok(PointCloud::new(points))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{cross, sub};

    fn tri(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> TriangleMesh {
        TriangleMesh::new(vec![a, b, c], vec![[0, 1, 2]]).unwrap()
    }

    #[test]
    fn points_stay_on_plane() {
        let (a, b, c) = ([0.3, -1.0, 2.0], [1.5, 0.5, -0.25], [-2.0, 3.0, 1.0]);
        let cloud = sample_surface(&tri(a, b, c), 1000, 42).unwrap();
        let normal = cross(sub(b, a), sub(c, a));
        let len = (normal.iter().map(|v| v * v).sum::<f64>()).sqrt();
        for p in cloud.points() {
            let d = sub(*p, a);
            let dist = (d[0] * normal[0] + d[1] * normal[1] + d[2] * normal[2]) / len;
            assert!(dist.abs() < 1e-9);
        }
    }

    #[test]
    fn area_weighting() {
        // Two coplanar triangles with areas 4.5 and 0.5.
        let mesh = TriangleMesh::new(
            vec![
                [0.0, 0.0, 0.0],
                [3.0, 0.0, 0.0],
                [0.0, 3.0, 0.0],
                [10.0, 0.0, 0.0],
                [11.0, 0.0, 0.0],
                [10.0, 1.0, 0.0],
            ],
            vec![[0, 1, 2], [3, 4, 5]],
        )
        .unwrap();
        for seed in [0, 1, 99] {
            let cloud = sample_surface(&mesh, 100_000, seed).unwrap();
            let big = cloud.points().iter().filter(|p| p[0] < 5.0).count();
            assert!((89_000..=91_000).contains(&big), "seed {seed}: {big}");
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let m = tri([0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
        assert_eq!(
            sample_surface(&m, 500, 7).unwrap(),
            sample_surface(&m, 500, 7).unwrap()
        );
        assert_ne!(
            sample_surface(&m, 500, 7).unwrap(),
            sample_surface(&m, 500, 8).unwrap()
        );
    }

    #[test]
    fn zero_area_rejected() {
        let m = tri([0.0; 3], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]);
        assert!(matches!(sample_surface(&m, 10, 0), Err(Error::Geometry(_))));
        let empty = TriangleMesh::new(vec![], vec![]).unwrap();
        assert!(matches!(
            sample_surface(&empty, 10, 0),
            Err(Error::Geometry(_))
        ));
    }
}
