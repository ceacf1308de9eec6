//! Triangle mesh ingestion: OFF/OBJ parsing, surface sampling and point-cloud
//! voxelization.

mod obj;
mod off;
mod sample;
mod voxelize;

pub use obj::{parse_obj, parse_obj_str};
pub use off::{parse_off, parse_off_str};
pub use sample::{sample_surface, DEFAULT_SAMPLES};
pub use voxelize::{voxelize, MARGIN};

use crate::error::{Error, Result};
use crate::grid::Rgb;

pub type Point = [f64; 3];

#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    vertices: Vec<Point>,
    faces: Vec<[usize; 3]>,
}

impl TriangleMesh {
    pub fn new(vertices: Vec<Point>, faces: Vec<[usize; 3]>) -> Result<Self> {
        if let Some(v) = vertices.iter().find(|v| v.iter().any(|c| !c.is_finite())) {
            return Err(Error::Input(format!("vertex {v:?} is not finite")));
        }
        for (i, f) in faces.iter().enumerate() {
            if f.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::Input(format!(
                    "face {i} {f:?} references a vertex outside 0..{}",
                    vertices.len()
                )));
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(Error::Input(format!("face {i} {f:?} repeats a vertex")));
            }
        }
        Ok(TriangleMesh { vertices, faces })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn triangle(&self, face: usize) -> [Point; 3] {
        let [a, b, c] = self.faces[face];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn triangle_area(&self, face: usize) -> f64 {
        let [a, b, c] = self.triangle(face);
        let u = sub(b, a);
        let v = sub(c, a);
        let n = cross(u, v);
        0.5 * (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt()
    }

    pub fn total_area(&self) -> f64 {
        (0..self.faces.len()).map(|f| self.triangle_area(f)).sum()
    }
}

/// Appends the fan triangulation of `polygon` to `faces`, skipping triangles
/// that repeat a vertex.
pub(crate) fn fan_triangulate(polygon: &[usize], faces: &mut Vec<[usize; 3]>) {
    for i in 1..polygon.len().saturating_sub(1) {
        let tri = [polygon[0], polygon[i], polygon[i + 1]];
        if tri[0] != tri[1] && tri[1] != tri[2] && tri[0] != tri[2] {
            faces.push(tri);
        }
    }
}

/// Points with optional per-point color.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<Point>,
    colors: Option<Vec<Rgb>>,
}

impl PointCloud {
    pub fn new(points: Vec<Point>) -> Self {
        PointCloud {
            points,
            colors: None,
        }
    }

    pub fn with_colors(points: Vec<Point>, colors: Vec<Rgb>) -> Result<Self> {
        if points.len() != colors.len() {
            return Err(Error::Input(format!(
                "{} points but {} colors",
                points.len(),
                colors.len()
            )));
        }
        Ok(PointCloud {
            points,
            colors: Some(colors),
        })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn colors(&self) -> Option<&[Rgb]> {
        self.colors.as_deref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[inline]
pub(crate) fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub(crate) fn cross(a: Point, b: Point) -> Point {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mesh_validation() {
        let v = vec![[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        assert!(TriangleMesh::new(v.clone(), vec![[0, 1, 2]]).is_ok());
        assert!(TriangleMesh::new(v.clone(), vec![[0, 1, 3]]).is_err());
        assert!(TriangleMesh::new(v, vec![[0, 1, 1]]).is_err());
        assert!(TriangleMesh::new(vec![[f64::NAN, 0.0, 0.0]], vec![]).is_err());
    }

    #[test]
    fn area_of_right_triangle() {
        let m = TriangleMesh::new(
            vec![[0.0; 3], [2.0, 0.0, 0.0], [0.0, 3.0, 0.0]],
            vec![[0, 1, 2]],
        )
        .unwrap();
        assert_eq!(m.total_area(), 3.0);
    }

    #[test]
    fn fan_split_drops_degenerate() {
        let mut f = Vec::new();
        fan_triangulate(&[0, 1, 2, 3], &mut f);
        assert_eq!(f, vec![[0, 1, 2], [0, 2, 3]]);
        f.clear();
        fan_triangulate(&[0, 1, 1, 2], &mut f);
        assert_eq!(f, vec![[0, 1, 2]]);
    }
}
