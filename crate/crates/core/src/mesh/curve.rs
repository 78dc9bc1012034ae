//! Closed polygonal curves in the plane.

use nalgebra::Point2;

use crate::{Error, Result};

/// A closed, simple, positively oriented polygonal curve.
///
/// Vertices are listed counterclockwise; vertex `i` connects to vertex
/// `(i + 1) % n`. Construction enforces: at least 3 vertices, consecutive
/// vertices distinct, positive enclosed (signed) area, and no
/// self-intersections. Simplicity is a construction-time invariant only;
/// flow updates via [`CurveMesh::try_updated`] recheck orientation and
/// nondegeneracy but not simplicity.
#[derive(Debug, Clone)]
pub struct CurveMesh {
    vertices: Vec<Point2<f64>>,
}

impl CurveMesh {
    pub fn new(vertices: Vec<Point2<f64>>) -> Result<Self> {
        validate(&vertices)?;
        if let Some((i, j)) = first_self_intersection(&vertices) {
            return Err(Error::InvalidMesh(format!(
                "curve is not simple: edges {i} and {j} intersect"
            )));
        }
        Ok(CurveMesh { vertices })
    }

    /// Replaces vertex positions, keeping topology, and revalidates
    /// everything except simplicity.
    pub fn try_updated(&self, vertices: Vec<Point2<f64>>) -> Result<Self> {
        if vertices.len() != self.vertices.len() {
            return Err(Error::SizeMismatch {
                expected: self.vertices.len(),
                got: vertices.len(),
            });
        }
        validate(&vertices)?;
        Ok(CurveMesh { vertices })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Point2<f64>] {
        &self.vertices
    }

    /// Indices of the previous and next vertex along the curve.
    pub fn neighbors(&self, v: usize) -> (usize, usize) {
        let n = self.vertices.len();
        ((v + n - 1) % n, (v + 1) % n)
    }

    pub fn perimeter(&self) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| (self.vertices[(i + 1) % n] - self.vertices[i]).norm())
            .sum()
    }

    /// Shoelace area; positive for counterclockwise orientation.
    pub fn signed_area(&self) -> f64 {
        signed_area(&self.vertices)
    }
}

fn validate(vertices: &[Point2<f64>]) -> Result<()> {
    if vertices.len() < 3 {
        return Err(Error::InvalidMesh(format!(
            "curve needs at least 3 vertices, got {}",
            vertices.len()
        )));
    }
    for p in vertices {
        if !p.coords.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidMesh(
                "curve has non-finite coordinates".into(),
            ));
        }
    }
    let n = vertices.len();
    for i in 0..n {
        if (vertices[(i + 1) % n] - vertices[i]).norm() == 0.0 {
            return Err(Error::InvalidMesh(format!(
                "consecutive vertices {i} and {} coincide",
                (i + 1) % n
            )));
        }
    }
    let area = signed_area(vertices);
    if area <= 0.0 {
        return Err(Error::InvalidMesh(format!(
            "curve must be counterclockwise with positive enclosed area, got {area}"
        )));
    }
    Ok(())
}

fn signed_area(vertices: &[Point2<f64>]) -> f64 {
    let n = vertices.len();
    0.5 * (0..n)
        .map(|i| {
            let p = vertices[i];
            let q = vertices[(i + 1) % n];
            p.x * q.y - q.x * p.y
        })
        .sum::<f64>()
}

/// Finds a pair of non-adjacent edges that intersect or touch, if any.
fn first_self_intersection(vertices: &[Point2<f64>]) -> Option<(usize, usize)> {
    let n = vertices.len();
    for i in 0..n {
        let (a, b) = (vertices[i], vertices[(i + 1) % n]);
        for j in (i + 1)..n {
            // Skip edges sharing a vertex with edge i.
            if j == i || (j + 1) % n == i || j == (i + 1) % n {
                continue;
            }
            let (c, d) = (vertices[j], vertices[(j + 1) % n]);
            if segments_meet(a, b, c, d) {
                return Some((i, j));
            }
        }
    }
    None
}

/// True when segments ab and cd cross or touch.
fn segments_meet(a: Point2<f64>, b: Point2<f64>, c: Point2<f64>, d: Point2<f64>) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return true;
    }
    (o1 == 0.0 && on_segment(a, b, c))
        || (o2 == 0.0 && on_segment(a, b, d))
        || (o3 == 0.0 && on_segment(c, d, a))
        || (o4 == 0.0 && on_segment(c, d, b))
}

fn orient(a: Point2<f64>, b: Point2<f64>, c: Point2<f64>) -> f64 {
    (b - a).perp(&(c - a))
}

fn on_segment(a: Point2<f64>, b: Point2<f64>, p: Point2<f64>) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<Point2<f64>> {
        vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ]
    }

    #[test]
    fn accepts_ccw_square() {
        let c = CurveMesh::new(square()).unwrap();
        assert_eq!(c.vertex_count(), 4);
        assert!((c.signed_area() - 1.0).abs() < 1e-15);
        assert!((c.perimeter() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_too_few_vertices() {
        let err = CurveMesh::new(vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)]);
        assert!(matches!(err, Err(Error::InvalidMesh(_))));
    }

    #[test]
    fn rejects_clockwise() {
        let mut v = square();
        v.reverse();
        assert!(matches!(CurveMesh::new(v), Err(Error::InvalidMesh(_))));
    }

    #[test]
    fn rejects_duplicate_consecutive_vertices() {
        let mut v = square();
        v.insert(1, Point2::new(0.0, 0.0));
        assert!(matches!(CurveMesh::new(v), Err(Error::InvalidMesh(_))));
    }

    #[test]
    fn rejects_self_intersecting_bowtie() {
        let bowtie = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
        ];
        assert!(matches!(CurveMesh::new(bowtie), Err(Error::InvalidMesh(_))));
    }

    #[test]
    fn updated_positions_skip_simplicity_but_keep_orientation() {
        let c = CurveMesh::new(square()).unwrap();
        let mut flipped = square();
        flipped.reverse();
        assert!(c.try_updated(flipped).is_err());
        let shifted: Vec<_> = square()
            .into_iter()
            .map(|p| p + nalgebra::Vector2::new(2.0, 0.0))
            .collect();
        assert!(c.try_updated(shifted).is_ok());
    }
}
