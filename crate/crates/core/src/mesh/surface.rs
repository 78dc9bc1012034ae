//! Closed triangulated surfaces in space.

use std::collections::HashMap;

use nalgebra::Point3;

use crate::{Error, Result};

/// Relative floor (times squared diameter) below which a triangle counts as
/// degenerate.
const AREA_FLOOR_REL: f64 = 1e-14;

/// A closed, connected, consistently oriented triangle mesh with positive
/// enclosed volume (triangles wind counterclockwise seen from outside).
///
/// Construction enforces: valid indices, every directed edge appearing
/// exactly once with its reverse also present (closed orientable 2-manifold),
/// connectedness, nondegenerate triangles, and positive volume. Flow updates
/// via [`SurfaceMesh::try_updated`] keep the topology and recheck the metric
/// invariants only.
#[derive(Debug, Clone)]
pub struct SurfaceMesh {
    vertices: Vec<Point3<f64>>,
    triangles: Vec<[usize; 3]>,
}

impl SurfaceMesh {
    pub fn new(vertices: Vec<Point3<f64>>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        validate_topology(&vertices, &triangles)?;
        validate_metric(&vertices, &triangles)?;
        Ok(SurfaceMesh {
            vertices,
            triangles,
        })
    }

    /// Replaces vertex positions, keeping topology, and revalidates the
    /// metric invariants (nondegenerate triangles, positive volume).
    pub fn try_updated(&self, vertices: Vec<Point3<f64>>) -> Result<Self> {
        if vertices.len() != self.vertices.len() {
            return Err(Error::SizeMismatch {
                expected: self.vertices.len(),
                got: vertices.len(),
            });
        }
        validate_metric(&vertices, &self.triangles)?;
        Ok(SurfaceMesh {
            vertices,
            triangles: self.triangles.clone(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Point3<f64>] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Undirected edges as ordered (low, high) index pairs, each once.
    pub fn edges(&self) -> Vec<[usize; 2]> {
        let mut edges: Vec<[usize; 2]> = self
            .triangles
            .iter()
            .flat_map(|t| {
                [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])]
                    .into_iter()
                    .filter(|(a, b)| a < b)
                    .map(|(a, b)| [a, b])
            })
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges
    }

    pub fn total_area(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| triangle_area(&self.vertices, t))
            .sum()
    }

    /// Enclosed volume by the divergence theorem; positive for outward
    /// orientation.
    pub fn enclosed_volume(&self) -> f64 {
        enclosed_volume(&self.vertices, &self.triangles)
    }
}

fn triangle_area(vertices: &[Point3<f64>], t: &[usize; 3]) -> f64 {
    let e1 = vertices[t[1]] - vertices[t[0]];
    let e2 = vertices[t[2]] - vertices[t[0]];
    0.5 * e1.cross(&e2).norm()
}

fn enclosed_volume(vertices: &[Point3<f64>], triangles: &[[usize; 3]]) -> f64 {
    triangles
        .iter()
        .map(|t| {
            let (a, b, c) = (vertices[t[0]], vertices[t[1]], vertices[t[2]]);
            a.coords.dot(&b.coords.cross(&c.coords)) / 6.0
        })
        .sum()
}

fn validate_topology(vertices: &[Point3<f64>], triangles: &[[usize; 3]]) -> Result<()> {
    let n = vertices.len();
    if n < 4 || triangles.len() < 4 {
        return Err(Error::InvalidMesh(format!(
            "closed surface needs at least 4 vertices and 4 triangles, got {n} and {}",
            triangles.len()
        )));
    }
    let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
    for (ti, t) in triangles.iter().enumerate() {
        if t[0] == t[1] || t[1] == t[2] || t[2] == t[0] {
            return Err(Error::InvalidMesh(format!(
                "triangle {ti} repeats a vertex index"
            )));
        }
        for &v in t {
            if v >= n {
                return Err(Error::InvalidMesh(format!(
                    "triangle {ti} references vertex {v}, but only {n} vertices exist"
                )));
            }
        }
        for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
            if directed.insert((a, b), ti).is_some() {
                return Err(Error::InvalidMesh(format!(
                    "directed edge ({a},{b}) appears twice: inconsistent orientation or non-manifold edge"
                )));
            }
        }
    }
    for &(a, b) in directed.keys() {
        if !directed.contains_key(&(b, a)) {
            return Err(Error::InvalidMesh(format!(
                "edge ({a},{b}) has no oppositely oriented partner: surface is not closed"
            )));
        }
    }

    // Connectivity over triangle adjacency (equivalently vertex adjacency,
    // since every edge is shared).
    let mut adjacency = vec![Vec::new(); n];
    for &(a, b) in directed.keys() {
        adjacency[a].push(b);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &w in &adjacency[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    if let Some(v) = seen.iter().position(|s| !s) {
        return Err(Error::InvalidMesh(format!(
            "surface is disconnected: vertex {v} is unreachable from vertex 0"
        )));
    }
    Ok(())
}

fn validate_metric(vertices: &[Point3<f64>], triangles: &[[usize; 3]]) -> Result<()> {
    let mut diameter_sq: f64 = 0.0;
    for p in vertices {
        if !p.coords.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidMesh(
                "surface has non-finite coordinates".into(),
            ));
        }
        diameter_sq = diameter_sq.max(p.coords.norm_squared());
    }
    let floor = AREA_FLOOR_REL * diameter_sq.max(f64::MIN_POSITIVE);
    for (ti, t) in triangles.iter().enumerate() {
        if triangle_area(vertices, t) <= floor {
            return Err(Error::InvalidMesh(format!("triangle {ti} is degenerate")));
        }
    }
    let volume = enclosed_volume(vertices, triangles);
    if volume <= 0.0 {
        return Err(Error::InvalidMesh(format!(
            "enclosed volume must be positive (outward orientation), got {volume}"
        )));
    }
    Ok(())
}
