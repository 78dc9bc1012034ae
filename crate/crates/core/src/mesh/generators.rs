//! Deterministic generators for the benchmark geometries.

use std::collections::HashMap;

use nalgebra::{Point2, Point3};

use super::{CurveMesh, SurfaceMesh};
use crate::{Error, Result};

/// Largest accepted icosphere subdivision depth (163842 vertices).
pub const MAX_SUBDIVISION: u32 = 7;

type VerticesAndTriangles = (Vec<Point3<f64>>, Vec<[usize; 3]>);

/// Regular counterclockwise n-gon of circumradius `radius` centered at the
/// origin, starting at angle zero.
pub fn ngon(sides: usize, radius: f64) -> Result<CurveMesh> {
    if sides < 3 {
        return Err(Error::InvalidMesh(format!(
            "an n-gon needs at least 3 sides, got {sides}"
        )));
    }
    if !(radius > 0.0) {
        return Err(Error::InvalidMesh(format!(
            "n-gon radius must be positive, got {radius}"
        )));
    }
    let vertices = (0..sides)
        .map(|i| {
            let angle = std::f64::consts::TAU * i as f64 / sides as f64;
            Point2::new(radius * angle.cos(), radius * angle.sin())
        })
        .collect();
    CurveMesh::new(vertices)
}

/// Icosphere: subdivided icosahedron with all vertices projected to radius
/// `radius`. Subdivision `s` yields `10 * 4^s + 2` vertices.
pub fn icosphere(radius: f64, subdivisions: u32) -> Result<SurfaceMesh> {
    if !(radius > 0.0) {
        return Err(Error::InvalidMesh(format!(
            "icosphere radius must be positive, got {radius}"
        )));
    }
    let (vertices, triangles) = unit_icosphere(subdivisions)?;
    let scaled = vertices
        .into_iter()
        .map(|p| Point3::from(p.coords * radius))
        .collect();
    SurfaceMesh::new(scaled, triangles)
}

/// Axis-aligned ellipsoid with semi-axes `(a, b, c)`, built by anisotropic
/// scaling of a unit icosphere.
pub fn ellipsoid(a: f64, b: f64, c: f64, subdivisions: u32) -> Result<SurfaceMesh> {
    for (name, value) in [("a", a), ("b", b), ("c", c)] {
        if !(value > 0.0) {
            return Err(Error::InvalidMesh(format!(
                "ellipsoid semi-axis {name} must be positive, got {value}"
            )));
        }
    }
    let (vertices, triangles) = unit_icosphere(subdivisions)?;
    let scaled = vertices
        .into_iter()
        .map(|p| Point3::new(a * p.x, b * p.y, c * p.z))
        .collect();
    SurfaceMesh::new(scaled, triangles)
}

/// Convex near-sphere: radius modulated by a fixed mix of degree-two
/// harmonics, `r(u) = radius * (1 + amplitude * s(u))` with
/// `s = 0.6 * (1.5 z^2 - 0.5) + 0.9 xz` on the unit direction `u`.
///
/// Amplitudes up to 0.1 keep the surface convex with positive mean
/// curvature while breaking the exact symmetries of the icosphere.
pub fn perturbed_icosphere(radius: f64, subdivisions: u32, amplitude: f64) -> Result<SurfaceMesh> {
    if !(radius > 0.0) {
        return Err(Error::InvalidMesh(format!(
            "radius must be positive, got {radius}"
        )));
    }
    if !(0.0..=0.1).contains(&amplitude) {
        return Err(Error::InvalidMesh(format!(
            "perturbation amplitude must lie in [0, 0.1], got {amplitude}"
        )));
    }
    let (vertices, triangles) = unit_icosphere(subdivisions)?;
    let shaped = vertices
        .into_iter()
        .map(|p| {
            let u = p.coords;
            let s = 0.6 * (1.5 * u.z * u.z - 0.5) + 0.9 * u.x * u.z;
            Point3::from(u * (radius * (1.0 + amplitude * s)))
        })
        .collect();
    SurfaceMesh::new(shaped, triangles)
}

fn unit_icosphere(subdivisions: u32) -> Result<VerticesAndTriangles> {
    if subdivisions > MAX_SUBDIVISION {
        return Err(Error::InvalidMesh(format!(
            "subdivision depth {subdivisions} exceeds the maximum of {MAX_SUBDIVISION}"
        )));
    }
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let raw = [
        (-1.0, phi, 0.0),
        (1.0, phi, 0.0),
        (-1.0, -phi, 0.0),
        (1.0, -phi, 0.0),
        (0.0, -1.0, phi),
        (0.0, 1.0, phi),
        (0.0, -1.0, -phi),
        (0.0, 1.0, -phi),
        (phi, 0.0, -1.0),
        (phi, 0.0, 1.0),
        (-phi, 0.0, -1.0),
        (-phi, 0.0, 1.0),
    ];
    let mut vertices: Vec<Point3<f64>> = raw
        .iter()
        .map(|&(x, y, z)| Point3::from(nalgebra::Vector3::new(x, y, z).normalize()))
        .collect();
    let mut triangles: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];

    for _ in 0..subdivisions {
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(triangles.len() * 4);
        for t in &triangles {
            let m = [
                midpoint_index(&mut vertices, &mut midpoint, t[0], t[1]),
                midpoint_index(&mut vertices, &mut midpoint, t[1], t[2]),
                midpoint_index(&mut vertices, &mut midpoint, t[2], t[0]),
            ];
            next.push([t[0], m[0], m[2]]);
            next.push([t[1], m[1], m[0]]);
            next.push([t[2], m[2], m[1]]);
            next.push([m[0], m[1], m[2]]);
        }
        triangles = next;
    }
    Ok((vertices, triangles))
}

fn midpoint_index(
    vertices: &mut Vec<Point3<f64>>,
    cache: &mut HashMap<(usize, usize), usize>,
    a: usize,
    b: usize,
) -> usize {
    let key = (a.min(b), a.max(b));
    *cache.entry(key).or_insert_with(|| {
        let mid = nalgebra::center(&vertices[a], &vertices[b]);
        vertices.push(Point3::from(mid.coords.normalize()));
        vertices.len() - 1
    })
}
