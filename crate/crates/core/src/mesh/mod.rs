//! Mesh containers, generators, pointwise geometry, and file I/O.
//!
//! Two mesh kinds are supported: closed polygonal curves in the plane
//! ([`CurveMesh`]) and closed triangulated surfaces in space
//! ([`SurfaceMesh`]). Both are immutable after construction; flows produce
//! new meshes. [`Mesh`] wraps either kind so flow and spectral code can stay
//! dimension-agnostic.

mod curve;
pub mod generators;
mod geometry;
pub mod io;
mod surface;

pub use curve::CurveMesh;
pub use geometry::{
    geometry_state, pinching_report, vertex_gradients, weighted_measure, GeometryState,
    PinchingReport, WeightField, WeightedMeasure, PINCHING_HALF_TOLERANCE,
};
pub use surface::SurfaceMesh;

use nalgebra::Point3;

/// A closed hypersurface mesh: either a polygonal curve (manifold dimension 1)
/// or a triangulated surface (manifold dimension 2).
#[derive(Debug, Clone)]
pub enum Mesh {
    Curve(CurveMesh),
    Surface(SurfaceMesh),
}

impl Mesh {
    /// Intrinsic dimension of the manifold: 1 for curves, 2 for surfaces.
    pub fn manifold_dim(&self) -> usize {
        match self {
            Mesh::Curve(_) => 1,
            Mesh::Surface(_) => 2,
        }
    }

    pub fn vertex_count(&self) -> usize {
        match self {
            Mesh::Curve(c) => c.vertex_count(),
            Mesh::Surface(s) => s.vertex_count(),
        }
    }

    /// Vertex position embedded in 3-space (curves live in the z=0 plane).
    pub fn position3(&self, v: usize) -> Point3<f64> {
        match self {
            Mesh::Curve(c) => {
                let p = c.vertices()[v];
                Point3::new(p.x, p.y, 0.0)
            }
            Mesh::Surface(s) => s.vertices()[v],
        }
    }

    /// Applies a displacement to every vertex and revalidates the result.
    ///
    /// Topology is preserved; curve displacements must stay in the z=0 plane
    /// (the z component is ignored). Self-intersection of curves is not
    /// rechecked here: it is a construction-time invariant only.
    pub fn displaced(&self, displacement: &[nalgebra::Vector3<f64>]) -> crate::Result<Mesh> {
        if displacement.len() != self.vertex_count() {
            return Err(crate::Error::SizeMismatch {
                expected: self.vertex_count(),
                got: displacement.len(),
            });
        }
        match self {
            Mesh::Curve(c) => {
                let moved: Vec<_> = c
                    .vertices()
                    .iter()
                    .zip(displacement)
                    .map(|(p, d)| nalgebra::Point2::new(p.x + d.x, p.y + d.y))
                    .collect();
                c.try_updated(moved).map(Mesh::Curve)
            }
            Mesh::Surface(s) => {
                let moved: Vec<_> = s
                    .vertices()
                    .iter()
                    .zip(displacement)
                    .map(|(p, d)| p + d)
                    .collect();
                s.try_updated(moved).map(Mesh::Surface)
            }
        }
    }

    /// Uniformly scales the mesh about the origin.
    pub fn scaled(&self, factor: f64) -> crate::Result<Mesh> {
        match self {
            Mesh::Curve(c) => {
                let scaled: Vec<_> = c.vertices().iter().map(|p| p * factor).collect();
                CurveMesh::new(scaled).map(Mesh::Curve)
            }
            Mesh::Surface(s) => {
                let scaled: Vec<_> = s
                    .vertices()
                    .iter()
                    .map(|p| Point3::from(p.coords * factor))
                    .collect();
                SurfaceMesh::new(scaled, s.triangles().to_vec()).map(Mesh::Surface)
            }
        }
    }
}
