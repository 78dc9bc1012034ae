//! Pointwise discrete geometry: normals, curvatures, shape operators, dual
//! areas, pinching diagnostics, and weighted measures.

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};

use super::{CurveMesh, Mesh, SurfaceMesh};
use crate::{Error, Result};

/// Slack allowed when testing the half-pinching hypothesis
/// `kappa_min >= H/2`. Discretization noise on a round mesh puts the
/// pointwise ratio a fraction of a percent below the smooth value, so the
/// test uses `ratio >= 1/2 - PINCHING_HALF_TOLERANCE`.
pub const PINCHING_HALF_TOLERANCE: f64 = 1e-2;

/// Per-vertex differential geometry of a mesh, plus global totals.
///
/// Curvature sign convention: on a convex body with outward normals the mean
/// curvature is positive, and `mean_curvature` is the sum (not the average)
/// of the principal curvatures, so a round sphere of radius `r` has `H = 2/r`
/// and a circle has `H = 1/r`.
#[derive(Debug, Clone)]
pub struct GeometryState {
    manifold_dim: usize,
    /// Outward unit normal per vertex.
    pub normal: Vec<Vector3<f64>>,
    /// Sum of principal curvatures per vertex.
    pub mean_curvature: Vec<f64>,
    /// Principal curvatures, ascending; curves use only the first slot.
    principal: Vec<[f64; 2]>,
    /// Orthonormal tangent frame per vertex. For curves the first vector is
    /// the unit tangent and the second is the out-of-plane axis.
    pub tangent: Vec<[Vector3<f64>; 2]>,
    /// Shape operator in the tangent frame. Its trace equals the mean
    /// curvature; for curves only the (0,0) entry is populated.
    pub shape_operator: Vec<Matrix2<f64>>,
    /// Lumped dual measure per vertex: half of the two incident edge lengths
    /// for curves, the mixed Voronoi cell for surfaces. The cells partition
    /// the total measure exactly.
    pub dual_area: Vec<f64>,
    /// Perimeter (curves) or total triangle area (surfaces).
    pub total_area: f64,
    /// Enclosed area (curves) or enclosed volume (surfaces).
    pub volume: f64,
    /// Shortest edge, for stability estimates.
    pub min_edge_length: f64,
}

impl GeometryState {
    pub fn manifold_dim(&self) -> usize {
        self.manifold_dim
    }

    pub fn vertex_count(&self) -> usize {
        self.mean_curvature.len()
    }

    pub fn h_min(&self) -> f64 {
        self.mean_curvature
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn h_max(&self) -> f64 {
        self.mean_curvature
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Principal curvatures at a vertex, ascending.
    pub fn principal_curvatures(&self, v: usize) -> &[f64] {
        &self.principal[v][..self.manifold_dim]
    }

    /// Squared Frobenius norm of the second fundamental form at a vertex.
    pub fn second_fundamental_norm_sq(&self, v: usize) -> f64 {
        self.principal_curvatures(v).iter().map(|k| k * k).sum()
    }

    /// Radius of the round curve/surface with the same perimeter/area.
    pub fn equivalent_radius(&self) -> f64 {
        match self.manifold_dim {
            1 => self.total_area / std::f64::consts::TAU,
            _ => (self.total_area / (4.0 * std::f64::consts::PI)).sqrt(),
        }
    }
}

/// Computes the full geometric state of a mesh.
///
/// Fails with [`Error::DegenerateElement`] when a vertex has a vanishing
/// dual measure, a zero normal, or an unsolvable curvature fit.
pub fn geometry_state(mesh: &Mesh) -> Result<GeometryState> {
    match mesh {
        Mesh::Curve(c) => curve_geometry(c),
        Mesh::Surface(s) => surface_geometry(s),
    }
}

fn curve_geometry(curve: &CurveMesh) -> Result<GeometryState> {
    let n = curve.vertex_count();
    let v = curve.vertices();
    let edge: Vec<Vector2<f64>> = (0..n).map(|i| v[(i + 1) % n] - v[i]).collect();
    let len: Vec<f64> = edge.iter().map(|e| e.norm()).collect();
    let min_edge_length = len.iter().copied().fold(f64::INFINITY, f64::min);

    let mut normal = Vec::with_capacity(n);
    let mut mean_curvature = Vec::with_capacity(n);
    let mut principal = Vec::with_capacity(n);
    let mut tangent = Vec::with_capacity(n);
    let mut shape_operator = Vec::with_capacity(n);
    let mut dual_area = Vec::with_capacity(n);

    for i in 0..n {
        let prev = (i + n - 1) % n;
        let w = 0.5 * (len[prev] + len[i]);
        if !(w > 0.0) || !w.is_finite() {
            return Err(Error::DegenerateElement {
                vertex: i,
                reason: format!("dual length {w} is not positive"),
            });
        }
        let chord = v[(i + 1) % n] - v[prev];
        let chord_len = chord.norm();
        if chord_len == 0.0 {
            return Err(Error::DegenerateElement {
                vertex: i,
                reason: "neighbors coincide, tangent undefined".into(),
            });
        }
        let t = chord / chord_len;
        // Outward normal for a counterclockwise curve: tangent rotated -90 degrees.
        let nu = Vector2::new(t.y, -t.x);
        let turning = edge[prev].perp(&edge[i]).atan2(edge[prev].dot(&edge[i]));
        let kappa = turning / w;

        dual_area.push(w);
        normal.push(Vector3::new(nu.x, nu.y, 0.0));
        tangent.push([Vector3::new(t.x, t.y, 0.0), Vector3::z()]);
        mean_curvature.push(kappa);
        principal.push([kappa, 0.0]);
        shape_operator.push(Matrix2::new(kappa, 0.0, 0.0, 0.0));
    }

    Ok(GeometryState {
        manifold_dim: 1,
        normal,
        mean_curvature,
        principal,
        tangent,
        shape_operator,
        dual_area,
        total_area: len.iter().sum(),
        volume: curve.signed_area(),
        min_edge_length,
    })
}

fn surface_geometry(surface: &SurfaceMesh) -> Result<GeometryState> {
    let n = surface.vertex_count();
    let verts = surface.vertices();
    let tris = surface.triangles();

    let mut dual_area = vec![0.0; n];
    let mut normal_acc = vec![Vector3::zeros(); n];
    // Positive-semidefinite cotangent stiffness applied to the coordinate
    // functions; its normal component recovers the mean curvature.
    let mut stiffness_x = vec![Vector3::zeros(); n];
    let mut total_area = 0.0;
    let mut min_edge_length = f64::INFINITY;
    let mut neighbors: Vec<Vec<usize>> = vec![Vec::new(); n];

    for t in tris {
        let p = [verts[t[0]], verts[t[1]], verts[t[2]]];
        let u = p[1] - p[0];
        let w = p[2] - p[0];
        let cross = u.cross(&w);
        let twice_area = cross.norm();
        if !(twice_area > 0.0) {
            return Err(Error::DegenerateElement {
                vertex: t[0],
                reason: "zero-area triangle".into(),
            });
        }
        let area = 0.5 * twice_area;
        total_area += area;
        let face_normal = cross / twice_area;
        min_edge_length = min_edge_length
            .min(u.norm())
            .min(w.norm())
            .min((p[2] - p[1]).norm());

        // Corner dot products: unnormalized cotangents (cot_i = dot_i / 2A)
        // and the obtuseness test in one.
        let mut corner_dot = [0.0; 3];
        for i in 0..3 {
            let ab = p[(i + 1) % 3] - p[i];
            let ac = p[(i + 2) % 3] - p[i];
            corner_dot[i] = ab.dot(&ac);
        }
        let obtuse_at = (0..3).find(|&i| corner_dot[i] < 0.0);

        for i in 0..3 {
            let (vi, vj, vk) = (t[i], t[(i + 1) % 3], t[(i + 2) % 3]);
            neighbors[vi].push(vj);
            neighbors[vi].push(vk);

            // Mixed Voronoi cell: circumcentric corner area for non-obtuse
            // triangles, else half the area at the obtuse corner and a
            // quarter elsewhere. The three corners always sum to the
            // triangle area, so the cells partition the surface.
            dual_area[vi] += match obtuse_at {
                None => {
                    let to_j = (p[(i + 1) % 3] - p[i]).norm_squared();
                    let to_k = (p[(i + 2) % 3] - p[i]).norm_squared();
                    (to_j * corner_dot[(i + 2) % 3] + to_k * corner_dot[(i + 1) % 3])
                        / (8.0 * twice_area)
                }
                Some(o) if o == i => 0.5 * area,
                Some(_) => 0.25 * area,
            };

            let ab = p[(i + 1) % 3] - p[i];
            let ac = p[(i + 2) % 3] - p[i];
            let corner_angle = ab.cross(&ac).norm().atan2(corner_dot[i]);
            normal_acc[vi] += corner_angle * face_normal;

            // Half-cotangent weight for the edge opposite this corner.
            let half_cot = 0.5 * corner_dot[i] / twice_area;
            let d = verts[vj] - verts[vk];
            stiffness_x[vj] += half_cot * d;
            stiffness_x[vk] -= half_cot * d;
        }
    }

    let mut normal = Vec::with_capacity(n);
    let mut mean_curvature = Vec::with_capacity(n);
    for v in 0..n {
        if !(dual_area[v] > 0.0) || !dual_area[v].is_finite() {
            return Err(Error::DegenerateElement {
                vertex: v,
                reason: format!("dual area {} is not positive", dual_area[v]),
            });
        }
        let norm = normal_acc[v].norm();
        if !(norm > 0.0) {
            return Err(Error::DegenerateElement {
                vertex: v,
                reason: "angle-weighted normal vanished".into(),
            });
        }
        let nu = normal_acc[v] / norm;
        normal.push(nu);
        mean_curvature.push(stiffness_x[v].dot(&nu) / dual_area[v]);
    }

    let mut principal = Vec::with_capacity(n);
    let mut tangent = Vec::with_capacity(n);
    let mut shape_operator = Vec::with_capacity(n);
    for v in 0..n {
        neighbors[v].sort_unstable();
        neighbors[v].dedup();
        let frame = tangent_frame(&normal[v]);
        let shape = fit_shape_operator(
            v,
            verts,
            &neighbors[v],
            &normal[v],
            &frame,
            mean_curvature[v],
        )?;
        let (k1, k2) = symmetric_2x2_eigenvalues(&shape);
        principal.push([k1, k2]);
        tangent.push(frame);
        shape_operator.push(shape);
    }

    Ok(GeometryState {
        manifold_dim: 2,
        normal,
        mean_curvature,
        principal,
        tangent,
        shape_operator,
        dual_area,
        total_area,
        volume: surface.enclosed_volume(),
        min_edge_length,
    })
}

/// Builds an orthonormal tangent frame `[e1, e2]` with `e1 x e2 = normal`.
fn tangent_frame(normal: &Vector3<f64>) -> [Vector3<f64>; 2] {
    let axis = if normal.x.abs() <= normal.y.abs() && normal.x.abs() <= normal.z.abs() {
        Vector3::x()
    } else if normal.y.abs() <= normal.z.abs() {
        Vector3::y()
    } else {
        Vector3::z()
    };
    let e1 = (axis - normal * axis.dot(normal)).normalize();
    let e2 = normal.cross(&e1);
    [e1, e2]
}

/// Least-squares quadric fit of the 1-ring, reconciled so the trace of the
/// returned operator equals the cotangent mean curvature exactly.
///
/// Offsets `d = x_j - x_v` are split into tangential coordinates `(a, b)` and
/// the normal height `z = d . nu`; the osculating quadric `z =
/// -(s11 a^2 + 2 s12 ab + s22 b^2)/2` is fitted so that a convex neighborhood
/// (heights dropping away from the tangent plane) yields positive curvature.
fn fit_shape_operator(
    v: usize,
    verts: &[nalgebra::Point3<f64>],
    ring: &[usize],
    normal: &Vector3<f64>,
    frame: &[Vector3<f64>; 2],
    h: f64,
) -> Result<Matrix2<f64>> {
    let mut ata = Matrix3::zeros();
    let mut atb = Vector3::zeros();
    for &j in ring {
        let d = verts[j] - verts[v];
        let a = d.dot(&frame[0]);
        let b = d.dot(&frame[1]);
        let z = d.dot(normal);
        let row = Vector3::new(0.5 * a * a, a * b, 0.5 * b * b);
        ata += row * row.transpose();
        atb += row * (-z);
    }
    let ridge = 1e-12 * ata.diagonal().amax().max(f64::MIN_POSITIVE);
    ata += Matrix3::identity() * ridge;
    let coeffs = ata.lu().solve(&atb).ok_or(Error::DegenerateElement {
        vertex: v,
        reason: "curvature fit is singular".into(),
    })?;
    let mut shape = Matrix2::new(coeffs.x, coeffs.y, coeffs.y, coeffs.z);

    // Reconcile the fitted trace with the cotangent mean curvature, which is
    // the invariant the flows rely on. Rescale when the signs agree and the
    // fit is not collapsing, otherwise shift both eigenvalues equally.
    let trace = shape.trace();
    if trace * h > 0.0 && trace.abs() >= 0.1 * h.abs() {
        shape *= h / trace;
    } else {
        let shift = 0.5 * (h - trace);
        shape[(0, 0)] += shift;
        shape[(1, 1)] += shift;
    }
    Ok(shape)
}

/// Eigenvalues of a symmetric 2x2 matrix, ascending.
fn symmetric_2x2_eigenvalues(m: &Matrix2<f64>) -> (f64, f64) {
    let mean = 0.5 * (m[(0, 0)] + m[(1, 1)]);
    let half_diff = 0.5 * (m[(0, 0)] - m[(1, 1)]);
    let offdiag = 0.5 * (m[(0, 1)] + m[(1, 0)]);
    let radius = (half_diff * half_diff + offdiag * offdiag).sqrt();
    (mean - radius, mean + radius)
}

/// Curvature pinching diagnostics for one geometric state.
#[derive(Debug, Clone)]
pub struct PinchingReport {
    /// Whether the mean curvature is positive at every vertex.
    pub h_positive: bool,
    /// Largest epsilon with `kappa_i >= epsilon * H` everywhere; `None` when
    /// `H` changes sign or vanishes.
    pub eps_star: Option<f64>,
    /// Spread (max minus min) of the ratios `kappa_i / H` over all vertices
    /// and principal directions; `None` when `H` is not positive.
    pub ratio_spread: Option<f64>,
    /// Whether the half-pinching hypothesis holds within
    /// [`PINCHING_HALF_TOLERANCE`].
    pub satisfies_half: bool,
}

pub fn pinching_report(state: &GeometryState) -> PinchingReport {
    let h_positive = state.mean_curvature.iter().all(|&h| h > 0.0);
    if !h_positive {
        return PinchingReport {
            h_positive,
            eps_star: None,
            ratio_spread: None,
            satisfies_half: false,
        };
    }
    let mut ratio_min = f64::INFINITY;
    let mut ratio_max = f64::NEG_INFINITY;
    for v in 0..state.vertex_count() {
        let h = state.mean_curvature[v];
        for &k in state.principal_curvatures(v) {
            let ratio = k / h;
            ratio_min = ratio_min.min(ratio);
            ratio_max = ratio_max.max(ratio);
        }
    }
    PinchingReport {
        h_positive,
        eps_star: Some(ratio_min),
        ratio_spread: Some(ratio_max - ratio_min),
        satisfies_half: ratio_min >= 0.5 - PINCHING_HALF_TOLERANCE,
    }
}

/// Per-vertex values of the weight exponent `phi`.
#[derive(Debug, Clone)]
pub struct WeightField(Vec<f64>);

impl WeightField {
    pub fn constant(vertex_count: usize, value: f64) -> Self {
        WeightField(vec![value; vertex_count])
    }

    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::DegenerateElement {
                vertex: i,
                reason: format!("weight exponent {} is not finite", values[i]),
            });
        }
        Ok(WeightField(values))
    }

    /// Samples an ambient function at the vertex positions.
    pub fn sample_ambient(mesh: &Mesh, f: impl Fn(nalgebra::Point3<f64>) -> f64) -> Result<Self> {
        WeightField::from_values(
            (0..mesh.vertex_count())
                .map(|v| f(mesh.position3(v)))
                .collect(),
        )
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// The weighted vertex measure `exp(-phi) * dual_area`.
#[derive(Debug, Clone)]
pub struct WeightedMeasure {
    pub per_vertex: Vec<f64>,
    pub total: f64,
}

pub fn weighted_measure(state: &GeometryState, phi: &WeightField) -> Result<WeightedMeasure> {
    if phi.len() != state.vertex_count() {
        return Err(Error::SizeMismatch {
            expected: state.vertex_count(),
            got: phi.len(),
        });
    }
    let per_vertex: Vec<f64> = state
        .dual_area
        .iter()
        .zip(phi.values())
        .map(|(&w, &p)| (-p).exp() * w)
        .collect();
    let total = per_vertex.iter().sum();
    Ok(WeightedMeasure { per_vertex, total })
}

/// Tangential gradient of a vertex function, per vertex.
///
/// Gradients are constant on each element (edge or triangle); each vertex
/// averages its incident element gradients with element-measure weights and
/// projects the result onto its tangent plane.
pub fn vertex_gradients(
    mesh: &Mesh,
    state: &GeometryState,
    f: &[f64],
) -> Result<Vec<Vector3<f64>>> {
    let n = mesh.vertex_count();
    if f.len() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            got: f.len(),
        });
    }
    let mut grad = vec![Vector3::zeros(); n];
    let mut weight = vec![0.0; n];
    match mesh {
        Mesh::Curve(c) => {
            let v = c.vertices();
            for i in 0..n {
                let j = (i + 1) % n;
                let e = v[j] - v[i];
                let len = e.norm();
                let g = Vector3::new(e.x, e.y, 0.0) * ((f[j] - f[i]) / (len * len));
                for idx in [i, j] {
                    grad[idx] += g * len;
                    weight[idx] += len;
                }
            }
        }
        Mesh::Surface(s) => {
            let verts = s.vertices();
            for t in s.triangles() {
                let p = [verts[t[0]], verts[t[1]], verts[t[2]]];
                let cross = (p[1] - p[0]).cross(&(p[2] - p[0]));
                let twice_area = cross.norm();
                let face_normal = cross / twice_area;
                let mut g = Vector3::zeros();
                for i in 0..3 {
                    let opposite = p[(i + 2) % 3] - p[(i + 1) % 3];
                    g += face_normal.cross(&opposite) * (f[t[i]] / twice_area);
                }
                let area = 0.5 * twice_area;
                for &vi in t {
                    grad[vi] += g * area;
                    weight[vi] += area;
                }
            }
        }
    }
    for v in 0..n {
        let g = grad[v] / weight[v];
        grad[v] = g - state.normal[v] * g.dot(&state.normal[v]);
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generators;
    use approx::assert_relative_eq;

    fn circle(n: usize, r: f64) -> Mesh {
        Mesh::Curve(generators::ngon(n, r).unwrap())
    }

    fn sphere(subdiv: u32, r: f64) -> Mesh {
        Mesh::Surface(generators::icosphere(r, subdiv).unwrap())
    }

    #[test]
    fn circle_curvature_is_inverse_radius() {
        for &(n, r) in &[(64usize, 1.0f64), (256, 1.0), (128, 2.5)] {
            let state = geometry_state(&circle(n, r)).unwrap();
            let expected =
                (std::f64::consts::PI / n as f64) / (std::f64::consts::PI / n as f64).sin() / r;
            for &h in &state.mean_curvature {
                assert_relative_eq!(h, expected, max_relative = 1e-12);
            }
            assert!((state.h_max() / (1.0 / r) - 1.0).abs() < 1e-3);
            assert_relative_eq!(
                state.total_area,
                2.0 * n as f64 * r * (std::f64::consts::PI / n as f64).sin(),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn circle_normals_point_outward() {
        let state = geometry_state(&circle(64, 2.0)).unwrap();
        let mesh = circle(64, 2.0);
        for v in 0..64 {
            let p = mesh.position3(v).coords.normalize();
            assert!(state.normal[v].dot(&p) > 0.999);
        }
    }

    #[test]
    fn sphere_mean_curvature_near_two_over_radius() {
        for &r in &[1.0, 2.0] {
            let state = geometry_state(&sphere(3, r)).unwrap();
            for &h in &state.mean_curvature {
                assert!((h * r / 2.0 - 1.0).abs() < 0.01, "H*r/2 = {}", h * r / 2.0);
            }
        }
    }

    #[test]
    fn sphere_principal_curvatures_match_radius() {
        let state = geometry_state(&sphere(3, 2.0)).unwrap();
        for v in 0..state.vertex_count() {
            for &k in state.principal_curvatures(v) {
                assert!((k * 2.0 - 1.0).abs() < 0.05, "kappa*r = {}", k * 2.0);
            }
            let h = state.mean_curvature[v];
            let sum: f64 = state.principal_curvatures(v).iter().sum();
            assert_relative_eq!(sum, h, max_relative = 1e-9);
        }
    }

    #[test]
    fn curvature_trace_bound_holds() {
        for mesh in [circle(48, 1.0), sphere(2, 1.0)] {
            let state = geometry_state(&mesh).unwrap();
            let dim = state.manifold_dim() as f64;
            for v in 0..state.vertex_count() {
                let h = state.mean_curvature[v];
                assert!(state.second_fundamental_norm_sq(v) >= h * h / dim - 1e-12);
            }
        }
    }

    #[test]
    fn dual_areas_partition_total_area() {
        for mesh in [circle(100, 1.5), sphere(3, 1.0)] {
            let state = geometry_state(&mesh).unwrap();
            let sum: f64 = state.dual_area.iter().sum();
            assert_relative_eq!(sum, state.total_area, max_relative = 1e-12);
        }
    }

    #[test]
    fn scaling_covariance() {
        let base = sphere(2, 1.0);
        let state1 = geometry_state(&base).unwrap();
        for &c in &[0.5, 2.0, 3.7] {
            let scaled = base.scaled(c).unwrap();
            let state2 = geometry_state(&scaled).unwrap();
            for v in 0..state1.vertex_count() {
                assert_relative_eq!(
                    state2.mean_curvature[v],
                    state1.mean_curvature[v] / c,
                    max_relative = 1e-9
                );
                assert_relative_eq!(
                    state2.dual_area[v],
                    state1.dual_area[v] * c * c,
                    max_relative = 1e-12
                );
            }
            assert_relative_eq!(
                state2.volume,
                state1.volume * c * c * c,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn pinching_on_round_meshes() {
        let report = pinching_report(&geometry_state(&circle(64, 1.0)).unwrap());
        assert!(report.h_positive);
        assert_relative_eq!(report.eps_star.unwrap(), 1.0, max_relative = 1e-12);
        assert_eq!(report.ratio_spread, Some(0.0));
        assert!(report.satisfies_half);

        let report = pinching_report(&geometry_state(&sphere(3, 1.0)).unwrap());
        assert!(report.h_positive);
        assert!(report.eps_star.unwrap() > 0.45);
        assert!(report.ratio_spread.unwrap() < 0.1);
        assert!(report.satisfies_half);
    }

    #[test]
    fn pinching_rejects_sign_changing_curvature() {
        // A star-shaped polygon has reflex vertices with negative curvature.
        let star: Vec<nalgebra::Point2<f64>> = (0..16)
            .map(|i| {
                let angle = std::f64::consts::TAU * i as f64 / 16.0;
                let r = if i % 2 == 0 { 1.0 } else { 0.45 };
                nalgebra::Point2::new(r * angle.cos(), r * angle.sin())
            })
            .collect();
        let mesh = Mesh::Curve(CurveMesh::new(star).unwrap());
        let report = pinching_report(&geometry_state(&mesh).unwrap());
        assert!(!report.h_positive);
        assert_eq!(report.eps_star, None);
        assert!(!report.satisfies_half);
    }

    #[test]
    fn weighted_measure_reduces_to_area_for_zero_phi() {
        let mesh = sphere(2, 1.0);
        let state = geometry_state(&mesh).unwrap();
        let phi = WeightField::constant(mesh.vertex_count(), 0.0);
        let mu = weighted_measure(&state, &phi).unwrap();
        assert_relative_eq!(mu.total, state.total_area, max_relative = 1e-12);
    }

    #[test]
    fn weighted_measure_scales_pointwise() {
        let mesh = circle(32, 1.0);
        let state = geometry_state(&mesh).unwrap();
        let phi = WeightField::sample_ambient(&mesh, |p| p.x).unwrap();
        let mu = weighted_measure(&state, &phi).unwrap();
        for v in 0..mesh.vertex_count() {
            let expected = (-mesh.position3(v).x).exp() * state.dual_area[v];
            assert_relative_eq!(mu.per_vertex[v], expected, max_relative = 1e-12);
        }
    }

    #[test]
    fn gradients_of_linear_function_on_sphere() {
        let mesh = sphere(4, 1.0);
        let state = geometry_state(&mesh).unwrap();
        let f: Vec<f64> = (0..mesh.vertex_count())
            .map(|v| mesh.position3(v).z)
            .collect();
        let grads = vertex_gradients(&mesh, &state, &f).unwrap();
        for (v, g) in grads.iter().enumerate() {
            let z = mesh.position3(v).z;
            let expected_sq = (1.0 - z * z).max(0.0);
            assert!(
                (g.norm_squared() - expected_sq).abs() < 0.02,
                "|grad z|^2 = {} vs {}",
                g.norm_squared(),
                expected_sq
            );
            assert!(g.dot(&state.normal[v]).abs() < 1e-12);
        }
    }

    #[test]
    fn gradients_on_circle_match_arc_derivative() {
        let mesh = circle(128, 1.0);
        let state = geometry_state(&mesh).unwrap();
        let f: Vec<f64> = (0..128).map(|v| mesh.position3(v).y).collect();
        let grads = vertex_gradients(&mesh, &state, &f).unwrap();
        for (v, g) in grads.iter().enumerate() {
            let x = mesh.position3(v).x;
            assert!(
                (g.norm() - x.abs()).abs() < 1e-3,
                "|grad y| = {} vs |cos| = {}",
                g.norm(),
                x.abs()
            );
        }
    }
}
