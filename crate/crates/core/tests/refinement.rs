//! Refinement studies on the unit sphere: discretization errors must shrink
//! under icosphere subdivision, and the weighted eigenvalue must agree with
//! its mesh-converged extrapolation.

use flowspectra::mesh::{generators, geometry_state, Mesh, WeightField};
use flowspectra::spectral::{assemble, first_eigenpair};

fn icosphere(subdivisions: u32) -> Mesh {
    Mesh::Surface(generators::icosphere(1.0, subdivisions).unwrap())
}

fn unweighted_lambda(mesh: &Mesh) -> f64 {
    let state = geometry_state(mesh).unwrap();
    let phi = WeightField::constant(mesh.vertex_count(), 0.0);
    first_eigenpair(&assemble(mesh, &state, &phi).unwrap())
        .unwrap()
        .lambda
}

fn weighted_lambda(mesh: &Mesh) -> f64 {
    let state = geometry_state(mesh).unwrap();
    let phi = WeightField::sample_ambient(mesh, |p| p.z).unwrap();
    first_eigenpair(&assemble(mesh, &state, &phi).unwrap())
        .unwrap()
        .lambda
}

#[test]
fn position_laplacian_error_shrinks_under_subdivision() {
    let mut errors = Vec::new();
    for sub in [2, 3, 4] {
        let mesh = icosphere(sub);
        let state = geometry_state(&mesh).unwrap();
        let phi = WeightField::constant(mesh.vertex_count(), 0.0);
        let ops = assemble(&mesh, &state, &phi).unwrap();
        let n = mesh.vertex_count();

        let mut worst = 0.0f64;
        for axis in 0..3 {
            let coord: Vec<f64> = (0..n).map(|v| mesh.position3(v)[axis]).collect();
            let mut kx = vec![0.0; n];
            ops.stiffness.matvec(&coord, &mut kx);
            for (v, kxv) in kx.iter().enumerate() {
                let expected = state.mean_curvature[v] * state.dual_area[v] * state.normal[v][axis];
                let scale = state.mean_curvature[v] * state.dual_area[v];
                worst = worst.max((kxv - expected).abs() / scale);
            }
        }
        errors.push(worst);
    }
    assert!(
        errors[0] > errors[1] && errors[1] > errors[2],
        "errors did not shrink: {errors:?}"
    );
}

#[test]
fn enclosed_volume_converges_to_the_ball() {
    let exact = 4.0 * std::f64::consts::PI / 3.0;
    let errors: Vec<f64> = [2, 3, 4]
        .map(|sub| (geometry_state(&icosphere(sub)).unwrap().volume - exact).abs())
        .to_vec();
    assert!(
        errors[0] > errors[1] && errors[1] > errors[2],
        "errors did not shrink: {errors:?}"
    );
    assert!(
        errors[2] / exact < 0.01,
        "subdivision 4 volume off by {}",
        errors[2]
    );
}

#[test]
fn sphere_eigenvalue_error_decreases_monotonically() {
    let errors: Vec<f64> = [2, 3, 4]
        .map(|sub| (unweighted_lambda(&icosphere(sub)) - 2.0).abs())
        .to_vec();
    assert!(
        errors[0] > errors[1] && errors[1] > errors[2],
        "errors did not shrink: {errors:?}"
    );
}

/// Mesh-converged weighted eigenvalue for `phi = z` on the unit sphere:
/// Richardson extrapolation of the subdivision-4/5 values under the observed
/// second-order convergence. The linear weight concentrates the measure at
/// the south pole and widens the gap above the unweighted value 2.
const WEIGHTED_Z_LAMBDA: f64 = 2.1487656;

#[test]
fn weighted_eigenvalue_matches_refinement_extrapolation() {
    let l3 = weighted_lambda(&icosphere(3));
    let l4 = weighted_lambda(&icosphere(4));
    let l5 = weighted_lambda(&icosphere(5));

    let order = ((l3 - l4) / (l4 - l5)).ln() / 2f64.ln();
    assert!(
        (1.7..=2.3).contains(&order),
        "convergence order {order:.3} is not quadratic ({l3}, {l4}, {l5})"
    );
    let extrapolated = l5 + (l5 - l4) / 3.0;
    assert!(
        (extrapolated - WEIGHTED_Z_LAMBDA).abs() <= 1e-5,
        "extrapolation drifted: {extrapolated:.8} vs {WEIGHTED_Z_LAMBDA}"
    );
    assert!(
        (l4 - WEIGHTED_Z_LAMBDA).abs() <= 5e-4,
        "subdivision 4 value {l4:.8} too far from {WEIGHTED_Z_LAMBDA}"
    );
    assert!(l4 > 2.0, "weight failed to shift the eigenvalue: {l4}");
}
