//! Exercises the C ABI the way a foreign binding would: through raw
//! pointers, status codes, and the last-error channel.

use std::ffi::{c_char, CStr};
use std::ptr;

use flowspectra_ffi::*;

fn last_error() -> String {
    unsafe {
        let needed = fs_last_error(ptr::null_mut(), 0);
        let mut buf = vec![0 as c_char; needed];
        fs_last_error(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_str().unwrap().to_owned()
    }
}

#[test]
fn mesh_lifecycle_and_geometry() {
    unsafe {
        let mut mesh: *mut FsMesh = ptr::null_mut();
        let status = fs_mesh_ngon(64, 1.0, &mut mesh);
        assert_eq!(status, FsStatus::Ok);
        assert_eq!(fs_mesh_vertex_count(mesh), 64);
        assert_eq!(fs_mesh_manifold_dim(mesh), 1);

        let mut positions = vec![0.0f64; 3 * 64];
        assert_eq!(
            fs_mesh_positions(mesh, positions.as_mut_ptr(), positions.len()),
            FsStatus::Ok
        );
        let r = (positions[0].powi(2) + positions[1].powi(2)).sqrt();
        assert!((r - 1.0).abs() < 1e-12);
        assert_eq!(positions[2], 0.0);

        let mut geom = FsGeometrySummary {
            vertex_count: 0,
            manifold_dim: 0,
            area: 0.0,
            volume: 0.0,
            h_min: 0.0,
            h_max: 0.0,
            eps_star: 0.0,
            min_edge_length: 0.0,
            equivalent_radius: 0.0,
        };
        assert_eq!(fs_mesh_geometry(mesh, &mut geom), FsStatus::Ok);
        assert_eq!(geom.vertex_count, 64);
        assert!((geom.area - 2.0 * std::f64::consts::PI).abs() < 0.02);
        assert!(geom.h_min > 0.9 && geom.h_max < 1.1);
        assert!((geom.eps_star - 1.0).abs() < 1e-9);

        fs_mesh_free(mesh);
    }
}

#[test]
fn null_and_bad_arguments_set_errors() {
    unsafe {
        let status = fs_mesh_ngon(64, 1.0, ptr::null_mut());
        assert_eq!(status, FsStatus::NullArgument);
        assert!(last_error().contains("out"));

        let mut mesh: *mut FsMesh = ptr::null_mut();
        assert_eq!(fs_mesh_ngon(2, 1.0, &mut mesh), FsStatus::InvalidMesh);
        assert!(!last_error().is_empty());

        assert_eq!(fs_mesh_vertex_count(ptr::null()), 0);
        assert!(fs_trace_t_final(ptr::null()).is_nan());

        assert_eq!(fs_mesh_ngon(64, 1.0, &mut mesh), FsStatus::Ok);
        let mut buf = [0.0f64; 7];
        assert_eq!(
            fs_mesh_positions(mesh, buf.as_mut_ptr(), buf.len()),
            FsStatus::InvalidArgument
        );
        assert!(last_error().contains("192"));
        fs_mesh_free(mesh);
    }
}

#[test]
fn eigenpair_matches_circle_closed_form() {
    unsafe {
        let mut mesh: *mut FsMesh = ptr::null_mut();
        assert_eq!(fs_mesh_ngon(128, 2.0, &mut mesh), FsStatus::Ok);

        let mut summary = FsEigenSummary {
            lambda: 0.0,
            residual: 0.0,
            iterations: 0,
        };
        let mut f = vec![0.0f64; 128];
        let status = fs_first_eigenpair(
            mesh,
            ptr::null(),
            0,
            0x5EED_0001,
            &mut summary,
            f.as_mut_ptr(),
            f.len(),
        );
        assert_eq!(status, FsStatus::Ok);
        // First eigenvalue of a circle of radius 2 is 1/4; a 128-gon sits within
        // a fraction of a percent.
        assert!((summary.lambda - 0.25).abs() < 0.25 * 5e-3);
        assert!(summary.residual <= 1e-8);
        assert!(f.iter().any(|v| v.abs() > 1e-3));

        fs_mesh_free(mesh);
    }
}

#[test]
fn evolve_trace_round_trip() {
    unsafe {
        let mut mesh: *mut FsMesh = ptr::null_mut();
        assert_eq!(fs_mesh_ngon(64, 1.0, &mut mesh), FsStatus::Ok);

        let mut opts = fs_evolve_options_default(0.05);
        opts.spectral_cadence = 4;

        let mut trace: *mut FsTrace = ptr::null_mut();
        let status = fs_evolve(mesh, FsSpeedLaw::Mcf, &opts, ptr::null(), 0, &mut trace);
        assert_eq!(status, FsStatus::Ok);

        let len = fs_trace_len(trace);
        assert!(len > 2);
        assert!(!fs_trace_is_truncated(trace));
        assert!((fs_trace_t_final(trace) - 0.05).abs() < 1e-12);

        let mut first = FsTraceSample {
            step_index: 0,
            t: 0.0,
            dt: 0.0,
            area: 0.0,
            volume: 0.0,
            h_min: 0.0,
            h_max: 0.0,
            eps_star: 0.0,
            lambda: 0.0,
            rhs_variation: 0.0,
            q_up: 0.0,
            q_down: 0.0,
        };
        assert_eq!(fs_trace_sample(trace, 0, &mut first), FsStatus::Ok);
        let mut last = first;
        assert_eq!(fs_trace_sample(trace, len - 1, &mut last), FsStatus::Ok);
        assert!(first.lambda > 0.0);
        // The circle shrinks, so curvature rises and the eigenvalue with it.
        assert!(last.area < first.area);
        assert!(last.h_min > first.h_min);
        assert!(last.rhs_variation.is_nan());

        assert_eq!(
            fs_trace_sample(trace, len, &mut last),
            FsStatus::OutOfDomain
        );

        let mut final_mesh: *mut FsMesh = ptr::null_mut();
        assert_eq!(fs_trace_final_mesh(trace, &mut final_mesh), FsStatus::Ok);
        assert_eq!(fs_mesh_vertex_count(final_mesh), 64);
        fs_mesh_free(final_mesh);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trace.csv");
        let c_path = std::ffi::CString::new(path.to_str().unwrap()).unwrap();
        assert_eq!(fs_trace_write_csv(trace, c_path.as_ptr()), FsStatus::Ok);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# flowspectra trace v1"));
        assert!(text.contains("t,dt,area,volume"));

        fs_trace_free(trace);
        fs_mesh_free(mesh);
    }
}

#[test]
fn truncated_flow_reports_reason() {
    unsafe {
        let mut mesh: *mut FsMesh = ptr::null_mut();
        assert_eq!(fs_mesh_ngon(48, 1.0, &mut mesh), FsStatus::Ok);

        let mut opts = fs_evolve_options_default(10.0);
        opts.spectral_cadence = 0;
        let mut trace: *mut FsTrace = ptr::null_mut();
        assert_eq!(
            fs_evolve(mesh, FsSpeedLaw::Mcf, &opts, ptr::null(), 0, &mut trace),
            FsStatus::Ok
        );
        assert!(fs_trace_is_truncated(trace));
        assert!(fs_trace_t_final(trace) < 0.6);

        let needed = fs_trace_truncation_reason(trace, ptr::null_mut(), 0);
        assert!(needed > 1);
        let mut buf = vec![0 as c_char; needed];
        fs_trace_truncation_reason(trace, buf.as_mut_ptr(), buf.len());
        let reason = CStr::from_ptr(buf.as_ptr()).to_str().unwrap();
        assert!(!reason.is_empty());

        fs_trace_free(trace);
        fs_mesh_free(mesh);
    }
}

#[test]
fn squared_law_attaches_weighted_quantities() {
    unsafe {
        let mut mesh: *mut FsMesh = ptr::null_mut();
        assert_eq!(fs_mesh_icosphere(1.0, 2, &mut mesh), FsStatus::Ok);

        let n = fs_mesh_vertex_count(mesh);
        let phi = vec![0.0f64; n];
        let mut opts = fs_evolve_options_default(0.01);
        opts.spectral_cadence = 5;

        let mut trace: *mut FsTrace = ptr::null_mut();
        let status = fs_evolve(
            mesh,
            FsSpeedLaw::SquaredVolumePreserving,
            &opts,
            phi.as_ptr(),
            phi.len(),
            &mut trace,
        );
        assert_eq!(status, FsStatus::Ok);

        let mut sample = FsTraceSample {
            step_index: 0,
            t: 0.0,
            dt: 0.0,
            area: 0.0,
            volume: 0.0,
            h_min: 0.0,
            h_max: 0.0,
            eps_star: 0.0,
            lambda: 0.0,
            rhs_variation: 0.0,
            q_up: 0.0,
            q_down: 0.0,
        };
        assert_eq!(fs_trace_sample(trace, 0, &mut sample), FsStatus::Ok);
        assert!(sample.q_up.is_finite());
        assert!(sample.q_down.is_finite());

        fs_trace_free(trace);
        fs_mesh_free(mesh);
    }
}

#[test]
fn sphere_oracle_values() {
    unsafe {
        let mut values = FsSphereValues {
            t: 0.0,
            radius: 0.0,
            mean_curvature: 0.0,
            lambda: 0.0,
            lambda_rate: 0.0,
            singular_time: 0.0,
        };
        assert_eq!(fs_oracle_sphere(1.0, 2, 0.0, &mut values), FsStatus::Ok);
        assert_eq!(values.radius, 1.0);
        assert_eq!(values.mean_curvature, 2.0);
        assert_eq!(values.lambda, 2.0);
        assert_eq!(values.lambda_rate, 8.0);
        assert_eq!(values.singular_time, 0.25);

        assert_eq!(
            fs_oracle_sphere(1.0, 2, 0.3, &mut values),
            FsStatus::OutOfDomain
        );
        assert!(last_error().contains("singular"));
    }
}

#[test]
fn version_is_exposed() {
    let v = unsafe { CStr::from_ptr(fs_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
