//! C ABI over the flowspectra curvature-flow library.
//!
//! Conventions:
//!
//! - Every fallible function returns [`FsStatus`]; results go through out
//!   pointers. `FS_STATUS_OK` is zero.
//! - `FsMesh` and `FsTrace` are opaque handles; release them with the
//!   matching `fs_*_free` (safe on NULL).
//! - The most recent error message is stored per thread; fetch it with
//!   [`fs_last_error`].
//! - Optional per-vertex weight arrays may be NULL, meaning a zero weight
//!   exponent. Missing optional values in outputs are NaN.
//! - Paths are NUL-terminated UTF-8.
//! - Functions taking raw pointers are `unsafe`; each states its pointer
//!   requirements under `# Safety`. NULL handles and NULL out pointers are
//!   tolerated and reported, never dereferenced.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use flowspectra::flow::{evolve, EvolveOptions, FlowTrace, SpeedLaw};
use flowspectra::mesh::{generators, geometry_state, io, pinching_report, Mesh, WeightField};
use flowspectra::monotonicity::{attach_monotone_quantities, QDownVariant};
use flowspectra::spectral::{assemble, first_eigenpair_with, EIGEN_SEED};
use flowspectra::{oracle, Error};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FsStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullArgument,
    /// An argument failed validation (sizes, ranges, enum values).
    InvalidArgument,
    /// Mesh construction or revalidation failed.
    InvalidMesh,
    /// A vertex had no usable geometry (zero dual area or normal).
    DegenerateElement,
    /// The eigensolver hit its iteration cap.
    NoConvergence,
    /// A query left the domain of a solution or trace.
    OutOfDomain,
    /// A flow step produced an invalid mesh.
    StepRejected,
    /// A file had invalid syntax.
    ParseError,
    /// The operating system reported an I/O failure.
    IoError,
    /// An internal invariant failed; the handle state is unchanged.
    Panic,
}

/// Opaque mesh handle.
pub struct FsMesh {
    inner: Mesh,
}

/// Opaque flow-trace handle.
pub struct FsTrace {
    inner: FlowTrace,
}

/// Flow speed law selector. The power exponent lives in `FsEvolveOptions`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FsSpeedLaw {
    Mcf = 0,
    VolumePreservingMcf,
    PowerFlow,
    SquaredVolumePreserving,
}

/// Evolution controls; get defaults from `fs_evolve_options_default`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FsEvolveOptions {
    /// Requested end time; must be positive.
    pub t_end: f64,
    /// Stability fraction in (0, 1].
    pub cfl: f64,
    /// Solve the eigenproblem every this many steps; 0 disables spectral
    /// sampling entirely.
    pub spectral_cadence: usize,
    /// Exponent for `FS_SPEED_LAW_POWER_FLOW`; ignored otherwise.
    pub power_k: u32,
    /// Also record the eigenvalue variation quadrature at spectral samples.
    pub record_variation: bool,
    /// Seed for the eigensolver's starting vector.
    pub seed: u64,
}

/// Global geometric quantities of a mesh.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FsGeometrySummary {
    pub vertex_count: usize,
    pub manifold_dim: usize,
    /// Perimeter for curves, surface area for surfaces.
    pub area: f64,
    /// Enclosed area for curves, enclosed volume for surfaces.
    pub volume: f64,
    pub h_min: f64,
    pub h_max: f64,
    /// Largest epsilon with `kappa_i >= epsilon * H` everywhere; NaN when the
    /// mean curvature changes sign.
    pub eps_star: f64,
    pub min_edge_length: f64,
    pub equivalent_radius: f64,
}

/// First-eigenpair scalars.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FsEigenSummary {
    pub lambda: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// One recorded trace sample; optional values are NaN when absent.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FsTraceSample {
    pub step_index: usize,
    pub t: f64,
    /// Step taken when leaving this sample; 0 at the final sample.
    pub dt: f64,
    pub area: f64,
    pub volume: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub eps_star: f64,
    pub lambda: f64,
    pub rhs_variation: f64,
    pub q_up: f64,
    pub q_down: f64,
}

/// Closed-form shrinking-sphere values.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FsSphereValues {
    pub t: f64,
    pub radius: f64,
    pub mean_curvature: f64,
    pub lambda: f64,
    /// `d(lambda)/dt` from the example identity `2 H^2 lambda / n`.
    pub lambda_rate: f64,
    pub singular_time: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn fail(e: &Error) -> FsStatus {
    set_error(e.to_string());
    match e {
        Error::InvalidMesh(_) => FsStatus::InvalidMesh,
        Error::DegenerateElement { .. } => FsStatus::DegenerateElement,
        Error::SizeMismatch { .. } | Error::Config { .. } => FsStatus::InvalidArgument,
        Error::StepRejected { .. } => FsStatus::StepRejected,
        Error::NoConvergence { .. } => FsStatus::NoConvergence,
        Error::OutOfDomain(_) => FsStatus::OutOfDomain,
        Error::Parse { .. } => FsStatus::ParseError,
        Error::Io(_) => FsStatus::IoError,
    }
}

fn null_argument(name: &str) -> FsStatus {
    set_error(format!("argument '{name}' must not be NULL"));
    FsStatus::NullArgument
}

fn guard(f: impl FnOnce() -> FsStatus) -> FsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            FsStatus::Panic
        }
    }
}

/// Copies the last error message on this thread into `buf` (NUL-terminated,
/// truncated to `capacity`). Returns the full length including the NUL;
/// call with a NULL `buf` to query the required capacity.
///
/// # Safety
///
/// `buf` must be NULL or valid for `capacity` bytes of writes.
#[no_mangle]
pub unsafe extern "C" fn fs_last_error(buf: *mut c_char, capacity: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && capacity > 0 {
            let n = bytes.len().min(capacity - 1);
            unsafe {
                std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
                *buf.add(n) = 0;
            }
        }
        bytes.len() + 1
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

unsafe fn path_arg(ptr: *const c_char, name: &str) -> Result<PathBuf, FsStatus> {
    if ptr.is_null() {
        return Err(null_argument(name));
    }
    match CStr::from_ptr(ptr).to_str() {
        Ok(s) => Ok(PathBuf::from(s)),
        Err(_) => {
            set_error(format!("argument '{name}' is not valid UTF-8"));
            Err(FsStatus::InvalidArgument)
        }
    }
}

fn emit_mesh(result: flowspectra::Result<Mesh>, out: *mut *mut FsMesh) -> FsStatus {
    if out.is_null() {
        return null_argument("out");
    }
    match result {
        Ok(mesh) => {
            unsafe { *out = Box::into_raw(Box::new(FsMesh { inner: mesh })) };
            FsStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Builds a regular polygon of `sides` vertices on a circle of `radius`.
///
/// # Safety
///
/// `out` must be NULL or valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn fs_mesh_ngon(
    sides: usize,
    radius: f64,
    out: *mut *mut FsMesh,
) -> FsStatus {
    guard(|| emit_mesh(generators::ngon(sides, radius).map(Mesh::Curve), out))
}

/// Builds a subdivided icosahedral sphere.
///
/// # Safety
///
/// `out` must be NULL or valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn fs_mesh_icosphere(
    radius: f64,
    subdivisions: u32,
    out: *mut *mut FsMesh,
) -> FsStatus {
    guard(|| {
        emit_mesh(
            generators::icosphere(radius, subdivisions).map(Mesh::Surface),
            out,
        )
    })
}

/// Builds an ellipsoid with semi-axes `a`, `b`, `c`.
///
/// # Safety
///
/// `out` must be NULL or valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn fs_mesh_ellipsoid(
    a: f64,
    b: f64,
    c: f64,
    subdivisions: u32,
    out: *mut *mut FsMesh,
) -> FsStatus {
    guard(|| {
        emit_mesh(
            generators::ellipsoid(a, b, c, subdivisions).map(Mesh::Surface),
            out,
        )
    })
}

/// Builds a convex radially perturbed sphere (relative `amplitude` <= 0.1).
///
/// # Safety
///
/// `out` must be NULL or valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn fs_mesh_perturbed_icosphere(
    radius: f64,
    subdivisions: u32,
    amplitude: f64,
    out: *mut *mut FsMesh,
) -> FsStatus {
    guard(|| {
        emit_mesh(
            generators::perturbed_icosphere(radius, subdivisions, amplitude).map(Mesh::Surface),
            out,
        )
    })
}

/// Loads a triangulated surface from an OFF file.
///
/// # Safety
///
/// `path` must be NULL or a NUL-terminated string; `out` must be NULL or
/// valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn fs_mesh_read_off(path: *const c_char, out: *mut *mut FsMesh) -> FsStatus {
    guard(|| {
        let path = match unsafe { path_arg(path, "path") } {
            Ok(p) => p,
            Err(s) => return s,
        };
        emit_mesh(io::read_off(&path).map(Mesh::Surface), out)
    })
}

/// Loads a closed curve from a two-column CSV of vertex coordinates.
///
/// # Safety
///
/// `path` must be NULL or a NUL-terminated string; `out` must be NULL or
/// valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn fs_mesh_read_curve_csv(
    path: *const c_char,
    out: *mut *mut FsMesh,
) -> FsStatus {
    guard(|| {
        let path = match unsafe { path_arg(path, "path") } {
            Ok(p) => p,
            Err(s) => return s,
        };
        emit_mesh(io::read_curve_csv(&path).map(Mesh::Curve), out)
    })
}

/// Releases a mesh handle. NULL is ignored.
///
/// # Safety
///
/// `mesh` must be NULL or an unreleased handle from this library; the handle
/// is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn fs_mesh_free(mesh: *mut FsMesh) {
    if !mesh.is_null() {
        drop(unsafe { Box::from_raw(mesh) });
    }
}

/// Number of vertices, or 0 for NULL.
///
/// # Safety
///
/// `mesh` must be NULL or a live mesh handle.
#[no_mangle]
pub unsafe extern "C" fn fs_mesh_vertex_count(mesh: *const FsMesh) -> usize {
    if mesh.is_null() {
        return 0;
    }
    unsafe { &*mesh }.inner.vertex_count()
}

/// Manifold dimension (1 curve, 2 surface), or 0 for NULL.
///
/// # Safety
///
/// `mesh` must be NULL or a live mesh handle.
#[no_mangle]
pub unsafe extern "C" fn fs_mesh_manifold_dim(mesh: *const FsMesh) -> usize {
    if mesh.is_null() {
        return 0;
    }
    unsafe { &*mesh }.inner.manifold_dim()
}

/// Copies vertex positions as xyz triples; `len` must be `3 * vertex_count`.
/// Curves report `z = 0`.
///
/// # Safety
///
/// `mesh` must be NULL or a live mesh handle; `out` must be NULL or valid
/// for `len` doubles of writes.
#[no_mangle]
pub unsafe extern "C" fn fs_mesh_positions(
    mesh: *const FsMesh,
    out: *mut f64,
    len: usize,
) -> FsStatus {
    guard(|| {
        if mesh.is_null() {
            return null_argument("mesh");
        }
        if out.is_null() {
            return null_argument("out");
        }
        let mesh = &unsafe { &*mesh }.inner;
        let n = mesh.vertex_count();
        if len != 3 * n {
            set_error(format!(
                "position buffer must hold {} doubles, got {len}",
                3 * n
            ));
            return FsStatus::InvalidArgument;
        }
        let slice = unsafe { std::slice::from_raw_parts_mut(out, len) };
        for v in 0..n {
            let p = mesh.position3(v);
            slice[3 * v] = p.x;
            slice[3 * v + 1] = p.y;
            slice[3 * v + 2] = p.z;
        }
        FsStatus::Ok
    })
}

/// Computes global geometric quantities of a mesh.
///
/// # Safety
///
/// `mesh` must be NULL or a live mesh handle; `out` must be NULL or valid
/// for one write.
#[no_mangle]
pub unsafe extern "C" fn fs_mesh_geometry(
    mesh: *const FsMesh,
    out: *mut FsGeometrySummary,
) -> FsStatus {
    guard(|| {
        if mesh.is_null() {
            return null_argument("mesh");
        }
        if out.is_null() {
            return null_argument("out");
        }
        let mesh = &unsafe { &*mesh }.inner;
        let state = match geometry_state(mesh) {
            Ok(s) => s,
            Err(e) => return fail(&e),
        };
        let pinch = pinching_report(&state);
        unsafe {
            *out = FsGeometrySummary {
                vertex_count: state.vertex_count(),
                manifold_dim: state.manifold_dim(),
                area: state.total_area,
                volume: state.volume,
                h_min: state.h_min(),
                h_max: state.h_max(),
                eps_star: pinch.eps_star.unwrap_or(f64::NAN),
                min_edge_length: state.min_edge_length,
                equivalent_radius: state.equivalent_radius(),
            };
        }
        FsStatus::Ok
    })
}

unsafe fn weight_arg(
    mesh: &Mesh,
    phi: *const f64,
    phi_len: usize,
) -> Result<WeightField, FsStatus> {
    let n = mesh.vertex_count();
    if phi.is_null() {
        return Ok(WeightField::constant(n, 0.0));
    }
    if phi_len != n {
        set_error(format!("weight array must hold {n} values, got {phi_len}"));
        return Err(FsStatus::InvalidArgument);
    }
    WeightField::from_values(std::slice::from_raw_parts(phi, phi_len).to_vec())
        .map_err(|e| fail(&e))
}

/// Solves for the first nonzero eigenpair of the weighted Laplacian.
///
/// `phi` may be NULL (zero weight exponent). When `f_out` is non-NULL it
/// receives the eigenfunction and `f_len` must equal the vertex count.
///
/// # Safety
///
/// `mesh` must be NULL or a live mesh handle; `phi` NULL or valid for
/// `phi_len` reads; `summary` NULL or valid for one write; `f_out` NULL or
/// valid for `f_len` writes.
#[no_mangle]
pub unsafe extern "C" fn fs_first_eigenpair(
    mesh: *const FsMesh,
    phi: *const f64,
    phi_len: usize,
    seed: u64,
    summary: *mut FsEigenSummary,
    f_out: *mut f64,
    f_len: usize,
) -> FsStatus {
    guard(|| {
        if mesh.is_null() {
            return null_argument("mesh");
        }
        if summary.is_null() {
            return null_argument("summary");
        }
        let mesh = &unsafe { &*mesh }.inner;
        let weight = match unsafe { weight_arg(mesh, phi, phi_len) } {
            Ok(w) => w,
            Err(s) => return s,
        };
        if !f_out.is_null() && f_len != mesh.vertex_count() {
            set_error(format!(
                "eigenfunction buffer must hold {} values, got {f_len}",
                mesh.vertex_count()
            ));
            return FsStatus::InvalidArgument;
        }
        let state = match geometry_state(mesh) {
            Ok(s) => s,
            Err(e) => return fail(&e),
        };
        let ops = match assemble(mesh, &state, &weight) {
            Ok(o) => o,
            Err(e) => return fail(&e),
        };
        let pair = match first_eigenpair_with(&ops, None, seed) {
            Ok(p) => p,
            Err(e) => return fail(&e),
        };
        unsafe {
            *summary = FsEigenSummary {
                lambda: pair.lambda,
                residual: pair.residual,
                iterations: pair.iterations,
            };
            if !f_out.is_null() {
                std::slice::from_raw_parts_mut(f_out, f_len).copy_from_slice(&pair.f);
            }
        }
        FsStatus::Ok
    })
}

/// Default evolution options for a given end time (cfl 0.4, cadence 5,
/// variation off, default seed).
#[no_mangle]
pub extern "C" fn fs_evolve_options_default(t_end: f64) -> FsEvolveOptions {
    FsEvolveOptions {
        t_end,
        cfl: 0.4,
        spectral_cadence: 5,
        power_k: 1,
        record_variation: false,
        seed: EIGEN_SEED,
    }
}

fn speed_law(law: FsSpeedLaw, power_k: u32) -> Result<SpeedLaw, FsStatus> {
    match law {
        FsSpeedLaw::Mcf => Ok(SpeedLaw::UnnormalizedMcf),
        FsSpeedLaw::VolumePreservingMcf => Ok(SpeedLaw::VolumePreservingMcf),
        FsSpeedLaw::SquaredVolumePreserving => Ok(SpeedLaw::SquaredVolumePreserving),
        FsSpeedLaw::PowerFlow => SpeedLaw::power(power_k).map_err(|e| fail(&e)),
    }
}

/// Runs a curvature flow and returns a trace handle.
///
/// For the squared-curvature volume-preserving law the exponentially
/// weighted eigenvalue quantities are attached to the samples.
///
/// # Safety
///
/// `mesh` must be NULL or a live mesh handle; `options` NULL or valid to
/// read; `phi` NULL or valid for `phi_len` reads; `out` NULL or valid for
/// one pointer write.
#[no_mangle]
pub unsafe extern "C" fn fs_evolve(
    mesh: *const FsMesh,
    law: FsSpeedLaw,
    options: *const FsEvolveOptions,
    phi: *const f64,
    phi_len: usize,
    out: *mut *mut FsTrace,
) -> FsStatus {
    guard(|| {
        if mesh.is_null() {
            return null_argument("mesh");
        }
        if options.is_null() {
            return null_argument("options");
        }
        if out.is_null() {
            return null_argument("out");
        }
        let mesh = &unsafe { &*mesh }.inner;
        let opts_in = unsafe { *options };
        let weight = match unsafe { weight_arg(mesh, phi, phi_len) } {
            Ok(w) => w,
            Err(s) => return s,
        };
        let law = match speed_law(law, opts_in.power_k) {
            Ok(l) => l,
            Err(s) => return s,
        };
        let mut opts = EvolveOptions::new(opts_in.t_end);
        opts.cfl = opts_in.cfl;
        opts.spectral_cadence = if opts_in.spectral_cadence == 0 {
            None
        } else {
            Some(opts_in.spectral_cadence)
        };
        opts.variation = opts_in.record_variation;
        opts.seed = opts_in.seed;

        let mut trace = match evolve(mesh, law, &weight, &opts) {
            Ok(t) => t,
            Err(e) => return fail(&e),
        };
        if law == SpeedLaw::SquaredVolumePreserving && opts.spectral_cadence.is_some() {
            if let Err(e) = attach_monotone_quantities(&mut trace, QDownVariant::TextAsWritten) {
                return fail(&e);
            }
        }
        unsafe { *out = Box::into_raw(Box::new(FsTrace { inner: trace })) };
        FsStatus::Ok
    })
}

/// Releases a trace handle. NULL is ignored.
///
/// # Safety
///
/// `trace` must be NULL or an unreleased handle from this library; the
/// handle is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn fs_trace_free(trace: *mut FsTrace) {
    if !trace.is_null() {
        drop(unsafe { Box::from_raw(trace) });
    }
}

/// Number of recorded samples, or 0 for NULL.
///
/// # Safety
///
/// `trace` must be NULL or a live trace handle.
#[no_mangle]
pub unsafe extern "C" fn fs_trace_len(trace: *const FsTrace) -> usize {
    if trace.is_null() {
        return 0;
    }
    unsafe { &*trace }.inner.samples.len()
}

/// Final recorded time, or NaN for NULL.
///
/// # Safety
///
/// `trace` must be NULL or a live trace handle.
#[no_mangle]
pub unsafe extern "C" fn fs_trace_t_final(trace: *const FsTrace) -> f64 {
    if trace.is_null() {
        return f64::NAN;
    }
    unsafe { &*trace }.inner.t_final()
}

/// Whether the trace stopped before the requested end time.
///
/// # Safety
///
/// `trace` must be NULL or a live trace handle.
#[no_mangle]
pub unsafe extern "C" fn fs_trace_is_truncated(trace: *const FsTrace) -> bool {
    if trace.is_null() {
        return false;
    }
    unsafe { &*trace }.inner.truncated.is_some()
}

/// Copies the truncation reason (empty string when the trace completed).
/// Same buffer protocol as `fs_last_error`.
///
/// # Safety
///
/// `trace` must be NULL or a live trace handle; `buf` must be NULL or valid
/// for `capacity` bytes of writes.
#[no_mangle]
pub unsafe extern "C" fn fs_trace_truncation_reason(
    trace: *const FsTrace,
    buf: *mut c_char,
    capacity: usize,
) -> usize {
    if trace.is_null() {
        return 0;
    }
    let msg = unsafe { &*trace }
        .inner
        .truncated
        .as_ref()
        .map(|r| r.to_string())
        .unwrap_or_default();
    let bytes = msg.as_bytes();
    if !buf.is_null() && capacity > 0 {
        let n = bytes.len().min(capacity - 1);
        unsafe {
            std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
    }
    bytes.len() + 1
}

/// Copies one sample; optional values come back as NaN.
///
/// # Safety
///
/// `trace` must be NULL or a live trace handle; `out` must be NULL or valid
/// for one write.
#[no_mangle]
pub unsafe extern "C" fn fs_trace_sample(
    trace: *const FsTrace,
    index: usize,
    out: *mut FsTraceSample,
) -> FsStatus {
    guard(|| {
        if trace.is_null() {
            return null_argument("trace");
        }
        if out.is_null() {
            return null_argument("out");
        }
        let samples = &unsafe { &*trace }.inner.samples;
        let Some(s) = samples.get(index) else {
            set_error(format!(
                "sample index {index} out of range (len {})",
                samples.len()
            ));
            return FsStatus::OutOfDomain;
        };
        let opt = |v: Option<f64>| v.unwrap_or(f64::NAN);
        unsafe {
            *out = FsTraceSample {
                step_index: s.step_index,
                t: s.t,
                dt: s.dt,
                area: s.area,
                volume: s.volume,
                h_min: s.h_min,
                h_max: s.h_max,
                eps_star: opt(s.eps_star),
                lambda: opt(s.lambda),
                rhs_variation: opt(s.rhs_variation),
                q_up: opt(s.q_up),
                q_down: opt(s.q_down),
            };
        }
        FsStatus::Ok
    })
}

/// Writes the trace in the same CSV format as the CLI.
///
/// # Safety
///
/// `trace` must be NULL or a live trace handle; `path` must be NULL or a
/// NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn fs_trace_write_csv(
    trace: *const FsTrace,
    path: *const c_char,
) -> FsStatus {
    guard(|| {
        if trace.is_null() {
            return null_argument("trace");
        }
        let path = match unsafe { path_arg(path, "path") } {
            Ok(p) => p,
            Err(s) => return s,
        };
        match unsafe { &*trace }.inner.write_csv(&path) {
            Ok(()) => FsStatus::Ok,
            Err(e) => fail(&e),
        }
    })
}

/// Clones the final mesh of a trace into a fresh handle.
///
/// # Safety
///
/// `trace` must be NULL or a live trace handle; `out` must be NULL or valid
/// for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn fs_trace_final_mesh(
    trace: *const FsTrace,
    out: *mut *mut FsMesh,
) -> FsStatus {
    guard(|| {
        if trace.is_null() {
            return null_argument("trace");
        }
        emit_mesh(Ok(unsafe { &*trace }.inner.final_mesh.clone()), out)
    })
}

/// Closed-form values for the shrinking round sphere (`dim` = 2) or circle
/// (`dim` = 1) under mean-curvature flow.
///
/// # Safety
///
/// `out` must be NULL or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn fs_oracle_sphere(
    radius0: f64,
    dim: u32,
    t: f64,
    out: *mut FsSphereValues,
) -> FsStatus {
    guard(|| {
        if out.is_null() {
            return null_argument("out");
        }
        let values = match oracle::sphere_at(radius0, dim, t) {
            Ok(v) => v,
            Err(e) => return fail(&e),
        };
        let rate = match oracle::example_rate(radius0, dim, t) {
            Ok(r) => r,
            Err(e) => return fail(&e),
        };
        unsafe {
            *out = FsSphereValues {
                t,
                radius: values.radius,
                mean_curvature: values.mean_curvature,
                lambda: values.lambda,
                lambda_rate: rate,
                singular_time: values.singular_time,
            };
        }
        FsStatus::Ok
    })
}
