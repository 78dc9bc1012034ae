//! Acceptance gate: eleven numbered end-to-end criteria.
//!
//! Each test prints one `PASS criterion NN ...` or `FAIL criterion NN ...`
//! line (run with `--nocapture` to see them all). Tolerances are pinned as
//! constants next to the criteria they gate. Benchmark traces are computed
//! once and shared.

use std::sync::OnceLock;
use std::time::Instant;

use flowspectra::flow::{evolve, EvolveOptions, FlowTrace, SpeedLaw};
use flowspectra::mesh::{generators, geometry_state, Mesh, WeightField};
use flowspectra::monotonicity::{
    check_theorem_hk, check_theorem_psi_phi, check_theorem_tt1, variation_check, QDownVariant,
};
use flowspectra::oracle::SphereSolution;
use flowspectra::spectral::{assemble, first_eigenpair, metric_comparison_gap};

/// Criterion 1: eigenvalue fidelity of the sphere benchmark trace.
const SPHERE_LAMBDA_RTOL: f64 = 0.02;
/// Criterion 1: area-radius fidelity of the sphere benchmark trace.
const SPHERE_RADIUS_RTOL: f64 = 0.005;
/// Criterion 1: wall-clock budget for the sphere benchmark, seconds.
const SPHERE_BUDGET_SECS: f64 = 60.0;
/// Criterion 2: eigenvalue fidelity of the circle benchmark trace.
const CIRCLE_LAMBDA_RTOL: f64 = 0.01;
/// Criterion 2: wall-clock budget for the circle benchmark, seconds.
const CIRCLE_BUDGET_SECS: f64 = 10.0;
/// Criterion 3: variation identity error bound on the benchmark traces.
const VARIATION_RTOL: f64 = 0.05;
/// Criterion 3: variation identity error bound on the perturbed weighted run.
const VARIATION_PERTURBED_RTOL: f64 = 0.08;
/// Criterion 4: pointwise bound on `(rhs / lambda) / (2 Hbar^2 / n) - 1`.
const RATE_SHAPE_RTOL: f64 = 0.05;
/// Criterion 4: initial eigenvalue growth rate of the unit sphere.
const RATE_AT_ZERO: f64 = 8.0;
const RATE_AT_ZERO_ATOL: f64 = 0.4;
/// Criterion 7: allowed growth of the principal-ratio spread.
const RATIO_SPREAD_GROWTH: f64 = 1e-2;
/// Criterion 8: area evolution identity bound.
const AREA_IDENTITY_RTOL: f64 = 0.05;
/// Criterion 9: eigenvalue accuracy on the benchmark meshes.
const SPHERE_EIGEN_RTOL: f64 = 0.01;
const CIRCLE_EIGEN_RTOL: f64 = 0.001;
/// Criterion 9: solver contracts.
const RESIDUAL_TOL: f64 = 1e-8;
const DEFLATION_TOL: f64 = 1e-10;
const NORMALIZATION_TOL: f64 = 1e-10;
const CONSTANT_SHIFT_RTOL: f64 = 1e-12;
/// Criterion 10: scaling bands for the metric comparison bound.
const METRIC_BANDS: [f64; 3] = [0.05, 0.1, 0.3];

fn zero_phi(mesh: &Mesh) -> WeightField {
    WeightField::constant(mesh.vertex_count(), 0.0)
}

struct Timed {
    trace: FlowTrace,
    secs: f64,
}

fn timed_evolve(mesh: &Mesh, law: SpeedLaw, phi: &WeightField, opts: &EvolveOptions) -> Timed {
    let start = Instant::now();
    let trace = evolve(mesh, law, phi, opts).expect("benchmark flow must run");
    Timed {
        trace,
        secs: start.elapsed().as_secs_f64(),
    }
}

/// Benchmark trace 1: unit icosphere (subdivision 4), MCF to t = 0.2.
fn sphere_trace() -> &'static Timed {
    static TRACE: OnceLock<Timed> = OnceLock::new();
    TRACE.get_or_init(|| {
        let mesh = Mesh::Surface(generators::icosphere(1.0, 4).unwrap());
        let mut opts = EvolveOptions::new(0.2);
        opts.variation = true;
        timed_evolve(&mesh, SpeedLaw::UnnormalizedMcf, &zero_phi(&mesh), &opts)
    })
}

/// Benchmark trace 2: unit 256-gon, curve MCF to t = 0.4.
fn circle_trace() -> &'static Timed {
    static TRACE: OnceLock<Timed> = OnceLock::new();
    TRACE.get_or_init(|| {
        let mesh = Mesh::Curve(generators::ngon(256, 1.0).unwrap());
        let mut opts = EvolveOptions::new(0.4);
        opts.variation = true;
        timed_evolve(&mesh, SpeedLaw::UnnormalizedMcf, &zero_phi(&mesh), &opts)
    })
}

/// Perturbed convex icosphere with the linear weight `phi = z / 2` under MCF.
fn perturbed_weighted_trace() -> &'static FlowTrace {
    static TRACE: OnceLock<FlowTrace> = OnceLock::new();
    TRACE.get_or_init(|| {
        let mesh = Mesh::Surface(generators::perturbed_icosphere(1.0, 3, 0.05).unwrap());
        let phi = WeightField::sample_ambient(&mesh, |p| 0.5 * p.z).unwrap();
        let mut opts = EvolveOptions::new(0.1);
        opts.variation = true;
        evolve(&mesh, SpeedLaw::UnnormalizedMcf, &phi, &opts).unwrap()
    })
}

/// Perturbed convex icosphere under the squared-curvature volume-preserving
/// flow.
fn squared_vp_trace() -> &'static FlowTrace {
    static TRACE: OnceLock<FlowTrace> = OnceLock::new();
    TRACE.get_or_init(|| {
        let mesh = Mesh::Surface(generators::perturbed_icosphere(1.0, 3, 0.05).unwrap());
        let opts = EvolveOptions::new(0.05);
        evolve(
            &mesh,
            SpeedLaw::SquaredVolumePreserving,
            &zero_phi(&mesh),
            &opts,
        )
        .unwrap()
    })
}

/// Unit icosphere under the squared-curvature power flow.
fn power_trace() -> &'static FlowTrace {
    static TRACE: OnceLock<FlowTrace> = OnceLock::new();
    TRACE.get_or_init(|| {
        let mesh = Mesh::Surface(generators::icosphere(1.0, 3).unwrap());
        let opts = EvolveOptions::new(0.04);
        evolve(&mesh, SpeedLaw::PowerFlow(2), &zero_phi(&mesh), &opts).unwrap()
    })
}

fn ensure(failures: &mut Vec<String>, ok: bool, msg: String) {
    if !ok {
        failures.push(msg);
    }
}

fn report(name: &str, failures: Vec<String>) {
    if failures.is_empty() {
        println!("PASS {name}");
    } else {
        println!("FAIL {name}");
        for f in &failures {
            println!("  {f}");
        }
        panic!("{name}: {} check(s) failed", failures.len());
    }
}

#[test]
fn criterion_01_sphere_trace_fidelity() {
    let mut failures = Vec::new();
    let bench = sphere_trace();
    let exact = SphereSolution::new(1.0, 2).unwrap();

    ensure(
        &mut failures,
        bench.trace.truncated.is_none(),
        format!("trace truncated: {:?}", bench.trace.truncated),
    );
    ensure(
        &mut failures,
        (bench.trace.t_final() - 0.2).abs() < 1e-12,
        format!("trace stopped at t = {}", bench.trace.t_final()),
    );

    let mut worst_radius = 0.0f64;
    let mut worst_lambda = 0.0f64;
    for s in &bench.trace.samples {
        let r_exact = exact.radius(s.t).unwrap();
        let r_area = (s.area / (4.0 * std::f64::consts::PI)).sqrt();
        worst_radius = worst_radius.max((r_area / r_exact - 1.0).abs());
        if let Some(lambda) = s.lambda {
            worst_lambda = worst_lambda.max((lambda / exact.lambda(s.t).unwrap() - 1.0).abs());
        }
    }
    ensure(
        &mut failures,
        worst_radius <= SPHERE_RADIUS_RTOL,
        format!("area radius off by {worst_radius:.2e} (tol {SPHERE_RADIUS_RTOL:.0e})"),
    );
    ensure(
        &mut failures,
        worst_lambda <= SPHERE_LAMBDA_RTOL,
        format!("eigenvalue off by {worst_lambda:.2e} (tol {SPHERE_LAMBDA_RTOL:.0e})"),
    );
    ensure(
        &mut failures,
        bench.secs <= SPHERE_BUDGET_SECS,
        format!(
            "runtime {:.1} s over budget {SPHERE_BUDGET_SECS} s",
            bench.secs
        ),
    );
    report(
        &format!(
            "criterion 01 sphere trace fidelity (lambda {worst_lambda:.2e}, radius \
             {worst_radius:.2e}, {:.1} s)",
            bench.secs
        ),
        failures,
    );
}

#[test]
fn criterion_02_circle_trace_fidelity() {
    let mut failures = Vec::new();
    let bench = circle_trace();
    let exact = SphereSolution::new(1.0, 1).unwrap();

    ensure(
        &mut failures,
        bench.trace.truncated.is_none() && (bench.trace.t_final() - 0.4).abs() < 1e-12,
        format!("trace stopped early at t = {}", bench.trace.t_final()),
    );
    let mut worst_lambda = 0.0f64;
    for s in &bench.trace.samples {
        if let Some(lambda) = s.lambda {
            worst_lambda = worst_lambda.max((lambda / exact.lambda(s.t).unwrap() - 1.0).abs());
        }
    }
    ensure(
        &mut failures,
        worst_lambda <= CIRCLE_LAMBDA_RTOL,
        format!("eigenvalue off by {worst_lambda:.2e} (tol {CIRCLE_LAMBDA_RTOL:.0e})"),
    );
    ensure(
        &mut failures,
        bench.secs <= CIRCLE_BUDGET_SECS,
        format!(
            "runtime {:.1} s over budget {CIRCLE_BUDGET_SECS} s",
            bench.secs
        ),
    );
    report(
        &format!(
            "criterion 02 circle trace fidelity (lambda {worst_lambda:.2e}, {:.1} s)",
            bench.secs
        ),
        failures,
    );
}

#[test]
fn criterion_03_variation_identity() {
    let mut failures = Vec::new();
    let mut worsts = Vec::new();
    for (label, trace, tol) in [
        ("sphere", &sphere_trace().trace, VARIATION_RTOL),
        ("circle", &circle_trace().trace, VARIATION_RTOL),
        (
            "perturbed+weight",
            perturbed_weighted_trace(),
            VARIATION_PERTURBED_RTOL,
        ),
    ] {
        let checks = variation_check(trace).unwrap();
        ensure(
            &mut failures,
            checks.len() >= 3,
            format!("{label}: only {} interior spectral samples", checks.len()),
        );
        let worst = checks.iter().map(|c| c.relative_error).fold(0.0, f64::max);
        ensure(
            &mut failures,
            worst <= tol,
            format!("{label}: variation error {worst:.2e} (tol {tol:.0e})"),
        );
        worsts.push(format!("{label} {worst:.2e}"));
    }
    report(
        &format!("criterion 03 variation identity ({})", worsts.join(", ")),
        failures,
    );
}

#[test]
fn criterion_04_sphere_rate_identity() {
    let mut failures = Vec::new();
    let trace = &sphere_trace().trace;

    let mut worst_shape = 0.0f64;
    let mut rate_at_zero = f64::NAN;
    for s in &trace.samples {
        let (Some(lambda), Some(rhs)) = (s.lambda, s.rhs_variation) else {
            continue;
        };
        // For the shrinking n-sphere, d(lambda)/dt / lambda = 2 Hbar^2 / n.
        let predicted = 2.0 * s.h_mean * s.h_mean / 2.0;
        worst_shape = worst_shape.max((rhs / lambda / predicted - 1.0).abs());
        if s.t == 0.0 {
            rate_at_zero = rhs;
        }
    }
    ensure(
        &mut failures,
        worst_shape <= RATE_SHAPE_RTOL,
        format!("rate shape off by {worst_shape:.2e} (tol {RATE_SHAPE_RTOL:.0e})"),
    );
    ensure(
        &mut failures,
        (rate_at_zero - RATE_AT_ZERO).abs() <= RATE_AT_ZERO_ATOL,
        format!("initial rate {rate_at_zero:.3} not within {RATE_AT_ZERO} +- {RATE_AT_ZERO_ATOL}"),
    );
    report(
        &format!(
            "criterion 04 sphere rate identity (shape {worst_shape:.2e}, rate(0) \
             {rate_at_zero:.3})"
        ),
        failures,
    );
}

#[test]
fn criterion_05_mcf_eigenvalue_monotonicity() {
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    for (label, trace) in [
        ("sphere", &sphere_trace().trace),
        ("circle", &circle_trace().trace),
    ] {
        let verdict = check_theorem_tt1(trace);
        ensure(
            &mut failures,
            verdict.hypothesis_holds,
            format!("{label}: pinching hypothesis does not hold"),
        );
        ensure(
            &mut failures,
            verdict.conclusion_holds,
            format!(
                "{label}: eigenvalue monotonicity violated by {:.2e}",
                verdict.max_violation
            ),
        );
        notes.push(format!("{label} violation {:.1e}", verdict.max_violation));
    }
    report(
        &format!(
            "criterion 05 mcf eigenvalue monotonicity ({})",
            notes.join(", ")
        ),
        failures,
    );
}

#[test]
fn criterion_06_weighted_monotone_quantities() {
    let mut failures = Vec::new();
    let trace = squared_vp_trace();
    let (verdict, series) = check_theorem_psi_phi(trace, QDownVariant::TextAsWritten).unwrap();

    ensure(
        &mut failures,
        verdict.hypothesis_holds,
        "flow or initial curvature does not admit the construction".into(),
    );
    ensure(
        &mut failures,
        verdict.conclusion_holds,
        format!("monotonicity violated by {:.2e}", verdict.max_violation),
    );

    // Independent envelope verification straight from the recorded samples.
    let c = series.constants;
    ensure(
        &mut failures,
        c.c1 > 0.0,
        format!("c1 = {} not positive", c.c1),
    );
    ensure(
        &mut failures,
        c.c2 >= 0.0,
        format!("c2 = {} negative", c.c2),
    );
    for s in &trace.samples {
        let lower = c.c1 * (-c.c2 * s.t).exp();
        ensure(
            &mut failures,
            lower <= s.h_min * (1.0 + 1e-12),
            format!(
                "lower envelope {lower} exceeds H_min {} at t = {}",
                s.h_min, s.t
            ),
        );
        ensure(
            &mut failures,
            s.h_max <= c.c3 * (1.0 + 1e-12),
            format!("H_max {} exceeds c3 {} at t = {}", s.h_max, c.c3, s.t),
        );
    }
    report(
        &format!(
            "criterion 06 weighted monotone quantities (violation {:.1e}, c1 {:.3}, c2 \
             {:.3}, c3 {:.3})",
            verdict.max_violation, c.c1, c.c2, c.c3
        ),
        failures,
    );
}

#[test]
fn criterion_07_power_flow_pinching_persistence() {
    let mut failures = Vec::new();
    let trace = power_trace();
    let verdict = check_theorem_hk(trace);

    ensure(
        &mut failures,
        verdict.hypothesis_holds,
        "initial curvature not positive under the power flow".into(),
    );
    ensure(
        &mut failures,
        verdict.conclusion_holds,
        format!("persistence violated by {:.2e}", verdict.max_violation),
    );

    // Direct spread check, independent of the verdict plumbing.
    let initial = trace.samples[0].ratio_spread.expect("convex start");
    let mut worst = 0.0f64;
    for s in &trace.samples {
        let spread = s.ratio_spread.expect("curvature stays positive");
        worst = worst.max(spread);
        ensure(
            &mut failures,
            spread <= initial + RATIO_SPREAD_GROWTH,
            format!(
                "ratio spread {spread:.4} at t = {} exceeds initial {initial:.4} + \
                 {RATIO_SPREAD_GROWTH}",
                s.t
            ),
        );
    }
    report(
        &format!(
            "criterion 07 power flow pinching persistence (spread {initial:.4} -> {worst:.4})"
        ),
        failures,
    );
}

#[test]
fn criterion_08_area_evolution_identity() {
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    for (label, trace) in [
        ("sphere", &sphere_trace().trace),
        ("circle", &circle_trace().trace),
    ] {
        let worst = trace.area_identity_max_error().unwrap();
        ensure(
            &mut failures,
            worst <= AREA_IDENTITY_RTOL,
            format!("{label}: area identity error {worst:.2e} (tol {AREA_IDENTITY_RTOL:.0e})"),
        );
        notes.push(format!("{label} {worst:.2e}"));
    }
    report(
        &format!(
            "criterion 08 area evolution identity ({})",
            notes.join(", ")
        ),
        failures,
    );
}

#[test]
fn criterion_09_spectral_correctness() {
    let mut failures = Vec::new();

    let sphere = Mesh::Surface(generators::icosphere(1.0, 4).unwrap());
    let circle = Mesh::Curve(generators::ngon(256, 1.0).unwrap());
    let mut notes = Vec::new();
    for (label, mesh, exact, tol) in [
        ("sphere", &sphere, 2.0, SPHERE_EIGEN_RTOL),
        ("circle", &circle, 1.0, CIRCLE_EIGEN_RTOL),
    ] {
        let state = geometry_state(mesh).unwrap();
        let phi = zero_phi(mesh);
        let ops = assemble(mesh, &state, &phi).unwrap();
        let eig = first_eigenpair(&ops).unwrap();

        let err = (eig.lambda / exact - 1.0).abs();
        ensure(
            &mut failures,
            err <= tol,
            format!(
                "{label}: eigenvalue {} off by {err:.2e} (tol {tol:.0e})",
                eig.lambda
            ),
        );
        ensure(
            &mut failures,
            eig.residual <= RESIDUAL_TOL,
            format!(
                "{label}: residual {:.2e} (tol {RESIDUAL_TOL:.0e})",
                eig.residual
            ),
        );
        let deflation: f64 = eig.f.iter().zip(&ops.mass).map(|(f, m)| f * m).sum();
        ensure(
            &mut failures,
            deflation.abs() <= DEFLATION_TOL,
            format!("{label}: f'M1 = {deflation:.2e} (tol {DEFLATION_TOL:.0e})"),
        );
        let norm: f64 = eig.f.iter().zip(&ops.mass).map(|(f, m)| f * f * m).sum();
        ensure(
            &mut failures,
            (norm - 1.0).abs() <= NORMALIZATION_TOL,
            format!("{label}: f'Mf = {norm} (tol 1 +- {NORMALIZATION_TOL:.0e})"),
        );

        // A constant weight rescales both operators identically, so the
        // eigenvalue must not move.
        let shifted = WeightField::constant(mesh.vertex_count(), 0.7);
        let ops_shifted = assemble(mesh, &state, &shifted).unwrap();
        let eig_shifted = first_eigenpair(&ops_shifted).unwrap();
        let drift = (eig_shifted.lambda / eig.lambda - 1.0).abs();
        ensure(
            &mut failures,
            drift <= CONSTANT_SHIFT_RTOL,
            format!("{label}: constant weight moved lambda by {drift:.2e}"),
        );
        notes.push(format!("{label} lambda {:.6}", eig.lambda));
    }
    report(
        &format!("criterion 09 spectral correctness ({})", notes.join(", ")),
        failures,
    );
}

#[test]
fn criterion_10_metric_comparison_bound() {
    let mut failures = Vec::new();
    let sphere = Mesh::Surface(generators::icosphere(1.0, 4).unwrap());
    let circle = Mesh::Curve(generators::ngon(256, 1.0).unwrap());
    for (label, mesh) in [("sphere", &sphere), ("circle", &circle)] {
        let phi = zero_phi(mesh);
        for eps in METRIC_BANDS {
            let gap = metric_comparison_gap(mesh, &phi, eps).unwrap();
            ensure(
                &mut failures,
                gap <= 0.0,
                format!("{label}: bound violated by {gap:.2e} at eps = {eps}"),
            );
        }
    }
    report("criterion 10 metric comparison bound", failures);
}

#[test]
fn criterion_11_byte_identical_reruns() {
    let mut failures = Vec::new();
    let dir = tempfile::tempdir().unwrap();

    let configs = [
        (
            "sphere",
            "[geometry]\nkind = icosphere\nradius = 1.0\nsubdivisions = 4\n\n\
             [flow]\nlaw = mcf\n\n[run]\nt_end = 0.2\nvariation = true\n",
        ),
        (
            "circle",
            "[geometry]\nkind = ngon\nsides = 256\nradius = 1.0\n\n\
             [flow]\nlaw = mcf\n\n[run]\nt_end = 0.4\nvariation = true\n",
        ),
    ];
    for (label, body) in configs {
        let mut traces = Vec::new();
        for run in 0..2 {
            let out = dir.path().join(format!("{label}-{run}"));
            let config_path = dir.path().join(format!("{label}-{run}.ini"));
            std::fs::write(&config_path, format!("{body}out_dir = {}\n", out.display())).unwrap();
            let status = std::process::Command::new(env!("CARGO_BIN_EXE_flowspectra"))
                .arg("evolve")
                .arg(&config_path)
                .status()
                .unwrap();
            ensure(
                &mut failures,
                status.success(),
                format!("{label} run {run}: exit {status}"),
            );
            traces.push(std::fs::read(out.join("trace.csv")).unwrap_or_default());
        }
        ensure(
            &mut failures,
            !traces[0].is_empty() && traces[0] == traces[1],
            format!(
                "{label}: reruns differ ({} vs {} bytes)",
                traces[0].len(),
                traces[1].len()
            ),
        );
    }
    report("criterion 11 byte-identical reruns", failures);
}
