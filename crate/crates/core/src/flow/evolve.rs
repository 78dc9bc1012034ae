//! The flow driver: adaptive explicit stepping with spectral observers and
//! singularity guards.

use log::{debug, info};

use super::trace::{FlowTrace, TraceSample, TruncationReason};
use super::{adaptive_dt_inner, displace, speed, SpeedField, SpeedLaw};
use crate::mesh::{geometry_state, pinching_report, GeometryState, Mesh, WeightField};
use crate::monotonicity::variation_rhs;
use crate::spectral::{assemble, first_eigenpair_with, EigenPair};
use crate::{Error, Result};

/// Default singularity ceiling: `max |H| >= 50 / initial equivalent radius`.
const CEILING_OVER_SCALE: f64 = 50.0;
/// Default floor under which an adaptive step counts as a collapse.
const DEFAULT_DT_FLOOR: f64 = 1e-10;

/// Tuning knobs for [`evolve`].
#[derive(Debug, Clone)]
pub struct EvolveOptions {
    /// Requested end time; the trace stops earlier only via a guard.
    pub t_end: f64,
    /// Stability fraction for the adaptive step, in (0, 1].
    pub cfl: f64,
    /// Solve the eigenproblem every `m` steps (`None` disables spectral
    /// sampling). The final sample is always included.
    pub spectral_cadence: Option<usize>,
    /// Also evaluate the eigenvalue variation quadrature at spectral samples.
    pub variation: bool,
    /// Override for the singularity ceiling on `max |H|`.
    pub curvature_ceiling: Option<f64>,
    /// Truncate when the adaptive step falls below this floor.
    pub dt_floor: f64,
    /// Hard cap on step count.
    pub max_steps: usize,
    /// Seed for the first eigensolve's starting vector.
    pub seed: u64,
}

impl EvolveOptions {
    pub fn new(t_end: f64) -> Self {
        EvolveOptions {
            t_end,
            cfl: 0.4,
            spectral_cadence: Some(5),
            variation: false,
            curvature_ceiling: None,
            dt_floor: DEFAULT_DT_FLOOR,
            max_steps: 5_000_000,
            seed: crate::spectral::EIGEN_SEED,
        }
    }
}

/// Everything an observer callback may inspect at one recorded sample.
pub struct ObserverContext<'a> {
    pub mesh: &'a Mesh,
    pub state: &'a GeometryState,
    pub speed: &'a SpeedField,
    pub phi: &'a WeightField,
    pub eig: Option<&'a EigenPair>,
    pub sample: &'a TraceSample,
}

/// Runs the flow without a user observer.
pub fn evolve(
    mesh: &Mesh,
    law: SpeedLaw,
    phi: &WeightField,
    opts: &EvolveOptions,
) -> Result<FlowTrace> {
    evolve_observed(mesh, law, phi, opts, |_| {})
}

/// Runs the flow, invoking `observer` at every recorded sample.
///
/// Per step: geometry state, speed field, and guards are evaluated; the
/// spectral observer solves the weighted eigenproblem at the configured
/// cadence (warm-started from the previous eigenfunction) and always at the
/// final sample. The trace ends at `t_end` or with a truncation record when
/// a guard fires.
pub fn evolve_observed(
    mesh: &Mesh,
    law: SpeedLaw,
    phi: &WeightField,
    opts: &EvolveOptions,
    mut observer: impl FnMut(&ObserverContext),
) -> Result<FlowTrace> {
    if !(opts.t_end > 0.0) || !opts.t_end.is_finite() {
        return Err(Error::OutOfDomain(format!(
            "t_end must be positive and finite, got {}",
            opts.t_end
        )));
    }
    if !(opts.cfl > 0.0 && opts.cfl <= 1.0) {
        return Err(Error::OutOfDomain(format!(
            "cfl must lie in (0, 1], got {}",
            opts.cfl
        )));
    }
    if opts.spectral_cadence == Some(0) {
        return Err(Error::OutOfDomain("spectral cadence must be >= 1".into()));
    }
    if phi.len() != mesh.vertex_count() {
        return Err(Error::SizeMismatch {
            expected: mesh.vertex_count(),
            got: phi.len(),
        });
    }

    let mut current = mesh.clone();
    let initial_state = geometry_state(&current)?;
    let ceiling = opts
        .curvature_ceiling
        .unwrap_or(CEILING_OVER_SCALE / initial_state.equivalent_radius());
    info!(
        "evolve: law={} t_end={} cfl={} ceiling={ceiling:.3}",
        law.label(),
        opts.t_end,
        opts.cfl
    );

    let mut samples: Vec<TraceSample> = Vec::new();
    let mut truncated: Option<TruncationReason> = None;
    let mut prev_f: Option<Vec<f64>> = None;
    let mut t = 0.0;
    let mut step_index = 0usize;

    loop {
        let state = if step_index == 0 {
            initial_state.clone()
        } else {
            geometry_state(&current)?
        };
        let spd = speed(&state, law);
        let h_abs_max = state.h_min().abs().max(state.h_max().abs());

        // Decide how the trace continues before recording, so the final
        // sample can carry an eigenvalue regardless of cadence.
        let at_end = t >= opts.t_end;
        let mut dt_next = 0.0;
        if !at_end && truncated.is_none() {
            if h_abs_max >= ceiling {
                truncated = Some(TruncationReason::CurvatureCeiling { h_abs_max, ceiling });
            } else if step_index >= opts.max_steps {
                truncated = Some(TruncationReason::MaxSteps {
                    steps: opts.max_steps,
                });
            } else {
                let dt = adaptive_dt_inner(&state, &spd, law, opts.cfl);
                if dt >= opts.t_end - t {
                    dt_next = opts.t_end - t;
                } else if dt < opts.dt_floor {
                    truncated = Some(TruncationReason::StepFloor {
                        dt,
                        floor: opts.dt_floor,
                    });
                } else {
                    dt_next = dt;
                }
            }
        }
        let is_last = at_end || truncated.is_some();

        let spectral_due = match opts.spectral_cadence {
            Some(m) => is_last || step_index.is_multiple_of(m),
            None => false,
        };
        let eig = if spectral_due {
            let ops = assemble(&current, &state, phi)?;
            let pair = first_eigenpair_with(&ops, prev_f.as_deref(), opts.seed)?;
            prev_f = Some(pair.f.clone());
            Some(pair)
        } else {
            None
        };
        let rhs_variation = match (&eig, opts.variation) {
            (Some(pair), true) => {
                Some(variation_rhs(&current, &state, phi, pair, law)?.rhs_general)
            }
            _ => None,
        };

        let pinch = pinching_report(&state);
        let sh_area_integral = spd
            .values
            .iter()
            .zip(&state.mean_curvature)
            .zip(&state.dual_area)
            .map(|((s, h), w)| s * h * w)
            .sum();
        let sample = TraceSample {
            step_index,
            t,
            dt: dt_next,
            area: state.total_area,
            volume: state.volume,
            h_min: state.h_min(),
            h_max: state.h_max(),
            eps_star: pinch.eps_star,
            ratio_spread: pinch.ratio_spread,
            h_mean: spd.h_mean,
            h_sq_mean: spd.h_sq_mean,
            sh_area_integral,
            max_speed: spd.max_abs(),
            lambda: eig.as_ref().map(|e| e.lambda),
            rhs_variation,
            q_up: None,
            q_down: None,
        };
        observer(&ObserverContext {
            mesh: &current,
            state: &state,
            speed: &spd,
            phi,
            eig: eig.as_ref(),
            sample: &sample,
        });
        samples.push(sample);

        if is_last {
            break;
        }
        debug!(
            "step {step_index}: t={t:.6e} dt={dt_next:.3e} max|S|={:.3e}",
            spd.max_abs()
        );
        match displace(&current, &state, &spd, dt_next) {
            Ok(next) => current = next,
            Err(e) => {
                // Record the failure; the trace keeps the healthy samples.
                if let Some(last) = samples.last_mut() {
                    last.dt = 0.0;
                }
                truncated = Some(TruncationReason::StepRejected {
                    reason: e.to_string(),
                });
                break;
            }
        }
        t = if dt_next >= opts.t_end - t {
            opts.t_end
        } else {
            t + dt_next
        };
        step_index += 1;
    }

    Ok(FlowTrace {
        law,
        samples,
        truncated,
        final_mesh: current,
    })
}

/// Largest relative violation of the metric evolution identity
/// `d(l^2)/dt = -2 S h(e, e)` over all edges.
///
/// Takes two explicit steps of size `dt`, forms the centered difference of
/// squared edge lengths about the middle mesh, and compares with the
/// curvature prediction there (speeds and shape operators averaged over the
/// edge endpoints).
pub fn metric_identity_max_error(mesh: &Mesh, law: SpeedLaw, dt: f64) -> Result<f64> {
    let state0 = geometry_state(mesh)?;
    let spd0 = speed(&state0, law);
    let mid = displace(mesh, &state0, &spd0, dt)?;
    let state1 = geometry_state(&mid)?;
    let spd1 = speed(&state1, law);
    let far = displace(&mid, &state1, &spd1, dt)?;

    let edges: Vec<[usize; 2]> = match mesh {
        Mesh::Curve(c) => (0..c.vertex_count())
            .map(|i| [i, (i + 1) % c.vertex_count()])
            .collect(),
        Mesh::Surface(s) => s.edges(),
    };

    let mut max_rel = 0.0f64;
    for [i, j] in edges {
        let l0 = (mesh.position3(j) - mesh.position3(i)).norm_squared();
        let l2 = (far.position3(j) - far.position3(i)).norm_squared();
        let lhs = (l2 - l0) / (2.0 * dt);

        let e = mid.position3(j) - mid.position3(i);
        let l1 = e.norm_squared();
        let e_hat = e / l1.sqrt();
        let h_ee =
            0.5 * (normal_curvature(&state1, i, &e_hat) + normal_curvature(&state1, j, &e_hat));
        let s_mid = 0.5 * (spd1.values[i] + spd1.values[j]);
        let rhs = -2.0 * s_mid * l1 * h_ee;

        let denom = rhs.abs().max(1e-300);
        max_rel = max_rel.max((lhs - rhs).abs() / denom);
    }
    Ok(max_rel)
}

/// Second fundamental form applied to a unit direction projected into the
/// tangent plane at vertex `v`.
fn normal_curvature(state: &GeometryState, v: usize, dir: &nalgebra::Vector3<f64>) -> f64 {
    let u = nalgebra::Vector2::new(dir.dot(&state.tangent[v][0]), dir.dot(&state.tangent[v][1]));
    (state.shape_operator[v] * u).dot(&u)
}
