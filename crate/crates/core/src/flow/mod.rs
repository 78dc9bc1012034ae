//! Curvature-driven flows: speed laws, explicit stepping, adaptive time-step
//! control, and trace recording.
//!
//! All flows move vertices by `F <- F - dt * S * nu` with the outward normal
//! `nu` and a scalar normal speed `S` built from the mean curvature. Positive
//! `S` on a convex body therefore shrinks it.

mod evolve;
mod trace;

pub use evolve::{
    evolve, evolve_observed, metric_identity_max_error, EvolveOptions, ObserverContext,
};
pub use trace::{FlowTrace, TraceSample, TruncationReason};

use crate::mesh::{geometry_state, GeometryState, Mesh};
use crate::{Error, Result};

/// The four supported normal speed laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpeedLaw {
    /// `S = H`: unnormalized mean-curvature flow.
    UnnormalizedMcf,
    /// `S = H - r(t)` with `r` the area-averaged mean curvature; preserves
    /// enclosed volume.
    VolumePreservingMcf,
    /// `S = H^k` for a fixed integer `k >= 1`.
    PowerFlow(u32),
    /// `S = H^2 - r~(t)` with `r~` the area-averaged squared mean curvature.
    SquaredVolumePreserving,
}

impl SpeedLaw {
    /// Creates a power-law flow, validating `k >= 1`.
    pub fn power(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::OutOfDomain(
                "power flow exponent k must be at least 1".into(),
            ));
        }
        Ok(SpeedLaw::PowerFlow(k))
    }

    /// Homogeneity degree of the speed in the curvature.
    pub fn gamma(&self) -> f64 {
        match self {
            SpeedLaw::UnnormalizedMcf | SpeedLaw::VolumePreservingMcf => 1.0,
            SpeedLaw::PowerFlow(k) => *k as f64,
            SpeedLaw::SquaredVolumePreserving => 2.0,
        }
    }

    /// Stable label used in config files and trace metadata.
    pub fn label(&self) -> String {
        match self {
            SpeedLaw::UnnormalizedMcf => "mcf".into(),
            SpeedLaw::VolumePreservingMcf => "volume-preserving-mcf".into(),
            SpeedLaw::PowerFlow(k) => format!("power-{k}"),
            SpeedLaw::SquaredVolumePreserving => "squared-volume-preserving".into(),
        }
    }
}

/// Per-vertex normal speed plus the area averages used by the normalized
/// laws.
#[derive(Debug, Clone)]
pub struct SpeedField {
    pub values: Vec<f64>,
    /// Area-averaged mean curvature `r(t)` (unweighted area measure).
    pub h_mean: f64,
    /// Area-averaged squared mean curvature `r~(t)`.
    pub h_sq_mean: f64,
}

impl SpeedField {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, s| m.max(s.abs()))
    }
}

/// Evaluates the speed law on a geometric state.
///
/// The averages `r` and `r~` always use the unweighted area measure, so
/// volume preservation of the normalized laws is exact in the lumped
/// discretization regardless of the spectral weight.
pub fn speed(state: &GeometryState, law: SpeedLaw) -> SpeedField {
    let area: f64 = state.dual_area.iter().sum();
    let mut h_mean = 0.0;
    let mut h_sq_mean = 0.0;
    for (h, w) in state.mean_curvature.iter().zip(&state.dual_area) {
        h_mean += h * w;
        h_sq_mean += h * h * w;
    }
    h_mean /= area;
    h_sq_mean /= area;

    let values: Vec<f64> = state
        .mean_curvature
        .iter()
        .map(|&h| match law {
            SpeedLaw::UnnormalizedMcf => h,
            SpeedLaw::VolumePreservingMcf => h - h_mean,
            SpeedLaw::PowerFlow(k) => {
                debug_assert!(k >= 1, "power flow exponent must be >= 1");
                h.powi(k as i32)
            }
            SpeedLaw::SquaredVolumePreserving => h * h - h_sq_mean,
        })
        .collect();
    SpeedField {
        values,
        h_mean,
        h_sq_mean,
    }
}

/// Summary of one explicit Euler step.
#[derive(Debug, Clone, Copy)]
pub struct StepReport {
    pub t_before: f64,
    pub dt: f64,
    pub max_speed: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub area: f64,
    pub volume: f64,
}

/// One explicit Euler step `F <- F - dt * S * nu` from time `t_before`.
///
/// The input mesh is untouched; the report describes the pre-step state.
pub fn step_at(mesh: &Mesh, law: SpeedLaw, dt: f64, t_before: f64) -> Result<(Mesh, StepReport)> {
    let state = geometry_state(mesh)?;
    let spd = speed(&state, law);
    let next = displace(mesh, &state, &spd, dt)?;
    Ok((
        next,
        StepReport {
            t_before,
            dt,
            max_speed: spd.max_abs(),
            h_min: state.h_min(),
            h_max: state.h_max(),
            area: state.total_area,
            volume: state.volume,
        },
    ))
}

/// [`step_at`] anchored at `t_before = 0`.
pub fn step(mesh: &Mesh, law: SpeedLaw, dt: f64) -> Result<(Mesh, StepReport)> {
    step_at(mesh, law, dt, 0.0)
}

/// Applies the displacement `-dt * S * nu` and revalidates the mesh.
fn displace(mesh: &Mesh, state: &GeometryState, spd: &SpeedField, dt: f64) -> Result<Mesh> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::StepRejected {
            reason: format!("step size must be positive and finite, got {dt}"),
        });
    }
    if let Some(v) = spd.values.iter().position(|s| !s.is_finite()) {
        return Err(Error::StepRejected {
            reason: format!("speed at vertex {v} is not finite"),
        });
    }
    // A vertex moving toward a center of curvature must not pass it:
    // `dt * S * kappa >= 1` crosses the focal point and inverts the local
    // geometry even when the global mesh still validates (a circle driven
    // through its center comes out as a rotated, larger circle).
    for (v, &s) in spd.values.iter().enumerate() {
        for &kappa in state.principal_curvatures(v) {
            if dt * s * kappa >= 1.0 {
                return Err(Error::StepRejected {
                    reason: format!(
                        "vertex {v} overshoots its focal point (dt*S*kappa = {})",
                        dt * s * kappa
                    ),
                });
            }
        }
    }
    let displacement: Vec<_> = spd
        .values
        .iter()
        .zip(&state.normal)
        .map(|(&s, nu)| nu * (-dt * s))
        .collect();
    mesh.displaced(&displacement)
        .map_err(|e| Error::StepRejected {
            reason: e.to_string(),
        })
}

/// Stable explicit step size.
///
/// `dt = cfl * h_min^2 / (gamma * max(max|S| / scale, gamma * max|H|^(gamma-1)))`
/// with `scale` the equivalent radius; the second argument is a diffusivity
/// proxy for the curvature-driven smoothing. When both are zero the diffusive
/// floor `cfl * h_min^2` is returned.
pub fn adaptive_dt(state: &GeometryState, law: SpeedLaw, cfl: f64) -> Result<f64> {
    if !(cfl > 0.0 && cfl <= 1.0) {
        return Err(Error::OutOfDomain(format!(
            "cfl must lie in (0, 1], got {cfl}"
        )));
    }
    Ok(adaptive_dt_inner(state, &speed(state, law), law, cfl))
}

fn adaptive_dt_inner(state: &GeometryState, spd: &SpeedField, law: SpeedLaw, cfl: f64) -> f64 {
    let gamma = law.gamma();
    let h_abs_max = state.h_min().abs().max(state.h_max().abs());
    let diffusivity = gamma * h_abs_max.powf(gamma - 1.0);
    let rate = (spd.max_abs() / state.equivalent_radius()).max(diffusivity);
    let h2 = state.min_edge_length * state.min_edge_length;
    if rate > 0.0 {
        cfl * h2 / (gamma * rate)
    } else {
        cfl * h2
    }
}
