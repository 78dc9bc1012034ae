//! Flow traces: the per-step time series recorded by [`super::evolve`].

use std::fmt;
use std::io::Write as _;
use std::path::Path;

use super::SpeedLaw;
use crate::mesh::Mesh;
use crate::Result;

/// One recorded time along a flow.
///
/// Geometry fields are filled at every step; `lambda` and `rhs_variation`
/// only at spectral-observer samples; `q_up`/`q_down` only after a
/// monotone-quantity pass attaches them.
#[derive(Debug, Clone)]
pub struct TraceSample {
    pub step_index: usize,
    pub t: f64,
    /// Step size taken when leaving this sample; 0 for the final sample.
    pub dt: f64,
    pub area: f64,
    pub volume: f64,
    pub h_min: f64,
    pub h_max: f64,
    /// Pinching ratio `min kappa_i / H` when `H > 0` everywhere.
    pub eps_star: Option<f64>,
    /// Spread of the ratios `kappa_i / H` when `H > 0` everywhere.
    pub ratio_spread: Option<f64>,
    /// Area-averaged mean curvature `r(t)`.
    pub h_mean: f64,
    /// Area-averaged squared mean curvature `r~(t)`.
    pub h_sq_mean: f64,
    /// Unweighted `integral of S*H dA`, the predicted area decay rate.
    pub sh_area_integral: f64,
    pub max_speed: f64,
    pub lambda: Option<f64>,
    pub rhs_variation: Option<f64>,
    pub q_up: Option<f64>,
    pub q_down: Option<f64>,
}

/// Why a trace stopped before its requested end time.
#[derive(Debug, Clone, PartialEq)]
pub enum TruncationReason {
    /// `max |H|` reached the singularity ceiling.
    CurvatureCeiling { h_abs_max: f64, ceiling: f64 },
    /// The adaptive step fell below the floor.
    StepFloor { dt: f64, floor: f64 },
    /// A step produced an invalid mesh.
    StepRejected { reason: String },
    /// The safety cap on step count was reached.
    MaxSteps { steps: usize },
}

impl fmt::Display for TruncationReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TruncationReason::CurvatureCeiling { h_abs_max, ceiling } => {
                write!(f, "curvature ceiling: max|H| {h_abs_max:e} >= {ceiling:e}")
            }
            TruncationReason::StepFloor { dt, floor } => {
                write!(f, "step floor: dt {dt:e} < {floor:e}")
            }
            TruncationReason::StepRejected { reason } => write!(f, "step rejected: {reason}"),
            TruncationReason::MaxSteps { steps } => write!(f, "step cap reached: {steps}"),
        }
    }
}

/// Complete record of one flow run.
#[derive(Debug, Clone)]
pub struct FlowTrace {
    pub law: SpeedLaw,
    pub samples: Vec<TraceSample>,
    /// Set when the flow stopped before the requested end time.
    pub truncated: Option<TruncationReason>,
    pub final_mesh: Mesh,
}

impl FlowTrace {
    pub fn t_final(&self) -> f64 {
        self.samples.last().map(|s| s.t).unwrap_or(0.0)
    }

    /// Indices of samples carrying an eigenvalue.
    pub fn spectral_indices(&self) -> Vec<usize> {
        self.samples
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.lambda.map(|_| i))
            .collect()
    }

    /// Writes the trace as CSV with a comment header.
    ///
    /// Column layout is fixed; optional cells are left empty. All floats use
    /// 17 significant digits so identical runs produce identical bytes.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        out.push_str("# flowspectra trace v1\n");
        out.push_str(&format!("# law={}\n", self.law.label()));
        if let Some(reason) = &self.truncated {
            out.push_str(&format!("# truncated={reason}\n"));
        }
        out.push_str("t,dt,area,volume,H_min,H_max,eps_star,lambda,rhs_variation,q_up,q_down\n");
        for s in &self.samples {
            let opt = |v: Option<f64>| v.map(|x| format!("{x:.16e}")).unwrap_or_default();
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{},{},{},{}\n",
                s.t,
                s.dt,
                s.area,
                s.volume,
                s.h_min,
                s.h_max,
                opt(s.eps_star),
                opt(s.lambda),
                opt(s.rhs_variation),
                opt(s.q_up),
                opt(s.q_down),
            ));
        }
        let mut file = std::fs::File::create(path)?;
        file.write_all(out.as_bytes())?;
        Ok(())
    }

    /// Largest relative violation of the area evolution identity
    /// `d(area)/dt = -integral of S H dA` over interior samples.
    ///
    /// The left side is the centered finite difference of recorded areas; the
    /// right side is the recorded quadrature. Relative to
    /// `max(|rhs|, area(0) / duration)` so near-stationary flows do not
    /// divide by zero.
    pub fn area_identity_max_error(&self) -> Result<f64> {
        if self.samples.len() < 3 {
            return Err(crate::Error::OutOfDomain(
                "area identity needs at least three samples".into(),
            ));
        }
        let duration = self.t_final() - self.samples[0].t;
        if !(duration > 0.0) {
            return Err(crate::Error::OutOfDomain("trace has no time extent".into()));
        }
        let scale = self.samples[0].area / duration;
        let mut worst = 0.0f64;
        for w in self.samples.windows(3) {
            let h1 = w[2].t - w[1].t;
            let h2 = w[1].t - w[0].t;
            let fd = (h2 * h2 * w[2].area - h1 * h1 * w[0].area + (h1 * h1 - h2 * h2) * w[1].area)
                / (h1 * h2 * (h1 + h2));
            let rhs = -w[1].sh_area_integral;
            worst = worst.max((fd - rhs).abs() / rhs.abs().max(scale));
        }
        Ok(worst)
    }
}
