//! Command implementations behind the `flowspectra` binary.
//!
//! Each command returns a process exit code: 0 success, 1 error (propagated
//! as `Err`), 2 flow truncated by a singularity guard, 3 a verification ran
//! but the checked implication failed.

use std::path::Path;

use log::info;
use serde::Serialize;

use super::config::ExperimentConfig;
use super::json;
use super::plot::{self, Panel, Series, TraceTable};
use crate::flow::{evolve_observed, EvolveOptions, FlowTrace};
use crate::mesh::{Mesh, WeightField};
use crate::monotonicity::{
    attach_monotone_quantities, check_theorem_hk, check_theorem_psi_phi, check_theorem_tt1,
    variation_check, TheoremVerdict,
};
use crate::oracle::SphereSolution;
use crate::spectral::{metric_comparison_gap, EigenPair};
use crate::{Error, Result};

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_TRUNCATED: u8 = 2;
pub const EXIT_VERIFY_FAILED: u8 = 3;

/// Relative tolerance for `verify --theorem lemma21`.
const AREA_IDENTITY_TOL: f64 = 0.05;
/// Scaling bands tested by `verify --theorem metric-cmp`.
const METRIC_CMP_BANDS: [f64; 3] = [0.05, 0.1, 0.3];

#[derive(Serialize)]
struct EigenSummary {
    lambda: f64,
    residual: f64,
    iterations: usize,
}

#[derive(Serialize)]
struct EvolveSummary {
    law: String,
    vertices: usize,
    t_end_requested: f64,
    t_final: f64,
    steps: usize,
    samples: usize,
    spectral_samples: usize,
    truncated: Option<String>,
    area_initial: f64,
    area_final: f64,
    volume_initial: f64,
    volume_final: f64,
    lambda_initial: Option<f64>,
    lambda_final: Option<f64>,
    eigen_final: Option<EigenSummary>,
    verdicts: Vec<TheoremVerdict>,
}

struct Experiment {
    config: ExperimentConfig,
    mesh: Mesh,
    phi: WeightField,
    trace: FlowTrace,
    final_eig: Option<EigenPair>,
}

/// Builds the mesh and weight from a config and runs the flow.
fn run_experiment(config: ExperimentConfig, force_variation: bool) -> Result<Experiment> {
    let mesh = config.geometry.build()?;
    let phi = config.weight.build(&mesh)?;
    let mut opts = EvolveOptions::new(config.t_end);
    opts.cfl = config.cfl;
    opts.spectral_cadence = Some(config.cadence);
    opts.variation = config.variation || force_variation;
    opts.seed = config.seed;

    let mut final_eig: Option<EigenPair> = None;
    let mut trace = evolve_observed(&mesh, config.law, &phi, &opts, |ctx| {
        if let Some(eig) = ctx.eig {
            final_eig = Some(eig.clone());
        }
    })?;
    if trace.law == crate::flow::SpeedLaw::SquaredVolumePreserving {
        attach_monotone_quantities(&mut trace, config.q_variant)?;
    }
    Ok(Experiment {
        config,
        mesh,
        phi,
        trace,
        final_eig,
    })
}

/// Runs one named theorem check against an experiment.
fn run_check(exp: &Experiment, theorem: &str) -> Result<TheoremVerdict> {
    match theorem {
        "tt1" => Ok(check_theorem_tt1(&exp.trace)),
        "hk" => Ok(check_theorem_hk(&exp.trace)),
        "psi-phi" => Ok(check_theorem_psi_phi(&exp.trace, exp.config.q_variant)?.0),
        "variation" => {
            let checks = variation_check(&exp.trace)?;
            let worst = checks.iter().map(|c| c.relative_error).fold(0.0, f64::max);
            let tol = exp.config.variation_tolerance;
            Ok(TheoremVerdict {
                theorem: "variation".into(),
                hypothesis_holds: true,
                conclusion_holds: worst <= tol,
                max_violation: (worst - tol).max(0.0),
                samples: checks.len(),
            })
        }
        "lemma21" => {
            let worst = exp.trace.area_identity_max_error()?;
            Ok(TheoremVerdict {
                theorem: "lemma21".into(),
                hypothesis_holds: true,
                conclusion_holds: worst <= AREA_IDENTITY_TOL,
                max_violation: (worst - AREA_IDENTITY_TOL).max(0.0),
                samples: exp.trace.samples.len().saturating_sub(2),
            })
        }
        "metric-cmp" => {
            let mut max_violation = 0.0f64;
            for eps in METRIC_CMP_BANDS {
                let gap = metric_comparison_gap(&exp.mesh, &exp.phi, eps)?;
                max_violation = max_violation.max(gap);
            }
            Ok(TheoremVerdict {
                theorem: "metric-cmp".into(),
                hypothesis_holds: true,
                conclusion_holds: max_violation <= 0.0,
                max_violation: max_violation.max(0.0),
                samples: METRIC_CMP_BANDS.len(),
            })
        }
        other => Err(Error::config(
            "--theorem",
            format!(
                "unknown theorem '{other}' (expected tt1, psi-phi, hk, variation, \
                 lemma21, or metric-cmp)"
            ),
        )),
    }
}

/// Runs a flow experiment and writes `trace.csv`, `summary.json`, and (when
/// the spectral observer ran) `eigenfunction.csv` into the output directory.
pub fn cmd_evolve(config_path: &Path) -> Result<u8> {
    let config = ExperimentConfig::from_file(config_path)?;
    let force_variation = config.checks.iter().any(|c| c == "variation");
    let exp = run_experiment(config, force_variation)?;

    let mut verdicts = Vec::new();
    for theorem in &exp.config.checks {
        verdicts.push(run_check(&exp, theorem)?);
    }

    let out_dir = &exp.config.out_dir;
    std::fs::create_dir_all(out_dir)?;
    let trace_path = out_dir.join("trace.csv");
    exp.trace.write_csv(&trace_path)?;

    if let Some(eig) = &exp.final_eig {
        let mut csv = String::from("vertex,f\n");
        for (v, value) in eig.f.iter().enumerate() {
            csv.push_str(&format!("{v},{value:.16e}\n"));
        }
        std::fs::write(out_dir.join("eigenfunction.csv"), csv)?;
    }

    let first = exp.trace.samples.first();
    let last = exp.trace.samples.last();
    let spectral = exp.trace.spectral_indices();
    let summary = EvolveSummary {
        law: exp.trace.law.label(),
        vertices: exp.mesh.vertex_count(),
        t_end_requested: exp.config.t_end,
        t_final: exp.trace.t_final(),
        steps: last.map(|s| s.step_index).unwrap_or(0),
        samples: exp.trace.samples.len(),
        spectral_samples: spectral.len(),
        truncated: exp.trace.truncated.as_ref().map(|r| r.to_string()),
        area_initial: first.map(|s| s.area).unwrap_or(f64::NAN),
        area_final: last.map(|s| s.area).unwrap_or(f64::NAN),
        volume_initial: first.map(|s| s.volume).unwrap_or(f64::NAN),
        volume_final: last.map(|s| s.volume).unwrap_or(f64::NAN),
        lambda_initial: spectral.first().and_then(|&i| exp.trace.samples[i].lambda),
        lambda_final: spectral.last().and_then(|&i| exp.trace.samples[i].lambda),
        eigen_final: exp.final_eig.as_ref().map(|e| EigenSummary {
            lambda: e.lambda,
            residual: e.residual,
            iterations: e.iterations,
        }),
        verdicts,
    };
    std::fs::write(
        out_dir.join("summary.json"),
        json::to_pretty_string(&summary)?,
    )?;
    info!(
        "evolve: wrote {} ({} samples, t_final={})",
        trace_path.display(),
        summary.samples,
        summary.t_final
    );

    Ok(if exp.trace.truncated.is_some() {
        EXIT_TRUNCATED
    } else {
        EXIT_OK
    })
}

/// Runs an experiment and checks one theorem, writing `verdict.json` and
/// printing it to stdout.
///
/// Exit 0 when the implication `hypothesis -> conclusion` holds (a false
/// hypothesis is vacuous truth), 3 when it fails.
pub fn cmd_verify(config_path: &Path, theorem: &str) -> Result<u8> {
    if !matches!(
        theorem,
        "tt1" | "psi-phi" | "hk" | "variation" | "lemma21" | "metric-cmp"
    ) {
        return Err(Error::config(
            "--theorem",
            format!(
                "unknown theorem '{theorem}' (expected tt1, psi-phi, hk, variation, \
                 lemma21, or metric-cmp)"
            ),
        ));
    }
    let config = ExperimentConfig::from_file(config_path)?;
    let exp = run_experiment(config, theorem == "variation")?;
    let verdict = run_check(&exp, theorem)?;

    let text = json::to_pretty_string(&verdict)?;
    std::fs::create_dir_all(&exp.config.out_dir)?;
    std::fs::write(exp.config.out_dir.join("verdict.json"), &text)?;
    print!("{text}");

    Ok(if !verdict.hypothesis_holds || verdict.conclusion_holds {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    })
}

/// Renders the standard panels from a trace file to SVG.
pub fn cmd_plot(trace_path: &Path, out_path: &Path) -> Result<u8> {
    let table = TraceTable::read(trace_path)?;
    let required = ["t", "lambda", "q_up", "q_down", "H_min", "H_max"];
    let missing: Vec<&str> = required
        .iter()
        .filter(|c| table.column_index(c).is_none())
        .copied()
        .collect();
    if !missing.is_empty() {
        return Err(Error::parse(
            trace_path.display().to_string(),
            format!("missing columns: {}", missing.join(", ")),
        ));
    }
    let col = |name: &str| table.column_index(name).unwrap();
    let t = col("t");

    let panels = vec![
        Panel {
            title: "first eigenvalue".into(),
            series: vec![Series {
                label: "lambda".into(),
                color: "#1f77b4",
                points: table.series(t, col("lambda")),
            }],
        },
        Panel {
            title: "weighted eigenvalue quantities".into(),
            series: vec![
                Series {
                    label: "Q_up".into(),
                    color: "#2ca02c",
                    points: table.series(t, col("q_up")),
                },
                Series {
                    label: "Q_down".into(),
                    color: "#d62728",
                    points: table.series(t, col("q_down")),
                },
            ],
        },
        Panel {
            title: "mean curvature range".into(),
            series: vec![
                Series {
                    label: "H_min".into(),
                    color: "#9467bd",
                    points: table.series(t, col("H_min")),
                },
                Series {
                    label: "H_max".into(),
                    color: "#ff7f0e",
                    points: table.series(t, col("H_max")),
                },
            ],
        },
    ];
    let t_last = table.rows.last().and_then(|r| r[t]);
    let marker = match (&table.truncated, t_last) {
        (Some(reason), Some(tv)) => Some((tv, reason.as_str())),
        _ => None,
    };
    let svg = plot::render(&panels, marker);
    std::fs::write(out_path, svg)?;
    info!("plot: wrote {}", out_path.display());
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct SphereOracleOutput {
    radius0: f64,
    dim: u32,
    t: f64,
    radius: f64,
    mean_curvature: f64,
    lambda: f64,
    lambda_rate: f64,
    singular_time: f64,
}

/// Prints closed-form round-sphere flow values as JSON.
pub fn cmd_oracle_sphere(radius0: f64, dim: u32, t: f64) -> Result<u8> {
    let solution = SphereSolution::new(radius0, dim)?;
    let v = solution.at(t)?;
    let out = SphereOracleOutput {
        radius0,
        dim,
        t,
        radius: v.radius,
        mean_curvature: v.mean_curvature,
        lambda: v.lambda,
        lambda_rate: crate::oracle::example_rate(radius0, dim, t)?,
        singular_time: v.singular_time,
    };
    print!("{}", json::to_pretty_string(&out)?);
    Ok(EXIT_OK)
}
