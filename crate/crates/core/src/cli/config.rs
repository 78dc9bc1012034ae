//! INI-style experiment configuration.
//!
//! A config file has sections `[geometry]`, `[flow]`, `[weight]`, and
//! `[run]` with `key = value` lines; `#` and `;` start comments. Example:
//!
//! ```ini
//! [geometry]
//! kind = icosphere
//! radius = 1.0
//! subdivisions = 4
//!
//! [flow]
//! law = mcf
//!
//! [weight]
//! phi = z / 2
//!
//! [run]
//! t_end = 0.2
//! cfl = 0.4
//! cadence = 5
//! out_dir = out
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use super::expr::Expr;
use crate::flow::SpeedLaw;
use crate::mesh::{generators, io, Mesh, WeightField};
use crate::monotonicity::QDownVariant;
use crate::{Error, Result};

/// Geometry source: a built-in generator or a mesh file.
#[derive(Debug, Clone)]
pub enum GeometrySpec {
    Ngon {
        sides: usize,
        radius: f64,
    },
    Icosphere {
        radius: f64,
        subdivisions: u32,
    },
    Ellipsoid {
        a: f64,
        b: f64,
        c: f64,
        subdivisions: u32,
    },
    PerturbedIcosphere {
        radius: f64,
        subdivisions: u32,
        amplitude: f64,
    },
    /// `.off` files load as surfaces, `.csv` files as curves.
    File(PathBuf),
}

impl GeometrySpec {
    pub fn build(&self) -> Result<Mesh> {
        match self {
            GeometrySpec::Ngon { sides, radius } => {
                Ok(Mesh::Curve(generators::ngon(*sides, *radius)?))
            }
            GeometrySpec::Icosphere {
                radius,
                subdivisions,
            } => Ok(Mesh::Surface(generators::icosphere(
                *radius,
                *subdivisions,
            )?)),
            GeometrySpec::Ellipsoid {
                a,
                b,
                c,
                subdivisions,
            } => Ok(Mesh::Surface(generators::ellipsoid(
                *a,
                *b,
                *c,
                *subdivisions,
            )?)),
            GeometrySpec::PerturbedIcosphere {
                radius,
                subdivisions,
                amplitude,
            } => Ok(Mesh::Surface(generators::perturbed_icosphere(
                *radius,
                *subdivisions,
                *amplitude,
            )?)),
            GeometrySpec::File(path) => {
                if path
                    .extension()
                    .is_some_and(|e| e.eq_ignore_ascii_case("off"))
                {
                    Ok(Mesh::Surface(io::read_off(path)?))
                } else {
                    Ok(Mesh::Curve(io::read_curve_csv(path)?))
                }
            }
        }
    }
}

/// Weight exponent source: an ambient expression (constants included) or a
/// per-vertex file with one value per line.
#[derive(Debug, Clone)]
pub enum WeightSpec {
    Expression(Expr),
    File(PathBuf),
}

impl WeightSpec {
    pub fn build(&self, mesh: &Mesh) -> Result<WeightField> {
        match self {
            WeightSpec::Expression(expr) => WeightField::sample_ambient(mesh, |p| expr.eval(&p)),
            WeightSpec::File(path) => {
                let text = std::fs::read_to_string(path)?;
                let mut values = Vec::new();
                for (i, line) in text.lines().enumerate() {
                    let line = line.trim();
                    if line.is_empty() || line.starts_with('#') {
                        continue;
                    }
                    let v: f64 = line.parse().map_err(|_| {
                        Error::parse(
                            format!("{}:{}", path.display(), i + 1),
                            format!("invalid weight value '{line}'"),
                        )
                    })?;
                    values.push(v);
                }
                if values.len() != mesh.vertex_count() {
                    return Err(Error::SizeMismatch {
                        expected: mesh.vertex_count(),
                        got: values.len(),
                    });
                }
                WeightField::from_values(values)
            }
        }
    }
}

/// A fully validated experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub geometry: GeometrySpec,
    pub law: SpeedLaw,
    pub weight: WeightSpec,
    pub t_end: f64,
    pub cfl: f64,
    pub cadence: usize,
    pub variation: bool,
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Theorem checks to embed in the evolve summary.
    pub checks: Vec<String>,
    pub q_variant: QDownVariant,
    /// Tolerance used by `verify --theorem variation`.
    pub variation_tolerance: f64,
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
        Self::from_str_named(&text, &path.display().to_string())
    }

    pub fn from_str_named(text: &str, name: &str) -> Result<ExperimentConfig> {
        let ini = Ini::parse(text, name)?;

        let geometry = parse_geometry(&ini)?;
        let law = parse_law(&ini)?;
        let weight = parse_weight(&ini)?;

        let t_end = ini.require_f64("run", "t_end")?;
        if !(t_end > 0.0) || !t_end.is_finite() {
            return Err(ini.field_error("run", "t_end", "must be positive and finite"));
        }
        let cfl = ini.get_f64("run", "cfl")?.unwrap_or(0.4);
        if !(cfl > 0.0 && cfl <= 1.0) {
            return Err(ini.field_error("run", "cfl", "must lie in (0, 1]"));
        }
        let cadence = ini.get_usize("run", "cadence")?.unwrap_or(5);
        if cadence == 0 {
            return Err(ini.field_error("run", "cadence", "must be at least 1"));
        }
        let variation = ini.get_bool("run", "variation")?.unwrap_or(false);
        let seed = ini
            .get_u64("run", "seed")?
            .unwrap_or(crate::spectral::EIGEN_SEED);
        let out_dir = PathBuf::from(
            ini.get("run", "out_dir")
                .map(str::to_owned)
                .unwrap_or_else(|| ".".into()),
        );
        let checks: Vec<String> = ini
            .get("run", "checks")
            .map(|s| {
                s.split([',', ' '])
                    .filter(|w| !w.is_empty())
                    .map(str::to_owned)
                    .collect()
            })
            .unwrap_or_default();
        for name in &checks {
            if !matches!(
                name.as_str(),
                "tt1" | "psi-phi" | "hk" | "variation" | "lemma21" | "metric-cmp"
            ) {
                return Err(ini.field_error("run", "checks", format!("unknown theorem '{name}'")));
            }
        }
        let q_variant = match ini.get("run", "q_down_variant") {
            None | Some("text") => QDownVariant::TextAsWritten,
            Some("symmetrized") => QDownVariant::Symmetrized,
            Some(other) => {
                return Err(ini.field_error(
                    "run",
                    "q_down_variant",
                    format!("expected 'text' or 'symmetrized', got '{other}'"),
                ))
            }
        };
        let variation_tolerance = ini.get_f64("run", "variation_tolerance")?.unwrap_or(0.05);
        if !(variation_tolerance > 0.0) {
            return Err(ini.field_error("run", "variation_tolerance", "must be positive"));
        }

        ini.reject_unknown_keys()?;

        Ok(ExperimentConfig {
            geometry,
            law,
            weight,
            t_end,
            cfl,
            cadence,
            variation,
            seed,
            out_dir,
            checks,
            q_variant,
            variation_tolerance,
        })
    }
}

fn parse_geometry(ini: &Ini) -> Result<GeometrySpec> {
    let kind = ini.require("geometry", "kind")?;
    match kind {
        "ngon" => Ok(GeometrySpec::Ngon {
            sides: ini.require_usize("geometry", "sides")?,
            radius: ini.get_f64("geometry", "radius")?.unwrap_or(1.0),
        }),
        "icosphere" => Ok(GeometrySpec::Icosphere {
            radius: ini.get_f64("geometry", "radius")?.unwrap_or(1.0),
            subdivisions: ini.get_u64("geometry", "subdivisions")?.unwrap_or(3) as u32,
        }),
        "ellipsoid" => Ok(GeometrySpec::Ellipsoid {
            a: ini.require_f64("geometry", "a")?,
            b: ini.require_f64("geometry", "b")?,
            c: ini.require_f64("geometry", "c")?,
            subdivisions: ini.get_u64("geometry", "subdivisions")?.unwrap_or(3) as u32,
        }),
        "perturbed-icosphere" => Ok(GeometrySpec::PerturbedIcosphere {
            radius: ini.get_f64("geometry", "radius")?.unwrap_or(1.0),
            subdivisions: ini.get_u64("geometry", "subdivisions")?.unwrap_or(3) as u32,
            amplitude: ini.get_f64("geometry", "amplitude")?.unwrap_or(0.05),
        }),
        "file" => {
            let path = PathBuf::from(ini.require("geometry", "path")?);
            if !path.exists() {
                return Err(ini.field_error(
                    "geometry",
                    "path",
                    format!("file '{}' does not exist", path.display()),
                ));
            }
            Ok(GeometrySpec::File(path))
        }
        other => Err(ini.field_error(
            "geometry",
            "kind",
            format!(
                "unknown kind '{other}' (expected ngon, icosphere, ellipsoid, \
                 perturbed-icosphere, or file)"
            ),
        )),
    }
}

fn parse_law(ini: &Ini) -> Result<SpeedLaw> {
    let law = ini.get("flow", "law").unwrap_or("mcf");
    match law {
        "mcf" => Ok(SpeedLaw::UnnormalizedMcf),
        "volume-preserving-mcf" => Ok(SpeedLaw::VolumePreservingMcf),
        "squared-volume-preserving" => Ok(SpeedLaw::SquaredVolumePreserving),
        other => {
            if let Some(k) = other.strip_prefix("power-") {
                let k: u32 = k.parse().map_err(|_| {
                    ini.field_error(
                        "flow",
                        "law",
                        format!("invalid power exponent in '{other}'"),
                    )
                })?;
                SpeedLaw::power(k).map_err(|e| ini.field_error("flow", "law", e.to_string()))
            } else {
                Err(ini.field_error(
                    "flow",
                    "law",
                    format!(
                        "unknown law '{other}' (expected mcf, volume-preserving-mcf, \
                         power-<k>, or squared-volume-preserving)"
                    ),
                ))
            }
        }
    }
}

fn parse_weight(ini: &Ini) -> Result<WeightSpec> {
    if let Some(path) = ini.get("weight", "phi_file") {
        let path = PathBuf::from(path);
        if !path.exists() {
            return Err(ini.field_error(
                "weight",
                "phi_file",
                format!("file '{}' does not exist", path.display()),
            ));
        }
        if ini.get("weight", "phi").is_some() {
            return Err(ini.field_error(
                "weight",
                "phi",
                "phi and phi_file are mutually exclusive",
            ));
        }
        return Ok(WeightSpec::File(path));
    }
    let text = ini.get("weight", "phi").unwrap_or("0");
    let expr = Expr::parse(text).map_err(|e| ini.field_error("weight", "phi", e.to_string()))?;
    Ok(WeightSpec::Expression(expr))
}

/// Minimal INI reader with line-number diagnostics and key-usage tracking.
struct Ini {
    name: String,
    /// section -> key -> (value, line number)
    sections: BTreeMap<String, BTreeMap<String, (String, usize)>>,
    used: std::cell::RefCell<Vec<(String, String)>>,
}

impl Ini {
    fn parse(text: &str, name: &str) -> Result<Ini> {
        let mut sections: BTreeMap<String, BTreeMap<String, (String, usize)>> = BTreeMap::new();
        let mut current = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = match raw.find(['#', ';']) {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let Some(section) = rest.strip_suffix(']') else {
                    return Err(Error::config(
                        format!("{name}:{line_no}"),
                        "unterminated section header",
                    ));
                };
                current = section.trim().to_string();
                sections.entry(current.clone()).or_default();
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::config(
                    format!("{name}:{line_no}"),
                    format!("expected 'key = value', got '{line}'"),
                ));
            };
            if current.is_empty() {
                return Err(Error::config(
                    format!("{name}:{line_no}"),
                    "key outside any [section]",
                ));
            }
            let key = key.trim().to_string();
            let prior = sections
                .get_mut(&current)
                .unwrap()
                .insert(key.clone(), (value.trim().to_string(), line_no));
            if let Some((_, first_line)) = prior {
                return Err(Error::config(
                    format!("{name}:{line_no}"),
                    format!("duplicate key '{key}' (first set on line {first_line})"),
                ));
            }
        }
        Ok(Ini {
            name: name.to_string(),
            sections,
            used: std::cell::RefCell::new(Vec::new()),
        })
    }

    fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.used
            .borrow_mut()
            .push((section.to_string(), key.to_string()));
        self.sections
            .get(section)
            .and_then(|s| s.get(key))
            .map(|(v, _)| v.as_str())
    }

    fn location(&self, section: &str, key: &str) -> String {
        match self.sections.get(section).and_then(|s| s.get(key)) {
            Some((_, line)) => format!("{}:{} [{section}] {key}", self.name, line),
            None => format!("{} [{section}] {key}", self.name),
        }
    }

    fn field_error(&self, section: &str, key: &str, message: impl Into<String>) -> Error {
        Error::config(self.location(section, key), message.into())
    }

    fn require(&self, section: &str, key: &str) -> Result<&str> {
        self.get(section, key)
            .ok_or_else(|| self.field_error(section, key, "missing required key"))
    }

    fn parse_with<T: std::str::FromStr>(&self, section: &str, key: &str, v: &str) -> Result<T> {
        v.parse().map_err(|_| {
            self.field_error(
                section,
                key,
                format!(
                    "invalid {} '{v}'",
                    std::any::type_name::<T>().rsplit("::").next().unwrap()
                ),
            )
        })
    }

    fn get_f64(&self, section: &str, key: &str) -> Result<Option<f64>> {
        self.get(section, key)
            .map(|v| self.parse_with(section, key, v))
            .transpose()
    }

    fn require_f64(&self, section: &str, key: &str) -> Result<f64> {
        let v = self.require(section, key)?;
        self.parse_with(section, key, v)
    }

    fn get_usize(&self, section: &str, key: &str) -> Result<Option<usize>> {
        self.get(section, key)
            .map(|v| self.parse_with(section, key, v))
            .transpose()
    }

    fn require_usize(&self, section: &str, key: &str) -> Result<usize> {
        let v = self.require(section, key)?;
        self.parse_with(section, key, v)
    }

    fn get_u64(&self, section: &str, key: &str) -> Result<Option<u64>> {
        self.get(section, key)
            .map(|v| self.parse_with(section, key, v))
            .transpose()
    }

    fn get_bool(&self, section: &str, key: &str) -> Result<Option<bool>> {
        self.get(section, key)
            .map(|v| match v {
                "true" | "yes" | "1" => Ok(true),
                "false" | "no" | "0" => Ok(false),
                other => Err(self.field_error(
                    section,
                    key,
                    format!("expected true/false, got '{other}'"),
                )),
            })
            .transpose()
    }

    /// Fails on keys that were present but never consulted, which catches
    /// typos like `t_end` under the wrong section.
    fn reject_unknown_keys(&self) -> Result<()> {
        let used = self.used.borrow();
        for (section, keys) in &self.sections {
            for (key, (_, line)) in keys {
                let consulted = used.iter().any(|(s, k)| s == section && k == key);
                if !consulted {
                    return Err(Error::config(
                        format!("{}:{} [{section}] {key}", self.name, line),
                        "unknown key",
                    ));
                }
            }
        }
        Ok(())
    }
}
