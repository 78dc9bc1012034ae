//! Mesh file I/O: ASCII OFF for surfaces, two-column CSV for curves.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use nalgebra::{Point2, Point3};

use super::{CurveMesh, SurfaceMesh};
use crate::{Error, Result};

/// Reads an ASCII OFF file describing a closed triangle mesh.
///
/// Accepts the usual layout: an `OFF` header, a counts line
/// `vertices faces edges`, vertex lines, then face lines that must all have
/// exactly 3 indices. Blank lines and `#` comments are ignored.
pub fn read_off(path: &Path) -> Result<SurfaceMesh> {
    let text = fs::read_to_string(path)?;
    let loc = |line: usize| format!("{}:{}", path.display(), line);
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (first_no, first) = lines
        .next()
        .ok_or_else(|| Error::parse(path.display().to_string(), "empty OFF file"))?;
    let counts_line = if first == "OFF" {
        lines
            .next()
            .ok_or_else(|| Error::parse(loc(first_no), "missing counts line"))?
    } else {
        (first_no, first)
    };
    let counts: Vec<usize> = counts_line
        .1
        .split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| Error::parse(loc(counts_line.0), format!("bad count `{t}`")))
        })
        .collect::<Result<_>>()?;
    if counts.len() < 2 {
        return Err(Error::parse(
            loc(counts_line.0),
            "counts line needs `vertices faces [edges]`",
        ));
    }
    let (nv, nf) = (counts[0], counts[1]);

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (no, line) = lines.next().ok_or_else(|| {
            Error::parse(path.display().to_string(), "unexpected end of vertex list")
        })?;
        let xyz: Vec<f64> = line
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::parse(loc(no), format!("bad coordinate `{t}`")))
            })
            .collect::<Result<_>>()?;
        if xyz.len() != 3 {
            return Err(Error::parse(loc(no), "vertex line needs 3 coordinates"));
        }
        vertices.push(Point3::new(xyz[0], xyz[1], xyz[2]));
    }

    let mut triangles = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (no, line) = lines.next().ok_or_else(|| {
            Error::parse(path.display().to_string(), "unexpected end of face list")
        })?;
        let idx: Vec<usize> = line
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::parse(loc(no), format!("bad index `{t}`")))
            })
            .collect::<Result<_>>()?;
        if idx.len() != 4 || idx[0] != 3 {
            return Err(Error::parse(loc(no), "only triangular faces are supported"));
        }
        triangles.push([idx[1], idx[2], idx[3]]);
    }
    SurfaceMesh::new(vertices, triangles)
}

pub fn write_off(path: &Path, mesh: &SurfaceMesh) -> Result<()> {
    let mut out = String::new();
    out.push_str("OFF\n");
    out.push_str(&format!(
        "{} {} {}\n",
        mesh.vertex_count(),
        mesh.triangles().len(),
        mesh.edges().len()
    ));
    for p in mesh.vertices() {
        out.push_str(&format!("{:.16e} {:.16e} {:.16e}\n", p.x, p.y, p.z));
    }
    for t in mesh.triangles() {
        out.push_str(&format!("3 {} {} {}\n", t[0], t[1], t[2]));
    }
    let mut file = fs::File::create(path)?;
    file.write_all(out.as_bytes())?;
    Ok(())
}

/// Reads a closed curve from CSV with columns `x,y` (header optional),
/// vertices in counterclockwise order.
pub fn read_curve_csv(path: &Path) -> Result<CurveMesh> {
    let text = fs::read_to_string(path)?;
    let mut vertices = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let loc = format!("{}:{}", path.display(), i + 1);
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(Error::parse(loc, "curve CSV needs exactly 2 columns `x,y`"));
        }
        if i == 0 && fields[0].parse::<f64>().is_err() {
            // Header row.
            continue;
        }
        let x: f64 = fields[0]
            .parse()
            .map_err(|_| Error::parse(loc.clone(), format!("bad x value `{}`", fields[0])))?;
        let y: f64 = fields[1]
            .parse()
            .map_err(|_| Error::parse(loc, format!("bad y value `{}`", fields[1])))?;
        vertices.push(Point2::new(x, y));
    }
    CurveMesh::new(vertices)
}

pub fn write_curve_csv(path: &Path, curve: &CurveMesh) -> Result<()> {
    let mut out = String::from("x,y\n");
    for p in curve.vertices() {
        out.push_str(&format!("{:.16e},{:.16e}\n", p.x, p.y));
    }
    let mut file = fs::File::create(path)?;
    file.write_all(out.as_bytes())?;
    Ok(())
}
