//! OFF mesh files. Vertex lines carry as many coordinates as the ambient
//! chart (four on S³); faces must be triangles.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::SurfaceMesh;
use crate::ambient::Ambient;
use crate::error::{MeshError, Result};
use crate::linalg::Vec4;

pub fn load_mesh(path: impl AsRef<Path>, ambient: &Ambient) -> Result<SurfaceMesh> {
    let text = fs::read_to_string(path)?;
    parse_off(&text, ambient)
}

pub fn save_mesh(mesh: &SurfaceMesh, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, write_off(mesh))?;
    Ok(())
}

/// Serializes with 17 significant digits, enough to round-trip every f64.
pub fn write_off(mesh: &SurfaceMesh) -> String {
    let d = mesh.ambient().chart_dim();
    let mut out = String::with_capacity(64 * mesh.vertex_count() + 24 * mesh.triangle_count());
    out.push_str("OFF\n");
    let _ = writeln!(out, "{} {} 0", mesh.vertex_count(), mesh.triangle_count());
    for v in mesh.vertices() {
        let coords: Vec<String> = v.coords()[..d].iter().map(|c| format!("{c:.16e}")).collect();
        out.push_str(&coords.join(" "));
        out.push('\n');
    }
    for t in mesh.triangles() {
        let _ = writeln!(out, "3 {} {} {}", t[0], t[1], t[2]);
    }
    out
}

pub fn parse_off(text: &str, ambient: &Ambient) -> Result<SurfaceMesh> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let err = |line: usize, msg: &str| MeshError::Parse { line, msg: msg.to_string() };

    let (line, header) = lines.next().ok_or_else(|| err(1, "empty file"))?;
    // counts may follow the keyword on the same line
    let rest = match header.strip_prefix("OFF").or_else(|| header.strip_prefix("4OFF")) {
        Some(r) => r.trim().to_string(),
        None => return Err(err(line, "missing OFF header").into()),
    };
    let (line, counts) = if rest.is_empty() {
        lines.next().ok_or_else(|| err(line, "missing counts line"))?
    } else {
        (line, rest.as_str())
    };
    let counts: Vec<usize> = counts
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| err(line, "counts must be non-negative integers"))?;
    if counts.len() < 2 {
        return Err(err(line, "expected vertex and face counts").into());
    }
    let (nv, nf) = (counts[0], counts[1]);

    let d = ambient.chart_dim();
    let mut vertices: Vec<Vec4> = Vec::with_capacity(nv);
    for index in 0..nv {
        let (line, l) = lines.next().ok_or_else(|| err(line, "unexpected end of file in vertex list"))?;
        let vals: Vec<f64> = l
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| err(line, "vertex coordinates must be numbers"))?;
        if vals.len() != d {
            return Err(MeshError::WrongDimension { index, found: vals.len(), expected: d }.into());
        }
        let mut v = [0.0; 4];
        v[..d].copy_from_slice(&vals);
        vertices.push(v);
    }
    let mut triangles = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (line, l) = lines.next().ok_or_else(|| err(line, "unexpected end of file in face list"))?;
        let ints: Vec<usize> = l
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| err(line, "face entries must be non-negative integers"))?;
        if ints.len() < 4 || ints[0] != 3 {
            return Err(err(line, "only triangle faces are supported").into());
        }
        triangles.push([ints[1], ints[2], ints[3]]);
    }
    SurfaceMesh::new(*ambient, vertices, triangles)
}
