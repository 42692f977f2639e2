//! Built-in test surfaces.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::SurfaceMesh;
use crate::ambient::Ambient;
use crate::error::{invalid, Error, Result};
use crate::linalg::{self, Vec4};

const ICOSAHEDRON_FACES: [[usize; 3]; 20] = [
    [0, 11, 5],
    [0, 5, 1],
    [0, 1, 7],
    [0, 7, 10],
    [0, 10, 11],
    [1, 5, 9],
    [5, 11, 4],
    [11, 10, 2],
    [10, 7, 6],
    [7, 1, 8],
    [3, 9, 4],
    [3, 4, 2],
    [3, 2, 6],
    [3, 6, 8],
    [3, 8, 9],
    [4, 9, 5],
    [2, 4, 11],
    [6, 2, 10],
    [8, 6, 7],
    [9, 8, 1],
];

/// Unit-sphere icosahedral mesh in R³, subdivided `level` times with every
/// new vertex pushed back onto the sphere.
fn unit_icosphere(level: u32) -> Result<(Vec<Vec4>, Vec<[usize; 3]>)> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let raw = [
        [-1.0, phi, 0.0],
        [1.0, phi, 0.0],
        [-1.0, -phi, 0.0],
        [1.0, -phi, 0.0],
        [0.0, -1.0, phi],
        [0.0, 1.0, phi],
        [0.0, -1.0, -phi],
        [0.0, 1.0, -phi],
        [phi, 0.0, -1.0],
        [phi, 0.0, 1.0],
        [-phi, 0.0, -1.0],
        [-phi, 0.0, 1.0],
    ];
    let verts: Vec<Vec4> = raw.iter().map(|v| linalg::normalized(&[v[0], v[1], v[2], 0.0])).collect();
    let mut mesh = SurfaceMesh::new(Ambient::Euclidean { dim: 3 }, verts, ICOSAHEDRON_FACES.to_vec())?;
    for _ in 0..level {
        mesh = mesh.refine_with(|p| linalg::normalized(&p))?;
    }
    let verts = mesh.vertices().iter().map(|v| *v.vec4()).collect();
    Ok((verts, mesh.triangles().to_vec()))
}

/// Round sphere of the given radius around `center` (defaults: origin in
/// Euclidean space, the middle of the fundamental box on a torus).
pub fn icosphere(ambient: &Ambient, radius: f64, level: u32, center: Option<Vec4>) -> Result<SurfaceMesh> {
    if !(radius > 0.0) {
        return invalid(format!("icosphere radius must be positive, got {radius}"));
    }
    let center = match (ambient, center) {
        (_, Some(c)) => c,
        (Ambient::FlatTorus { periods, .. }, None) => linalg::scale(periods, 0.5),
        (Ambient::Euclidean { .. }, None) => [0.0; 4],
        (Ambient::RoundSphere3, None) => {
            return invalid("icosphere lives in Euclidean or torus ambients; use geodesic_sphere on S³")
        }
    };
    let (verts, tris) = unit_icosphere(level)?;
    let verts = verts.iter().map(|v| linalg::axpy(&center, radius, v)).collect();
    SurfaceMesh::new(*ambient, verts, tris)
}

fn grid_triangles(k: usize) -> Vec<[usize; 3]> {
    let idx = |i: usize, j: usize| (i % k) * k + (j % k);
    let mut tris = Vec::with_capacity(2 * k * k);
    for i in 0..k {
        for j in 0..k {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            tris.push([a, b, c]);
            tris.push([a, c, d]);
        }
    }
    tris
}

/// The flat slice `{z = height}` of a 3-torus on a `k × k` grid.
pub fn flat_slice(ambient: &Ambient, k: usize, height: f64) -> Result<SurfaceMesh> {
    let Ambient::FlatTorus { periods, .. } = ambient else {
        return invalid("flat slices need a torus ambient");
    };
    if k < 3 {
        return invalid(format!("slice grid needs k ≥ 3, got {k}"));
    }
    let mut verts = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            verts.push([
                periods[0] * i as f64 / k as f64,
                periods[1] * j as f64 / k as f64,
                height,
                0.0,
            ]);
        }
    }
    SurfaceMesh::new(*ambient, verts, grid_triangles(k))
}

/// The totally geodesic 2-sphere `{x₄ = 0}` of S³.
pub fn equator(level: u32) -> Result<SurfaceMesh> {
    geodesic_sphere(PI / 2.0, level)
}

/// Geodesic sphere of radius `theta0` around the pole `e₄`.
pub fn geodesic_sphere(theta0: f64, level: u32) -> Result<SurfaceMesh> {
    if !(theta0 > 0.0 && theta0 < PI) {
        return invalid(format!("geodesic sphere radius must lie in (0, π), got {theta0}"));
    }
    let (verts, tris) = unit_icosphere(level)?;
    let (s, c) = if theta0 == PI / 2.0 { (1.0, 0.0) } else { theta0.sin_cos() };
    let verts = verts
        .iter()
        .map(|v| linalg::normalized(&[s * v[0], s * v[1], s * v[2], c]))
        .collect();
    SurfaceMesh::new(Ambient::RoundSphere3, verts, tris)
}

/// The minimal Clifford torus `(cos u, sin u, cos v, sin v)/√2` on a `k × k` grid.
pub fn clifford_torus(k: usize) -> Result<SurfaceMesh> {
    if k < 3 {
        return invalid(format!("Clifford grid needs k ≥ 3, got {k}"));
    }
    let r = 0.5f64.sqrt();
    let mut verts = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            let (su, cu) = (2.0 * PI * i as f64 / k as f64).sin_cos();
            let (sv, cv) = (2.0 * PI * j as f64 / k as f64).sin_cos();
            verts.push(linalg::normalized(&[r * cu, r * su, r * cv, r * sv]));
        }
    }
    SurfaceMesh::new(Ambient::RoundSphere3, verts, grid_triangles(k))
}

/// Normal graph perturbation `x ↦ x + amp·f(x)·n(x)`. On a torus
/// `f = sin(2πm x/L_x)·sin(2πm y/L_y)`, elsewhere `f = sin(mπ x₁)·sin(mπ x₂)`;
/// both are odd in each of the first two coordinates, which keeps the
/// perturbation orthogonal to constants and to rigid motions of the
/// symmetric test shapes.
pub fn perturb(mesh: &SurfaceMesh, amp: f64, mode: u32) -> Result<SurfaceMesh> {
    if !amp.is_finite() {
        return invalid("perturbation amplitude must be finite");
    }
    let normals = mesh.vertex_normals();
    let m = mode as f64;
    let positions: Vec<Vec4> = mesh
        .vertices()
        .iter()
        .zip(&normals)
        .map(|(v, n)| {
            let f = match mesh.ambient() {
                Ambient::FlatTorus { periods, .. } => {
                    (2.0 * PI * m * v[0] / periods[0]).sin() * (2.0 * PI * m * v[1] / periods[1]).sin()
                }
                _ => (m * PI * v[0]).sin() * (m * PI * v[1]).sin(),
            };
            let p = linalg::axpy(v.vec4(), amp * f, n);
            match mesh.ambient() {
                Ambient::RoundSphere3 => linalg::normalized(&p),
                _ => p,
            }
        })
        .collect();
    mesh.with_positions(&positions)
}

/// Generator specification, as accepted by `make-mesh`:
/// `icosphere:R,level`, `slice:k,height`, `equator:level`, `clifford:k`,
/// `geodesic-sphere:theta0,level`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum Shape {
    Icosphere { radius: f64, level: u32 },
    Slice { k: usize, height: f64 },
    Equator { level: u32 },
    Clifford { k: usize },
    GeodesicSphere { theta0: f64, level: u32 },
}

impl Shape {
    pub fn build(&self, ambient: &Ambient) -> Result<SurfaceMesh> {
        let need_sphere = |name: &str| {
            if *ambient != Ambient::RoundSphere3 {
                invalid(format!("{name} lives in sphere3, not {ambient}"))
            } else {
                Ok(())
            }
        };
        match *self {
            Shape::Icosphere { radius, level } => icosphere(ambient, radius, level, None),
            Shape::Slice { k, height } => flat_slice(ambient, k, height),
            Shape::Equator { level } => {
                need_sphere("equator")?;
                equator(level)
            }
            Shape::Clifford { k } => {
                need_sphere("clifford")?;
                clifford_torus(k)
            }
            Shape::GeodesicSphere { theta0, level } => {
                need_sphere("geodesic-sphere")?;
                geodesic_sphere(theta0, level)
            }
        }
    }

    /// Natural default shape of an ambient.
    pub fn default_for(ambient: &Ambient) -> Shape {
        match ambient {
            Ambient::Euclidean { .. } => Shape::Icosphere { radius: 1.0, level: 3 },
            Ambient::FlatTorus { .. } => Shape::Slice { k: 32, height: 0.0 },
            Ambient::RoundSphere3 => Shape::Equator { level: 3 },
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Icosphere { radius, level } => write!(f, "icosphere:{radius},{level}"),
            Shape::Slice { k, height } => write!(f, "slice:{k},{height}"),
            Shape::Equator { level } => write!(f, "equator:{level}"),
            Shape::Clifford { k } => write!(f, "clifford:{k}"),
            Shape::GeodesicSphere { theta0, level } => write!(f, "geodesic-sphere:{theta0},{level}"),
        }
    }
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let args: Vec<&str> = args.split(',').map(str::trim).filter(|a| !a.is_empty()).collect();
        let bad = || Error::InvalidArgument(format!("bad shape spec `{s}`"));
        let num = |i: usize| args.get(i).ok_or_else(bad)?.parse::<f64>().map_err(|_| bad());
        let int = |i: usize| args.get(i).ok_or_else(bad)?.parse::<u32>().map_err(|_| bad());
        Ok(match name {
            "icosphere" => Shape::Icosphere { radius: num(0)?, level: int(1)? },
            "slice" => Shape::Slice { k: int(0)? as usize, height: if args.len() > 1 { num(1)? } else { 0.0 } },
            "equator" => Shape::Equator { level: int(0)? },
            "clifford" => Shape::Clifford { k: int(0)? as usize },
            "geodesic-sphere" => Shape::GeodesicSphere { theta0: num(0)?, level: int(1)? },
            _ => return Err(bad()),
        })
    }
}
