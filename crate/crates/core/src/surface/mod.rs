//! Closed oriented triangle meshes carrying a surface in one of the model
//! ambients, with area, curvature and quadrature on top.
//!
//! Torus meshes store each vertex in the fundamental domain and, per
//! triangle, the integer lattice offsets that unwrap its corners into one
//! copy of the universal cover. All triangle geometry is computed there.

mod curvature;
mod generate;
mod off;
mod quadrature;

pub use curvature::{mean_curvature, CurvatureField};
pub use generate::{clifford_torus, equator, flat_slice, geodesic_sphere, icosphere, perturb, Shape};
pub use off::{load_mesh, parse_off, save_mesh, write_off};
pub use quadrature::{quadrature_points, QuadratureSet};

use std::collections::HashMap;

use rayon::prelude::*;

use crate::ambient::{Ambient, Isometry, Point};
use crate::error::{invalid, MeshError, Result};
use crate::linalg::{self, Vec4};

const MIN_TRIANGLE_AREA: f64 = 1e-14;
const SPHERE_NORM_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceMesh {
    ambient: Ambient,
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    /// Torus only: per triangle, per corner, lattice offsets in units of the
    /// periods. Corner 0 is never shifted.
    lifts: Vec<[[i32; 3]; 3]>,
}

impl SurfaceMesh {
    /// Validates and builds a mesh. Torus coordinates are wrapped into the
    /// fundamental domain first.
    pub fn new(ambient: Ambient, vertices: Vec<Vec4>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        check_ambient(&ambient)?;
        let vertices = place_vertices(&ambient, &vertices)?;
        check_topology(vertices.len(), &triangles)?;
        let mut mesh = SurfaceMesh { ambient, vertices, triangles, lifts: Vec::new() };
        mesh.update_geometry()?;
        Ok(mesh)
    }

    /// Same combinatorics, new vertex positions. Skips the topology checks
    /// (they cannot change) but re-validates all geometric invariants.
    pub fn with_positions(&self, positions: &[Vec4]) -> Result<Self> {
        if positions.len() != self.vertices.len() {
            return invalid(format!(
                "expected {} vertex positions, got {}",
                self.vertices.len(),
                positions.len()
            ));
        }
        let vertices = place_vertices(&self.ambient, positions)?;
        let mut mesh = SurfaceMesh {
            ambient: self.ambient,
            vertices,
            triangles: self.triangles.clone(),
            lifts: Vec::new(),
        };
        mesh.update_geometry()?;
        Ok(mesh)
    }

    fn update_geometry(&mut self) -> Result<()> {
        if let Ambient::FlatTorus { periods, .. } = self.ambient {
            let limit = 0.5 * periods[..3].iter().cloned().fold(f64::INFINITY, f64::min);
            let mut lifts = Vec::with_capacity(self.triangles.len());
            for (index, tri) in self.triangles.iter().enumerate() {
                let base = self.vertices[tri[0]].vec4();
                let mut lift = [[0i32; 3]; 3];
                for c in 1..3 {
                    let v = self.vertices[tri[c]].vec4();
                    for a in 0..3 {
                        lift[c][a] = -((v[a] - base[a]) / periods[a]).round() as i32;
                    }
                }
                lifts.push(lift);
                let p = unwrap_corners(&self.vertices, tri, &lift, &periods);
                let diameter = (0..3)
                    .map(|k| linalg::norm(&linalg::sub(&p[(k + 1) % 3], &p[k])))
                    .fold(0.0, f64::max);
                if diameter >= limit {
                    return Err(MeshError::TorusTriangleTooLarge { index, diameter, limit }.into());
                }
            }
            self.lifts = lifts;
        }
        for index in 0..self.triangles.len() {
            let area = self.triangle_area(index);
            if !(area > MIN_TRIANGLE_AREA) {
                return Err(MeshError::DegenerateTriangle { index, area }.into());
            }
        }
        Ok(())
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    /// Torus lattice offsets of triangle `index` (zeros elsewhere).
    pub fn lift(&self, index: usize) -> [[i32; 3]; 3] {
        self.lifts.get(index).copied().unwrap_or_default()
    }

    /// Triangle corners in one consistent chart: unwrapped on the torus,
    /// raw R⁴ vectors on the sphere.
    #[inline]
    pub fn corners(&self, index: usize) -> [Vec4; 3] {
        let tri = &self.triangles[index];
        match self.ambient {
            Ambient::FlatTorus { periods, .. } => unwrap_corners(&self.vertices, tri, &self.lifts[index], &periods),
            _ => [
                *self.vertices[tri[0]].vec4(),
                *self.vertices[tri[1]].vec4(),
                *self.vertices[tri[2]].vec4(),
            ],
        }
    }

    /// Flat (chordal on the sphere) area of one triangle.
    pub fn triangle_area(&self, index: usize) -> f64 {
        let p = self.corners(index);
        linalg::tri_area(&linalg::sub(&p[1], &p[0]), &linalg::sub(&p[2], &p[0]))
    }

    pub fn triangle_areas(&self) -> Vec<f64> {
        (0..self.triangles.len()).into_par_iter().map(|i| self.triangle_area(i)).collect()
    }

    /// Sum of triangle areas (chordal on the sphere), reduced in index order.
    pub fn total_area(&self) -> f64 {
        self.triangle_areas().iter().sum()
    }

    /// Unique undirected edges `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<(usize, usize)> = self
            .triangles
            .iter()
            .flat_map(|t| (0..3).map(move |k| ordered(t[k], t[(k + 1) % 3])))
            .collect();
        e.sort_unstable();
        e.dedup();
        e
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges().len() as i64 + self.triangles.len() as i64
    }

    /// Longest and shortest edge lengths measured in the triangle chart.
    pub fn edge_length_range(&self) -> (f64, f64) {
        let (lo, hi) = (0..self.triangles.len())
            .into_par_iter()
            .map(|i| {
                let p = self.corners(i);
                let mut lo = f64::INFINITY;
                let mut hi: f64 = 0.0;
                for k in 0..3 {
                    let l = linalg::norm(&linalg::sub(&p[(k + 1) % 3], &p[k]));
                    lo = lo.min(l);
                    hi = hi.max(l);
                }
                (lo, hi)
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold((f64::INFINITY, 0.0f64), |(a, b), (c, d)| (a.min(c), b.max(d)));
        (hi, lo)
    }

    /// Mesh scale `h`: the longest edge.
    pub fn mesh_scale(&self) -> f64 {
        self.edge_length_range().0
    }

    /// Smallest triangle quality `4√3·A / Σ l²` (1 for equilateral).
    pub fn min_quality(&self) -> f64 {
        (0..self.triangles.len())
            .into_par_iter()
            .map(|i| {
                let p = self.corners(i);
                let l2: f64 = (0..3).map(|k| linalg::norm_sq(&linalg::sub(&p[(k + 1) % 3], &p[k]))).sum();
                4.0 * 3f64.sqrt() * self.triangle_area(i) / l2
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest distance between two vertices in the chart; on compact
    /// ambients capped by the ambient diameter.
    pub fn extent(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        let box_diag = linalg::norm(&linalg::sub(&hi, &lo));
        match self.ambient {
            Ambient::Euclidean { .. } => box_diag,
            _ => box_diag.min(self.ambient.metadata().diameter),
        }
    }

    /// Axis-aligned chart bounding box of the vertices.
    pub fn bounding_box(&self) -> (Vec4, Vec4) {
        let mut lo = [f64::INFINITY; 4];
        let mut hi = [f64::NEG_INFINITY; 4];
        let d = self.ambient.chart_dim();
        for v in &self.vertices {
            for a in 0..d {
                lo[a] = lo[a].min(v[a]);
                hi[a] = hi[a].max(v[a]);
            }
        }
        for a in d..4 {
            lo[a] = 0.0;
            hi[a] = 0.0;
        }
        (lo, hi)
    }

    /// Vertex-area-weighted centroid in the chart (Euclidean meshes).
    pub fn centroid(&self) -> Vec4 {
        let mut c = [0.0; 4];
        let mut total = 0.0;
        for i in 0..self.triangles.len() {
            let p = self.corners(i);
            let a = self.triangle_area(i);
            let m = linalg::scale(&linalg::add(&linalg::add(&p[0], &p[1]), &p[2]), 1.0 / 3.0);
            c = linalg::axpy(&c, a, &m);
            total += a;
        }
        linalg::scale(&c, 1.0 / total)
    }

    /// Image of the mesh under an ambient isometry.
    pub fn transformed(&self, iso: &Isometry) -> Result<Self> {
        let positions: Vec<Vec4> = self
            .vertices
            .iter()
            .map(|v| iso.apply(&self.ambient, v).map(|p| *p.vec4()))
            .collect::<Result<_>>()?;
        self.with_positions(&positions)
    }

    /// 1→4 midpoint subdivision. Sphere midpoints are renormalized; torus
    /// midpoints are taken in the unwrapped triangle chart.
    pub fn refine(&self) -> Result<Self> {
        self.refine_with(|p| p)
    }

    /// Midpoint subdivision with every new vertex passed through `project`
    /// (e.g. onto an analytic sphere). The sphere ambient renormalizes
    /// afterwards regardless.
    pub fn refine_with(&self, project: impl Fn(Vec4) -> Vec4) -> Result<Self> {
        let mut positions: Vec<Vec4> = self.vertices.iter().map(|v| *v.vec4()).collect();
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for (index, tri) in self.triangles.iter().enumerate() {
            let p = self.corners(index);
            let mut m = [0usize; 3];
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                m[k] = *midpoint.entry(ordered(a, b)).or_insert_with(|| {
                    let mid = linalg::scale(&linalg::add(&p[k], &p[(k + 1) % 3]), 0.5);
                    positions.push(project(mid));
                    positions.len() - 1
                });
            }
            triangles.push([tri[0], m[0], m[2]]);
            triangles.push([tri[1], m[1], m[0]]);
            triangles.push([tri[2], m[2], m[1]]);
            triangles.push([m[0], m[1], m[2]]);
        }
        if self.ambient == Ambient::RoundSphere3 {
            for p in positions.iter_mut().skip(self.vertices.len()) {
                *p = linalg::normalized(p);
            }
        }
        SurfaceMesh::new(self.ambient, positions, triangles)
    }

    /// Outward-consistent unit normal at each vertex (area-weighted face
    /// normals; tangent to S³ on the sphere).
    pub fn vertex_normals(&self) -> Vec<Vec4> {
        curvature::vertex_normals(self)
    }
}

/// Upper bound on the Hausdorff distance between two meshes with identical
/// combinatorics: the largest geodesic displacement of a vertex.
pub fn hausdorff_upper_bound(a: &SurfaceMesh, b: &SurfaceMesh) -> Result<f64> {
    if a.ambient != b.ambient || a.triangles != b.triangles {
        return invalid("meshes must share ambient and combinatorics");
    }
    let mut worst: f64 = 0.0;
    for (x, y) in a.vertices.iter().zip(&b.vertices) {
        worst = worst.max(a.ambient.geodesic_distance(x, y)?);
    }
    Ok(worst)
}

#[inline]
fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

#[inline]
fn unwrap_corners(vertices: &[Point], tri: &[usize; 3], lift: &[[i32; 3]; 3], periods: &Vec4) -> [Vec4; 3] {
    let mut out = [[0.0; 4]; 3];
    for c in 0..3 {
        let v = vertices[tri[c]].vec4();
        for a in 0..3 {
            out[c][a] = v[a] + lift[c][a] as f64 * periods[a];
        }
    }
    out
}

fn check_ambient(ambient: &Ambient) -> Result<()> {
    if ambient.dim() != 3 {
        return invalid(format!("surfaces need a 3-dimensional ambient, got {ambient}"));
    }
    Ok(())
}

fn place_vertices(ambient: &Ambient, positions: &[Vec4]) -> Result<Vec<Point>> {
    let d = ambient.chart_dim();
    positions
        .iter()
        .enumerate()
        .map(|(index, p)| {
            if p[..d].iter().any(|v| !v.is_finite()) {
                return Err(MeshError::VertexOutsideDomain { index }.into());
            }
            match ambient {
                Ambient::RoundSphere3 => {
                    let norm = linalg::norm(p);
                    if (norm - 1.0).abs() > SPHERE_NORM_TOL {
                        return Err(MeshError::VertexOffSphere { index, norm }.into());
                    }
                    Ok(Point::raw(*p, 4))
                }
                _ => Ok(ambient.project(p)),
            }
        })
        .collect()
}

fn check_topology(vertex_count: usize, triangles: &[[usize; 3]]) -> Result<()> {
    // directed edge -> number of uses, per undirected edge
    let mut uses: HashMap<(usize, usize), (u32, u32)> = HashMap::new();
    for (index, tri) in triangles.iter().enumerate() {
        for &v in tri {
            if v >= vertex_count {
                return Err(MeshError::IndexOutOfRange { triangle: index, vertex: v, count: vertex_count }.into());
            }
        }
        if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
            return Err(MeshError::DegenerateTriangle { index, area: 0.0 }.into());
        }
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            let e = uses.entry(ordered(a, b)).or_insert((0, 0));
            if a < b {
                e.0 += 1;
            } else {
                e.1 += 1;
            }
        }
    }
    let mut edges: Vec<_> = uses.into_iter().collect();
    edges.sort_unstable_by_key(|(e, _)| *e);
    let mut boundary = Vec::new();
    for ((a, b), (fwd, back)) in edges {
        match fwd + back {
            1 => boundary.push((a, b)),
            2 if fwd == 1 => {}
            2 => return Err(MeshError::InconsistentOrientation(a, b).into()),
            _ => return Err(MeshError::NonManifoldEdge(a, b).into()),
        }
    }
    if !boundary.is_empty() {
        return Err(MeshError::OpenSurface { boundary_edges: boundary }.into());
    }
    Ok(())
}

#[cfg(test)]
mod tests;
