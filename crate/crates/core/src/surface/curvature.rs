//! Cotangent mean curvature with mixed Voronoi areas.
//!
//! The raw cotangent vector `−(1/2A_i) Σ (cot α + cot β)(x_i − x_j)` is
//! projected onto the vertex normal. On S³ the normal is taken inside the
//! tangent space `T_x S³`, so adding the `m·x` correction of the unit sphere
//! and projecting leaves a vector tangent to both S³ and normal to the
//! surface. The projection keeps the discrete first-variation identity
//! `d(area)/dt = −Σ A_i |H_i|²` exact for the velocity `H` and makes
//! affine slices, the equator and the Clifford torus exact fixed points.

use rayon::prelude::*;
use serde::Serialize;

use super::SurfaceMesh;
use crate::ambient::Ambient;
use crate::linalg::{self, Vec4};

/// Below this fraction of the barycentric area a mixed-area cell counts as
/// degenerate.
const MIXED_AREA_FLOOR: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvatureField {
    /// Mean curvature vector per vertex, in chart (R⁴ on the sphere) components.
    pub vectors: Vec<Vec4>,
    /// Area weight per vertex; sums to the total area.
    pub areas: Vec<f64>,
    /// Unit vertex normals the vectors were projected on.
    pub normals: Vec<Vec4>,
    /// True when some mixed Voronoi cell collapsed and all weights fell back
    /// to barycentric thirds.
    pub barycentric_fallback: bool,
}

impl CurvatureField {
    /// `∫|H|²` as the area-weighted sum of vertex values.
    pub fn h2_integral(&self) -> f64 {
        self.vectors.iter().zip(&self.areas).map(|(h, a)| a * linalg::norm_sq(h)).sum()
    }

    pub fn max_norm(&self) -> f64 {
        self.vectors.iter().map(linalg::norm).fold(0.0, f64::max)
    }

    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }
}

struct TriangleTerms {
    lap: [Vec4; 3],
    mixed: [f64; 3],
    area: f64,
    normal: [Vec4; 3],
}

fn triangle_terms(mesh: &SurfaceMesh, index: usize) -> TriangleTerms {
    let p = mesh.corners(index);
    let e1 = linalg::sub(&p[1], &p[0]);
    let e2 = linalg::sub(&p[2], &p[0]);
    let area = linalg::tri_area(&e1, &e2);
    let mut cot = [0.0; 3];
    let mut obtuse = None;
    for k in 0..3 {
        let u = linalg::sub(&p[(k + 1) % 3], &p[k]);
        let v = linalg::sub(&p[(k + 2) % 3], &p[k]);
        cot[k] = linalg::cot(&u, &v);
        if linalg::dot(&u, &v) < 0.0 {
            obtuse = Some(k);
        }
    }
    let mut lap = [[0.0; 4]; 3];
    for k in 0..3 {
        // edge (i, j) opposite corner k
        let (i, j) = ((k + 1) % 3, (k + 2) % 3);
        let d = linalg::sub(&p[i], &p[j]);
        lap[i] = linalg::axpy(&lap[i], cot[k], &d);
        lap[j] = linalg::axpy(&lap[j], -cot[k], &d);
    }
    let mut mixed = [0.0; 3];
    match obtuse {
        None => {
            for i in 0..3 {
                let (j, k) = ((i + 1) % 3, (i + 2) % 3);
                let eij = linalg::norm_sq(&linalg::sub(&p[j], &p[i]));
                let eik = linalg::norm_sq(&linalg::sub(&p[k], &p[i]));
                mixed[i] = (eij * cot[k] + eik * cot[j]) / 8.0;
            }
        }
        Some(o) => {
            for (i, m) in mixed.iter_mut().enumerate() {
                *m = if i == o { area / 2.0 } else { area / 4.0 };
            }
        }
    }
    let normal = match mesh.ambient() {
        Ambient::RoundSphere3 => [
            linalg::cross4(&p[0], &e1, &e2),
            linalg::cross4(&p[1], &e1, &e2),
            linalg::cross4(&p[2], &e1, &e2),
        ],
        _ => {
            let n = linalg::cross3(&e1, &e2);
            [n, n, n]
        }
    };
    TriangleTerms { lap, mixed, area, normal }
}

struct Accumulated {
    lap: Vec<Vec4>,
    mixed: Vec<f64>,
    bary: Vec<f64>,
    normal: Vec<Vec4>,
}

fn accumulate(mesh: &SurfaceMesh) -> Accumulated {
    let terms: Vec<TriangleTerms> = (0..mesh.triangle_count())
        .into_par_iter()
        .map(|i| triangle_terms(mesh, i))
        .collect();
    let n = mesh.vertex_count();
    let mut acc = Accumulated {
        lap: vec![[0.0; 4]; n],
        mixed: vec![0.0; n],
        bary: vec![0.0; n],
        normal: vec![[0.0; 4]; n],
    };
    // index-ordered reduction keeps results independent of thread count
    for (tri, t) in mesh.triangles().iter().zip(&terms) {
        for c in 0..3 {
            let v = tri[c];
            acc.lap[v] = linalg::add(&acc.lap[v], &t.lap[c]);
            acc.mixed[v] += t.mixed[c];
            acc.bary[v] += t.area / 3.0;
            acc.normal[v] = linalg::add(&acc.normal[v], &t.normal[c]);
        }
    }
    acc
}

pub(crate) fn vertex_normals(mesh: &SurfaceMesh) -> Vec<Vec4> {
    accumulate(mesh).normal.iter().map(linalg::normalized).collect()
}

pub fn mean_curvature(mesh: &SurfaceMesh) -> CurvatureField {
    let acc = accumulate(mesh);
    let barycentric_fallback = acc
        .mixed
        .iter()
        .zip(&acc.bary)
        .any(|(m, b)| !(*m > MIXED_AREA_FLOOR * b));
    let areas = if barycentric_fallback { acc.bary } else { acc.mixed };
    let normals: Vec<Vec4> = acc.normal.iter().map(linalg::normalized).collect();
    let sphere = *mesh.ambient() == Ambient::RoundSphere3;
    let vectors = (0..mesh.vertex_count())
        .map(|i| {
            let mut h = linalg::scale(&acc.lap[i], -0.5 / areas[i]);
            if sphere {
                h = linalg::axpy(&h, 2.0, mesh.vertices()[i].vec4());
            }
            let n = &normals[i];
            linalg::scale(n, linalg::dot(n, &h))
        })
        .collect();
    CurvatureField { vectors, areas, normals, barycentric_fallback }
}
