//! Area growth `κ = sup_{x,r} area(Σ ∩ B_r(x)) / r²`.
//!
//! Ball areas are computed by clipping triangles against the geodesic ball:
//! a triangle whose bounding cap lies inside or outside the ball counts
//! whole or not at all; the rest are split 1→4 until small, and the leaf
//! fraction comes from the linear interpolant of the signed corner
//! distances. This keeps the small-radius ratios (the `π` limit) accurate
//! to a fraction of a percent, where counting quadrature points inside the
//! ball would be off by O(h/r).

use rayon::prelude::*;
use serde::Serialize;

use super::{candidate_centers, top_indices, SearchConfig, SUM_CHUNK};
use crate::ambient::{sphere_angle, Ambient, Point};
use crate::error::{invalid, Result};
use crate::linalg::{self, Vec4};
use crate::numerics;
use crate::surface::SurfaceMesh;

/// Leaves are split until their radius is below this fraction of `r`.
const LEAF_FRACTION: f64 = 1.0 / 32.0;
const MAX_DEPTH: u32 = 10;
const NM_MAX_EVALS: usize = 150;
const LOG_R_TOL: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AreaGrowthReport {
    pub kappa: f64,
    pub argmax_center: Point,
    pub argmax_radius: f64,
    pub radius_window: (f64, f64),
    pub centers: usize,
    pub radii: usize,
}

#[derive(Clone, Copy, Debug)]
struct Tri {
    corners: [Vec4; 3],
    centroid: Vec4,
    radius: f64,
    area: f64,
}

/// Triangles prepared for repeated clipping.
pub(crate) struct ClipMesh {
    ambient: Ambient,
    tris: Vec<Tri>,
}

impl ClipMesh {
    pub(crate) fn new(mesh: &SurfaceMesh) -> Self {
        let ambient = *mesh.ambient();
        let tris = (0..mesh.triangle_count())
            .map(|i| make_tri(&ambient, mesh.corners(i), mesh.triangle_area(i)))
            .collect();
        Self { ambient, tris }
    }

    #[inline]
    fn dist(&self, x: &Vec4, p: &Vec4) -> f64 {
        match self.ambient {
            Ambient::RoundSphere3 => sphere_angle(x, &linalg::normalized(p)),
            _ => self.ambient.distance_unchecked(x, p),
        }
    }

    /// `area(Σ ∩ B_r(x))`.
    pub(crate) fn ball_area(&self, x: &Vec4, r: f64) -> f64 {
        let partial: Vec<f64> = self
            .tris
            .par_chunks(SUM_CHUNK)
            .map(|chunk| chunk.iter().map(|t| self.clip(x, r, t, 0)).sum::<f64>())
            .collect();
        partial.iter().sum()
    }

    fn clip(&self, x: &Vec4, r: f64, t: &Tri, depth: u32) -> f64 {
        let dc = self.dist(x, &t.centroid);
        if dc + t.radius <= r {
            return t.area;
        }
        if dc - t.radius >= r {
            return 0.0;
        }
        if depth >= MAX_DEPTH || t.radius <= LEAF_FRACTION * r {
            let s = t.corners.map(|p| self.dist(x, &p) - r);
            return t.area * linear_fraction_inside(s);
        }
        let p = &t.corners;
        let m = [mid(&p[0], &p[1]), mid(&p[1], &p[2]), mid(&p[2], &p[0])];
        let quarter = 0.25 * t.area;
        [[p[0], m[0], m[2]], [p[1], m[1], m[0]], [p[2], m[2], m[1]], [m[0], m[1], m[2]]]
            .into_iter()
            .map(|c| self.clip(x, r, &make_tri(&self.ambient, c, quarter), depth + 1))
            .sum()
    }
}

fn mid(a: &Vec4, b: &Vec4) -> Vec4 {
    linalg::scale(&linalg::add(a, b), 0.5)
}

fn make_tri(ambient: &Ambient, corners: [Vec4; 3], area: f64) -> Tri {
    let c = linalg::scale(&linalg::add(&linalg::add(&corners[0], &corners[1]), &corners[2]), 1.0 / 3.0);
    let (centroid, radius) = match ambient {
        Ambient::RoundSphere3 => {
            let c = linalg::normalized(&c);
            let r = corners.iter().map(|p| sphere_angle(&c, &linalg::normalized(p))).fold(0.0, f64::max);
            (c, r)
        }
        _ => (c, corners.iter().map(|p| linalg::norm(&linalg::sub(p, &c))).fold(0.0, f64::max)),
    };
    Tri { corners, centroid, radius, area }
}

/// Fraction of a triangle where the linear interpolant of the corner
/// values `s` is negative.
fn linear_fraction_inside(s: [f64; 3]) -> f64 {
    let neg = s.iter().filter(|v| **v < 0.0).count();
    match neg {
        0 => 0.0,
        3 => 1.0,
        1 => {
            let i = s.iter().position(|v| *v < 0.0).unwrap();
            let (a, b, c) = (s[i], s[(i + 1) % 3], s[(i + 2) % 3]);
            a * a / ((a - b) * (a - c))
        }
        _ => {
            let i = s.iter().position(|v| *v >= 0.0).unwrap();
            let (a, b, c) = (s[i], s[(i + 1) % 3], s[(i + 2) % 3]);
            1.0 - a * a / ((a - b) * (a - c))
        }
    }
}

/// `area(Σ ∩ B_r(x))` for one center and radius.
pub fn ball_area(mesh: &SurfaceMesh, x: &Point, r: f64) -> Result<f64> {
    mesh.ambient().check_point(x)?;
    if !(r > 0.0) {
        return invalid(format!("radius must be positive, got {r}"));
    }
    Ok(ClipMesh::new(mesh).ball_area(x.vec4(), r))
}

/// Area growth bound over a radius window: coarse scan with centroid
/// membership over vertices ∪ lattice × log-spaced radii, then exact
/// clipped areas with golden-section in log r and coordinate search on the
/// center for the best candidates.
pub fn area_growth(mesh: &SurfaceMesh, search: &SearchConfig) -> Result<AreaGrowthReport> {
    search.validate()?;
    let window = search.r_window_for(mesh);
    if !(window.0 > 0.0 && window.0 < window.1) {
        return invalid(format!("empty r_window ({}, {})", window.0, window.1));
    }
    let ambient = *mesh.ambient();
    let clip = ClipMesh::new(mesh);
    let (centers, spacing) = candidate_centers(mesh, search.lattice_points);
    let radii = numerics::log_space(window.0, window.1, search.r_points);

    let coarse: Vec<(f64, usize)> = centers
        .par_iter()
        .map_init(
            || vec![0.0; radii.len()],
            |bins, x| {
                bins.iter_mut().for_each(|b| *b = 0.0);
                for t in &clip.tris {
                    let d = clip.dist(x, &t.centroid);
                    let k = radii.partition_point(|r| *r < d);
                    if k < bins.len() {
                        bins[k] += t.area;
                    }
                }
                let mut cum = 0.0;
                let mut best = (f64::NEG_INFINITY, 0);
                for (k, r) in radii.iter().enumerate() {
                    cum += bins[k];
                    let v = cum / (r * r);
                    if v > best.0 {
                        best = (v, k);
                    }
                }
                best
            },
        )
        .collect();

    let scores: Vec<f64> = coarse.iter().map(|c| c.0).collect();
    let log_step = (radii[1] / radii[0]).ln();
    let step0 = spacing.max(mesh.mesh_scale());
    let mut best: Option<(f64, Vec4, f64)> = None;
    for idx in top_indices(&scores, search.refine_candidates) {
        let (v, x, r) = refine(&clip, centers[idx], radii[coarse[idx].1], window, log_step, step0, search.refine_tol);
        if best.as_ref().is_none_or(|b| v > b.0) {
            best = Some((v, x, r));
        }
    }
    let (kappa, x, r) = best.expect("at least one candidate");
    Ok(AreaGrowthReport {
        kappa,
        argmax_center: ambient.project(&x),
        argmax_radius: r,
        radius_window: window,
        centers: centers.len(),
        radii: radii.len(),
    })
}

/// Joint Nelder–Mead over (center offset in a local frame, log r), with
/// one restart from the best point, then a golden-section polish of the
/// radius. Ball maximizers sit on kinks of `r ↦ area/r²` (the radius that
/// just swallows a surface piece) where center and radius must move
/// together; alternating one-coordinate searches crawl along such ridges.
fn refine(clip: &ClipMesh, x0: Vec4, r0: f64, window: (f64, f64), log_step: f64, step0: f64, tol: f64) -> (f64, Vec4, f64) {
    let ambient = clip.ambient;
    let dim = if ambient == Ambient::RoundSphere3 { 3 } else { ambient.chart_dim() };
    let (lo_w, hi_w) = (window.0.ln(), window.1.ln());
    let mut best = (clip.ball_area(&x0, r0) / (r0 * r0), x0, r0);
    let mut base = x0;
    let mut start_lr = r0.ln();
    for _ in 0..2 {
        let frame = local_frame(&ambient, &base);
        let center = |p: &[f64]| {
            let mut y = base;
            for (k, e) in frame.iter().enumerate().take(dim) {
                y = linalg::axpy(&y, p[k], e);
            }
            *ambient.project(&y).vec4()
        };
        let objective = |p: &[f64]| {
            let r = p[dim].clamp(lo_w, hi_w).exp();
            clip.ball_area(&center(p), r) / (r * r)
        };
        let mut x_init = vec![0.0; dim + 1];
        x_init[dim] = start_lr;
        let mut steps = vec![0.5 * step0; dim + 1];
        steps[dim] = 0.5 * log_step;
        let (p, v, _) = numerics::nelder_mead_max(objective, &x_init, &steps, tol * best.0.max(1.0), NM_MAX_EVALS);
        if v > best.0 {
            best = (v, center(&p), p[dim].clamp(lo_w, hi_w).exp());
        }
        base = best.1;
        start_lr = best.2.ln();
    }
    let (v, x, r) = best;
    let lr = r.ln();
    let (a, b) = ((lr - log_step).max(lo_w), (lr + log_step).min(hi_w));
    let ratio = |r: f64| clip.ball_area(&x, r) / (r * r);
    let (u, gv) = numerics::golden_section_max(|u| ratio(u.exp()), a, b, LOG_R_TOL);
    let end = |e: f64, w: f64, wr: f64| if e == w { wr } else { e.exp() };
    let mut out = (v, x, r);
    for cand in [u.exp(), end(a, lo_w, window.0), end(b, hi_w, window.1)] {
        let val = if cand == u.exp() { gv } else { ratio(cand) };
        if val > out.0 {
            out = (val, x, cand);
        }
    }
    out
}

/// Orthonormal chart directions at `x`: the axes on flat ambients, a basis
/// of the tangent space on the sphere.
fn local_frame(ambient: &Ambient, x: &Vec4) -> Vec<Vec4> {
    match ambient {
        Ambient::RoundSphere3 => {
            let mut frame: Vec<Vec4> = Vec::with_capacity(3);
            for a in 0..4 {
                let mut e = [0.0; 4];
                e[a] = 1.0;
                let mut v = linalg::reject(&e, x);
                for f in &frame {
                    v = linalg::reject(&v, f);
                }
                if linalg::norm(&v) > 0.3 && frame.len() < 3 {
                    frame.push(linalg::normalized(&v));
                }
            }
            frame
        }
        a => (0..a.chart_dim())
            .map(|k| {
                let mut e = [0.0; 4];
                e[k] = 1.0;
                e
            })
            .collect(),
    }
}
