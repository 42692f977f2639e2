//! The F-functional `F_{x,t}(Σ) = t^{(n−m)/2} ∫_Σ H(x, y, t) dy`, the entropy
//! `λ = sup F`, the area growth bound `κ = sup area(Σ ∩ B_r(x))/r²`, and
//! the two-sided bound checks relating them.

mod area;
mod bounds;
mod coarse;
mod entropy;

pub use area::{area_growth, ball_area, AreaGrowthReport};
pub use bounds::{equivalence_check, li_yau_check, BoundCheckReport, LiYauSpec, RatioEntry};
pub use entropy::{entropy, EntropyReport};

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ambient::{Ambient, Point};
use crate::error::{invalid, Result};
use crate::heat_kernel::{KernelConfig, PreparedKernel};
use crate::linalg::{self, Vec4};
use crate::numerics;
use crate::surface::{QuadratureSet, SurfaceMesh};

/// Codimension exponent `(n − m)/2` for surfaces in 3-manifolds.
const SCALE_EXPONENT: f64 = 0.5;

/// Fixed-size chunks for parallel sums, so the reduction order (and hence
/// every digit of the result) does not depend on the thread count.
const SUM_CHUNK: usize = 2048;

/// Search resolution for λ and κ. `None` windows take the defaults
/// documented on [`SearchConfig::t_window_for`] and
/// [`SearchConfig::r_window_for`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub t_window: Option<(f64, f64)>,
    pub r_window: Option<(f64, f64)>,
    /// Background lattice size (at most 4096), in addition to all vertices.
    pub lattice_points: usize,
    /// Log-spaced scales in the coarse scan (at least 48).
    pub t_points: usize,
    pub r_points: usize,
    pub quad_order: usize,
    /// Coarse-scan candidates handed to local refinement.
    pub refine_candidates: usize,
    /// Stop refining once a round improves the value by less than this.
    pub refine_tol: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            t_window: None,
            r_window: None,
            lattice_points: 512,
            t_points: 48,
            r_points: 48,
            quad_order: 3,
            refine_candidates: 4,
            refine_tol: 1e-6,
        }
    }
}

pub const MAX_LATTICE_POINTS: usize = 4096;
pub const MIN_T_POINTS: usize = 48;

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lattice_points > MAX_LATTICE_POINTS {
            return invalid(format!("lattice_points must be ≤ {MAX_LATTICE_POINTS}, got {}", self.lattice_points));
        }
        if self.t_points < MIN_T_POINTS {
            return invalid(format!("t_points must be ≥ {MIN_T_POINTS}, got {}", self.t_points));
        }
        if self.r_points < 2 {
            return invalid("r_points must be ≥ 2");
        }
        if self.refine_candidates == 0 {
            return invalid("refine_candidates must be ≥ 1");
        }
        if !(self.refine_tol > 0.0) {
            return invalid("refine_tol must be positive");
        }
        for (name, w) in [("t_window", self.t_window), ("r_window", self.r_window)] {
            if let Some((lo, hi)) = w {
                if !(lo > 0.0 && hi.is_finite() && lo < hi) {
                    return invalid(format!("empty {name}: ({lo}, {hi})"));
                }
            }
        }
        Ok(())
    }

    /// Default `[(2h)², diameter(N)²]` on compact ambients and
    /// `[(2h)², (4·extent)²]` on Euclidean space.
    pub fn t_window_for(&self, mesh: &SurfaceMesh) -> (f64, f64) {
        self.t_window.unwrap_or_else(|| {
            let h = mesh.mesh_scale();
            let top = match mesh.ambient() {
                Ambient::Euclidean { .. } => 4.0 * mesh.extent(),
                a => a.metadata().diameter,
            };
            ((2.0 * h).powi(2), top * top)
        })
    }

    /// Default `[2h, diameter(N)]`, or `[2h, 4·extent]` on Euclidean space.
    pub fn r_window_for(&self, mesh: &SurfaceMesh) -> (f64, f64) {
        self.r_window.unwrap_or_else(|| {
            let h = mesh.mesh_scale();
            let top = match mesh.ambient() {
                Ambient::Euclidean { .. } => 4.0 * mesh.extent(),
                a => a.metadata().diameter,
            };
            (2.0 * h, top)
        })
    }
}

/// Value of the F-functional with its trust flag.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FValue {
    pub value: f64,
    /// False when `√t < 2·(longest edge)`: the kernel is then narrower than
    /// the mesh can resolve.
    pub trusted: bool,
}

/// A mesh reduced to quadrature nodes and weights, ready for repeated
/// F-functional evaluations.
#[derive(Clone, Debug)]
pub struct SurfaceMeasure {
    ambient: Ambient,
    quad: QuadratureSet,
    scale: f64,
}

impl SurfaceMeasure {
    pub fn new(mesh: &SurfaceMesh, quad_order: usize) -> Result<Self> {
        Ok(Self { ambient: *mesh.ambient(), quad: QuadratureSet::new(mesh, quad_order)?, scale: mesh.mesh_scale() })
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    /// Longest mesh edge `h`.
    pub fn mesh_scale(&self) -> f64 {
        self.scale
    }

    pub fn quadrature(&self) -> &QuadratureSet {
        &self.quad
    }

    pub fn trusted(&self, t: f64) -> bool {
        t.sqrt() >= 2.0 * self.scale
    }

    /// `t^{1/2} Σ_q w_q H(x, y_q, t)` without argument checks.
    pub fn eval(&self, x: &Vec4, t: f64, cfg: &KernelConfig) -> Result<f64> {
        let k = PreparedKernel::new(&self.ambient, t, cfg)?;
        Ok(t.powf(SCALE_EXPONENT) * self.integrate(&k, x))
    }

    /// `∫_Σ H(x, ·, t)` against an already prepared kernel.
    pub fn integrate(&self, k: &PreparedKernel, x: &Vec4) -> f64 {
        let nodes = &self.quad.nodes;
        let weights = &self.quad.weights;
        let partial: Vec<f64> = nodes
            .par_chunks(SUM_CHUNK)
            .zip(weights.par_chunks(SUM_CHUNK))
            .map(|(ys, ws)| ys.iter().zip(ws).map(|(y, w)| w * k.eval_points(&self.ambient, x, y)).sum::<f64>())
            .collect();
        partial.iter().sum()
    }
}

/// `F_{x,t}(Σ)` at one center and scale.
pub fn f_functional(mesh: &SurfaceMesh, x: &Point, t: f64, quad_order: usize, cfg: &KernelConfig) -> Result<FValue> {
    mesh.ambient().check_point(x)?;
    if !(t > 0.0) {
        return invalid(format!("t must be positive, got {t}"));
    }
    let m = SurfaceMeasure::new(mesh, quad_order)?;
    Ok(FValue { value: m.eval(x.vec4(), t, cfg)?, trusted: m.trusted(t) })
}

/// Background centers: a cell-centered grid over the mesh's (padded)
/// bounding box on Euclidean space, over the fundamental domain on a torus,
/// and Halton points pushed to S³ by Shoemake's uniform map. Also returns
/// the typical spacing between centers.
pub fn background_lattice(mesh: &SurfaceMesh, count: usize) -> (Vec<Vec4>, f64) {
    if count == 0 {
        return (Vec::new(), mesh.mesh_scale());
    }
    match mesh.ambient() {
        Ambient::RoundSphere3 => {
            let pts = (0..count as u64)
                .map(|i| {
                    let u = numerics::halton(i + 1, 3);
                    let (a, b) = ((1.0 - u[0]).sqrt(), u[0].sqrt());
                    let (s1, c1) = (2.0 * PI * u[1]).sin_cos();
                    let (s2, c2) = (2.0 * PI * u[2]).sin_cos();
                    linalg::normalized(&[a * s1, a * c1, b * s2, b * c2])
                })
                .collect();
            (pts, (2.0 * PI * PI / count as f64).cbrt())
        }
        a => {
            let n = ((count as f64).cbrt() + 1e-9).floor().max(1.0) as usize;
            let (lo, hi) = match a {
                Ambient::FlatTorus { periods, .. } => ([0.0; 4], *periods),
                _ => {
                    let (lo, hi) = mesh.bounding_box();
                    let pad = 0.05 * linalg::norm(&linalg::sub(&hi, &lo)) + mesh.mesh_scale();
                    (lo.map(|v| v - pad), hi.map(|v| v + pad))
                }
            };
            let step: Vec<f64> = (0..3).map(|i| (hi[i] - lo[i]) / n as f64).collect();
            let mut pts = Vec::with_capacity(n * n * n);
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let p = [
                            lo[0] + (i as f64 + 0.5) * step[0],
                            lo[1] + (j as f64 + 0.5) * step[1],
                            lo[2] + (k as f64 + 0.5) * step[2],
                            0.0,
                        ];
                        pts.push(*a.project(&p).vec4());
                    }
                }
            }
            (pts, step.iter().cloned().fold(0.0, f64::max))
        }
    }
}

/// Vertices followed by the background lattice.
pub(crate) fn candidate_centers(mesh: &SurfaceMesh, lattice: usize) -> (Vec<Vec4>, f64) {
    let (grid, spacing) = background_lattice(mesh, lattice);
    let mut centers: Vec<Vec4> = mesh.vertices().iter().map(|v| *v.vec4()).collect();
    centers.extend(grid);
    (centers, spacing)
}

/// Indices of the `k` largest scores, ties broken by index.
pub(crate) fn top_indices(scores: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    idx.truncate(k);
    idx
}

/// One coordinate-search sweep: tries `±step` along each chart axis
/// (re-projected onto the ambient) and keeps the best improvement.
pub(crate) fn pattern_sweep(
    ambient: &Ambient,
    x: &Vec4,
    step: f64,
    current: f64,
    mut f: impl FnMut(&Vec4) -> Result<f64>,
) -> Result<Option<(Vec4, f64)>> {
    let mut best: Option<(Vec4, f64)> = None;
    for axis in 0..ambient.chart_dim() {
        for sign in [1.0, -1.0] {
            let mut y = *x;
            y[axis] += sign * step;
            let y = *ambient.project(&y).vec4();
            let v = f(&y)?;
            if v > best.map_or(current, |b| b.1) {
                best = Some((y, v));
            }
        }
    }
    Ok(best)
}
