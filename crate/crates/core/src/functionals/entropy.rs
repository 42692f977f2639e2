use rayon::prelude::*;
use serde::Serialize;

use super::coarse::{coarse_separation, CoarseKernel};
use super::{candidate_centers, pattern_sweep, top_indices, SearchConfig, SurfaceMeasure, SCALE_EXPONENT};
use crate::ambient::Point;
use crate::error::Result;
use crate::heat_kernel::KernelConfig;
use crate::linalg::Vec4;
use crate::numerics;
use crate::surface::{QuadratureSet, SurfaceMesh};

const MAX_ROUNDS: usize = 40;
/// Pattern steps stop at this fraction of the initial step.
const STEP_FLOOR: f64 = 1e-5;
const LOG_T_TOL: f64 = 1e-7;

/// Resolution actually used by a search.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub vertex_centers: usize,
    pub lattice_centers: usize,
    pub scales: usize,
    pub coarse_quad_order: usize,
    pub quad_order: usize,
    pub refine_candidates: usize,
    pub refine_tol: f64,
    pub evaluations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyReport {
    pub lambda: f64,
    pub argmax_x: Point,
    pub argmax_t: f64,
    pub t_window: (f64, f64),
    pub grid_spec: GridSpec,
    /// False when `argmax_t < (2h)²`.
    pub trusted: bool,
    /// The supremum sits on the upper end of the window (the search was
    /// capped, not converged in t).
    pub boundary_sup: bool,
}

/// Entropy `λ = sup_{x,t} F_{x,t}` over a finite scale window: coarse scan
/// over vertices ∪ lattice × log-spaced scales with centroid quadrature,
/// then alternating golden-section (in log t) and coordinate search (in x)
/// with the configured quadrature from the best coarse candidates.
pub fn entropy(mesh: &SurfaceMesh, search: &SearchConfig, cfg: &KernelConfig) -> Result<EntropyReport> {
    search.validate()?;
    cfg.validate()?;
    let window = search.t_window_for(mesh);
    if !(window.0 > 0.0 && window.0 < window.1) {
        return crate::error::invalid(format!("empty t_window ({}, {})", window.0, window.1));
    }
    let ambient = *mesh.ambient();
    let (centers, spacing) = candidate_centers(mesh, search.lattice_points);
    let scales = numerics::log_space(window.0, window.1, search.t_points);

    let coarse_quad = QuadratureSet::new(mesh, 1)?;
    let kernels: Vec<CoarseKernel> = scales.iter().map(|&t| CoarseKernel::new(&ambient, t, cfg)).collect::<Result<_>>()?;
    let factors: Vec<f64> = scales.iter().map(|t| t.powf(SCALE_EXPONENT)).collect();
    let coarse: Vec<(f64, usize)> = centers
        .par_iter()
        .map_init(Vec::new, |seps, x| {
            seps.clear();
            seps.extend(coarse_quad.nodes.iter().map(|y| coarse_separation(&ambient, x, y)));
            let mut best = (f64::NEG_INFINITY, 0);
            for (k, kernel) in kernels.iter().enumerate() {
                let s: f64 = seps.iter().zip(&coarse_quad.weights).map(|(d, w)| w * kernel.eval(d)).sum();
                let v = factors[k] * s;
                if v > best.0 {
                    best = (v, k);
                }
            }
            best
        })
        .collect();

    let measure = SurfaceMeasure::new(mesh, search.quad_order)?;
    let scores: Vec<f64> = coarse.iter().map(|c| c.0).collect();
    let log_step = if scales.len() > 1 { (scales[1] / scales[0]).ln() } else { 1.0 };
    let mut evaluations = 0usize;
    let mut best: Option<(f64, Vec4, f64)> = None;
    for idx in top_indices(&scores, search.refine_candidates) {
        let start = Refiner {
            measure: &measure,
            cfg,
            window,
            log_step,
            step0: spacing.max(measure.mesh_scale()),
            tol: search.refine_tol,
        };
        let (v, x, t, n) = start.run(centers[idx], scales[coarse[idx].1])?;
        evaluations += n;
        if best.as_ref().is_none_or(|b| v > b.0) {
            best = Some((v, x, t));
        }
    }
    let (lambda, x, t) = best.expect("at least one candidate");
    Ok(EntropyReport {
        lambda,
        argmax_x: ambient.project(&x),
        argmax_t: t,
        t_window: window,
        grid_spec: GridSpec {
            vertex_centers: mesh.vertex_count(),
            lattice_centers: centers.len() - mesh.vertex_count(),
            scales: scales.len(),
            coarse_quad_order: 1,
            quad_order: search.quad_order,
            refine_candidates: search.refine_candidates,
            refine_tol: search.refine_tol,
            evaluations,
        },
        trusted: measure.trusted(t),
        boundary_sup: t >= window.1,
    })
}

struct Refiner<'a> {
    measure: &'a SurfaceMeasure,
    cfg: &'a KernelConfig,
    window: (f64, f64),
    log_step: f64,
    step0: f64,
    tol: f64,
}

impl Refiner<'_> {
    fn run(&self, x0: Vec4, t0: f64) -> Result<(f64, Vec4, f64, usize)> {
        let mut evals = 0usize;
        let mut f = |x: &Vec4, t: f64| {
            evals += 1;
            self.measure.eval(x, t, self.cfg)
        };
        let (lo_w, hi_w) = (self.window.0.ln(), self.window.1.ln());
        let mut x = x0;
        let mut t = t0;
        let mut best = f(&x, t)?;
        for _ in 0..MAX_ROUNDS {
            let before = best;

            // scale: golden section on one coarse step either side, plus the
            // bracket ends so window-boundary maxima are hit exactly
            let lt = t.ln();
            let (a, b) = ((lt - self.log_step).max(lo_w), (lt + self.log_step).min(hi_w));
            let mut err = None;
            let (u, v) = numerics::golden_section_max(
                |u| match f(&x, u.exp()) {
                    Ok(v) => v,
                    Err(e) => {
                        err = Some(e);
                        f64::NEG_INFINITY
                    }
                },
                a,
                b,
                LOG_T_TOL,
            );
            if let Some(e) = err {
                return Err(e);
            }
            let end = |e: f64, w: f64, wt: f64| if e == w { wt } else { e.exp() };
            let (ta, tb) = (end(a, lo_w, self.window.0), end(b, hi_w, self.window.1));
            for (cand, val) in [(u.exp(), v), (ta, f(&x, ta)?), (tb, f(&x, tb)?)] {
                let cand = cand.clamp(self.window.0, self.window.1);
                if val > best {
                    best = val;
                    t = cand;
                }
            }

            // center: coordinate search with halving steps
            let mut step = self.step0;
            while step > STEP_FLOOR * self.step0 {
                match pattern_sweep(self.measure.ambient(), &x, step, best, |y| f(y, t))? {
                    Some((y, v)) => {
                        x = y;
                        best = v;
                    }
                    None => step *= 0.5,
                }
            }
            if best - before < self.tol {
                break;
            }
        }
        Ok((best, x, t, evals))
    }
}
