//! Checks of the monotonicity statements along recorded flows: pairwise
//! F-inequalities, entropy monotonicity, the almost-monotone fit, the
//! Harnack-form diagnostic and the minimal-limit diagnostic. Named suites
//! bundling the acceptance experiments live in [`suites`].

pub mod suites;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ambient::{Ambient, Point};
use crate::error::{invalid, Result};
use crate::flow::FlowSeries;
use crate::functionals::SurfaceMeasure;
use crate::heat_kernel::{backward_kernel, KernelConfig};
use crate::linalg::{self, Vec4};
use crate::surface::{mean_curvature, SurfaceMesh};

/// Relative tolerance on monotonicity inequalities.
pub const TOL_MONO: f64 = 1e-2;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotonicityPair {
    pub t1: f64,
    pub t2: f64,
    /// Center and scale of the sampled F (absent for entropy pairs).
    pub x: Option<Point>,
    pub s: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub pairs: Vec<MonotonicityPair>,
    /// Largest `(lhs − rhs)/rhs`; negative when every pair holds strictly.
    pub worst_violation: f64,
    pub pair_count: usize,
    pub tolerance: f64,
    pub pass: bool,
    /// Entropy reports only: `max_k κ(t_k) / λ(t_0)`.
    pub kappa_over_initial_lambda: Option<f64>,
}

impl MonotonicityReport {
    fn from_pairs(pairs: Vec<MonotonicityPair>, tolerance: f64) -> Self {
        let worst = pairs.iter().map(|p| p.slack / p.rhs.abs().max(f64::MIN_POSITIVE)).fold(f64::NEG_INFINITY, f64::max);
        Self {
            pair_count: pairs.len(),
            pass: !pairs.is_empty() && worst <= tolerance,
            worst_violation: worst,
            pairs,
            tolerance,
            kappa_over_initial_lambda: None,
        }
    }

    /// `max(0, worst_violation)`.
    pub fn violation(&self) -> f64 {
        self.worst_violation.max(0.0)
    }
}

fn require_monotone_ambient(ambient: &Ambient) -> Result<()> {
    if !ambient.metadata().sectional_nonnegative_and_ricci_parallel {
        return invalid(format!(
            "{ambient} lacks non-negative sectional curvature with parallel Ricci curvature; use the almost-monotone fit"
        ));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FSampleSpec {
    /// Number of `(x, s)` samples.
    pub samples: usize,
    pub seed: u64,
    /// Largest sampled scale (the shifted scale may exceed it).
    pub s_max: f64,
    pub quad_order: usize,
    pub tolerance: f64,
}

impl Default for FSampleSpec {
    fn default() -> Self {
        Self { samples: 20, seed: 0, s_max: 0.5, quad_order: 3, tolerance: TOL_MONO }
    }
}

/// Centers: alternately a vertex of the last mesh and a uniform point of
/// the ambient (of the padded bounding box on Euclidean space); scales
/// log-uniform between the coarsest trust bound and `s_max`.
fn sample_centers(meshes: &[(f64, &SurfaceMesh)], spec: &FSampleSpec) -> Result<Vec<(Vec4, f64)>> {
    let last = meshes.last().expect("checked non-empty").1;
    let ambient = *last.ambient();
    let s_min = meshes.iter().map(|(_, m)| (2.0 * m.mesh_scale()).powi(2)).fold(0.0, f64::max);
    if !(s_min < spec.s_max) {
        return invalid(format!("no trusted scales: (2h)² = {s_min} ≥ s_max = {}", spec.s_max));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (lo, hi) = last.bounding_box();
    let out = (0..spec.samples)
        .map(|i| {
            let x = if i % 2 == 0 {
                *last.vertices()[rng.gen_range(0..last.vertex_count())].vec4()
            } else {
                match ambient {
                    Ambient::RoundSphere3 => loop {
                        let v: Vec4 = [0; 4].map(|_| rng.gen_range(-1.0..1.0));
                        let n = linalg::norm(&v);
                        if n > 1e-3 && n <= 1.0 {
                            break linalg::scale(&v, 1.0 / n);
                        }
                    },
                    Ambient::FlatTorus { periods, .. } => {
                        [rng.gen_range(0.0..periods[0]), rng.gen_range(0.0..periods[1]), rng.gen_range(0.0..periods[2]), 0.0]
                    }
                    Ambient::Euclidean { .. } => {
                        let pad = 0.25 * linalg::norm(&linalg::sub(&hi, &lo));
                        let mut v = [0.0; 4];
                        for a in 0..3 {
                            v[a] = rng.gen_range(lo[a] - pad..=hi[a] + pad);
                        }
                        v
                    }
                }
            };
            let s = rng.gen_range(s_min.ln()..=spec.s_max.ln()).exp();
            (x, s)
        })
        .collect();
    Ok(out)
}

/// For every sampled `(x, s)` and recorded pair `t₁ < t₂`, compares
/// `F_{x,s}(M_{t₂})` against `F_{x,s+(t₂−t₁)}(M_{t₁})`.
pub fn f_monotonicity_check(meshes: &[(f64, &SurfaceMesh)], spec: &FSampleSpec, cfg: &KernelConfig) -> Result<MonotonicityReport> {
    if meshes.len() < 2 {
        return invalid("F-monotonicity needs at least two recorded meshes");
    }
    let ambient = *meshes[0].1.ambient();
    require_monotone_ambient(&ambient)?;
    if meshes.windows(2).any(|w| !(w[1].0 > w[0].0) || w[1].1.ambient() != &ambient) {
        return invalid("meshes must share one ambient and have increasing times");
    }
    let centers = sample_centers(meshes, spec)?;
    let measures: Vec<SurfaceMeasure> = meshes.iter().map(|(_, m)| SurfaceMeasure::new(m, spec.quad_order)).collect::<Result<_>>()?;
    let mut pairs = Vec::new();
    for (x, s) in &centers {
        for j in 1..meshes.len() {
            for i in 0..j {
                let (t1, t2) = (meshes[i].0, meshes[j].0);
                let lhs = measures[j].eval(x, *s, cfg)?;
                let rhs = measures[i].eval(x, s + (t2 - t1), cfg)?;
                pairs.push(MonotonicityPair {
                    t1,
                    t2,
                    x: Some(ambient.project(x)),
                    s: Some(*s),
                    lhs,
                    rhs,
                    slack: lhs - rhs,
                });
            }
        }
    }
    Ok(MonotonicityReport::from_pairs(pairs, spec.tolerance))
}

/// `λ(t_{k+1}) ≤ λ(t_k)·(1 + tol)` over consecutive sampled records, plus
/// the fitted `max κ(t_k)/λ(t_0)`.
pub fn entropy_monotonicity_check(series: &FlowSeries, tolerance: f64) -> Result<MonotonicityReport> {
    require_monotone_ambient(series.final_mesh.ambient())?;
    let samples = series.lambda_samples();
    if samples.len() < 3 {
        return invalid(format!("entropy monotonicity needs ≥ 3 λ samples, got {}", samples.len()));
    }
    let pairs = samples
        .windows(2)
        .map(|w| MonotonicityPair { t1: w[0].0, t2: w[1].0, x: None, s: None, lhs: w[1].1, rhs: w[0].1, slack: w[1].1 - w[0].1 })
        .collect();
    let mut report = MonotonicityReport::from_pairs(pairs, tolerance);
    let kappa_max = series.records.iter().filter_map(|r| r.kappa).fold(0.0, f64::max);
    report.kappa_over_initial_lambda = Some(kappa_max / samples[0].1);
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlmostMonotonicityFit {
    /// Smallest `C ≥ 1` with `λ(t₂) ≤ C λ(t₁) + C (t₂ − t₁) A₀` on all pairs.
    pub c: f64,
    /// `C(λ₁ + (t₂−t₁)A₀) − λ₂` per pair at the fitted `C`.
    pub residuals: Vec<f64>,
    pub initial_area: f64,
    pub pair_count: usize,
    pub samples: String,
}

/// Fits the almost-monotone constant over all sampled pairs with
/// `0 < t₂ − t₁ ≤ 1`.
pub fn almost_monotonicity_fit(series: &FlowSeries) -> Result<AlmostMonotonicityFit> {
    let samples = series.lambda_samples();
    if samples.len() < 2 {
        return invalid("almost-monotone fit needs ≥ 2 λ samples");
    }
    let a0 = series.initial_area();
    let mut pairs = Vec::new();
    for j in 1..samples.len() {
        for i in 0..j {
            let dt = samples[j].0 - samples[i].0;
            if dt > 0.0 && dt <= 1.0 {
                pairs.push((samples[i].1 + dt * a0, samples[j].1));
            }
        }
    }
    if pairs.is_empty() {
        return invalid("no sampled pairs with 0 < t₂ − t₁ ≤ 1");
    }
    let c = pairs.iter().map(|(base, l2)| l2 / base).fold(1.0, f64::max);
    Ok(AlmostMonotonicityFit {
        c,
        residuals: pairs.iter().map(|(base, l2)| c * base - l2).collect(),
        initial_area: a0,
        pair_count: pairs.len(),
        samples: format!("{} λ samples, A₀ = {a0}", samples.len()),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HarnackSample {
    pub vertex: usize,
    pub point: Point,
    pub time: f64,
    pub q: f64,
    pub fd_step: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HarnackReport {
    pub samples: Vec<HarnackSample>,
    pub negative_fraction: f64,
    pub tol_q: f64,
    /// The undefined potential in the Harnack form is taken to be `k`.
    pub substitution: &'static str,
}

/// Orthonormal frame of the surface's tangent plane at `x` with normal `n`.
fn tangent_frame(ambient: &Ambient, x: &Vec4, n: &Vec4) -> [Vec4; 2] {
    let sphere = *ambient == Ambient::RoundSphere3;
    let mut frame = Vec::with_capacity(2);
    for a in 0..4 {
        let mut e = [0.0; 4];
        e[a] = 1.0;
        let mut v = linalg::reject(&e, n);
        if sphere {
            v = linalg::reject(&v, x);
        }
        for f in &frame {
            v = linalg::reject(&v, f);
        }
        if linalg::norm(&v) > 0.3 {
            frame.push(linalg::normalized(&v));
        }
        if frame.len() == 2 {
            break;
        }
    }
    [frame[0], frame[1]]
}

/// Point at arclength `h` along the geodesic from `x` in unit direction `e`.
fn along(ambient: &Ambient, x: &Vec4, e: &Vec4, h: f64) -> Point {
    match ambient {
        Ambient::RoundSphere3 => {
            let p = linalg::axpy(&linalg::scale(x, h.cos()), h.sin(), e);
            ambient.project(&p)
        }
        _ => ambient.project(&linalg::axpy(x, h, e)),
    }
}

/// Evaluates the Harnack form
/// `Q = Σ_α (D_α D_α l − (D_α k)²/k) + 2k/(T−t)` with `l := k`,
/// `k = ρ_{y,T}(·, t)`, at every vertex by central differences of step
/// `fd_step` along geodesics in an orthonormal tangent frame.
pub fn harnack_diagnostic(
    mesh: &SurfaceMesh,
    y: &Point,
    big_t: f64,
    t: f64,
    fd_step: f64,
    cfg: &KernelConfig,
) -> Result<HarnackReport> {
    let ambient = *mesh.ambient();
    require_monotone_ambient(&ambient)?;
    ambient.check_point(y)?;
    if !(t < big_t) {
        return invalid(format!("Harnack diagnostic needs t < T, got t = {t}, T = {big_t}"));
    }
    if !(fd_step > 0.0) {
        return invalid("fd_step must be positive");
    }
    let normals = mesh.vertex_normals();
    let tau = big_t - t;
    let k = |p: &Point| backward_kernel(&ambient, y, big_t, p, t, cfg).map(|v| v.value);
    let mut samples = Vec::with_capacity(mesh.vertex_count());
    for (i, v) in mesh.vertices().iter().enumerate() {
        let x = v.vec4();
        let k0 = k(v)?;
        let mut q = 2.0 * k0 / tau;
        for e in tangent_frame(&ambient, x, &normals[i]) {
            let kp = k(&along(&ambient, x, &e, fd_step))?;
            let km = k(&along(&ambient, x, &e, -fd_step))?;
            let d1 = (kp - km) / (2.0 * fd_step);
            let d2 = (kp - 2.0 * k0 + km) / (fd_step * fd_step);
            q += d2 - d1 * d1 / k0;
        }
        samples.push(HarnackSample { vertex: i, point: *v, time: t, q, fd_step });
    }
    let tol_q = 10.0 * fd_step;
    let negative = samples.iter().filter(|s| s.q < -tol_q).count();
    Ok(HarnackReport {
        negative_fraction: negative as f64 / samples.len() as f64,
        samples,
        tol_q,
        substitution: "l := k",
    })
}

/// Closed form of the same `Q` for the Euclidean Gaussian: each tangent
/// direction contributes `−k/(2τ)`, so `Q = k/τ`.
pub fn harnack_euclidean_closed_form(x: &Point, y: &Point, tau: f64) -> f64 {
    let d2 = linalg::norm_sq(&linalg::sub(x.vec4(), y.vec4()));
    let k = (4.0 * std::f64::consts::PI * tau).powf(-1.5) * (-d2 / (4.0 * tau)).exp();
    k / tau
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LimitVerdict {
    MinimalLimitConsistent,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinimalLimitReport {
    pub h_max_final: f64,
    pub h2_final: f64,
    pub h2_initial: f64,
    pub verdict: LimitVerdict,
}

pub const LIMIT_MAX_CURVATURE: f64 = 0.05;
pub const LIMIT_H2_REDUCTION: f64 = 1e-3;

/// Consistent with a minimal limit when the final `max|H| < 0.05` and
/// `∫|H|²` dropped below `10⁻³` of its initial value.
pub fn minimal_limit_diagnostic(series: &FlowSeries, final_mesh: &SurfaceMesh) -> MinimalLimitReport {
    let field = mean_curvature(final_mesh);
    let h2_initial = series.records.first().map_or(f64::NAN, |r| r.h2_integral);
    let (h_max_final, h2_final) = (field.max_norm(), field.h2_integral());
    let ok = h_max_final < LIMIT_MAX_CURVATURE && h2_final < LIMIT_H2_REDUCTION * h2_initial;
    MinimalLimitReport {
        h_max_final,
        h2_final,
        h2_initial,
        verdict: if ok { LimitVerdict::MinimalLimitConsistent } else { LimitVerdict::Inconclusive },
    }
}
