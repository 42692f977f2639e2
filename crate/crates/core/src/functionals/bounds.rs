//! Two-sided bound checks: the entropy / area-growth equivalence on closed
//! Ricci-non-negative ambients, and the Li-Yau Gaussian bounds on the kernel.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{area_growth, entropy, SearchConfig};
use crate::ambient::{Ambient, Point};
use crate::error::{invalid, Result};
use crate::heat_kernel::{heat_kernel, KernelConfig};
use crate::linalg::{self, Vec4};
use crate::surface::SurfaceMesh;

/// Accepted bracket for λ/κ and the largest tolerated spread `max/min`.
pub const RATIO_BRACKET: (f64, f64) = (1e-3, 1e3);
pub const MAX_SPREAD: f64 = 50.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioEntry {
    pub lambda: f64,
    pub kappa: f64,
    pub ratio: f64,
    pub lambda_boundary_sup: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundCheckReport {
    /// Smallest observed ratio (the fitted lower constant).
    pub c_low: f64,
    /// Largest observed ratio (the fitted upper constant).
    pub c_up: f64,
    pub epsilon: Option<f64>,
    pub samples: String,
    pub sample_count: usize,
    pub violations: usize,
    pub pass: bool,
    /// Per-mesh values (equivalence check only).
    pub entries: Vec<RatioEntry>,
    /// Smallest on-diagonal `H(x,x,t)·V_x(√t)` (Li-Yau scan only).
    pub diagonal_low: Option<f64>,
}

impl BoundCheckReport {
    pub fn spread(&self) -> f64 {
        self.c_up / self.c_low
    }
}

fn require_closed_ricci_nonnegative(ambient: &Ambient) -> Result<()> {
    if !ambient.is_compact() {
        return invalid(format!("{ambient} is not closed; the bounds are stated for closed ambients"));
    }
    if !ambient.metadata().ricci_nonnegative {
        return invalid(format!("{ambient} does not have non-negative Ricci curvature"));
    }
    Ok(())
}

/// Computes λ and κ for every mesh and brackets λ/κ. Passes when every
/// ratio is positive, finite and inside [`RATIO_BRACKET`], and the spread
/// stays below [`MAX_SPREAD`].
pub fn equivalence_check(meshes: &[SurfaceMesh], search: &SearchConfig, cfg: &KernelConfig) -> Result<BoundCheckReport> {
    let Some(first) = meshes.first() else {
        return invalid("equivalence check needs at least one mesh");
    };
    let ambient = *first.ambient();
    require_closed_ricci_nonnegative(&ambient)?;
    if meshes.iter().any(|m| *m.ambient() != ambient) {
        return invalid("all meshes must share one ambient");
    }
    let mut entries = Vec::with_capacity(meshes.len());
    for m in meshes {
        let l = entropy(m, search, cfg)?;
        let k = area_growth(m, search)?;
        entries.push(RatioEntry {
            lambda: l.lambda,
            kappa: k.kappa,
            ratio: l.lambda / k.kappa,
            lambda_boundary_sup: l.boundary_sup,
        });
    }
    let ratios: Vec<f64> = entries.iter().map(|e| e.ratio).collect();
    let c_low = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let c_up = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let violations = ratios
        .iter()
        .filter(|r| !(r.is_finite() && **r > 0.0 && **r >= RATIO_BRACKET.0 && **r <= RATIO_BRACKET.1))
        .count();
    Ok(BoundCheckReport {
        c_low,
        c_up,
        epsilon: None,
        samples: format!("{} meshes in {ambient}", meshes.len()),
        sample_count: meshes.len(),
        violations,
        pass: violations == 0 && c_up / c_low < MAX_SPREAD,
        entries,
        diagonal_low: None,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiYauSpec {
    pub samples: usize,
    pub t_min: f64,
    pub t_max: f64,
    /// Every `diagonal_every`-th sample uses `y = x`.
    pub diagonal_every: usize,
    pub epsilon: f64,
    pub seed: u64,
}

impl Default for LiYauSpec {
    fn default() -> Self {
        Self { samples: 1000, t_min: 0.01, t_max: 4.0, diagonal_every: 10, epsilon: 0.5, seed: 0 }
    }
}

fn uniform_point(ambient: &Ambient, rng: &mut ChaCha8Rng) -> Vec4 {
    match ambient {
        Ambient::RoundSphere3 => loop {
            let v: Vec4 = [0; 4].map(|_| rng.gen_range(-1.0..1.0));
            let n = linalg::norm(&v);
            if n > 1e-3 && n <= 1.0 {
                return linalg::scale(&v, 1.0 / n);
            }
        },
        Ambient::FlatTorus { dim, periods } => {
            let mut v = [0.0; 4];
            for i in 0..*dim {
                v[i] = rng.gen_range(0.0..periods[i]);
            }
            v
        }
        Ambient::Euclidean { .. } => unreachable!("rejected before sampling"),
    }
}

/// Scans `R_low = H·√(V_x V_y)·e^{d²/3t}` and
/// `R_up = H·√(V_x V_y)·e^{d²/((4+ε)t)}` with `V = vol B_{√t}` over random
/// pairs and log-uniform times; `c_low = min R_low`, `c_up = max R_up`.
pub fn li_yau_check(ambient: &Ambient, spec: &LiYauSpec, cfg: &KernelConfig) -> Result<BoundCheckReport> {
    require_closed_ricci_nonnegative(ambient)?;
    if spec.samples == 0 || !(spec.t_min > 0.0 && spec.t_min < spec.t_max) || !(spec.epsilon > 0.0 && spec.epsilon < 1.0) {
        return invalid("Li-Yau scan needs samples > 0, 0 < t_min < t_max and ε in (0, 1)");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (lt0, lt1) = (spec.t_min.ln(), spec.t_max.ln());
    let mut c_low = f64::INFINITY;
    let mut c_up: f64 = 0.0;
    let mut diag_low = f64::INFINITY;
    let mut violations = 0;
    for i in 0..spec.samples {
        let x = uniform_point(ambient, &mut rng);
        let y = if spec.diagonal_every > 0 && i % spec.diagonal_every == 0 { x } else { uniform_point(ambient, &mut rng) };
        let t = rng.gen_range(lt0..=lt1).exp();
        let (px, py) = (Point::raw(x, ambient.chart_dim()), Point::raw(y, ambient.chart_dim()));
        let h = heat_kernel(ambient, &px, &py, t, cfg)?.value;
        let vx = ambient.ball_volume(&px, t.sqrt())?;
        let vy = ambient.ball_volume(&py, t.sqrt())?;
        let d = ambient.distance_unchecked(&x, &y);
        let base = h * (vx * vy).sqrt();
        let low = base * (d * d / (3.0 * t)).exp();
        let up = base * (d * d / ((4.0 + spec.epsilon) * t)).exp();
        if !(low > 0.0 && up.is_finite()) {
            violations += 1;
        }
        c_low = c_low.min(low);
        c_up = c_up.max(up);
        if x == y {
            diag_low = diag_low.min(base);
        }
    }
    Ok(BoundCheckReport {
        c_low,
        c_up,
        epsilon: Some(spec.epsilon),
        samples: format!(
            "{} seeded pairs in {ambient}, t log-uniform in [{}, {}], every {}th on the diagonal",
            spec.samples, spec.t_min, spec.t_max, spec.diagonal_every
        ),
        sample_count: spec.samples,
        violations,
        pass: violations == 0 && c_low > 0.0 && c_up.is_finite(),
        entries: Vec::new(),
        diagonal_low: diag_low.is_finite().then_some(diag_low),
    })
}
