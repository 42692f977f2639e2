//! Numerical self-test of the defining kernel properties: symmetry,
//! unit mass, the semigroup identity and the heat equation.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{KernelConfig, PreparedKernel};
use crate::ambient::{Ambient, Point};
use crate::error::{invalid, Result};
use crate::linalg::{self, Vec4};
use crate::numerics;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelftestSpec {
    pub sample_count: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub seed: u64,
}

impl Default for SelftestSpec {
    fn default() -> Self {
        Self { sample_count: 25, t_min: 0.01, t_max: 10.0, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelftestSample {
    pub t: f64,
    pub x: Point,
    pub y: Point,
    pub value: f64,
    pub symmetry_err: f64,
    pub normalization_err: f64,
    pub semigroup_err: f64,
    /// |∂_t H − Δ_y H| divided by |∂_t H| + H/t.
    pub pde_residual: f64,
    pub time_step: f64,
    pub space_step: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelftestReport {
    pub ambient: String,
    pub max_symmetry_err: f64,
    pub max_normalization_err: f64,
    pub max_semigroup_err: f64,
    pub max_pde_residual: f64,
    /// Expected size of the finite-difference residual, O(h_x²/t + h_t²/t²).
    pub pde_residual_scale: f64,
    pub samples: Vec<SelftestSample>,
}

/// Samples log-spaced times in `[t_min, t_max]` with seeded random point
/// pairs and reports the worst defect of each property. The semigroup check
/// splits at `s = t/2`. Normalization is skipped (reported as 0) on
/// Euclidean space only when it cannot be computed.
pub fn kernel_selftest(ambient: &Ambient, cfg: &KernelConfig, spec: &SelftestSpec) -> Result<SelftestReport> {
    if spec.sample_count == 0 {
        return invalid("sample_count must be at least 1");
    }
    if !(spec.t_min > 0.0 && spec.t_max >= spec.t_min) {
        return invalid(format!("bad self-test time window [{}, {}]", spec.t_min, spec.t_max));
    }
    cfg.validate()?;
    let times = numerics::log_space(spec.t_min, spec.t_max, spec.sample_count);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let pairs: Vec<(f64, Point, Point)> = times
        .into_iter()
        .map(|t| {
            let x = random_point(ambient, &mut rng);
            // keep y within a few diffusion lengths so the values are not all ~0
            let mut v = [0.0; 4];
            for c in v.iter_mut().take(ambient.chart_dim()) {
                *c = rng.gen::<f64>() - 0.5;
            }
            let dir = linalg::normalized(&match ambient {
                Ambient::RoundSphere3 => linalg::reject(&v, x.vec4()),
                _ => v,
            });
            let r = rng.gen::<f64>() * 3.0 * (2.0 * t).sqrt();
            let y = ambient.exp_map(&x, &linalg::scale(&dir, r.min(3.0)));
            (t, x, y)
        })
        .collect();

    let samples: Vec<SelftestSample> = pairs
        .par_iter()
        .map(|(t, x, y)| sample(ambient, cfg, *t, x, y))
        .collect::<Result<Vec<_>>>()?;

    let max = |f: fn(&SelftestSample) -> f64| samples.iter().map(f).fold(0.0, f64::max);
    let pde_residual_scale = samples
        .iter()
        .map(|s| s.space_step * s.space_step / s.t + (s.time_step / s.t).powi(2))
        .fold(0.0, f64::max);
    Ok(SelftestReport {
        ambient: ambient.to_string(),
        max_symmetry_err: max(|s| s.symmetry_err),
        max_normalization_err: max(|s| s.normalization_err),
        max_semigroup_err: max(|s| s.semigroup_err),
        max_pde_residual: max(|s| s.pde_residual),
        pde_residual_scale,
        samples,
    })
}

fn random_point(ambient: &Ambient, rng: &mut ChaCha8Rng) -> Point {
    let mut v = [0.0; 4];
    match ambient {
        Ambient::RoundSphere3 => {
            // Shoemake's uniform sampling on S³
            let (u1, u2, u3): (f64, f64, f64) = (rng.gen(), rng.gen(), rng.gen());
            let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
            v = [a * (2.0 * PI * u2).sin(), a * (2.0 * PI * u2).cos(), b * (2.0 * PI * u3).sin(), b * (2.0 * PI * u3).cos()];
        }
        Ambient::FlatTorus { dim, periods } => {
            for i in 0..*dim {
                v[i] = rng.gen::<f64>() * periods[i];
            }
        }
        Ambient::Euclidean { dim } => {
            for c in v.iter_mut().take(*dim) {
                *c = rng.gen_range(-1.0..1.0);
            }
        }
    }
    ambient.project(&v)
}

fn sample(ambient: &Ambient, cfg: &KernelConfig, t: f64, x: &Point, y: &Point) -> Result<SelftestSample> {
    let k = PreparedKernel::new(ambient, t, cfg)?;
    let (xv, yv) = (x.vec4(), y.vec4());
    let value = k.eval_points(ambient, xv, yv);
    let symmetry_err = (value - k.eval_points(ambient, yv, xv)).abs();

    let mass = integrate(ambient, xv, xv, t, |z| k.eval_points(ambient, xv, z));
    let normalization_err = (mass - 1.0).abs();

    let s = 0.5 * t;
    let ka = PreparedKernel::new(ambient, t - s, cfg)?;
    let kb = PreparedKernel::new(ambient, s, cfg)?;
    let conv = integrate(ambient, xv, yv, s.min(t - s), |z| ka.eval_points(ambient, xv, z) * kb.eval_points(ambient, z, yv));
    let semigroup_err = (value - conv).abs();

    let time_step = t * 1e-3;
    let kp = PreparedKernel::new(ambient, t + time_step, cfg)?;
    let km = PreparedKernel::new(ambient, t - time_step, cfg)?;
    let dt = (kp.eval_points(ambient, xv, yv) - km.eval_points(ambient, xv, yv)) / (2.0 * time_step);
    let space_step = t.sqrt() * 1e-2;
    let lap = laplacian(ambient, y, space_step, |z| k.eval_points(ambient, xv, z));
    let pde_residual = (dt - lap).abs() / (dt.abs() + value / t);

    Ok(SelftestSample {
        t,
        x: *x,
        y: *y,
        value,
        symmetry_err,
        normalization_err,
        semigroup_err,
        pde_residual,
        time_step,
        space_step,
    })
}

/// Laplace-Beltrami by second differences along geodesics in an
/// orthonormal tangent frame.
fn laplacian(ambient: &Ambient, y: &Point, h: f64, f: impl Fn(&Vec4) -> f64) -> f64 {
    let f0 = f(y.vec4());
    tangent_frame(ambient, y)
        .iter()
        .map(|e| {
            let p = ambient.exp_map(y, &linalg::scale(e, h));
            let m = ambient.exp_map(y, &linalg::scale(e, -h));
            (f(p.vec4()) + f(m.vec4()) - 2.0 * f0) / (h * h)
        })
        .sum()
}

fn tangent_frame(ambient: &Ambient, y: &Point) -> Vec<Vec4> {
    let mut basis: Vec<Vec4> = Vec::new();
    let anchor: Vec<Vec4> = match ambient {
        Ambient::RoundSphere3 => vec![*y.vec4()],
        _ => vec![],
    };
    for i in 0..ambient.chart_dim() {
        let mut e = [0.0; 4];
        e[i] = 1.0;
        for b in anchor.iter().chain(basis.iter()) {
            e = linalg::reject(&e, b);
        }
        if linalg::norm(&e) > 1e-6 {
            basis.push(linalg::normalized(&e));
        }
        if basis.len() == ambient.dim() {
            break;
        }
    }
    basis
}

/// Integrates `f` over the ambient. `a` and `b` locate where the integrand
/// concentrates and `width` is its smallest diffusion time.
fn integrate(ambient: &Ambient, a: &Vec4, b: &Vec4, width: f64, f: impl Fn(&Vec4) -> f64 + Sync) -> f64 {
    match ambient {
        Ambient::Euclidean { dim } => {
            // tensor Gauss-Legendre on a box that holds all but e^{-36} of the mass
            let center = linalg::scale(&linalg::add(a, b), 0.5);
            let half = 12.0 * width.sqrt() + 0.5 * linalg::norm(&linalg::sub(a, b));
            let rule = numerics::composite_rule(-half, half, &[], 8, 12);
            let dim = *dim;
            let n = rule.len();
            let total = n.pow(dim as u32);
            let per_slice = total / n;
            (0..n)
                .into_par_iter()
                .map(|i0| {
                    let mut s = 0.0;
                    for rest in 0..per_slice {
                        let mut z = center;
                        let mut w = rule[i0].1;
                        z[0] += rule[i0].0;
                        let mut r = rest;
                        for axis in 1..dim {
                            let (node, weight) = rule[r % n];
                            r /= n;
                            z[axis] += node;
                            w *= weight;
                        }
                        s += w * f(&z);
                    }
                    s
                })
                .collect::<Vec<_>>()
                .iter()
                .sum()
        }
        Ambient::FlatTorus { dim, periods } => {
            // periodic trapezoid rule: aliasing error ~ exp(−4π² N² s / L²)
            let dim = *dim;
            let n_axis: Vec<usize> = periods[..dim]
                .iter()
                .map(|l| ((2.0 * l / width.sqrt()).ceil() as usize).clamp(16, 160))
                .collect();
            let slices = n_axis[0];
            let rest_total: usize = n_axis[1..].iter().product();
            let cell: f64 = (0..dim).map(|i| periods[i] / n_axis[i] as f64).product();
            (0..slices)
                .into_par_iter()
                .map(|i0| {
                    let mut s = 0.0;
                    for rest in 0..rest_total {
                        let mut z = [0.0; 4];
                        z[0] = periods[0] * i0 as f64 / slices as f64;
                        let mut r = rest;
                        for axis in 1..dim {
                            let k = r % n_axis[axis];
                            r /= n_axis[axis];
                            z[axis] = periods[axis] * k as f64 / n_axis[axis] as f64;
                        }
                        s += f(&z);
                    }
                    s * cell
                })
                .collect::<Vec<_>>()
                .iter()
                .sum()
        }
        Ambient::RoundSphere3 => {
            // hyperspherical product rule with the pole at `a` and the first
            // polar direction towards `b`
            let e1 = *a;
            let mut e2 = linalg::reject(b, &e1);
            if linalg::norm(&e2) < 1e-9 {
                e2 = linalg::reject(&[0.0, 0.0, 0.0, 1.0], &e1);
                if linalg::norm(&e2) < 1e-9 {
                    e2 = linalg::reject(&[1.0, 0.0, 0.0, 0.0], &e1);
                }
            }
            let e2 = linalg::normalized(&e2);
            let mut frame = vec![e1, e2];
            for i in 0..4 {
                let mut e = [0.0; 4];
                e[i] = 1.0;
                for f in &frame {
                    e = linalg::reject(&e, f);
                }
                if linalg::norm(&e) > 1e-6 && frame.len() < 4 {
                    frame.push(linalg::normalized(&e));
                }
            }
            let (e3, e4) = (frame[2], frame[3]);
            let chi_rule = numerics::composite_rule(0.0, PI, &[], 48, 12);
            let psi_rule = numerics::composite_rule(0.0, PI, &[], 24, 12);
            let n_phi = 8;
            chi_rule
                .par_iter()
                .map(|&(chi, wc)| {
                    let (sc, cc) = chi.sin_cos();
                    let mut s = 0.0;
                    for &(psi, wp) in &psi_rule {
                        let (sp, cp) = psi.sin_cos();
                        for k in 0..n_phi {
                            let phi = 2.0 * PI * k as f64 / n_phi as f64;
                            let (sf, cf) = phi.sin_cos();
                            let mut z = linalg::scale(&e1, cc);
                            z = linalg::axpy(&z, sc * cp, &e2);
                            z = linalg::axpy(&z, sc * sp * cf, &e3);
                            z = linalg::axpy(&z, sc * sp * sf, &e4);
                            s += wp * sp * f(&z);
                        }
                    }
                    wc * sc * sc * s * 2.0 * PI / n_phi as f64
                })
                .collect::<Vec<_>>()
                .iter()
                .sum()
        }
    }
}
