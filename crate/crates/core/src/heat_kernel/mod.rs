//! Heat kernels of the model ambients, evaluated from closed forms or
//! truncated series with an explicit tail tolerance.

mod selftest;
mod sphere;
mod torus;

pub use selftest::{kernel_selftest, SelftestReport, SelftestSample, SelftestSpec};

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::ambient::{nearest_image, sphere_angle, Ambient, Point};
use crate::error::{invalid, Error, Result};
use crate::linalg::{self, Vec4};
use sphere::SphereKernel;
use torus::CircleKernel;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    /// Absolute bound on the dropped series tail.
    pub truncation_tol: f64,
    /// Image/spectral switch point in ambient-scaled units: time 1 on the
    /// unit sphere, `L²/(4π)` per torus axis.
    pub crossover_time: f64,
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self { truncation_tol: 1e-12, crossover_time: 1.0 }
    }
}

impl KernelConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.truncation_tol > 0.0 && self.truncation_tol <= 1e-6) {
            return invalid(format!("truncation_tol must lie in (0, 1e-6], got {}", self.truncation_tol));
        }
        if !(self.crossover_time > 0.0 && self.crossover_time.is_finite()) {
            return invalid(format!("crossover_time must be positive, got {}", self.crossover_time));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesForm {
    ClosedForm,
    ImageSeries,
    SpectralSeries,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelValue {
    pub value: f64,
    pub terms_used: usize,
    pub form: SeriesForm,
}

#[derive(Clone, Copy, Debug)]
enum Inner {
    Euclid { pref: f64, inv4t: f64 },
    Torus { dim: usize, axes: [Option<CircleKernel>; 4] },
    Sphere(SphereKernel),
}

/// A kernel frozen at one time `t`, cheap to evaluate at many point pairs.
#[derive(Clone, Copy, Debug)]
pub struct PreparedKernel {
    t: f64,
    inner: Inner,
}

impl PreparedKernel {
    pub fn new(ambient: &Ambient, t: f64, cfg: &KernelConfig) -> Result<Self> {
        Self::build(ambient, t, cfg, None)
    }

    /// Forces one series form (closed form is the only form on Euclidean
    /// space). Used to cross-check the two series against each other.
    pub fn with_form(ambient: &Ambient, t: f64, cfg: &KernelConfig, form: SeriesForm) -> Result<Self> {
        Self::build(ambient, t, cfg, Some(form))
    }

    fn build(ambient: &Ambient, t: f64, cfg: &KernelConfig, form: Option<SeriesForm>) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return invalid(format!("kernel time must be positive and finite, got {t}"));
        }
        cfg.validate()?;
        let tol = cfg.truncation_tol;
        let inner = match ambient {
            Ambient::Euclidean { dim } => {
                let pref = (4.0 * PI * t).powf(-(*dim as f64) / 2.0);
                if !pref.is_finite() {
                    return Err(Error::NumericOverflow(format!("(4πt)^(-n/2) overflows at t = {t:e}")));
                }
                Inner::Euclid { pref, inv4t: 0.25 / t }
            }
            Ambient::FlatTorus { dim, periods } => {
                let make = |l: f64, tol: f64| match form {
                    Some(f @ (SeriesForm::ImageSeries | SeriesForm::SpectralSeries)) => CircleKernel::with_form(l, t, tol, f),
                    _ => CircleKernel::new(l, t, tol, cfg.crossover_time),
                };
                // per-axis tolerance so the product error stays below `tol`
                let peak: f64 = periods[..*dim].iter().map(|&l| make(l, 1e-300).eval(0.0)).fold(1.0, |m, v| m.max(v));
                let axis_tol = tol / (*dim as f64 * peak.powi(*dim as i32 - 1));
                let mut axes = [None; 4];
                for i in 0..*dim {
                    axes[i] = Some(make(periods[i], axis_tol));
                }
                Inner::Torus { dim: *dim, axes }
            }
            Ambient::RoundSphere3 => Inner::Sphere(match form {
                Some(f @ (SeriesForm::ImageSeries | SeriesForm::SpectralSeries)) => SphereKernel::with_form(t, tol, f),
                _ => SphereKernel::new(t, tol, cfg.crossover_time),
            }),
        };
        Ok(Self { t, inner })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn form(&self) -> SeriesForm {
        match &self.inner {
            Inner::Euclid { .. } => SeriesForm::ClosedForm,
            Inner::Torus { dim, axes } => {
                if axes[..*dim].iter().flatten().any(|a| a.form() == SeriesForm::ImageSeries) {
                    SeriesForm::ImageSeries
                } else {
                    SeriesForm::SpectralSeries
                }
            }
            Inner::Sphere(k) => k.form(),
        }
    }

    pub fn terms_used(&self) -> usize {
        match &self.inner {
            Inner::Euclid { .. } => 1,
            Inner::Torus { dim, axes } => axes[..*dim].iter().flatten().map(|a| a.terms_used()).sum(),
            Inner::Sphere(k) => k.terms_used(),
        }
    }

    /// Kernel from a precomputed [`separation`], without validation.
    #[inline]
    pub fn eval_separation(&self, sep: &Vec4) -> f64 {
        let v = match &self.inner {
            Inner::Euclid { pref, inv4t } => pref * (-sep[0] * inv4t).exp(),
            Inner::Torus { dim, axes } => {
                let mut p = 1.0;
                for (i, a) in axes[..*dim].iter().enumerate() {
                    p *= a.as_ref().map_or(1.0, |a| a.eval(sep[i]));
                }
                p
            }
            Inner::Sphere(k) => k.eval(sep[0]),
        };
        // spectral sums can land a few ulps below zero far from the diagonal
        v.max(0.0)
    }

    /// One circle factor of a torus kernel; `None` on other ambients.
    pub(crate) fn torus_axis(&self, axis: usize, delta: f64) -> Option<f64> {
        match &self.inner {
            Inner::Torus { axes, .. } => axes.get(axis).copied().flatten().map(|a| a.eval(delta)),
            _ => None,
        }
    }

    #[inline]
    pub fn eval_points(&self, ambient: &Ambient, x: &Vec4, y: &Vec4) -> f64 {
        self.eval_separation(&separation(ambient, x, y))
    }
}

/// The quantity each kernel actually depends on: squared distance
/// (Euclidean), per-axis nearest-image offsets (torus) or the geodesic angle
/// (sphere).
#[inline]
pub fn separation(ambient: &Ambient, x: &Vec4, y: &Vec4) -> Vec4 {
    match ambient {
        Ambient::Euclidean { .. } => [linalg::norm_sq(&linalg::sub(y, x)), 0.0, 0.0, 0.0],
        Ambient::FlatTorus { dim, periods } => {
            let mut d = [0.0; 4];
            for i in 0..*dim {
                d[i] = nearest_image(y[i] - x[i], periods[i]);
            }
            d
        }
        Ambient::RoundSphere3 => [sphere_angle(x, y), 0.0, 0.0, 0.0],
    }
}

pub fn heat_kernel(ambient: &Ambient, x: &Point, y: &Point, t: f64, cfg: &KernelConfig) -> Result<KernelValue> {
    ambient.check_point(x)?;
    ambient.check_point(y)?;
    let k = PreparedKernel::new(ambient, t, cfg)?;
    finish(&k, ambient, x, y)
}

pub fn heat_kernel_with_form(
    ambient: &Ambient,
    x: &Point,
    y: &Point,
    t: f64,
    cfg: &KernelConfig,
    form: SeriesForm,
) -> Result<KernelValue> {
    ambient.check_point(x)?;
    ambient.check_point(y)?;
    let k = PreparedKernel::with_form(ambient, t, cfg, form)?;
    finish(&k, ambient, x, y)
}

fn finish(k: &PreparedKernel, ambient: &Ambient, x: &Point, y: &Point) -> Result<KernelValue> {
    let value = k.eval_points(ambient, x.vec4(), y.vec4());
    if !value.is_finite() {
        return Err(Error::NumericOverflow(format!("heat kernel evaluated to {value} at t = {}", k.t)));
    }
    debug_assert!(value >= 0.0);
    Ok(KernelValue { value, terms_used: k.terms_used(), form: k.form() })
}

/// Backward kernel ρ_{y,T}(x, t) = H(x, y, T − t).
pub fn backward_kernel(
    ambient: &Ambient,
    y: &Point,
    big_t: f64,
    x: &Point,
    t: f64,
    cfg: &KernelConfig,
) -> Result<KernelValue> {
    if !(t < big_t) {
        return invalid(format!("backward kernel needs t < T, got t = {t}, T = {big_t}"));
    }
    heat_kernel(ambient, x, y, big_t - t, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg() -> KernelConfig {
        KernelConfig::default()
    }

    #[test]
    fn euclidean_on_diagonal_at_quarter_pi_is_one() {
        let e = Ambient::euclidean(3).unwrap();
        let x = e.point(&[0.3, -1.0, 2.0]).unwrap();
        let v = heat_kernel(&e, &x, &x, 1.0 / (4.0 * PI), &cfg()).unwrap();
        assert_relative_eq!(v.value, 1.0, epsilon = 1e-15);
        assert_eq!(v.form, SeriesForm::ClosedForm);
        assert_eq!(v.terms_used, 1);
    }

    #[test]
    fn torus_long_time_limit_is_inverse_volume() {
        let t = Ambient::flat_torus(&[1.0, 1.0, 1.0]).unwrap();
        let x = t.point(&[0.2, 0.7, 0.1]).unwrap();
        let v = heat_kernel(&t, &x, &x, 10.0, &cfg()).unwrap();
        assert!((v.value - 1.0).abs() < 1e-10);
        assert_eq!(v.form, SeriesForm::SpectralSeries);
    }

    #[test]
    fn sphere_forms_agree_at_right_angle() {
        let s = Ambient::sphere3();
        let x = s.point(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        let y = s.point(&[0.0, 1.0, 0.0, 0.0]).unwrap();
        let a = heat_kernel_with_form(&s, &x, &y, 0.1, &cfg(), SeriesForm::ImageSeries).unwrap();
        let b = heat_kernel_with_form(&s, &x, &y, 0.1, &cfg(), SeriesForm::SpectralSeries).unwrap();
        assert!((a.value - b.value).abs() < 1e-8);
        assert!(a.terms_used >= 1 && b.terms_used >= 1);
    }

    #[test]
    fn invalid_times_are_rejected() {
        let e = Ambient::euclidean(3).unwrap();
        let x = e.point(&[0.0; 3]).unwrap();
        assert!(matches!(heat_kernel(&e, &x, &x, 0.0, &cfg()), Err(Error::InvalidArgument(_))));
        assert!(matches!(heat_kernel(&e, &x, &x, -1.0, &cfg()), Err(Error::InvalidArgument(_))));
        assert!(matches!(heat_kernel(&e, &x, &x, 1e-310, &cfg()), Err(Error::NumericOverflow(_))));
    }

    #[test]
    fn backward_kernel_examples() {
        let s = Ambient::sphere3();
        let x = s.point(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        let y = s.point(&[0.6, 0.8, 0.0, 0.0]).unwrap();
        let b = backward_kernel(&s, &y, 1.0, &x, 0.5, &cfg()).unwrap();
        assert_eq!(b, heat_kernel(&s, &x, &y, 0.5, &cfg()).unwrap());
        assert!(backward_kernel(&s, &y, 1.0, &x, 1.0, &cfg()).is_err());

        let e = Ambient::euclidean(3).unwrap();
        let o = e.point(&[0.0; 3]).unwrap();
        let b = backward_kernel(&e, &o, 1.0, &o, 1.0 - 1.0 / (4.0 * PI), &cfg()).unwrap();
        assert_relative_eq!(b.value, 1.0, epsilon = 1e-12);

        let t = Ambient::flat_torus(&[1.0, 1.0, 1.0]).unwrap();
        let p = t.point(&[0.5, 0.5, 0.5]).unwrap();
        let b = backward_kernel(&t, &p, 12.0, &p, 2.0, &cfg()).unwrap();
        assert!((b.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn config_bounds() {
        let bad = KernelConfig { truncation_tol: 1e-3, ..cfg() };
        assert!(bad.validate().is_err());
        let e = Ambient::euclidean(3).unwrap();
        let x = e.point(&[0.0; 3]).unwrap();
        assert!(heat_kernel(&e, &x, &x, 1.0, &bad).is_err());
    }

    #[test]
    fn product_property_on_flat_tori() {
        // brute-force 2-D lattice sum, which never factorizes over axes
        let (l1, l2) = (1.0, 0.6);
        let t2 = Ambient::flat_torus(&[l1, l2]).unwrap();
        let x = t2.point(&[0.1, 0.5]).unwrap();
        let y = t2.point(&[0.85, 0.05]).unwrap();
        for &t in &[0.005, 0.04, 0.3, 2.0] {
            let lhs = heat_kernel(&t2, &x, &y, t, &cfg()).unwrap().value;
            let mut rhs = 0.0;
            for k1 in -40i32..=40 {
                for k2 in -60i32..=60 {
                    let d1 = y[0] - x[0] + k1 as f64 * l1;
                    let d2 = y[1] - x[1] + k2 as f64 * l2;
                    rhs += (-(d1 * d1 + d2 * d2) / (4.0 * t)).exp();
                }
            }
            rhs /= 4.0 * PI * t;
            assert!((lhs - rhs).abs() < 1e-12 * lhs.max(1.0), "t={t}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn small_time_on_diagonal_concentration() {
        let t = 1e-4;
        let target = (4.0 * PI).powf(-1.5);
        let ambients = [Ambient::euclidean(3).unwrap(), Ambient::flat_torus(&[1.0, 1.0, 1.0]).unwrap(), Ambient::sphere3()];
        for a in ambients {
            let x = a.project(&[0.5, 0.5, 0.5, 0.5]);
            let v = heat_kernel(&a, &x, &x, t, &cfg()).unwrap().value;
            let scaled = t.powf(1.5) * v;
            // scalar curvature 6 on the unit S³ gives the factor 1 + S t / 6
            let curvature = if a == Ambient::sphere3() { 1.0 + t } else { 1.0 };
            assert!((scaled - target * curvature).abs() < 1e-6 * target, "{a}: {scaled} vs {target}");
            let tiny: f64 = 1e-8;
            let scaled = tiny.powf(1.5) * heat_kernel(&a, &x, &x, tiny, &cfg()).unwrap().value;
            assert!((scaled - target).abs() < 1e-6, "{a}: {scaled} vs {target}");
        }
    }

    #[test]
    fn sphere_long_time_limit() {
        let s = Ambient::sphere3();
        let x = s.point(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        for th in [0.0, 1.0, PI] {
            let y = s.project(&[th.cos(), th.sin(), 0.0, 0.0]);
            let v = heat_kernel(&s, &x, &y, 10.0, &cfg()).unwrap().value;
            assert!((v - 0.5 / (PI * PI)).abs() < 1e-8);
        }
    }

    #[test]
    fn form_consistency_around_crossover() {
        let c = cfg();
        let s = Ambient::sphere3();
        let t3 = Ambient::flat_torus(&[1.0, 1.3, 0.8]).unwrap();
        let x = s.point(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        for &t in &[0.5, 0.8, 1.0, 1.25, 2.0] {
            for th in [0.0, 0.4, 1.7, 3.0, PI] {
                let y = s.project(&[th.cos(), 0.0, th.sin(), 0.0]);
                let a = heat_kernel_with_form(&s, &x, &y, t, &c, SeriesForm::ImageSeries).unwrap().value;
                let b = heat_kernel_with_form(&s, &x, &y, t, &c, SeriesForm::SpectralSeries).unwrap().value;
                assert!((a - b).abs() < 1e-8, "sphere t={t} θ={th}: {a} {b}");
            }
        }
        let p = t3.point(&[0.0, 0.0, 0.0]).unwrap();
        let q = t3.point(&[0.3, 0.9, 0.5]).unwrap();
        for &t in &[0.04, 0.08, 0.1, 0.15, 0.3] {
            let a = heat_kernel_with_form(&t3, &p, &q, t, &c, SeriesForm::ImageSeries).unwrap().value;
            let b = heat_kernel_with_form(&t3, &p, &q, t, &c, SeriesForm::SpectralSeries).unwrap().value;
            assert!((a - b).abs() < 1e-8, "torus t={t}: {a} {b}");
        }
    }

    #[test]
    fn tightening_truncation_moves_value_by_less_than_old_tolerance() {
        let s = Ambient::sphere3();
        let t3 = Ambient::flat_torus(&[1.0, 1.0, 1.0]).unwrap();
        let cases = [
            (s, s.point(&[1.0, 0.0, 0.0, 0.0]).unwrap(), s.project(&[0.2, 0.9, 0.1, -0.3])),
            (t3, t3.point(&[0.1, 0.2, 0.3]).unwrap(), t3.point(&[0.8, 0.5, 0.35]).unwrap()),
        ];
        for (a, x, y) in cases {
            for &t in &[0.01, 0.2, 0.9, 1.1, 4.0] {
                let mut prev: Option<(f64, f64)> = None;
                for tol in [1e-6, 1e-8, 1e-10, 1e-12, 1e-14] {
                    let c = KernelConfig { truncation_tol: tol, ..cfg() };
                    let v = heat_kernel(&a, &x, &y, t, &c).unwrap().value;
                    if let Some((pv, ptol)) = prev {
                        assert!((v - pv).abs() <= ptol, "{a} t={t}: {pv} -> {v} exceeds {ptol}");
                    }
                    prev = Some((v, tol));
                }
            }
        }
    }
}
