//! Heat kernel of the unit 3-sphere as a function of the geodesic angle θ.
//!
//! Spectral form: Σ_{j≥1} j U_{j−1}(cos θ) e^{−(j²−1)t} / (2π²), where
//! U_{j−1}(cos θ) = sin(jθ)/sin θ is evaluated by the Chebyshev recurrence.
//!
//! Image form: e^t (4πt)^{−3/2} Σ_k g(θ + 2πk)/sin θ with g(u) = u e^{−u²/4t}.
//! Terms are grouped into odd pairs `g(a + ψ) − g(a − ψ)` around the nearer
//! pole so the removable singularities at θ = 0 and θ = π are handled by a
//! Taylor expansion instead of a floating-point division.

use std::f64::consts::PI;

use super::SeriesForm;

const SMALL_ANGLE: f64 = 1e-3;

#[derive(Clone, Copy, Debug)]
pub(crate) struct SphereKernel {
    form: SeriesForm,
    t: f64,
    pref: f64,
    c: f64,
    terms: usize,
}

impl SphereKernel {
    pub(crate) fn new(t: f64, tol: f64, crossover: f64) -> Self {
        let form = if t >= crossover { SeriesForm::SpectralSeries } else { SeriesForm::ImageSeries };
        Self::with_form(t, tol, form)
    }

    pub(crate) fn with_form(t: f64, tol: f64, form: SeriesForm) -> Self {
        let (pref, c) = match form {
            SeriesForm::ImageSeries => (t.exp() * (4.0 * PI * t).powf(-1.5), 0.25 / t),
            _ => (0.5 / (PI * PI), 0.0),
        };
        let mut k = Self { form, t, pref, c, terms: 0 };
        k.terms = k.terms_for(tol);
        k
    }

    fn terms_for(&self, tol: f64) -> usize {
        match self.form {
            SeriesForm::ImageSeries => {
                // pair at center a: |D(a, ψ)| ≤ π · max|g'| on [a − π/2, a + π/2]
                let c = self.c;
                let bound = |a: f64| {
                    let lo = (a - 0.5 * PI).max(0.0);
                    let hi = a + 0.5 * PI;
                    PI * (1.0 + 2.0 * c * hi * hi) * (-c * lo * lo).exp()
                };
                let mut k = 1usize;
                loop {
                    // pairs are indexed so their centers grow by 2π; the
                    // near-π grouping starts at π, the near-0 one at 2π
                    let a = PI * (2 * k - 1) as f64;
                    let tail = 2.0 * self.pref * bound(a);
                    if tail < 0.5 * tol || k > 10_000 {
                        return k;
                    }
                    k += 1;
                }
            }
            _ => {
                let bound = |j: usize| {
                    let jf = j as f64;
                    self.pref * jf * jf * (-(jf * jf - 1.0) * self.t).exp()
                };
                let mut j = 1usize;
                loop {
                    let next = bound(j + 1);
                    if (next < 0.25 * tol && bound(j + 2) <= 0.5 * next) || j > 1_000_000 {
                        return j;
                    }
                    j += 1;
                }
            }
        }
    }

    pub(crate) fn form(&self) -> SeriesForm {
        self.form
    }

    pub(crate) fn terms_used(&self) -> usize {
        match self.form {
            SeriesForm::ImageSeries => 2 * self.terms + 1,
            _ => self.terms,
        }
    }

    /// Kernel value at geodesic angle `theta` ∈ [0, π].
    #[inline]
    pub(crate) fn eval(&self, theta: f64) -> f64 {
        match self.form {
            SeriesForm::ImageSeries => self.pref * self.image_sum(theta),
            _ => self.pref * self.spectral_sum(theta),
        }
    }

    fn spectral_sum(&self, theta: f64) -> f64 {
        let x = theta.cos();
        let (mut u_prev, mut u) = (0.0, 1.0); // U_{-1}, U_0
        let mut s = 0.0;
        for j in 1..=self.terms {
            let jf = j as f64;
            s += jf * u * (-(jf * jf - 1.0) * self.t).exp();
            let next = 2.0 * x * u - u_prev;
            u_prev = u;
            u = next;
        }
        s
    }

    fn image_sum(&self, theta: f64) -> f64 {
        let c = self.c;
        if theta <= 0.5 * PI {
            let mut s = 0.5 * pair_over_sin(0.0, theta, c);
            for k in 1..=self.terms {
                s += pair_over_sin(2.0 * PI * k as f64, theta, c);
            }
            s
        } else {
            let phi = PI - theta;
            let mut s = 0.0;
            for k in 0..self.terms {
                s -= pair_over_sin(PI * (2 * k + 1) as f64, phi, c);
            }
            s
        }
    }
}

/// [g(a + ψ) − g(a − ψ)] / sin ψ for g(u) = u e^{−c u²}, with the ψ → 0
/// limit 2g'(a) + ψ²(g'(a) + g'''(a))/3 used for small ψ.
#[inline]
fn pair_over_sin(a: f64, psi: f64, c: f64) -> f64 {
    if psi < SMALL_ANGLE {
        let a2 = a * a;
        let e = (-c * a2).exp();
        let g1 = (1.0 - 2.0 * c * a2) * e;
        let g3 = (-6.0 * c + 24.0 * c * c * a2 - 8.0 * c * c * c * a2 * a2) * e;
        2.0 * g1 + psi * psi * (g1 + g3) / 3.0
    } else {
        let g = |u: f64| u * (-c * u * u).exp();
        (g(a + psi) - g(a - psi)) / psi.sin()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms_agree() {
        for &t in &[0.01, 0.05, 0.1, 0.5, 1.0, 2.0, 5.0] {
            let a = SphereKernel::with_form(t, 1e-14, SeriesForm::ImageSeries);
            let b = SphereKernel::with_form(t, 1e-14, SeriesForm::SpectralSeries);
            for &th in &[0.0, 1e-6, 5e-4, 0.2, 1.0, PI / 2.0, 2.5, PI - 1e-4, PI - 1e-7, PI] {
                let (va, vb) = (a.eval(th), b.eval(th));
                assert!((va - vb).abs() < 1e-9 * (1.0 + va.abs()), "t={t} θ={th}: {va} vs {vb}");
            }
        }
    }

    #[test]
    fn small_angle_branch_is_continuous() {
        let k = SphereKernel::with_form(0.3, 1e-14, SeriesForm::ImageSeries);
        let below = k.eval(SMALL_ANGLE * 0.999_999);
        let above = k.eval(SMALL_ANGLE * 1.000_001);
        assert!((below - above).abs() < 1e-10 * below);
        let below = k.eval(PI - SMALL_ANGLE * 0.999_999);
        let above = k.eval(PI - SMALL_ANGLE * 1.000_001);
        assert!((below - above).abs() < 1e-10 * below.abs().max(1e-3));
    }
}
