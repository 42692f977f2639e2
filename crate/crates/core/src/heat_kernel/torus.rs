//! One-dimensional periodic heat kernel, in image-sum and Fourier forms.

use std::f64::consts::PI;

use super::SeriesForm;

/// The periodic kernel on a circle of length `period` at fixed time,
/// truncated so the dropped tail stays below `tol`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct CircleKernel {
    period: f64,
    form: SeriesForm,
    pref: f64,
    inv4t: f64,
    spectral_rate: f64,
    terms: usize,
}

impl CircleKernel {
    /// Image sum is used when `4t ≤ crossover · L²/π`.
    pub(crate) fn new(period: f64, t: f64, tol: f64, crossover: f64) -> Self {
        let form = if 4.0 * t <= crossover * period * period / PI {
            SeriesForm::ImageSeries
        } else {
            SeriesForm::SpectralSeries
        };
        Self::with_form(period, t, tol, form)
    }

    pub(crate) fn with_form(period: f64, t: f64, tol: f64, form: SeriesForm) -> Self {
        let pref = match form {
            SeriesForm::ImageSeries => (4.0 * PI * t).powf(-0.5),
            _ => 1.0 / period,
        };
        let mut k = Self {
            period,
            form,
            pref,
            inv4t: 0.25 / t,
            spectral_rate: 4.0 * PI * PI * t / (period * period),
            terms: 0,
        };
        k.terms = k.terms_for(tol);
        k
    }

    /// Smallest K whose tail bound drops below `tol`.
    fn terms_for(&self, tol: f64) -> usize {
        let bound = |j: usize| -> f64 {
            match self.form {
                SeriesForm::ImageSeries => {
                    let d = (j as f64 - 0.5) * self.period;
                    2.0 * self.pref * (-d * d * self.inv4t).exp()
                }
                _ => 2.0 * self.pref * (-self.spectral_rate * (j * j) as f64).exp(),
            }
        };
        let mut k = 0usize;
        loop {
            // the terms decay faster than geometrically once past the peak;
            // bound the tail by the next term times a safety factor of 2
            let next = bound(k + 1);
            let after = bound(k + 2);
            if next == 0.0 || (next < 0.5 * tol && after <= 0.5 * next) {
                return k;
            }
            k += 1;
            if k > 100_000 {
                return k;
            }
        }
    }

    pub(crate) fn form(&self) -> SeriesForm {
        self.form
    }

    pub(crate) fn terms_used(&self) -> usize {
        match self.form {
            SeriesForm::ImageSeries => 2 * self.terms + 1,
            _ => self.terms + 1,
        }
    }

    /// Kernel at signed offset `delta` (any value; reduced internally).
    #[inline]
    pub(crate) fn eval(&self, delta: f64) -> f64 {
        let l = self.period;
        let d = delta - l * (delta / l).round();
        match self.form {
            SeriesForm::ImageSeries => {
                let mut s = (-d * d * self.inv4t).exp();
                for k in 1..=self.terms {
                    let a = d + k as f64 * l;
                    let b = d - k as f64 * l;
                    s += (-a * a * self.inv4t).exp() + (-b * b * self.inv4t).exp();
                }
                self.pref * s
            }
            _ => {
                let w = 2.0 * PI * d / l;
                let mut s = 1.0;
                for k in 1..=self.terms {
                    let kf = k as f64;
                    s += 2.0 * (-self.spectral_rate * kf * kf).exp() * (kf * w).cos();
                }
                self.pref * s
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms_agree_on_crossing_window() {
        for &l in &[1.0, 2.0, 0.7] {
            for &t in &[0.01, 0.05, 0.08, 0.1, 0.3, 1.0] {
                let a = CircleKernel::with_form(l, t, 1e-14, SeriesForm::ImageSeries);
                let b = CircleKernel::with_form(l, t, 1e-14, SeriesForm::SpectralSeries);
                for &d in &[0.0, 0.1, 0.33, -0.45, 0.5] {
                    let (va, vb) = (a.eval(d * l), b.eval(d * l));
                    assert!((va - vb).abs() < 1e-12, "L={l} t={t} d={d}: {va} vs {vb}");
                }
            }
        }
    }

    #[test]
    fn term_counts_stay_small_at_crossover() {
        let t = 1.0 / (4.0 * PI);
        let k = CircleKernel::new(1.0, t, 1e-12, 1.0);
        assert!(k.terms_used() < 50);
    }
}
