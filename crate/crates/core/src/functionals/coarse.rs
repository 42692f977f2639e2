//! Tabulated kernels for the coarse entropy scan. Each candidate center's
//! separations to the quadrature nodes are computed once and then reused
//! across all scales, so the per-scale cost is a table lookup.

use crate::ambient::{nearest_image, Ambient};
use crate::error::Result;
use crate::heat_kernel::{KernelConfig, PreparedKernel};
use crate::linalg::{self, Vec4};

const TABLE_INTERVALS: usize = 8192;

#[derive(Clone, Debug)]
pub(crate) struct Table {
    inv_dx: f64,
    values: Vec<f64>,
}

impl Table {
    fn new(max: f64, f: impl Fn(f64) -> f64) -> Self {
        let dx = max / TABLE_INTERVALS as f64;
        let values = (0..=TABLE_INTERVALS).map(|i| f(i as f64 * dx)).collect();
        Self { inv_dx: 1.0 / dx, values }
    }

    #[inline]
    fn eval(&self, s: f64) -> f64 {
        let u = s * self.inv_dx;
        let i = (u as usize).min(TABLE_INTERVALS - 1);
        let frac = (u - i as f64).min(1.0);
        self.values[i] + frac * (self.values[i + 1] - self.values[i])
    }
}

/// Per center-node pair: squared distance (Euclidean), absolute per-axis
/// offsets (torus) or squared chord (sphere).
#[inline]
pub(crate) fn coarse_separation(ambient: &Ambient, x: &Vec4, y: &Vec4) -> [f64; 3] {
    match ambient {
        Ambient::Euclidean { .. } => [linalg::norm_sq(&linalg::sub(x, y)), 0.0, 0.0],
        Ambient::FlatTorus { periods, .. } => {
            let mut d = [0.0; 3];
            for a in 0..3 {
                d[a] = nearest_image(y[a] - x[a], periods[a]).abs();
            }
            d
        }
        Ambient::RoundSphere3 => [linalg::norm_sq(&linalg::sub(x, y)), 0.0, 0.0],
    }
}

#[derive(Clone, Debug)]
pub(crate) enum CoarseKernel {
    Euclid { pref: f64, inv4t: f64 },
    Torus([Table; 3]),
    Sphere(Table),
}

impl CoarseKernel {
    pub(crate) fn new(ambient: &Ambient, t: f64, cfg: &KernelConfig) -> Result<Self> {
        let k = PreparedKernel::new(ambient, t, cfg)?;
        Ok(match ambient {
            Ambient::Euclidean { .. } => {
                CoarseKernel::Euclid { pref: k.eval_separation(&[0.0; 4]), inv4t: 0.25 / t }
            }
            Ambient::FlatTorus { periods, .. } => {
                let axis = |a: usize| Table::new(0.5 * periods[a], |d| k.torus_axis(a, d).unwrap_or(0.0));
                CoarseKernel::Torus([axis(0), axis(1), axis(2)])
            }
            Ambient::RoundSphere3 => CoarseKernel::Sphere(Table::new(4.0, |c2| {
                let theta = 2.0 * (0.5 * c2.sqrt()).min(1.0).asin();
                k.eval_separation(&[theta, 0.0, 0.0, 0.0])
            })),
        })
    }

    #[inline]
    pub(crate) fn eval(&self, sep: &[f64; 3]) -> f64 {
        match self {
            CoarseKernel::Euclid { pref, inv4t } => pref * (-sep[0] * inv4t).exp(),
            CoarseKernel::Torus(t) => t[0].eval(sep[0]) * t[1].eval(sep[1]) * t[2].eval(sep[2]),
            CoarseKernel::Sphere(t) => t.eval(sep[0]),
        }
    }
}
