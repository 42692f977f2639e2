//! The three model ambient manifolds: Euclidean space, flat tori and the
//! unit round 3-sphere (stored extrinsically as unit vectors in R⁴).

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{self, Mat4, Vec4};
use crate::numerics;

/// Maximum chart dimension supported by [`Point`].
pub const MAX_CHART_DIM: usize = 4;

const SPHERE_NORM_TOL: f64 = 1e-12;
const ORTHOGONALITY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Ambient {
    Euclidean { dim: usize },
    FlatTorus { dim: usize, periods: Vec4 },
    RoundSphere3,
}

/// A point in an ambient chart. Torus coordinates live in the fundamental
/// domain `[0, L_i)`; sphere coordinates are unit vectors in R⁴.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<f64>", try_from = "Vec<f64>")]
pub struct Point {
    coords: Vec4,
    dim: usize,
}

impl Point {
    /// Raw chart point without any ambient validation.
    pub fn from_slice(c: &[f64]) -> Result<Self> {
        if c.is_empty() || c.len() > MAX_CHART_DIM {
            return invalid(format!("point needs 1..={MAX_CHART_DIM} coordinates, got {}", c.len()));
        }
        let mut coords = [0.0; 4];
        coords[..c.len()].copy_from_slice(c);
        Ok(Self { coords, dim: c.len() })
    }

    pub(crate) fn raw(coords: Vec4, dim: usize) -> Self {
        Self { coords, dim }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim]
    }

    pub fn vec4(&self) -> &Vec4 {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.coords().to_vec()
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Point::from_slice(&v)
    }
}

impl std::ops::Index<usize> for Point {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.coords()[i]
    }
}

/// Exact geometric constants of an ambient. Non-compact quantities are
/// reported as `f64::INFINITY`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AmbientMetadata {
    pub diameter: f64,
    pub injectivity_radius: f64,
    pub volume: f64,
    pub ricci_nonnegative: bool,
    pub sectional_nonnegative_and_ricci_parallel: bool,
}

/// Ball volume together with an estimate of its numerical error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VolumeEstimate {
    pub volume: f64,
    pub error_estimate: f64,
    pub exact: bool,
}

impl Ambient {
    pub fn euclidean(dim: usize) -> Result<Self> {
        if !(2..=MAX_CHART_DIM).contains(&dim) {
            return invalid(format!("Euclidean dimension must be in 2..={MAX_CHART_DIM}, got {dim}"));
        }
        Ok(Ambient::Euclidean { dim })
    }

    pub fn flat_torus(periods: &[f64]) -> Result<Self> {
        let dim = periods.len();
        if !(2..=MAX_CHART_DIM).contains(&dim) {
            return invalid(format!("torus dimension must be in 2..={MAX_CHART_DIM}, got {dim}"));
        }
        if periods.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
            return invalid(format!("torus periods must be positive and finite: {periods:?}"));
        }
        let mut p = [0.0; 4];
        p[..dim].copy_from_slice(periods);
        Ok(Ambient::FlatTorus { dim, periods: p })
    }

    pub fn sphere3() -> Self {
        Ambient::RoundSphere3
    }

    /// Intrinsic dimension n.
    pub fn dim(&self) -> usize {
        match self {
            Ambient::Euclidean { dim } | Ambient::FlatTorus { dim, .. } => *dim,
            Ambient::RoundSphere3 => 3,
        }
    }

    pub fn chart_dim(&self) -> usize {
        match self {
            Ambient::RoundSphere3 => 4,
            _ => self.dim(),
        }
    }

    pub fn periods(&self) -> Option<&[f64]> {
        match self {
            Ambient::FlatTorus { dim, periods } => Some(&periods[..*dim]),
            _ => None,
        }
    }

    pub fn is_compact(&self) -> bool {
        !matches!(self, Ambient::Euclidean { .. })
    }

    /// Builds a validated point. Torus coordinates are wrapped into the
    /// fundamental domain; sphere points must already be unit length.
    pub fn point(&self, c: &[f64]) -> Result<Point> {
        if c.len() != self.chart_dim() {
            return invalid(format!(
                "point has {} coordinates, ambient {self} needs {}",
                c.len(),
                self.chart_dim()
            ));
        }
        let p = Point::from_slice(c)?;
        if p.coords().iter().any(|v| !v.is_finite()) {
            return invalid("point has non-finite coordinates");
        }
        match self {
            Ambient::FlatTorus { .. } => Ok(self.wrap(p.coords)),
            Ambient::RoundSphere3 => {
                let n = linalg::norm(&p.coords);
                if (n - 1.0).abs() > SPHERE_NORM_TOL {
                    return invalid(format!("sphere point has norm {n}, expected 1"));
                }
                Ok(p)
            }
            Ambient::Euclidean { .. } => Ok(p),
        }
    }

    /// Maps arbitrary chart coordinates onto the ambient: wraps on the torus,
    /// normalizes on the sphere.
    pub fn project(&self, c: &Vec4) -> Point {
        match self {
            Ambient::FlatTorus { .. } => self.wrap(*c),
            Ambient::RoundSphere3 => Point::raw(linalg::normalized(c), 4),
            Ambient::Euclidean { dim } => {
                let mut v = *c;
                v[*dim..].iter_mut().for_each(|x| *x = 0.0);
                Point::raw(v, *dim)
            }
        }
    }

    pub(crate) fn wrap(&self, mut c: Vec4) -> Point {
        if let Ambient::FlatTorus { dim, periods } = self {
            for i in 0..*dim {
                let l = periods[i];
                let mut w = c[i].rem_euclid(l);
                if w >= l {
                    w = 0.0;
                }
                c[i] = w;
            }
            c[*dim..].iter_mut().for_each(|x| *x = 0.0);
            Point::raw(c, *dim)
        } else {
            Point::raw(c, self.chart_dim())
        }
    }

    pub(crate) fn check_point(&self, p: &Point) -> Result<()> {
        if p.dim() != self.chart_dim() {
            return invalid(format!(
                "dimension mismatch: point has {} coordinates, ambient {self} needs {}",
                p.dim(),
                self.chart_dim()
            ));
        }
        Ok(())
    }

    /// Shortest displacement from `x` to `y` on the torus (nearest image per
    /// axis), plain difference elsewhere.
    pub fn displacement(&self, x: &Point, y: &Point) -> Vec4 {
        let mut d = linalg::sub(y.vec4(), x.vec4());
        if let Ambient::FlatTorus { dim, periods } = self {
            for i in 0..*dim {
                d[i] = nearest_image(d[i], periods[i]);
            }
        }
        d
    }

    pub fn geodesic_distance(&self, x: &Point, y: &Point) -> Result<f64> {
        self.check_point(x)?;
        self.check_point(y)?;
        Ok(self.distance_unchecked(x.vec4(), y.vec4()))
    }

    #[inline]
    pub(crate) fn distance_unchecked(&self, x: &Vec4, y: &Vec4) -> f64 {
        match self {
            Ambient::Euclidean { .. } => linalg::norm(&linalg::sub(y, x)),
            Ambient::FlatTorus { dim, periods } => {
                let mut s = 0.0;
                for i in 0..*dim {
                    let d = nearest_image(y[i] - x[i], periods[i]);
                    s += d * d;
                }
                s.sqrt()
            }
            Ambient::RoundSphere3 => sphere_angle(x, y),
        }
    }

    pub fn ball_volume(&self, x: &Point, r: f64) -> Result<f64> {
        Ok(self.ball_volume_estimate(x, r)?.volume)
    }

    /// Volume of the geodesic ball `B_r(x)` with an error estimate. Flat-torus
    /// balls larger than the injectivity radius are computed as the volume of
    /// a Euclidean ball clipped to the centered fundamental box, by nested
    /// Gauss-Legendre quadrature; the estimate compares two quadrature orders.
    pub fn ball_volume_estimate(&self, x: &Point, r: f64) -> Result<VolumeEstimate> {
        self.check_point(x)?;
        if !(r > 0.0) {
            return invalid(format!("ball radius must be positive, got {r}"));
        }
        let exact = |v| VolumeEstimate { volume: v, error_estimate: 0.0, exact: true };
        Ok(match self {
            Ambient::Euclidean { dim } => exact(unit_ball_volume(*dim) * r.powi(*dim as i32)),
            Ambient::RoundSphere3 => {
                if r >= PI {
                    exact(2.0 * PI * PI)
                } else {
                    exact(PI * (2.0 * r - (2.0 * r).sin()))
                }
            }
            Ambient::FlatTorus { dim, periods } => {
                let half: Vec<f64> = periods[..*dim].iter().map(|l| 0.5 * l).collect();
                let min_half = half.iter().cloned().fold(f64::INFINITY, f64::min);
                if r <= min_half {
                    exact(unit_ball_volume(*dim) * r.powi(*dim as i32))
                } else {
                    let coarse = box_ball_volume(r, &half, 16);
                    let fine = box_ball_volume(r, &half, 32);
                    VolumeEstimate { volume: fine, error_estimate: (fine - coarse).abs(), exact: false }
                }
            }
        })
    }

    pub fn metadata(&self) -> AmbientMetadata {
        match self {
            Ambient::Euclidean { .. } => AmbientMetadata {
                diameter: f64::INFINITY,
                injectivity_radius: f64::INFINITY,
                volume: f64::INFINITY,
                ricci_nonnegative: true,
                sectional_nonnegative_and_ricci_parallel: true,
            },
            Ambient::FlatTorus { dim, periods } => {
                let p = &periods[..*dim];
                AmbientMetadata {
                    diameter: 0.5 * p.iter().map(|l| l * l).sum::<f64>().sqrt(),
                    injectivity_radius: 0.5 * p.iter().cloned().fold(f64::INFINITY, f64::min),
                    volume: p.iter().product(),
                    ricci_nonnegative: true,
                    sectional_nonnegative_and_ricci_parallel: true,
                }
            }
            Ambient::RoundSphere3 => AmbientMetadata {
                diameter: PI,
                injectivity_radius: PI,
                volume: 2.0 * PI * PI,
                ricci_nonnegative: true,
                sectional_nonnegative_and_ricci_parallel: true,
            },
        }
    }

    /// Exponential map: walks distance `|v|` from `x` along the geodesic with
    /// initial velocity `v` (the tangential part of `v` on the sphere).
    pub fn exp_map(&self, x: &Point, v: &Vec4) -> Point {
        match self {
            Ambient::RoundSphere3 => {
                let t = linalg::reject(v, x.vec4());
                let len = linalg::norm(&t);
                if len == 0.0 {
                    return *x;
                }
                let dir = linalg::scale(&t, 1.0 / len);
                let c = linalg::scale(x.vec4(), len.cos());
                self.project(&linalg::axpy(&c, len.sin(), &dir))
            }
            _ => self.project(&linalg::add(x.vec4(), v)),
        }
    }
}

impl fmt::Display for Ambient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ambient::Euclidean { dim } => write!(f, "euclidean{dim}"),
            Ambient::FlatTorus { dim, periods } => {
                let parts: Vec<String> = periods[..*dim].iter().map(|l| format!("{l}")).collect();
                write!(f, "torus:{}", parts.join(","))
            }
            Ambient::RoundSphere3 => write!(f, "sphere3"),
        }
    }
}

impl FromStr for Ambient {
    type Err = Error;

    /// Accepts `euclidean3` (or `euclideanN`), `torus:Lx,Ly,Lz` and `sphere3`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "sphere3" {
            return Ok(Ambient::RoundSphere3);
        }
        if let Some(rest) = s.strip_prefix("euclidean") {
            let dim = rest
                .parse::<usize>()
                .map_err(|_| Error::InvalidArgument(format!("bad Euclidean dimension in `{s}`")))?;
            return Ambient::euclidean(dim);
        }
        if let Some(rest) = s.strip_prefix("torus:") {
            let periods: std::result::Result<Vec<f64>, _> = rest.split(',').map(|p| p.trim().parse::<f64>()).collect();
            let periods = periods.map_err(|_| Error::InvalidArgument(format!("bad torus periods in `{s}`")))?;
            return Ambient::flat_torus(&periods);
        }
        invalid(format!("unknown ambient `{s}`"))
    }
}

#[inline]
pub(crate) fn nearest_image(d: f64, l: f64) -> f64 {
    d - l * (d / l).round()
}

/// Angle between unit vectors, stable near 0 and π.
#[inline]
pub(crate) fn sphere_angle(x: &Vec4, y: &Vec4) -> f64 {
    let c = linalg::dot(x, y).clamp(-1.0, 1.0);
    if c.abs() < 0.9 {
        c.acos()
    } else {
        let diff = linalg::norm(&linalg::sub(x, y));
        let sum = linalg::norm(&linalg::add(x, y));
        2.0 * diff.atan2(sum)
    }
}

/// Volume of the Euclidean unit ball in `dim` dimensions.
pub fn unit_ball_volume(dim: usize) -> f64 {
    match dim {
        0 => 1.0,
        1 => 2.0,
        n => 2.0 * PI / n as f64 * unit_ball_volume(n - 2),
    }
}

/// Volume of `{y : |y| ≤ r, |y_i| ≤ half[i]}`, integrating out the last axis
/// with `z = r sin φ` so the integrand stays smooth between breakpoints.
fn box_ball_volume(r: f64, half: &[f64], order: usize) -> f64 {
    match half.len() {
        0 => 1.0,
        1 => 2.0 * r.min(half[0]),
        n => {
            let (inner, last) = half.split_at(n - 1);
            let phi_max = (last[0] / r).min(1.0).asin();
            let mut breaks = Vec::new();
            for c in critical_radii(inner) {
                if c < r {
                    breaks.push((c / r).acos());
                }
            }
            numerics::composite_rule(0.0, phi_max, &breaks, 2, order)
                .into_iter()
                .map(|(phi, w)| {
                    let rho = r * phi.cos();
                    w * 2.0 * r * phi.cos() * box_ball_volume(rho, inner, order)
                })
                .sum()
        }
    }
}

fn critical_radii(half: &[f64]) -> Vec<f64> {
    let n = half.len();
    (1u32..(1 << n))
        .map(|mask| {
            (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| half[i] * half[i])
                .sum::<f64>()
                .sqrt()
        })
        .collect()
}

/// Distance-preserving map of an ambient onto itself.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Isometry {
    /// `x ↦ Q x + b` on Euclidean space.
    Rigid { rotation: Mat4, translation: Vec4 },
    /// Translation of a flat torus, wrapped into the fundamental domain.
    Translation { shift: Vec4 },
    /// Orthogonal map of R⁴ restricted to the unit sphere.
    Rotation { matrix: Mat4 },
}

impl Isometry {
    pub fn rigid(rotation: Mat4, translation: Vec4) -> Result<Self> {
        check_orthogonal(&rotation)?;
        Ok(Isometry::Rigid { rotation, translation })
    }

    pub fn translation(shift: Vec4) -> Self {
        Isometry::Translation { shift }
    }

    pub fn rotation(matrix: Mat4) -> Result<Self> {
        check_orthogonal(&matrix)?;
        Ok(Isometry::Rotation { matrix })
    }

    pub fn identity(ambient: &Ambient) -> Self {
        match ambient {
            Ambient::Euclidean { .. } => Isometry::Rigid { rotation: linalg::IDENTITY4, translation: [0.0; 4] },
            Ambient::FlatTorus { .. } => Isometry::Translation { shift: [0.0; 4] },
            Ambient::RoundSphere3 => Isometry::Rotation { matrix: linalg::IDENTITY4 },
        }
    }

    fn matches(&self, ambient: &Ambient) -> bool {
        matches!(
            (self, ambient),
            (Isometry::Rigid { .. }, Ambient::Euclidean { .. })
                | (Isometry::Translation { .. }, Ambient::FlatTorus { .. })
                | (Isometry::Rotation { .. }, Ambient::RoundSphere3)
        )
    }

    pub fn apply(&self, ambient: &Ambient, x: &Point) -> Result<Point> {
        if !self.matches(ambient) {
            return invalid(format!("isometry kind does not match ambient {ambient}"));
        }
        ambient.check_point(x)?;
        Ok(self.apply_unchecked(ambient, x.vec4()))
    }

    pub(crate) fn apply_unchecked(&self, ambient: &Ambient, x: &Vec4) -> Point {
        match self {
            Isometry::Rigid { rotation, translation } => {
                ambient.project(&linalg::add(&linalg::mat_vec(rotation, x), translation))
            }
            Isometry::Translation { shift } => ambient.wrap(linalg::add(x, shift)),
            // no renormalization: an orthogonal map already preserves the norm
            Isometry::Rotation { matrix } => Point::raw(linalg::mat_vec(matrix, x), 4),
        }
    }
}

pub fn apply_isometry(ambient: &Ambient, iso: &Isometry, x: &Point) -> Result<Point> {
    iso.apply(ambient, x)
}

fn check_orthogonal(m: &Mat4) -> Result<()> {
    let defect = linalg::orthogonality_defect(m, 4);
    if defect > ORTHOGONALITY_TOL {
        return invalid(format!("matrix is not orthogonal (|QᵀQ − I| = {defect:e})"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn torus1() -> Ambient {
        Ambient::flat_torus(&[1.0, 1.0, 1.0]).unwrap()
    }

    #[test]
    fn distance_examples() {
        let e = Ambient::euclidean(3).unwrap();
        let d = e.geodesic_distance(&e.point(&[0.0, 0.0, 0.0]).unwrap(), &e.point(&[3.0, 4.0, 0.0]).unwrap());
        assert_eq!(d.unwrap(), 5.0);

        let t = torus1();
        let d = t.geodesic_distance(&t.point(&[0.1, 0.0, 0.0]).unwrap(), &t.point(&[0.9, 0.0, 0.0]).unwrap());
        assert_relative_eq!(d.unwrap(), 0.2, epsilon = 1e-15);

        let s = Ambient::sphere3();
        let d = s.geodesic_distance(&s.point(&[1.0, 0.0, 0.0, 0.0]).unwrap(), &s.point(&[0.0, 1.0, 0.0, 0.0]).unwrap());
        assert_relative_eq!(d.unwrap(), PI / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn distance_dimension_mismatch_is_rejected() {
        let e = Ambient::euclidean(3).unwrap();
        let x = Point::from_slice(&[0.0, 0.0]).unwrap();
        let y = e.point(&[1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(e.geodesic_distance(&x, &y), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn ball_volume_examples() {
        let s = Ambient::sphere3();
        let x = s.point(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_relative_eq!(s.ball_volume(&x, PI).unwrap(), 2.0 * PI * PI, epsilon = 1e-12);
        assert_relative_eq!(s.ball_volume(&x, 5.0).unwrap(), 2.0 * PI * PI, epsilon = 1e-12);

        let t = torus1();
        let x = t.point(&[0.2, 0.3, 0.4]).unwrap();
        assert_relative_eq!(t.ball_volume(&x, 0.25).unwrap(), 4.0 / 3.0 * PI * 0.25f64.powi(3), epsilon = 1e-15);

        let e = Ambient::euclidean(3).unwrap();
        let x = e.point(&[0.0; 3]).unwrap();
        assert_relative_eq!(e.ball_volume(&x, 1.0).unwrap(), 4.0 * PI / 3.0, epsilon = 1e-15);
        assert!(e.ball_volume(&x, 0.0).is_err());
        assert!(e.ball_volume(&x, -1.0).is_err());
    }

    #[test]
    fn sphere_ball_volume_matches_shell_integral() {
        // independent route: ∫_0^r 4π sin²ρ dρ by Gauss-Legendre
        let s = Ambient::sphere3();
        let x = s.point(&[0.0, 0.0, 0.0, 1.0]).unwrap();
        for &r in &[0.1, 1.0, 2.5, PI] {
            let q: f64 = numerics::composite_rule(0.0, r, &[], 4, 20)
                .into_iter()
                .map(|(p, w)| w * 4.0 * PI * p.sin().powi(2))
                .sum();
            assert_relative_eq!(s.ball_volume(&x, r).unwrap(), q, epsilon = 1e-12);
        }
    }

    #[test]
    fn torus_ball_volume_beyond_injectivity_radius() {
        let t = torus1();
        let x = t.point(&[0.0; 3]).unwrap();
        // past the half diagonal the ball covers the whole torus
        let full = t.ball_volume_estimate(&x, 0.9).unwrap();
        assert_relative_eq!(full.volume, 1.0, epsilon = 1e-4);
        // ball of radius 0.6 minus six spherical caps of height 0.1
        let r: f64 = 0.6;
        let h: f64 = 0.1;
        let cap = PI * h * h * (3.0 * r - h) / 3.0;
        let expected = 4.0 / 3.0 * PI * r.powi(3) - 6.0 * cap;
        let est = t.ball_volume_estimate(&x, r).unwrap();
        assert!(!est.exact);
        assert!((est.volume - expected).abs() / expected < 1e-4, "{} vs {expected}", est.volume);
        assert!(est.error_estimate / est.volume < 1e-4);
    }

    #[test]
    fn metadata_examples() {
        let m = torus1().metadata();
        assert_relative_eq!(m.volume, 1.0);
        assert_relative_eq!(m.diameter, 3f64.sqrt() / 2.0, epsilon = 1e-15);
        assert_relative_eq!(m.injectivity_radius, 0.5);
        let m = Ambient::sphere3().metadata();
        assert_eq!(m.diameter, PI);
        assert_relative_eq!(m.volume, 2.0 * PI * PI);
        let x = Ambient::sphere3().point(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_relative_eq!(Ambient::sphere3().ball_volume(&x, m.diameter).unwrap(), m.volume, epsilon = 1e-12);
        let m = Ambient::euclidean(3).unwrap().metadata();
        assert!(m.ricci_nonnegative);
        assert!(m.diameter.is_infinite());
    }

    #[test]
    fn isometry_examples() {
        let t = torus1();
        let iso = Isometry::translation([0.5, 0.0, 0.0, 0.0]);
        let y = iso.apply(&t, &t.point(&[0.7, 0.0, 0.0]).unwrap()).unwrap();
        assert_relative_eq!(y[0], 0.2, epsilon = 1e-15);

        let s = Ambient::sphere3();
        let x = s.point(&[0.5, 0.5, 0.5, 0.5]).unwrap();
        let id = Isometry::rotation(linalg::IDENTITY4).unwrap();
        assert_eq!(id.apply(&s, &x).unwrap(), x);

        let e = Ambient::euclidean(3).unwrap();
        let rot = Isometry::rigid(linalg::givens(0, 1, PI / 2.0), [0.0; 4]).unwrap();
        let y = rot.apply(&e, &e.point(&[1.0, 0.0, 0.0]).unwrap()).unwrap();
        assert!((y[0]).abs() < 1e-15 && (y[1] - 1.0).abs() < 1e-15);

        assert!(iso.apply(&s, &x).is_err());
        let mut bad = linalg::IDENTITY4;
        bad[0][0] = 1.1;
        assert!(Isometry::rotation(bad).is_err());
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["euclidean3", "torus:1,1,1", "torus:1,2.5,0.5", "sphere3"] {
            let a: Ambient = s.parse().unwrap();
            assert_eq!(a.to_string(), s);
        }
        assert!("torus:1,-1,1".parse::<Ambient>().is_err());
        assert!("hyperbolic3".parse::<Ambient>().is_err());
    }

    pub(crate) fn random_point(a: &Ambient, rng: &mut ChaCha8Rng) -> Point {
        match a {
            Ambient::RoundSphere3 => {
                let v = [rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5];
                a.project(&v)
            }
            Ambient::FlatTorus { periods, .. } => {
                a.point(&[rng.gen::<f64>() * periods[0], rng.gen::<f64>() * periods[1], rng.gen::<f64>() * periods[2]]).unwrap()
            }
            Ambient::Euclidean { .. } => {
                a.point(&[rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)]).unwrap()
            }
        }
    }

    fn all_ambients() -> Vec<Ambient> {
        vec![Ambient::euclidean(3).unwrap(), Ambient::flat_torus(&[1.0, 2.0, 0.7]).unwrap(), Ambient::sphere3()]
    }

    #[test]
    fn triangle_inequality_and_symmetry_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for a in all_ambients() {
            for _ in 0..10_000 {
                let (x, y, z) = (random_point(&a, &mut rng), random_point(&a, &mut rng), random_point(&a, &mut rng));
                let dxy = a.geodesic_distance(&x, &y).unwrap();
                assert_eq!(dxy, a.geodesic_distance(&y, &x).unwrap());
                let dxz = a.geodesic_distance(&x, &z).unwrap();
                let dzy = a.geodesic_distance(&z, &y).unwrap();
                assert!(dxy <= dxz + dzy + 1e-12, "{a}: {dxy} > {dxz} + {dzy}");
            }
        }
    }

    #[test]
    fn isometries_preserve_distances() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let q = linalg::mat_mul(&linalg::givens(0, 2, 0.4), &linalg::mat_mul(&linalg::givens(1, 3, 1.9), &linalg::givens(2, 3, -0.8)));
        let q3 = linalg::mat_mul(&linalg::givens(0, 2, 0.4), &linalg::givens(0, 1, 1.1));
        let cases = vec![
            (Ambient::euclidean(3).unwrap(), Isometry::rigid(q3, [0.3, -2.0, 1.0, 0.0]).unwrap()),
            (Ambient::flat_torus(&[1.0, 2.0, 0.7]).unwrap(), Isometry::translation([0.37, 1.91, -0.2, 0.0])),
            (Ambient::sphere3(), Isometry::rotation(q).unwrap()),
        ];
        for (a, iso) in cases {
            for _ in 0..1000 {
                let (x, y) = (random_point(&a, &mut rng), random_point(&a, &mut rng));
                let d0 = a.geodesic_distance(&x, &y).unwrap();
                let d1 = a.geodesic_distance(&iso.apply(&a, &x).unwrap(), &iso.apply(&a, &y).unwrap()).unwrap();
                assert!((d0 - d1).abs() < 1e-12, "{a}: {d0} vs {d1}");
            }
        }
    }

    #[test]
    fn bishop_gromov_ratio_is_nonincreasing() {
        for a in all_ambients() {
            let x = match a {
                Ambient::RoundSphere3 => a.point(&[1.0, 0.0, 0.0, 0.0]).unwrap(),
                _ => a.point(&[0.1, 0.2, 0.3]).unwrap(),
            };
            let radii = numerics::log_space(1e-3, 3.0, 60);
            let ratios: Vec<f64> = radii.iter().map(|&r| a.ball_volume(&x, r).unwrap() / r.powi(3)).collect();
            for w in ratios.windows(2) {
                assert!(w[1] <= w[0] * (1.0 + 1e-3), "{a}: {} > {}", w[1], w[0]);
            }
        }
    }

    #[test]
    fn compact_ball_volume_saturates() {
        let t = torus1();
        let x = t.point(&[0.3, 0.3, 0.3]).unwrap();
        let m = t.metadata();
        let v = t.ball_volume_estimate(&x, m.diameter + 1e-9).unwrap();
        assert!((v.volume - m.volume).abs() < 1e-6);
    }
}
