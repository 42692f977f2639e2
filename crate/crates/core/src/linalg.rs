//! Fixed-size vector helpers. Every chart in this crate has at most four
//! coordinates, so points and vectors are plain `[f64; 4]` with unused
//! trailing entries kept at zero.

pub type Vec4 = [f64; 4];

#[inline]
pub fn add(a: &Vec4, b: &Vec4) -> Vec4 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

#[inline]
pub fn sub(a: &Vec4, b: &Vec4) -> Vec4 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

#[inline]
pub fn scale(a: &Vec4, s: f64) -> Vec4 {
    [a[0] * s, a[1] * s, a[2] * s, a[3] * s]
}

#[inline]
pub fn axpy(a: &Vec4, s: f64, b: &Vec4) -> Vec4 {
    [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2], a[3] + s * b[3]]
}

#[inline]
pub fn dot(a: &Vec4, b: &Vec4) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

#[inline]
pub fn norm_sq(a: &Vec4) -> f64 {
    dot(a, a)
}

#[inline]
pub fn norm(a: &Vec4) -> f64 {
    dot(a, a).sqrt()
}

pub fn normalized(a: &Vec4) -> Vec4 {
    let n = norm(a);
    if n > 0.0 {
        scale(a, 1.0 / n)
    } else {
        *a
    }
}

/// Area of the triangle spanned by edge vectors `u` and `v` (any dimension ≤ 4).
#[inline]
pub fn tri_area(u: &Vec4, v: &Vec4) -> f64 {
    let uu = dot(u, u);
    let vv = dot(v, v);
    let uv = dot(u, v);
    0.5 * (uu * vv - uv * uv).max(0.0).sqrt()
}

/// Cotangent of the angle between `u` and `v`.
#[inline]
pub fn cot(u: &Vec4, v: &Vec4) -> f64 {
    let uv = dot(u, v);
    let cross = (dot(u, u) * dot(v, v) - uv * uv).max(0.0).sqrt();
    uv / cross
}

pub fn cross3(a: &Vec4, b: &Vec4) -> Vec4 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
        0.0,
    ]
}

/// Vector in R⁴ orthogonal to `a`, `b`, `c`, with length equal to the
/// 3-volume of the parallelepiped they span.
pub fn cross4(a: &Vec4, b: &Vec4, c: &Vec4) -> Vec4 {
    let m = |i: usize, j: usize, k: usize| {
        a[i] * (b[j] * c[k] - b[k] * c[j]) - a[j] * (b[i] * c[k] - b[k] * c[i])
            + a[k] * (b[i] * c[j] - b[j] * c[i])
    };
    [-m(1, 2, 3), m(0, 2, 3), -m(0, 1, 3), m(0, 1, 2)]
}

/// Component of `v` orthogonal to the unit vector `n`.
#[inline]
pub fn reject(v: &Vec4, n: &Vec4) -> Vec4 {
    axpy(v, -dot(v, n), n)
}

pub type Mat4 = [[f64; 4]; 4];

pub const IDENTITY4: Mat4 = [
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
];

pub fn mat_vec(m: &Mat4, v: &Vec4) -> Vec4 {
    let mut out = [0.0; 4];
    for (i, row) in m.iter().enumerate() {
        out[i] = dot(row, v);
    }
    out
}

pub fn mat_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// Rotation by `angle` in the coordinate plane (i, j).
pub fn givens(i: usize, j: usize, angle: f64) -> Mat4 {
    let mut m = IDENTITY4;
    let (s, c) = angle.sin_cos();
    m[i][i] = c;
    m[j][j] = c;
    m[i][j] = -s;
    m[j][i] = s;
    m
}

/// Largest entry of |QᵀQ − I| over the leading `dim × dim` block.
pub fn orthogonality_defect(q: &Mat4, dim: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let qtq: f64 = (0..dim).map(|k| q[k][i] * q[k][j]).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((qtq - target).abs());
        }
    }
    worst
}
