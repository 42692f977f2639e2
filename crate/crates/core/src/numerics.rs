//! Small numerical building blocks shared across modules: Gauss-Legendre
//! rules, golden-section search and the Halton low-discrepancy sequence.

use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton's method
/// on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss-Legendre rule on [a, b] split at the given breakpoints.
pub fn composite_rule(a: f64, b: f64, breaks: &[f64], panels: usize, order: usize) -> Vec<(f64, f64)> {
    let (xs, ws) = gauss_legendre(order);
    let mut cuts: Vec<f64> = vec![a];
    cuts.extend(breaks.iter().copied().filter(|&c| c > a && c < b));
    cuts.push(b);
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup_by(|x, y| (*x - *y).abs() < 1e-15);
    let mut out = Vec::with_capacity((cuts.len() - 1) * panels * order);
    for seg in cuts.windows(2) {
        let h = (seg[1] - seg[0]) / panels as f64;
        for p in 0..panels {
            let lo = seg[0] + h * p as f64;
            for (x, w) in xs.iter().zip(&ws) {
                out.push((lo + 0.5 * h * (x + 1.0), 0.5 * h * w));
            }
        }
    }
    out
}

/// Maximizes a unimodal `f` on [a, b] by golden-section search. Returns
/// (argmax, max).
pub fn golden_section_max(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let invphi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - invphi * (hi - lo);
    let mut x2 = lo + invphi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (hi - lo).abs() > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Nelder–Mead maximization from `x0` with initial simplex offsets `steps`
/// along each axis. Stops when the simplex values agree within `ftol`
/// (absolute) or after `max_evals` evaluations. Returns (argmax, max, evals).
pub fn nelder_mead_max(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    steps: &[f64],
    ftol: f64,
    max_evals: usize,
) -> (Vec<f64>, f64, usize) {
    let n = x0.len();
    let mut evals = 0;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        -f(x)
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), eval(x0, &mut evals)));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += steps[i];
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }
    let point = |c: &[f64], d: &[f64], t: f64| -> Vec<f64> { c.iter().zip(d).map(|(a, b)| a + t * (b - a)).collect() };
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if simplex[n].1 - simplex[0].1 <= ftol || evals >= max_evals {
            break;
        }
        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / n as f64;
            }
        }
        let worst = simplex[n].0.clone();
        let refl = point(&centroid, &worst, -1.0);
        let fr = eval(&refl, &mut evals);
        if fr < simplex[0].1 {
            let exp = point(&centroid, &worst, -2.0);
            let fe = eval(&exp, &mut evals);
            simplex[n] = if fe < fr { (exp, fe) } else { (refl, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (refl, fr);
        } else {
            let (contract, fc) = if fr < simplex[n].1 {
                let c = point(&centroid, &worst, -0.5);
                let v = eval(&c, &mut evals);
                (c, v)
            } else {
                let c = point(&centroid, &worst, 0.5);
                let v = eval(&c, &mut evals);
                (c, v)
            };
            if fc < fr.min(simplex[n].1) {
                simplex[n] = (contract, fc);
            } else {
                let best = simplex[0].0.clone();
                for item in simplex.iter_mut().skip(1) {
                    let x = point(&best, &item.0, 0.5);
                    let v = eval(&x, &mut evals);
                    *item = (x, v);
                }
            }
        }
    }
    let (x, v) = simplex.swap_remove(0);
    (x, -v, evals)
}

const PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];

/// Element `index` of the Halton sequence in `dim` ≤ 6 dimensions.
pub fn halton(index: u64, dim: usize) -> [f64; 6] {
    let mut out = [0.0; 6];
    for (d, slot) in out.iter_mut().enumerate().take(dim) {
        let base = PRIMES[d];
        let mut f = 1.0;
        let mut r = 0.0;
        let mut i = index;
        while i > 0 {
            f /= base as f64;
            r += f * (i % base) as f64;
            i /= base;
        }
        *slot = r;
    }
    out
}

/// `n` log-spaced values covering [lo, hi] inclusive.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    let mut out: Vec<f64> = (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect();
    // pin the ends exactly so window-boundary checks compare equal
    out[0] = lo;
    out[n - 1] = hi;
    out
}
