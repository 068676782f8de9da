//! Shared numerical kernels: dense/tridiagonal symmetric eigenproblems,
//! 1D quadratures and small statistics helpers.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, UPLO};

use crate::{Error, Result};

/// Dense symmetric eigendecomposition, eigenvalues ascending, eigenvectors
/// as columns of the returned matrix.
pub fn symmetric_eigen(a: &Array2<f64>) -> Result<(Array1<f64>, Array2<f64>)> {
    a.eigh(UPLO::Lower)
        .map_err(|e| Error::ConvergenceFailure(e.to_string()))
}

/// Eigenvalues only of a symmetric matrix.
pub fn symmetric_eigenvalues(a: &Array2<f64>) -> Result<Array1<f64>> {
    use ndarray_linalg::EighInplace;
    let mut work = a.clone();
    let (vals, _) = work
        .eigh_inplace(UPLO::Lower)
        .map_err(|e| Error::ConvergenceFailure(e.to_string()))?;
    Ok(vals)
}

/// All eigenvalues of a symmetric tridiagonal matrix by the implicit-shift
/// QL algorithm. `diag` has length n, `off` length n-1. Returns ascending.
pub fn tridiag_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    assert_eq!(off.len() + 1, n, "off-diagonal length must be n-1");
    let mut d = diag.to_vec();
    // e is padded so e[l..m] indexing matches the classic algorithm.
    let mut e = Vec::with_capacity(n);
    e.extend_from_slice(off);
    e.push(0.0);

    for l in 0..n {
        let mut iter = 0;
        loop {
            // Find a negligible subdiagonal element.
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(Error::ConvergenceFailure(
                    "tridiagonal QL exceeded 50 iterations".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0, 1.0);
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(d)
}

/// Number of eigenvalues of the symmetric tridiagonal matrix strictly below
/// `x`, by Sturm sequence counting.
pub fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let n = diag.len();
    let mut count = 0usize;
    let mut q = diag[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..n {
        let denom = if q.abs() < f64::MIN_POSITIVE.sqrt() {
            f64::MIN_POSITIVE.sqrt().copysign(q)
        } else {
            q
        };
        q = diag[i] - x - off[i - 1] * off[i - 1] / denom;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Lowest `m` eigenvalues of a symmetric tridiagonal matrix by bisection on
/// the Sturm count. Robust for very large n (finite-difference oracles).
pub fn tridiag_lowest_eigenvalues(diag: &[f64], off: &[f64], m: usize) -> Vec<f64> {
    let n = diag.len();
    assert!(m <= n);
    // Gershgorin bounds.
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = (if i > 0 { off[i - 1].abs() } else { 0.0 })
            + (if i + 1 < n { off[i].abs() } else { 0.0 });
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let mut out = Vec::with_capacity(m);
    for k in 0..m {
        let (mut a, mut b) = (lo, hi);
        // eigenvalue #k (0-based) is the infimum of {x : count(x) >= k+1}
        for _ in 0..120 {
            let mid = 0.5 * (a + b);
            if sturm_count(diag, off, mid) >= k + 1 {
                b = mid;
            } else {
                a = mid;
            }
            if (b - a).abs() <= 1e-14 * b.abs().max(1.0) {
                break;
            }
        }
        out.push(0.5 * (a + b));
    }
    out
}

/// Adaptive Simpson quadrature on [a, b].
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
                + rec(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
        }
    }
    let (fa, fb) = (f(a), f(b));
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    rec(f, a, fa, b, fb, whole, m, fm, tol, 40)
}

/// Tanh-sinh (double exponential) quadrature on (a, b); handles integrable
/// endpoint singularities.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let _c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let eval = |t: f64| -> f64 {
        let u = half_pi * t.sinh();
        // distance to the nearer endpoint, computed without cancellation:
        // 1 - |tanh u| = 2 / (e^{2|u|} + 1)
        let delta = 2.0 / ((2.0 * u.abs()).exp() + 1.0);
        let x = if u >= 0.0 { b - r * delta } else { a + r * delta };
        let w = r * half_pi * t.cosh() / u.cosh().powi(2);
        if x <= a || x >= b || !w.is_finite() {
            0.0
        } else {
            let fx = f(x);
            if fx.is_finite() {
                w * fx
            } else {
                0.0
            }
        }
    };
    let t_max = 4.0;
    let mut h = 1.0;
    let mut sum = eval(0.0);
    let mut k = 1;
    while (k as f64) * h <= t_max {
        let t = k as f64 * h;
        sum += eval(t) + eval(-t);
        k += 1;
    }
    let mut prev = sum * h;
    for _level in 0..12 {
        h *= 0.5;
        // add the new midpoints
        let mut add = 0.0;
        let mut k = 1;
        while (k as f64) * h <= t_max {
            let t = k as f64 * h;
            add += eval(t) + eval(-t);
            k += 2;
        }
        sum += add;
        let cur = sum * h;
        if (cur - prev).abs() <= tol * cur.abs().max(1.0) {
            return cur;
        }
        prev = cur;
    }
    prev
}

/// Least-squares fit y = intercept + slope * x; returns (intercept, slope, r2).
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
        syy += (yi - my) * (yi - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (intercept, slope, r2)
}

/// Quantile of a sample by linear interpolation; `q` in [0, 1].
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let w = pos - lo as f64;
        sorted[lo] * (1.0 - w) + sorted[hi] * w
    }
}

/// Sorts a copy and returns the median.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    quantile(&v, 0.5)
}

/// One-sample Kolmogorov–Smirnov test against a CDF; returns (statistic, p).
pub fn ks_test<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> (f64, f64) {
    let mut v = samples.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    let mut d: f64 = 0.0;
    for (i, &x) in v.iter().enumerate() {
        let c = cdf(x);
        let up = (i + 1) as f64 / n as f64 - c;
        let dn = c - i as f64 / n as f64;
        d = d.max(up.max(dn));
    }
    let sqrt_n = (n as f64).sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    // asymptotic Kolmogorov survival function
    let mut p = 0.0;
    for k in 1..101 {
        let term = 2.0 * (-1.0f64).powi(k - 1) * (-2.0 * (k as f64).powi(2) * lambda * lambda).exp();
        p += term;
        if term.abs() < 1e-12 {
            break;
        }
    }
    (d, p.clamp(0.0, 1.0))
}

/// Two-sample Kolmogorov–Smirnov test; returns (statistic, p).
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(|x, y| x.partial_cmp(y).unwrap());
    sb.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (na, nb) = (sa.len(), sb.len());
    let mut d: f64 = 0.0;
    let (mut i, mut j) = (0usize, 0usize);
    while i < na && j < nb {
        let x = sa[i].min(sb[j]);
        while i < na && sa[i] <= x {
            i += 1;
        }
        while j < nb && sb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    let ne = (na as f64 * nb as f64) / (na as f64 + nb as f64);
    let sqrt_ne = ne.sqrt();
    let lambda = (sqrt_ne + 0.12 + 0.11 / sqrt_ne) * d;
    let mut p = 0.0;
    for k in 1..101 {
        let term = 2.0 * (-1.0f64).powi(k - 1) * (-2.0 * (k as f64).powi(2) * lambda * lambda).exp();
        p += term;
        if term.abs() < 1e-12 {
            break;
        }
    }
    (d, p.clamp(0.0, 1.0))
}
