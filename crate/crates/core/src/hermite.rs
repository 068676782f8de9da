//! Stable 1D Hermite-function evaluation, Gauss–Hermite quadrature and
//! ladder-operator matrices. Everything downstream (Galerkin assembly,
//! quantization, grid evaluation) is built on this module.
//!
//! `h_n` denotes the L²(dx)-normalized Hermite function
//! `h_n(x) = (2^n n! sqrt(pi))^{-1/2} H_n(x) e^{-x^2/2}`, satisfying
//! `h_n'' + (2n+1-x^2) h_n = 0`.

use ndarray::Array2;

use crate::numerics::tridiag_eigenvalues;
use crate::par::{self, Parallelism};
use crate::Result;

/// Gauss–Hermite rule in "total weight" form: for integrands of the form
/// polynomial × Gaussian, `∫ f(x) dx ≈ Σ weights[i] * f(nodes[i])`.
/// The `e^{x²}` compensation is already folded into the weights.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// Integrate `f` against the rule.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// The same rule under the substitution x = sigma * z: integrates
    /// functions of x whose z-profile is polynomial × Gaussian.
    pub fn scaled(&self, sigma: f64) -> QuadratureRule {
        QuadratureRule {
            nodes: self.nodes.iter().map(|&z| sigma * z).collect(),
            weights: self.weights.iter().map(|&w| sigma * w).collect(),
        }
    }
}

/// Position and momentum operators truncated to the first `n_max + 1`
/// Hermite functions (h = 1 convention, P = -i d/dx).
///
/// `x` is the symmetric tridiagonal position matrix. The momentum matrix is
/// purely imaginary, `P = i * p_imag`, with `p_imag` real antisymmetric.
#[derive(Debug, Clone)]
pub struct LadderMatrices {
    pub n_max: usize,
    pub x: Array2<f64>,
    pub p_imag: Array2<f64>,
}

/// Evaluate the scaled recurrence at one point, returning all of
/// `h_0(x) .. h_{n_max}(x)`.
///
/// The Gaussian prefactor is tracked as a separate exponent so the
/// recurrence neither under- nor overflows up to n_max = 5000, |x| <= 150.
pub fn hermite_column(n_max: usize, x: f64) -> Vec<f64> {
    const RESCALE_LIMIT: f64 = 1e100;
    const RESCALE_LOG: f64 = 230.258_509_299_404_57; // ln(1e100)

    let mut out = vec![0.0; n_max + 1];
    let mut log_scale = -0.5 * x * x;
    let norm0 = std::f64::consts::PI.powf(-0.25);

    let emit = |s: f64, log_scale: f64| -> f64 {
        if s == 0.0 {
            0.0
        } else if log_scale > -700.0 {
            s * log_scale.exp()
        } else {
            let v = (log_scale + s.abs().ln()).exp();
            v.copysign(s)
        }
    };

    let mut p_prev = norm0; // h_0 without the Gaussian
    out[0] = emit(p_prev, log_scale);
    if n_max == 0 {
        return out;
    }
    let mut p_cur = std::f64::consts::SQRT_2 * x * norm0;
    out[1] = emit(p_cur, log_scale);
    for n in 1..n_max {
        let np1 = (n + 1) as f64;
        let next = x * (2.0 / np1).sqrt() * p_cur - (n as f64 / np1).sqrt() * p_prev;
        p_prev = p_cur;
        p_cur = next;
        if p_cur.abs() > RESCALE_LIMIT || p_prev.abs() > RESCALE_LIMIT {
            p_cur *= (-RESCALE_LOG).exp();
            p_prev *= (-RESCALE_LOG).exp();
            log_scale += RESCALE_LOG;
        }
        out[n + 1] = emit(p_cur, log_scale);
    }
    out
}

/// Table of Hermite functions: row n holds `h_n` over `points`.
pub fn hermite_functions(n_max: usize, points: &[f64]) -> Array2<f64> {
    hermite_functions_with(n_max, points, Parallelism::Auto)
}

/// Like [`hermite_functions`] with an explicit execution mode.
pub fn hermite_functions_with(n_max: usize, points: &[f64], mode: Parallelism) -> Array2<f64> {
    let cols = par::map_slice(points, mode, |&x| hermite_column(n_max, x));
    let mut out = Array2::zeros((n_max + 1, points.len()));
    for (j, col) in cols.iter().enumerate() {
        for n in 0..=n_max {
            out[[n, j]] = col[n];
        }
    }
    out
}

/// Derivatives h_n'(x) from the values, via h_n' = sqrt(2n) h_{n-1} - x h_n.
pub fn hermite_derivative_column(values: &[f64], x: f64) -> Vec<f64> {
    let mut out = vec![0.0; values.len()];
    out[0] = -x * values[0];
    for n in 1..values.len() {
        out[n] = (2.0 * n as f64).sqrt() * values[n - 1] - x * values[n];
    }
    out
}

/// n-point Gauss–Hermite rule, built from the eigenvalues of the Jacobi
/// matrix. Weights come from the Christoffel identity
/// `w_i = 1 / Σ_{m<n} h_m(x_i)²`, which is overflow-free at any n.
pub fn gauss_hermite(n: usize) -> Result<QuadratureRule> {
    assert!(n >= 1, "need at least one node");
    if n == 1 {
        return Ok(QuadratureRule {
            nodes: vec![0.0],
            weights: vec![std::f64::consts::PI.sqrt()],
        });
    }
    let diag = vec![0.0; n];
    let off: Vec<f64> = (1..n).map(|i| (i as f64 / 2.0).sqrt()).collect();
    let mut nodes = tridiag_eigenvalues(&diag, &off)?;
    // symmetrize: nodes come in +- pairs, enforce exactly
    for i in 0..n / 2 {
        let v = 0.5 * (nodes[n - 1 - i] - nodes[i]);
        nodes[i] = -v;
        nodes[n - 1 - i] = v;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    let weights = nodes
        .iter()
        .map(|&x| {
            let h = hermite_column(n - 1, x);
            1.0 / h.iter().map(|v| v * v).sum::<f64>()
        })
        .collect();
    Ok(QuadratureRule { nodes, weights })
}

/// Position/momentum matrices on the first `n_max + 1` Hermite functions.
pub fn ladder_matrices(n_max: usize) -> LadderMatrices {
    let n = n_max + 1;
    let mut x = Array2::zeros((n, n));
    let mut p_imag = Array2::zeros((n, n));
    for i in 0..n - 1 {
        let c = ((i + 1) as f64 / 2.0).sqrt();
        x[[i, i + 1]] = c;
        x[[i + 1, i]] = c;
        p_imag[[i, i + 1]] = -c;
        p_imag[[i + 1, i]] = c;
    }
    LadderMatrices { n_max, x, p_imag }
}

/// Exact matrix of -d²/dz² (= P²) on the first `n` Hermite functions.
/// These are the entries of the untruncated operator, so the section is
/// exact (no truncation error at the top rows).
pub fn kinetic_matrix(n: usize) -> Array2<f64> {
    let mut k = Array2::zeros((n, n));
    for i in 0..n {
        k[[i, i]] = i as f64 + 0.5;
        if i + 2 < n {
            let c = -0.5 * (((i + 1) * (i + 2)) as f64).sqrt();
            k[[i, i + 2]] = c;
            k[[i + 2, i]] = c;
        }
    }
    k
}

/// Exact matrix of z² on the first `n` Hermite functions.
pub fn position_squared_matrix(n: usize) -> Array2<f64> {
    let mut m = Array2::zeros((n, n));
    for i in 0..n {
        m[[i, i]] = i as f64 + 0.5;
        if i + 2 < n {
            let c = 0.5 * (((i + 1) * (i + 2)) as f64).sqrt();
            m[[i, i + 2]] = c;
            m[[i + 2, i]] = c;
        }
    }
    m
}

/// Moment matrices M^{(j)}[m, n] = ∫ z^j h_m(z) h_n(z) dz for j = 0..=max_power,
/// computed with a rule exact for the occurring degrees.
pub fn moment_matrices(n_basis: usize, max_power: usize) -> Result<Vec<Array2<f64>>> {
    let n_quad = n_basis + max_power / 2 + 1;
    let rule = gauss_hermite(n_quad)?;
    let h = hermite_functions(n_basis - 1, &rule.nodes);
    let mut out = Vec::with_capacity(max_power + 1);
    for j in 0..=max_power {
        let mut m = Array2::zeros((n_basis, n_basis));
        for a in 0..n_basis {
            for b in a..n_basis {
                let mut s = 0.0;
                for (q, (&x, &w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
                    s += w * x.powi(j as i32) * h[[a, q]] * h[[b, q]];
                }
                m[[a, b]] = s;
                m[[b, a]] = s;
            }
        }
        out.push(m);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const SQRT_PI: f64 = 1.772_453_850_905_516;

    #[test]
    fn ground_state_values() {
        let h = hermite_column(1, 0.0);
        assert_abs_diff_eq!(h[0], 0.751_125_544_464_943, epsilon = 1e-12);
        assert_abs_diff_eq!(h[1], 0.0, epsilon = 0.0);
    }

    #[test]
    fn orthogonality_via_quadrature() {
        let rule = gauss_hermite(40).unwrap();
        let h = hermite_functions(5, &rule.nodes);
        let mut dot = 0.0;
        for q in 0..rule.nodes.len() {
            dot += rule.weights[q] * h[[3, q]] * h[[5, q]];
        }
        assert!(dot.abs() < 1e-12, "got {dot}");
    }

    #[test]
    fn quadrature_moments() {
        let r1 = gauss_hermite(1).unwrap();
        assert_eq!(r1.nodes, vec![0.0]);
        assert_abs_diff_eq!(r1.integrate(|x| (-x * x).exp()), SQRT_PI, epsilon = 1e-13);

        let r5 = gauss_hermite(5).unwrap();
        let m4 = r5.integrate(|x| x.powi(4) * (-x * x).exp());
        assert_abs_diff_eq!(m4, 0.75 * SQRT_PI, epsilon = 1e-13);
    }

    #[test]
    fn normalization_at_n_30() {
        let rule = gauss_hermite(60).unwrap();
        let h = hermite_functions(30, &rule.nodes);
        let norm: f64 = rule
            .weights
            .iter()
            .enumerate()
            .map(|(q, &w)| w * h[[30, q]] * h[[30, q]])
            .sum();
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn gram_matrix_is_identity() {
        let n_basis = 201;
        let rule = gauss_hermite(n_basis + 1).unwrap();
        let h = hermite_functions(n_basis - 1, &rule.nodes);
        for a in (0..n_basis).step_by(40) {
            for b in (0..n_basis).step_by(37) {
                let mut s = 0.0;
                for q in 0..rule.nodes.len() {
                    s += rule.weights[q] * h[[a, q]] * h[[b, q]];
                }
                let expect = if a == b { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(s, expect, epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn ladder_matrix_entries() {
        let lm = ladder_matrices(1);
        let c = 1.0 / std::f64::consts::SQRT_2;
        assert_abs_diff_eq!(lm.x[[0, 1]], c, epsilon = 1e-15);
        assert_abs_diff_eq!(lm.x[[1, 0]], c, epsilon = 1e-15);
        assert_abs_diff_eq!(lm.x[[0, 0]], 0.0, epsilon = 0.0);

        // X² + P² = diag(2n+1) on the interior block; with P = i S this is
        // X² - S².
        let lm = ladder_matrices(10);
        let x2 = lm.x.dot(&lm.x);
        let s2 = lm.p_imag.dot(&lm.p_imag);
        for i in 0..9 {
            for j in 0..9 {
                let v = x2[[i, j]] - s2[[i, j]];
                let expect = if i == j { 2.0 * i as f64 + 1.0 } else { 0.0 };
                assert_abs_diff_eq!(v, expect, epsilon = 1e-13);
            }
        }

        // canonical commutation on the interior block: X S - S X = Id
        let comm = lm.x.dot(&lm.p_imag) - lm.p_imag.dot(&lm.x);
        for i in 0..10 {
            for j in 0..10 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(comm[[i, j]], expect, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn closed_form_sections_match_truncated_products() {
        let n = 12;
        let lm = ladder_matrices(n + 3);
        let s2 = lm.p_imag.dot(&lm.p_imag);
        let k = kinetic_matrix(n);
        let x2 = position_squared_matrix(n);
        let xx = lm.x.dot(&lm.x);
        for i in 0..n {
            for j in 0..n {
                assert_abs_diff_eq!(k[[i, j]], -s2[[i, j]], epsilon = 1e-13);
                assert_abs_diff_eq!(x2[[i, j]], xx[[i, j]], epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn ode_residual() {
        let rule = gauss_hermite(80).unwrap();
        for &n in &[5usize, 20, 60] {
            for &x in rule.nodes.iter().step_by(7) {
                let h = hermite_column(n, x);
                let d1 = hermite_derivative_column(&h, x);
                // second derivative via the same identity applied to h'
                // h_n'' = sqrt(2n) h_{n-1}' - h_n - x h_n'
                let hpp = (2.0 * n as f64).sqrt() * d1[n.saturating_sub(1)] - h[n] - x * d1[n];
                let resid = hpp + (2.0 * n as f64 + 1.0 - x * x) * h[n];
                assert!(
                    resid.abs() < 1e-6 * (2.0 * n as f64 + 1.0),
                    "n={n} x={x} resid={resid}"
                );
            }
        }
    }

    #[test]
    fn extreme_arguments_stay_finite() {
        let h = hermite_column(5000, 150.0);
        assert!(h.iter().all(|v| v.is_finite()));
        // far outside the classical region for all n <= 5000: essentially 0
        assert!(h[5000].abs() < 1e-100);
        // inside the classical region the magnitude is O(n^{-1/4})
        let h = hermite_column(5000, 10.0);
        assert!(h[5000].abs() < 1.0 && h[5000].abs() > 1e-6);
        assert!(h.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn quadrature_zeroth_moment_large_n() {
        for &n in &[200usize, 1000] {
            let rule = gauss_hermite(n).unwrap();
            let m0: f64 = rule.integrate(|x| (-x * x).exp());
            assert_abs_diff_eq!(m0, SQRT_PI, epsilon = 1e-12);
        }
    }
}
