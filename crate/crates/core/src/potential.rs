//! Confining elliptic polynomial potentials V = V0 + V1 on R^d, where V0 is
//! homogeneous of degree 2k and strictly positive away from the origin, and
//! deg V1 <= 2k - 1. Validation is numerical: ellipticity is certified on a
//! quasi-uniform direction grid, nonnegativity on a tensor grid.

use crate::{Error, Result};

/// Sparse multi-index polynomial potential with a nonnegativity shift.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialPotential {
    dimension: usize,
    half_degree: usize,
    /// (multi-index alpha, coefficient), alpha.len() == dimension
    monomials: Vec<(Vec<usize>, f64)>,
    shift: f64,
}

impl PolynomialPotential {
    /// Validates degrees and ellipticity. The direction grid has
    /// `max(4096, 8 d)` points.
    pub fn new(dimension: usize, half_degree: usize, monomials: Vec<(Vec<usize>, f64)>) -> Result<Self> {
        Self::with_shift(dimension, half_degree, monomials, 0.0)
    }

    /// As [`PolynomialPotential::new`] with an explicit shift c0.
    pub fn with_shift(
        dimension: usize,
        half_degree: usize,
        monomials: Vec<(Vec<usize>, f64)>,
        shift: f64,
    ) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidPotential("dimension must be >= 1".into()));
        }
        if half_degree == 0 {
            return Err(Error::InvalidPotential("half-degree k must be >= 1".into()));
        }
        if monomials.is_empty() {
            return Err(Error::InvalidPotential("no monomials".into()));
        }
        let top = 2 * half_degree;
        let mut has_top = false;
        for (alpha, _) in &monomials {
            if alpha.len() != dimension {
                return Err(Error::InvalidPotential(format!(
                    "multi-index length {} != dimension {}",
                    alpha.len(),
                    dimension
                )));
            }
            let deg: usize = alpha.iter().sum();
            if deg > top {
                return Err(Error::InvalidPotential(format!(
                    "monomial degree {deg} exceeds 2k = {top}"
                )));
            }
            if deg == top {
                has_top = true;
            }
        }
        if !has_top {
            return Err(Error::InvalidPotential(format!(
                "no monomial of top degree 2k = {top}"
            )));
        }
        let p = PolynomialPotential {
            dimension,
            half_degree,
            monomials,
            shift,
        };
        let n_dirs = 4096usize.max(8 * dimension);
        let margin = p.ellipticity_margin(n_dirs)?;
        debug_assert!(margin > 0.0);
        Ok(p)
    }

    /// The standard harmonic potential |x|².
    pub fn harmonic(dimension: usize) -> Self {
        let monomials = (0..dimension)
            .map(|i| {
                let mut a = vec![0; dimension];
                a[i] = 2;
                (a, 1.0)
            })
            .collect();
        Self::new(dimension, 1, monomials).expect("harmonic potential is elliptic")
    }

    /// The separable quartic potential Σ x_i^4.
    pub fn quartic_separable(dimension: usize) -> Self {
        let monomials = (0..dimension)
            .map(|i| {
                let mut a = vec![0; dimension];
                a[i] = 4;
                (a, 1.0)
            })
            .collect();
        Self::new(dimension, 2, monomials).expect("separable quartic is elliptic")
    }

    /// The isotropic quartic |x|^4 (includes cross terms for d = 2).
    pub fn quartic_isotropic(dimension: usize) -> Self {
        let mut monomials = Vec::new();
        match dimension {
            1 => monomials.push((vec![4], 1.0)),
            2 => {
                monomials.push((vec![4, 0], 1.0));
                monomials.push((vec![2, 2], 2.0));
                monomials.push((vec![0, 4], 1.0));
            }
            _ => panic!("quartic_isotropic only for d = 1, 2"),
        }
        Self::new(dimension, 2, monomials).expect("isotropic quartic is elliptic")
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn half_degree(&self) -> usize {
        self.half_degree
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn monomials(&self) -> &[(Vec<usize>, f64)] {
        &self.monomials
    }

    /// Σ c_α x^α + shift.
    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dimension);
        let mut v = self.shift;
        for (alpha, c) in &self.monomials {
            let mut term = *c;
            for (xi, &ai) in x.iter().zip(alpha) {
                term *= xi.powi(ai as i32);
            }
            v += term;
        }
        v
    }

    /// The homogeneous top part V0 (degree-2k monomials only, no shift).
    pub fn eval_top(&self, x: &[f64]) -> f64 {
        let top = 2 * self.half_degree;
        let mut v = 0.0;
        for (alpha, c) in &self.monomials {
            if alpha.iter().sum::<usize>() == top {
                let mut term = *c;
                for (xi, &ai) in x.iter().zip(alpha) {
                    term *= xi.powi(ai as i32);
                }
                v += term;
            }
        }
        v
    }

    /// Gradient of V at x (shift drops out).
    pub fn eval_gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.dimension];
        for (alpha, c) in &self.monomials {
            for axis in 0..self.dimension {
                if alpha[axis] == 0 {
                    continue;
                }
                let mut term = *c * alpha[axis] as f64;
                for (i, (&ai, xi)) in alpha.iter().zip(x).enumerate() {
                    let e = if i == axis { ai - 1 } else { ai };
                    term *= xi.powi(e as i32);
                }
                g[axis] += term;
            }
        }
        g
    }

    /// Gradient of the homogeneous top part V0.
    pub fn eval_top_gradient(&self, x: &[f64]) -> Vec<f64> {
        let top = 2 * self.half_degree;
        let mut g = vec![0.0; self.dimension];
        for (alpha, c) in &self.monomials {
            if alpha.iter().sum::<usize>() != top {
                continue;
            }
            for axis in 0..self.dimension {
                if alpha[axis] == 0 {
                    continue;
                }
                let mut term = *c * alpha[axis] as f64;
                for (i, (&ai, xi)) in alpha.iter().zip(x).enumerate() {
                    let e = if i == axis { ai - 1 } else { ai };
                    term *= xi.powi(e as i32);
                }
                g[axis] += term;
            }
        }
        g
    }

    /// Minimum of V0 over `n_dirs` quasi-uniform unit directions.
    /// Rejects the potential when the minimum is <= 0.
    pub fn ellipticity_margin(&self, n_dirs: usize) -> Result<f64> {
        assert!(n_dirs >= 8 * self.dimension, "need n_dirs >= 8 d");
        let mut min = f64::INFINITY;
        match self.dimension {
            1 => {
                for x in [[-1.0], [1.0]] {
                    min = min.min(self.eval_top(&x));
                }
            }
            2 => {
                // golden-angle sequence on the circle
                let golden = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
                for i in 0..n_dirs {
                    let theta = golden * i as f64;
                    min = min.min(self.eval_top(&[theta.cos(), theta.sin()]));
                }
            }
            d => {
                // low-discrepancy points on S^{d-1} via normalized Halton-like grid
                // (only d <= 2 is exercised by the solvers, this is a fallback)
                let mut state = 0x9e3779b97f4a7c15u64;
                for _ in 0..n_dirs {
                    let mut v = vec![0.0; d];
                    let mut norm = 0.0;
                    for x in v.iter_mut() {
                        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                        let u = ((state >> 11) as f64) / ((1u64 << 53) as f64);
                        *x = 2.0 * u - 1.0;
                        norm += *x * *x;
                    }
                    if norm > 1e-12 {
                        let n = norm.sqrt();
                        for x in v.iter_mut() {
                            *x /= n;
                        }
                        min = min.min(self.eval_top(&v));
                    }
                }
            }
        }
        if min <= 0.0 {
            return Err(Error::NonElliptic {
                margin: min,
                n_dirs,
            });
        }
        Ok(min)
    }

    /// Returns V + c0 with c0 = max(0, -min over the tensor grid of V);
    /// idempotent on its own output.
    pub fn shift_nonnegative(&self, grid_radius: f64, grid_n: usize) -> Self {
        let mut min = f64::INFINITY;
        let mut x = vec![0.0; self.dimension];
        let steps = grid_n.max(2);
        let coord = |i: usize| -grid_radius + 2.0 * grid_radius * i as f64 / (steps - 1) as f64;
        match self.dimension {
            1 => {
                for i in 0..steps {
                    x[0] = coord(i);
                    min = min.min(self.eval(&x));
                }
            }
            2 => {
                for i in 0..steps {
                    for j in 0..steps {
                        x[0] = coord(i);
                        x[1] = coord(j);
                        min = min.min(self.eval(&x));
                    }
                }
            }
            _ => panic!("shift_nonnegative grids only d = 1, 2"),
        }
        let c0 = (-min).max(0.0);
        PolynomialPotential {
            dimension: self.dimension,
            half_degree: self.half_degree,
            monomials: self.monomials.clone(),
            shift: self.shift + c0,
        }
    }

    /// A radius R such that V > lambda on every sampled direction at |x| >= R.
    pub fn confinement_radius(&self, lambda: f64) -> f64 {
        let mut r: f64 = 1.0;
        'outer: for _ in 0..60 {
            let n_dirs = 512usize.max(8 * self.dimension);
            match self.dimension {
                1 => {
                    for x in [[-r], [r]] {
                        if self.eval(&x) <= lambda {
                            r *= 1.5;
                            continue 'outer;
                        }
                    }
                }
                _ => {
                    let golden = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
                    for i in 0..n_dirs {
                        let theta = golden * i as f64;
                        if self.eval(&[r * theta.cos(), r * theta.sin()]) <= lambda {
                            r *= 1.5;
                            continue 'outer;
                        }
                    }
                }
            }
            return r;
        }
        r
    }

    /// Text form: header "d k shift", then one monomial per line
    /// "alpha_1 .. alpha_d coeff". Round-trips exactly (shortest f64 form).
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.dimension, self.half_degree, self.shift);
        for (alpha, c) in &self.monomials {
            for a in alpha {
                s.push_str(&format!("{a} "));
            }
            s.push_str(&format!("{c}\n"));
        }
        s
    }

    /// Parse the [`to_text`](Self::to_text) format.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty potential text".into()))?;
        let mut it = header.split_whitespace();
        let parse_usize = |s: Option<&str>, what: &str| -> Result<usize> {
            s.ok_or_else(|| Error::Parse(format!("missing {what}")))?
                .parse()
                .map_err(|e| Error::Parse(format!("bad {what}: {e}")))
        };
        let parse_f64 = |s: Option<&str>, what: &str| -> Result<f64> {
            s.ok_or_else(|| Error::Parse(format!("missing {what}")))?
                .parse()
                .map_err(|e| Error::Parse(format!("bad {what}: {e}")))
        };
        let d = parse_usize(it.next(), "dimension")?;
        let k = parse_usize(it.next(), "half-degree")?;
        let shift = parse_f64(it.next(), "shift")?;
        let mut monomials = Vec::new();
        for line in lines {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != d + 1 {
                return Err(Error::Parse(format!(
                    "monomial line has {} tokens, expected {}",
                    toks.len(),
                    d + 1
                )));
            }
            let mut alpha = Vec::with_capacity(d);
            for t in &toks[..d] {
                alpha.push(
                    t.parse::<usize>()
                        .map_err(|e| Error::Parse(format!("bad exponent: {e}")))?,
                );
            }
            let c = toks[d]
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad coefficient: {e}")))?;
            monomials.push((alpha, c));
        }
        Self::with_shift(d, k, monomials, shift)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn eval_examples() {
        let v = PolynomialPotential::harmonic(2);
        assert_abs_diff_eq!(v.eval(&[1.0, 1.0]), 2.0, epsilon = 0.0);
        let v = PolynomialPotential::quartic_isotropic(2);
        assert_abs_diff_eq!(v.eval(&[0.0, 0.0]), 0.0, epsilon = 0.0);
        let v = PolynomialPotential::quartic_separable(2);
        assert_abs_diff_eq!(v.eval(&[1.0, 1.0]), 2.0, epsilon = 0.0);
    }

    #[test]
    fn margins() {
        let v = PolynomialPotential::quartic_isotropic(2);
        assert_abs_diff_eq!(v.ellipticity_margin(4096).unwrap(), 1.0, epsilon = 1e-6);
        let v = PolynomialPotential::quartic_separable(2);
        assert_abs_diff_eq!(v.ellipticity_margin(4096).unwrap(), 0.5, epsilon = 1e-4);
        // x1^2 x2^2 vanishes on the axes: rejected
        let r = PolynomialPotential::new(2, 2, vec![(vec![2, 2], 1.0)]);
        assert!(matches!(r, Err(Error::NonElliptic { .. })));
    }

    #[test]
    fn margin_scales_linearly() {
        let v = PolynomialPotential::quartic_separable(2);
        let scaled = PolynomialPotential::new(
            2,
            2,
            v.monomials().iter().map(|(a, c)| (a.clone(), 3.0 * c)).collect(),
        )
        .unwrap();
        let m1 = v.ellipticity_margin(4096).unwrap();
        let m3 = scaled.ellipticity_margin(4096).unwrap();
        assert_abs_diff_eq!(m3, 3.0 * m1, epsilon = 1e-10);
    }

    #[test]
    fn shift_examples() {
        // x^4 - 2 x^2 has minimum -1 at x = +-1
        let v = PolynomialPotential::new(1, 2, vec![(vec![4], 1.0), (vec![2], -2.0)]).unwrap();
        let shifted = v.shift_nonnegative(4.0, 4001);
        assert_abs_diff_eq!(shifted.shift(), 1.0, epsilon = 1e-6);
        // idempotent
        let again = shifted.shift_nonnegative(4.0, 4001);
        assert_abs_diff_eq!(again.shift(), shifted.shift(), epsilon = 1e-9);

        let v = PolynomialPotential::harmonic(1);
        assert_abs_diff_eq!(v.shift_nonnegative(5.0, 101).shift(), 0.0, epsilon = 0.0);
        let v = PolynomialPotential::with_shift(1, 2, vec![(vec![4], 1.0)], 3.0).unwrap();
        assert_abs_diff_eq!(v.shift_nonnegative(5.0, 101).shift(), 3.0, epsilon = 0.0);
    }

    #[test]
    fn rejects_missing_top_degree() {
        let r = PolynomialPotential::new(1, 2, vec![(vec![3], 1.0)]);
        assert!(matches!(r, Err(Error::InvalidPotential(_))));
        let r = PolynomialPotential::new(1, 1, vec![(vec![4], 1.0)]);
        assert!(matches!(r, Err(Error::InvalidPotential(_))));
    }

    #[test]
    fn horner_by_variable_agrees_with_sparse_sum() {
        // independent grouped-Horner evaluation for d = 2
        fn horner_eval(v: &PolynomialPotential, x: &[f64]) -> f64 {
            let deg = 2 * v.half_degree();
            // coefficients of x1^i as polynomials in x2
            let mut rows = vec![vec![0.0; deg + 1]; deg + 1];
            for (alpha, c) in v.monomials() {
                rows[alpha[0]][alpha[1]] += *c;
            }
            let mut acc = 0.0;
            for i in (0..=deg).rev() {
                let mut inner = 0.0;
                for j in (0..=deg).rev() {
                    inner = inner * x[1] + rows[i][j];
                }
                acc = acc * x[0] + inner;
            }
            acc + v.shift()
        }
        let v = PolynomialPotential::new(
            2,
            2,
            vec![
                (vec![4, 0], 1.0),
                (vec![2, 2], 2.0),
                (vec![0, 4], 1.5),
                (vec![1, 0], -0.3),
                (vec![2, 1], 0.7),
            ],
        )
        .unwrap();
        for &p in &[[0.3, -1.2], [2.0, 0.5], [-1.7, -0.9]] {
            let a = v.eval(&p);
            let b = horner_eval(&v, &p);
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn text_round_trip_is_exact() {
        let v = PolynomialPotential::with_shift(
            2,
            2,
            vec![(vec![4, 0], 0.1), (vec![0, 4], 1.0 / 3.0), (vec![1, 1], -2.5e-7)],
            0.123456789012345678,
        )
        .unwrap();
        let text = v.to_text();
        let back = PolynomialPotential::from_text(&text).unwrap();
        assert_eq!(v, back);
    }
}
