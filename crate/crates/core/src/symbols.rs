//! Phase-space symbols: sparse polynomial symbols with an exact Moyal
//! product, and cutoff quasi-homogeneous observables of degree 0.

use num_complex::Complex64;

use crate::{Error, Result};

/// Sparse polynomial symbol Σ c x^α ξ^β on R^{2d}.
#[derive(Debug, Clone, PartialEq)]
pub struct PolySymbol {
    d: usize,
    /// (x-exponents, ξ-exponents, coefficient)
    terms: Vec<(Vec<usize>, Vec<usize>, Complex64)>,
}

impl PolySymbol {
    pub fn new(d: usize, terms: Vec<(Vec<usize>, Vec<usize>, Complex64)>) -> Self {
        let mut s = PolySymbol { d, terms };
        s.canonicalize();
        s
    }

    pub fn zero(d: usize) -> Self {
        PolySymbol { d, terms: vec![] }
    }

    pub fn constant(d: usize, c: f64) -> Self {
        Self::new(d, vec![(vec![0; d], vec![0; d], Complex64::new(c, 0.0))])
    }

    /// The coordinate symbol x_axis.
    pub fn x(d: usize, axis: usize) -> Self {
        let mut a = vec![0; d];
        a[axis] = 1;
        Self::new(d, vec![(a, vec![0; d], Complex64::new(1.0, 0.0))])
    }

    /// The momentum symbol ξ_axis.
    pub fn xi(d: usize, axis: usize) -> Self {
        let mut b = vec![0; d];
        b[axis] = 1;
        Self::new(d, vec![(vec![0; d], b, Complex64::new(1.0, 0.0))])
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn terms(&self) -> &[(Vec<usize>, Vec<usize>, Complex64)] {
        &self.terms
    }

    fn canonicalize(&mut self) {
        self.terms
            .sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut out: Vec<(Vec<usize>, Vec<usize>, Complex64)> = Vec::new();
        for (a, b, c) in self.terms.drain(..) {
            if let Some(last) = out.last_mut() {
                if last.0 == a && last.1 == b {
                    last.2 += c;
                    continue;
                }
            }
            out.push((a, b, c));
        }
        out.retain(|(_, _, c)| c.norm() > 1e-300);
        self.terms = out;
    }

    pub fn add(&self, other: &PolySymbol) -> PolySymbol {
        assert_eq!(self.d, other.d);
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self::new(self.d, terms)
    }

    pub fn scale(&self, c: Complex64) -> PolySymbol {
        Self::new(
            self.d,
            self.terms
                .iter()
                .map(|(a, b, t)| (a.clone(), b.clone(), t * c))
                .collect(),
        )
    }

    /// Pointwise product of symbols.
    pub fn mul(&self, other: &PolySymbol) -> PolySymbol {
        assert_eq!(self.d, other.d);
        let mut terms = Vec::new();
        for (a1, b1, c1) in &self.terms {
            for (a2, b2, c2) in &other.terms {
                let a: Vec<usize> = a1.iter().zip(a2).map(|(x, y)| x + y).collect();
                let b: Vec<usize> = b1.iter().zip(b2).map(|(x, y)| x + y).collect();
                terms.push((a, b, c1 * c2));
            }
        }
        Self::new(self.d, terms)
    }

    pub fn pow(&self, n: usize) -> PolySymbol {
        let mut out = Self::constant(self.d, 1.0);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Partial derivative: variable index < d means x_i, >= d means ξ_{i-d}.
    pub fn derivative(&self, var: usize) -> PolySymbol {
        let mut terms = Vec::new();
        for (a, b, c) in &self.terms {
            let (mut a, mut b) = (a.clone(), b.clone());
            let e = if var < self.d {
                &mut a[var]
            } else {
                &mut b[var - self.d]
            };
            if *e == 0 {
                continue;
            }
            let factor = *e as f64;
            *e -= 1;
            terms.push((a, b, c * factor));
        }
        Self::new(self.d, terms)
    }

    /// Total degree in (x, ξ) jointly.
    pub fn total_degree(&self) -> usize {
        self.terms
            .iter()
            .map(|(a, b, _)| a.iter().sum::<usize>() + b.iter().sum::<usize>())
            .max()
            .unwrap_or(0)
    }

    /// Quasi-degree: each monomial x^α ξ^β counts |α| + k|β|.
    pub fn quasi_degree(&self, k: usize) -> usize {
        self.terms
            .iter()
            .map(|(a, b, _)| a.iter().sum::<usize>() + k * b.iter().sum::<usize>())
            .max()
            .unwrap_or(0)
    }

    /// True when all coefficients are real (the symbol is real-valued).
    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|(_, _, c)| c.im.abs() < 1e-12 * (1.0 + c.re.abs()))
    }

    pub fn eval(&self, x: &[f64], xi: &[f64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, b, c) in &self.terms {
            let mut t = *c;
            for (v, &e) in x.iter().zip(a) {
                t *= v.powi(e as i32);
            }
            for (v, &e) in xi.iter().zip(b) {
                t *= v.powi(e as i32);
            }
            acc += t;
        }
        acc
    }

    /// Text form: header "d", then "a_1 .. a_d | b_1 .. b_d re im" per term.
    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.d);
        for (a, b, c) in &self.terms {
            for e in a {
                s.push_str(&format!("{e} "));
            }
            s.push('|');
            for e in b {
                s.push_str(&format!(" {e}"));
            }
            s.push_str(&format!(" {} {}\n", c.re, c.im));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let d: usize = lines
            .next()
            .ok_or_else(|| Error::Parse("empty symbol text".into()))?
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("bad dimension: {e}")))?;
        let mut terms = Vec::new();
        for line in lines {
            let parts: Vec<&str> = line.split('|').collect();
            if parts.len() != 2 {
                return Err(Error::Parse("term line needs one '|'".into()));
            }
            let a: Vec<usize> = parts[0]
                .split_whitespace()
                .map(|t| t.parse().map_err(|e| Error::Parse(format!("bad exponent: {e}"))))
                .collect::<Result<_>>()?;
            let rest: Vec<&str> = parts[1].split_whitespace().collect();
            if a.len() != d || rest.len() != d + 2 {
                return Err(Error::Parse("term arity mismatch".into()));
            }
            let b: Vec<usize> = rest[..d]
                .iter()
                .map(|t| t.parse().map_err(|e| Error::Parse(format!("bad exponent: {e}"))))
                .collect::<Result<_>>()?;
            let re: f64 = rest[d]
                .parse()
                .map_err(|e| Error::Parse(format!("bad coefficient: {e}")))?;
            let im: f64 = rest[d + 1]
                .parse()
                .map_err(|e| Error::Parse(format!("bad coefficient: {e}")))?;
            terms.push((a, b, Complex64::new(re, im)));
        }
        Ok(Self::new(d, terms))
    }
}

/// Moyal expansion terms C_j with A # B = Σ_j h^j C_j:
/// C_j = (i/2)^j Σ_{|α|+|β|=j} ((-1)^{|β|} / α! β!) (∂_x^α ∂_ξ^β A)(∂_ξ^α ∂_x^β B).
/// Finite for polynomial symbols.
pub fn moyal_terms(a: &PolySymbol, b: &PolySymbol) -> Vec<PolySymbol> {
    assert_eq!(a.dimension(), b.dimension());
    let d = a.dimension();
    let j_max = a.total_degree().min(b.total_degree());
    let mut out = Vec::with_capacity(j_max + 1);
    for j in 0..=j_max {
        let mut cj = PolySymbol::zero(d);
        for (alpha, beta) in multi_index_pairs(d, j) {
            let mut da = a.clone();
            for (axis, &e) in alpha.iter().enumerate() {
                for _ in 0..e {
                    da = da.derivative(axis); // ∂_x^α
                }
            }
            for (axis, &e) in beta.iter().enumerate() {
                for _ in 0..e {
                    da = da.derivative(d + axis); // ∂_ξ^β
                }
            }
            if da.terms().is_empty() {
                continue;
            }
            let mut db = b.clone();
            for (axis, &e) in alpha.iter().enumerate() {
                for _ in 0..e {
                    db = db.derivative(d + axis); // ∂_ξ^α
                }
            }
            for (axis, &e) in beta.iter().enumerate() {
                for _ in 0..e {
                    db = db.derivative(axis); // ∂_x^β
                }
            }
            if db.terms().is_empty() {
                continue;
            }
            let sign = if beta.iter().sum::<usize>() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            let fact = factorial_multi(&alpha) * factorial_multi(&beta);
            cj = cj.add(&da.mul(&db).scale(Complex64::new(sign / fact, 0.0)));
        }
        // (i/2)^j
        let phase = Complex64::new(0.0, 0.5).powu(j as u32);
        out.push(cj.scale(phase));
    }
    out
}

/// A # B at numeric h: Σ_j h^j C_j.
pub fn moyal_product(a: &PolySymbol, b: &PolySymbol, h: f64) -> PolySymbol {
    let mut acc = PolySymbol::zero(a.dimension());
    for (j, cj) in moyal_terms(a, b).into_iter().enumerate() {
        acc = acc.add(&cj.scale(Complex64::new(h.powi(j as i32), 0.0)));
    }
    acc
}

fn factorial_multi(alpha: &[usize]) -> f64 {
    alpha
        .iter()
        .map(|&e| (1..=e).map(|v| v as f64).product::<f64>())
        .product()
}

/// All pairs of multi-indices (alpha, beta) in N^d x N^d with
/// |alpha| + |beta| = j.
fn multi_index_pairs(d: usize, j: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut out = Vec::new();
    for ja in 0..=j {
        for alpha in compositions(d, ja) {
            for beta in compositions(d, j - ja) {
                out.push((alpha.clone(), beta));
            }
        }
    }
    out
}

/// All d-tuples of nonnegative integers summing to n.
fn compositions(d: usize, n: usize) -> Vec<Vec<usize>> {
    if d == 1 {
        return vec![vec![n]];
    }
    let mut out = Vec::new();
    for first in 0..=n {
        for rest in compositions(d - 1, n - first) {
            let mut v = Vec::with_capacity(d);
            v.push(first);
            v.extend(rest);
            out.push(v);
        }
    }
    out
}

/// Cutoff quasi-homogeneous observable of degree 0:
/// A = χ(ρ/ε) P(x,ξ)/ρ^q + (1 - χ(ρ/ε)) c, where ρ = (|x|^{2k} + |ξ|²)^{1/2k}
/// is the quasi-norm (ρ(λx, λ^k ξ) = λρ), P is quasi-homogeneous of
/// quasi-degree q, and χ is a smooth step that is 0 below ε and 1 above 2ε.
#[derive(Debug, Clone)]
pub struct CutoffSymbol {
    pub d: usize,
    pub k: usize,
    pub epsilon: f64,
    pub sup_bound: f64,
    numerator: PolySymbol,
    quasi_degree: usize,
    center_value: f64,
}

impl CutoffSymbol {
    /// Build from a quasi-homogeneous numerator; fails when the numerator
    /// mixes quasi-degrees (the ratio would not be degree 0).
    pub fn new(
        numerator: PolySymbol,
        k: usize,
        epsilon: f64,
        sup_bound: f64,
        center_value: f64,
    ) -> Result<Self> {
        let d = numerator.dimension();
        let q = numerator.quasi_degree(k);
        for (a, b, _) in numerator.terms() {
            let qd = a.iter().sum::<usize>() + k * b.iter().sum::<usize>();
            if qd != q {
                return Err(Error::Parse(
                    "cutoff numerator must be quasi-homogeneous".into(),
                ));
            }
        }
        if !numerator.is_real() {
            return Err(Error::Parse("cutoff numerator must be real".into()));
        }
        Ok(CutoffSymbol {
            d,
            k,
            epsilon,
            sup_bound,
            numerator,
            quasi_degree: q,
            center_value,
        })
    }

    /// Quasi-norm ρ(x, ξ) = (|x|^{2k} + |ξ|²)^{1/2k}.
    pub fn quasi_norm(&self, x: &[f64], xi: &[f64]) -> f64 {
        let xs: f64 = x.iter().map(|v| v * v).sum::<f64>();
        let xis: f64 = xi.iter().map(|v| v * v).sum::<f64>();
        (xs.powi(self.k as i32) + xis).powf(1.0 / (2.0 * self.k as f64))
    }

    pub fn eval(&self, x: &[f64], xi: &[f64]) -> f64 {
        let rho = self.quasi_norm(x, xi);
        if rho <= self.epsilon {
            return self.center_value;
        }
        let outer = self.numerator.eval(x, xi).re / rho.powi(self.quasi_degree as i32);
        if rho >= 2.0 * self.epsilon {
            return outer;
        }
        let chi = smooth_step(rho / self.epsilon - 1.0);
        chi * outer + (1.0 - chi) * self.center_value
    }

    /// Max |A| over `n` quasi-uniform points of the quasi-sphere ρ = 1
    /// (d = 1 or 2).
    pub fn sup_on_quasi_sphere(&self, n: usize) -> f64 {
        let golden = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
        let mut m: f64 = 0.0;
        let two_k = 2.0 * self.k as f64;
        match self.d {
            1 => {
                for i in 0..n {
                    let theta = golden * i as f64;
                    let (c, s) = (theta.cos(), theta.sin());
                    // point with |x|^{2k} + ξ² = 1
                    let x = c.abs().powf(1.0 / self.k as f64) * c.signum();
                    let xi = s;
                    let norm = (x.powi(2 * self.k as i32).abs() + xi * xi)
                        .powf(1.0 / two_k);
                    let scale = 1.0 / norm;
                    let xs = [x * scale];
                    let xis = [xi * scale.powi(self.k as i32)];
                    m = m.max(self.eval(&xs, &xis).abs());
                }
            }
            2 => {
                // low-discrepancy on S^3 then rescale to the quasi-sphere
                let mut state = 0x243f6a8885a308d3u64;
                let mut next = || {
                    state = state
                        .wrapping_mul(6364136223846793005)
                        .wrapping_add(1442695040888963407);
                    ((state >> 11) as f64) / ((1u64 << 53) as f64) * 2.0 - 1.0
                };
                for _ in 0..n {
                    let p = [next(), next(), next(), next()];
                    let norm2: f64 = p.iter().map(|v| v * v).sum();
                    if norm2 < 1e-9 {
                        continue;
                    }
                    let inv = norm2.sqrt().recip();
                    let x = [p[0] * inv, p[1] * inv];
                    let xi = [p[2] * inv, p[3] * inv];
                    let rho = self.quasi_norm(&x, &xi);
                    let lam = 1.0 / rho;
                    let xs = [x[0] * lam, x[1] * lam];
                    let lk = lam.powi(self.k as i32);
                    let xis = [xi[0] * lk, xi[1] * lk];
                    m = m.max(self.eval(&xs, &xis).abs());
                }
            }
            _ => panic!("quasi-sphere sampling only for d <= 2"),
        }
        m
    }

    /// Verify A(λx, λ^k ξ) = A(x, ξ) at sampled points outside the cutoff.
    pub fn check_quasi_homogeneity(&self, tol: f64) -> bool {
        let base: Vec<(Vec<f64>, Vec<f64>)> = match self.d {
            1 => vec![
                (vec![1.0], vec![0.3]),
                (vec![-0.7], vec![1.1]),
                (vec![0.4], vec![-0.9]),
            ],
            _ => vec![
                (vec![1.0, -0.4], vec![0.3, 0.8]),
                (vec![-0.6, 0.9], vec![1.0, -0.2]),
                (vec![0.2, 0.3], vec![-0.5, 1.2]),
            ],
        };
        for (x, xi) in base {
            let rho = self.quasi_norm(&x, &xi);
            if rho < 2.0 * self.epsilon {
                continue;
            }
            let v0 = self.eval(&x, &xi);
            for lam in [1.5, 2.0, 4.0] {
                let xs: Vec<f64> = x.iter().map(|v| v * lam).collect();
                let lk = lam.powi(self.k as i32);
                let xis: Vec<f64> = xi.iter().map(|v| v * lk).collect();
                if (self.eval(&xs, &xis) - v0).abs() > tol * (1.0 + v0.abs()) {
                    return false;
                }
            }
        }
        true
    }
}

/// C^∞ step: 0 for t <= 0, 1 for t >= 1.
pub fn smooth_step(t: f64) -> f64 {
    let f = |t: f64| if t > 0.0 { (-1.0 / t).exp() } else { 0.0 };
    let a = f(t);
    let b = f(1.0 - t);
    a / (a + b)
}
