//! Weyl quantization of polynomial symbols, exact on tensor Hermite bases:
//! every monomial x^m ξ^n is quantized per axis via the McCoy
//! symmetrization 2^{-m} Σ_j C(m,j) X^j Ξ^n X^{m-j}, with internal padding
//! so the returned sections carry no truncation error. Also the rescaling
//! map ψ_j^h and normalized (degree-0) window blocks.

use ndarray::Array2;
use num_complex::Complex64;

use crate::eigensolver::{EigenBasis, StateCoefficients};
use crate::hermite;
use crate::symbols::PolySymbol;
use crate::windows::{normalized_exponent, SpectralWindow};
use crate::{Error, Result};

/// One tensor term of a quantized operator: coeff × (axis1 ⊗ axis2).
/// Axis factors are real (phases are folded into `coeff`).
#[derive(Debug, Clone)]
pub struct OpTerm {
    pub coeff: Complex64,
    pub axis1: Array2<f64>,
    pub axis2: Option<Array2<f64>>,
}

/// Weyl quantization of a polynomial symbol on the scaled Hermite basis,
/// kept in tensor-factored form.
#[derive(Debug, Clone)]
pub struct QuantizedOp {
    pub d: usize,
    pub n_basis: usize,
    pub terms: Vec<OpTerm>,
}

impl QuantizedOp {
    /// Materialize the full (complex) matrix; n_basis^d rows. Use only for
    /// small bases.
    pub fn dense(&self) -> Array2<Complex64> {
        let n = self.n_basis;
        let dim = if self.d == 1 { n } else { n * n };
        let mut m = Array2::from_elem((dim, dim), Complex64::new(0.0, 0.0));
        for t in &self.terms {
            match (&t.axis2, self.d) {
                (None, 1) => {
                    for i in 0..n {
                        for j in 0..n {
                            m[[i, j]] += t.coeff * t.axis1[[i, j]];
                        }
                    }
                }
                (Some(a2), 2) => {
                    for i1 in 0..n {
                        for j1 in 0..n {
                            let v1 = t.axis1[[i1, j1]];
                            if v1 == 0.0 {
                                continue;
                            }
                            for i2 in 0..n {
                                for j2 in 0..n {
                                    let v2 = a2[[i2, j2]];
                                    if v2 == 0.0 {
                                        continue;
                                    }
                                    m[[i1 * n + i2, j1 * n + j2]] += t.coeff * v1 * v2;
                                }
                            }
                        }
                    }
                }
                _ => unreachable!("term arity matches d"),
            }
        }
        m
    }

    /// Hermitian deviation ‖M - M†‖_max of the dense matrix.
    pub fn hermitian_deviation(&self) -> f64 {
        let m = self.dense();
        let mut dev: f64 = 0.0;
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                dev = dev.max((m[[i, j]] - m[[j, i]].conj()).norm());
            }
        }
        dev
    }

    /// Matrix elements ⟨phi_i, Op phi_j⟩ over a window of basis states.
    pub fn window_block(
        &self,
        basis: &EigenBasis,
        window: &SpectralWindow,
    ) -> Result<Array2<Complex64>> {
        assert_eq!(basis.n_axis(), self.n_basis, "operator/basis size mismatch");
        let idx = &window.indices;
        for &j in idx {
            basis.check_trusted(j)?;
        }
        let nw = idx.len();
        let mut out = Array2::from_elem((nw, nw), Complex64::new(0.0, 0.0));
        match self.d {
            1 => {
                for t in &self.terms {
                    // B[:, l] = axis1 · c_l, entry = c_j^T B
                    for (col, &l) in idx.iter().enumerate() {
                        let cl = basis.state_vector(l);
                        let b = t.axis1.dot(&cl);
                        for (row, &j) in idx.iter().enumerate() {
                            let cj = basis.state_vector(j);
                            let mut s = 0.0;
                            for a in 0..self.n_basis {
                                s += cj[a] * b[a];
                            }
                            out[[row, col]] += t.coeff * s;
                        }
                    }
                }
            }
            2 => match basis.coefficients() {
                StateCoefficients::Identity { order } => {
                    let n = self.n_basis;
                    for t in &self.terms {
                        let a2 = t.axis2.as_ref().unwrap();
                        for (row, &j) in idx.iter().enumerate() {
                            let (j1, j2) = (order[j] / n, order[j] % n);
                            for (col, &l) in idx.iter().enumerate() {
                                let (l1, l2) = (order[l] / n, order[l] % n);
                                out[[row, col]] += t.coeff * t.axis1[[j1, l1]] * a2[[j2, l2]];
                            }
                        }
                    }
                }
                StateCoefficients::Product { order, axis1, axis2 } => {
                    for t in &self.terms {
                        let a2t = t.axis2.as_ref().unwrap();
                        // contract axis factors once per 1D state index
                        let m1 = axis1.t().dot(&t.axis1).dot(axis1);
                        let m2 = axis2.t().dot(a2t).dot(axis2);
                        for (row, &j) in idx.iter().enumerate() {
                            let (j1, j2) = order[j];
                            for (col, &l) in idx.iter().enumerate() {
                                let (l1, l2) = order[l];
                                out[[row, col]] += t.coeff * m1[[j1, l1]] * m2[[j2, l2]];
                            }
                        }
                    }
                }
                StateCoefficients::Dense(_) => {
                    let n = self.n_basis;
                    let gs: Vec<Array2<f64>> = idx.iter().map(|&j| basis.state_matrix(j)).collect();
                    for t in &self.terms {
                        let a2 = t.axis2.as_ref().unwrap();
                        for (col, gl) in gs.iter().enumerate() {
                            // B = axis1 · G_l · axis2^T
                            let b = t.axis1.dot(gl).dot(&a2.t());
                            for (row, gj) in gs.iter().enumerate() {
                                let mut s = 0.0;
                                for a1 in 0..n {
                                    for a2i in 0..n {
                                        s += gj[[a1, a2i]] * b[[a1, a2i]];
                                    }
                                }
                                out[[row, col]] += t.coeff * s;
                            }
                        }
                    }
                }
            },
            _ => return Err(Error::DimensionUnsupported(self.d)),
        }
        Ok(out)
    }
}

/// Per-axis operator matrix of the Weyl-ordered monomial x^m ξ^n
/// on the scaled basis e_k(x) = σ^{-1/2} h_k(x/σ), computed with padding
/// `pad` so the returned section of size `n_basis` is exact.
/// Returns (real matrix R, power of i), the operator being i^{pow} R.
fn mccoy_axis(
    m: usize,
    n: usize,
    h: f64,
    sigma: f64,
    n_basis: usize,
    pad: usize,
) -> (Array2<f64>, u32) {
    let big = n_basis + pad;
    let lm = hermite::ladder_matrices(big.saturating_sub(1));
    // X = σ T, Ξ = (h/σ) i S  =>  scalar prefactors σ^m (h/σ)^n i^n
    let t = &lm.x;
    let s = &lm.p_imag;
    // powers of T and S
    let mut t_pows: Vec<Array2<f64>> = vec![Array2::eye(big)];
    for _ in 0..m {
        let last = t_pows.last().unwrap();
        t_pows.push(last.dot(t));
    }
    let mut s_pow = Array2::eye(big);
    for _ in 0..n {
        s_pow = s_pow.dot(s);
    }
    let mut acc: Array2<f64> = Array2::zeros((big, big));
    let mut binom = 1.0f64; // C(m, 0)
    for j in 0..=m {
        // T^j S^n T^{m-j}
        let prod = t_pows[j].dot(&s_pow).dot(&t_pows[m - j]);
        acc.zip_mut_with(&prod, |a, &b| *a += binom * b);
        binom = binom * (m - j) as f64 / (j + 1) as f64;
    }
    let scale = 0.5f64.powi(m as i32) * sigma.powi(m as i32) * (h / sigma).powi(n as i32);
    let mut section = Array2::zeros((n_basis, n_basis));
    for i in 0..n_basis {
        for j in 0..n_basis {
            section[[i, j]] = scale * acc[[i, j]];
        }
    }
    (section, (n % 4) as u32)
}

/// Weyl h-quantization of a polynomial symbol on the scaled tensor Hermite
/// basis. The result is exact on the full returned section (internal
/// padding by the symbol degree removes truncation effects).
pub fn weyl_quantize_poly(
    a: &PolySymbol,
    h: f64,
    n_basis: usize,
    sigma: f64,
) -> Result<QuantizedOp> {
    let d = a.dimension();
    if d > 2 {
        return Err(Error::DimensionUnsupported(d));
    }
    let pad = a.total_degree() + 1;
    let i_unit = Complex64::new(0.0, 1.0);
    let mut terms = Vec::new();
    for (alpha, beta, c) in a.terms() {
        match d {
            1 => {
                let (r, ipow) = mccoy_axis(alpha[0], beta[0], h, sigma, n_basis, pad);
                terms.push(OpTerm {
                    coeff: c * i_unit.powu(ipow),
                    axis1: r,
                    axis2: None,
                });
            }
            2 => {
                let (r1, ip1) = mccoy_axis(alpha[0], beta[0], h, sigma, n_basis, pad);
                let (r2, ip2) = mccoy_axis(alpha[1], beta[1], h, sigma, n_basis, pad);
                terms.push(OpTerm {
                    coeff: c * i_unit.powu(ip1 + ip2),
                    axis1: r1,
                    axis2: Some(r2),
                });
            }
            _ => unreachable!(),
        }
    }
    Ok(QuantizedOp { d, n_basis, terms })
}

/// The rescaled states ψ_j^h(y) = h^{-d/(2(k+1))} phi_j(h^{-1/(k+1)} y):
/// same tensor coefficients over the Hermite basis with scale
/// σ' = σ h^{1/(k+1)}; eigenvalues pick up the factor h^{2k/(k+1)}
/// (they are eigenvalues of -h²Δ + V_eps).
pub fn rescaled_basis(basis: &EigenBasis, h: f64) -> EigenBasis {
    let k = basis.potential().half_degree() as f64;
    let eps = h.powf(1.0 / (k + 1.0));
    let factor = h.powf(2.0 * k / (k + 1.0));
    let eigenvalues: Vec<f64> = basis.eigenvalues().iter().map(|&l| factor * l).collect();
    EigenBasis::from_parts(
        basis.potential().clone(),
        h,
        basis.sigma() * eps,
        basis.n_axis(),
        eigenvalues,
        basis.coefficients().clone(),
        basis.trust_count(),
    )
}

/// Normalized window block of a quasi-homogeneous polynomial observable of
/// quasi-degree (k+1)m: D^{-1/2} Op_1(P)|_window D^{-1/2} with
/// D_jj = λ_j^{(k+1)m/(2k)}. The result is a degree-0 observable block in
/// the sense of quasi-homogeneous symbol classes.
pub fn normalized_window_block(
    basis: &EigenBasis,
    window: &SpectralWindow,
    p: &PolySymbol,
    quasi_order_m: f64,
) -> Result<Array2<Complex64>> {
    let op = weyl_quantize_poly(p, 1.0, basis.n_axis(), basis.sigma())?;
    let mut block = op.window_block(basis, window)?;
    let ex = normalized_exponent(basis.potential().half_degree());
    let nw = window.indices.len();
    let pow = ex * quasi_order_m;
    // D^{-1/2} B D^{-1/2} with D_jj = λ_j^{(k+1)m/2k}
    let half: Vec<f64> = window
        .indices
        .iter()
        .map(|&j| basis.eigenvalues()[j].powf(-pow / 2.0))
        .collect();
    for r in 0..nw {
        for c in 0..nw {
            block[[r, c]] *= half[r] * half[c];
        }
    }
    Ok(block)
}
