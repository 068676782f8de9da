//! Grid-based Weyl quantization for cutoff (non-polynomial) observables.
//!
//! 1D core: matrix elements are the Wigner pairing
//!   ⟨e_m, Op_h(A) e_n⟩ = ∫∫∫ (2πh)^{-1} A(u,ξ) e^{ivξ/h}
//!                         e_n(u - v/2) e_m(u + v/2) dv dξ du.
//! On a uniform p-grid the change of variables p = u + v/2, q = u - v/2 is
//! measure preserving and lands on the same lattice, so the triple sum
//! collapses to O = Eᵀ K E with K[p,q] = Δ² Ã((p+q)/2, p-q) and Ã the
//! ξ-transform of A. One oscillatory quadrature per (u, ξ) cell, organised
//! as two dense matrix products.
//!
//! d = 2: the observable is expanded in a separable Chebyshev basis and
//! compressed by an SVD across the (x1,ξ1)|(x2,ξ2) split; Weyl
//! quantization factorizes over symplectic pairs, so the operator is a
//! short sum of tensor products of 1D grid quantizations.

use ndarray::Array2;
use num_complex::Complex64;

use crate::eigensolver::{EigenBasis, StateCoefficients};
use crate::numerics::symmetric_eigen;
use crate::par::{self, Parallelism};
use crate::windows::SpectralWindow;
use crate::{Error, Result};

/// Phase-space grid for the 1D quantizer.
#[derive(Debug, Clone)]
pub struct GridQuantConfig {
    /// Half-width of the position grid.
    pub radius_x: f64,
    /// Half-width of the momentum grid.
    pub radius_xi: f64,
    /// Position grid spacing.
    pub spacing: f64,
    /// Momentum grid points.
    pub n_xi: usize,
}

impl GridQuantConfig {
    /// Size the grid from the physical energy reach of the states to be
    /// paired: turning radius and momentum shell at `lambda_top`, the
    /// oscillation rate radius_xi / h_quant, and an alias-free ξ spacing.
    pub fn auto(
        v: &crate::potential::PolynomialPotential,
        lambda_top: f64,
        h_quant: f64,
        margin: f64,
    ) -> Self {
        let k = v.half_degree() as f64;
        let ell = v
            .ellipticity_margin(4096.max(8 * v.dimension()))
            .expect("validated potential");
        let x_turn = (lambda_top / ell).powf(1.0 / (2.0 * k));
        let radius_x = margin * x_turn;
        let radius_xi = margin * lambda_top.sqrt();
        let rate = radius_xi / h_quant;
        let spacing = std::f64::consts::PI / (3.0 * rate);
        // aliases of e^{ivξ/h} must land outside the used |v| <= 2 radius_x
        let dxi = 2.0 * std::f64::consts::PI * h_quant / (2.4 * 2.0 * radius_x);
        let n_xi = (2.0 * radius_xi / dxi).ceil() as usize + 1;
        GridQuantConfig {
            radius_x,
            radius_xi,
            spacing,
            n_xi,
        }
    }

    fn refined(&self) -> Self {
        GridQuantConfig {
            radius_x: self.radius_x,
            radius_xi: self.radius_xi,
            spacing: self.spacing / 2.0,
            n_xi: self.n_xi * 2,
        }
    }
}

/// Reusable grid plan: lattices, phase transform and basis table are
/// shared across quantizations of different symbols on the same grid.
pub struct Grid1dPlan {
    n_basis: usize,
    delta: f64,
    g: usize,
    u_grid: Vec<f64>,
    xi_grid: Vec<f64>,
    /// phases[xi, v] = w_xi e^{i v ξ / h} dξ / (2πh)
    phase_re: Array2<f64>,
    phase_im: Array2<f64>,
    /// E[n, p] = sigma^{-1/2} h_n(p / sigma)
    basis_table: Array2<f64>,
}

impl Grid1dPlan {
    pub fn new(h_quant: f64, n_basis: usize, sigma: f64, cfg: &GridQuantConfig) -> Self {
        let delta = cfg.spacing;
        let g = (2.0 * cfg.radius_x / delta).ceil() as usize + 1;
        let lo = -0.5 * delta * (g as f64 - 1.0);
        let p_grid: Vec<f64> = (0..g).map(|i| lo + delta * i as f64).collect();
        let u_grid: Vec<f64> = (0..2 * g - 1).map(|m| lo + 0.5 * delta * m as f64).collect();
        let n_xi = cfg.n_xi;
        let dxi = 2.0 * cfg.radius_xi / (n_xi as f64 - 1.0);
        let xi_grid: Vec<f64> = (0..n_xi)
            .map(|i| -cfg.radius_xi + dxi * i as f64)
            .collect();
        let pref = dxi / (2.0 * std::f64::consts::PI * h_quant);
        let n_v = 2 * g - 1;
        let mut phase_re = Array2::zeros((n_xi, n_v));
        let mut phase_im = Array2::zeros((n_xi, n_v));
        for (ix, &xi) in xi_grid.iter().enumerate() {
            let w = if ix == 0 || ix == n_xi - 1 { 0.5 } else { 1.0 };
            let step = Complex64::from_polar(1.0, delta * xi / h_quant);
            let mut phase =
                Complex64::from_polar(1.0, -(g as f64 - 1.0) * delta * xi / h_quant)
                    * (w * pref);
            for v in 0..n_v {
                phase_re[[ix, v]] = phase.re;
                phase_im[[ix, v]] = phase.im;
                phase *= step;
            }
        }
        let z: Vec<f64> = p_grid.iter().map(|&x| x / sigma).collect();
        let mut basis_table = crate::hermite::hermite_functions(n_basis - 1, &z);
        let s = sigma.powf(-0.5);
        basis_table.mapv_inplace(|x| s * x);
        Grid1dPlan {
            n_basis,
            delta,
            g,
            u_grid,
            xi_grid,
            phase_re,
            phase_im,
            basis_table,
        }
    }

    /// ⟨e_m, Op_h(f) e_n⟩ for a symbol on this plan's grid.
    pub fn quantize<F>(&self, f: &F) -> Array2<Complex64>
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        let g = self.g;
        // sample F[u, ξ]
        let rows: Vec<Vec<f64>> = par::map_indexed(self.u_grid.len(), Parallelism::Auto, |mu| {
            let u = self.u_grid[mu];
            self.xi_grid.iter().map(|&xi| f(u, xi)).collect()
        });
        let mut fmat = Array2::zeros((self.u_grid.len(), self.xi_grid.len()));
        for (i, row) in rows.into_iter().enumerate() {
            for (j, v) in row.into_iter().enumerate() {
                fmat[[i, j]] = v;
            }
        }
        // Ã[u, v] = Σ_ξ F[u, ξ] phases[ξ, v]
        let a_re = fmat.dot(&self.phase_re);
        let a_im = fmat.dot(&self.phase_im);
        // K[p, q] = Δ² Ã((p+q)/2, p - q)
        let d2 = self.delta * self.delta;
        let mut k_re = Array2::zeros((g, g));
        let mut k_im = Array2::zeros((g, g));
        for i in 0..g {
            for j in 0..g {
                k_re[[i, j]] = d2 * a_re[[i + j, i + g - 1 - j]];
                k_im[[i, j]] = d2 * a_im[[i + j, i + g - 1 - j]];
            }
        }
        let e = &self.basis_table;
        let o_re = e.dot(&k_re).dot(&e.t());
        let o_im = e.dot(&k_im).dot(&e.t());
        let n = self.n_basis;
        let mut out = Array2::from_elem((n, n), Complex64::new(0.0, 0.0));
        for i in 0..n {
            for j in 0..n {
                out[[i, j]] = Complex64::new(o_re[[i, j]], o_im[[i, j]]);
            }
        }
        out
    }
}

/// ⟨e_m, Op_h(f) e_n⟩ over the first `n_basis` scaled Hermite functions
/// (basis scale `sigma`).
pub fn quantize_grid_1d<F>(
    f: &F,
    h_quant: f64,
    n_basis: usize,
    sigma: f64,
    cfg: &GridQuantConfig,
) -> Array2<Complex64>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    Grid1dPlan::new(h_quant, n_basis, sigma, cfg).quantize(f)
}

/// As [`quantize_grid_1d`], with a refinement check: recomputes on a
/// doubled grid and fails with [`Error::GridUnderresolved`] when any entry
/// moves by more than `tol`.
pub fn quantize_grid_1d_checked<F>(
    f: &F,
    h_quant: f64,
    n_basis: usize,
    sigma: f64,
    cfg: &GridQuantConfig,
    tol: f64,
) -> Result<Array2<Complex64>>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let coarse = quantize_grid_1d(f, h_quant, n_basis, sigma, cfg);
    let fine = quantize_grid_1d(f, h_quant, n_basis, sigma, &cfg.refined());
    let mut change: f64 = 0.0;
    for (a, b) in coarse.iter().zip(fine.iter()) {
        change = change.max((a - b).norm());
    }
    if change > tol {
        return Err(Error::GridUnderresolved { change, tol });
    }
    Ok(fine)
}

/// Window block ⟨phi_j, Op phi_l⟩ from an operator on the 1D basis.
pub fn window_block_1d(
    basis: &EigenBasis,
    window: &SpectralWindow,
    op: &Array2<Complex64>,
) -> Result<Array2<Complex64>> {
    if basis.dimension() != 1 {
        return Err(Error::DimensionUnsupported(basis.dimension()));
    }
    let idx = &window.indices;
    for &j in idx {
        basis.check_trusted(j)?;
    }
    let n = basis.n_axis();
    let nw = idx.len();
    let mut out = Array2::from_elem((nw, nw), Complex64::new(0.0, 0.0));
    let states: Vec<ndarray::Array1<f64>> = idx.iter().map(|&j| basis.state_vector(j)).collect();
    for (col, cl) in states.iter().enumerate() {
        // b = op · c_l
        let mut b = vec![Complex64::new(0.0, 0.0); n];
        for a in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for bidx in 0..n {
                acc += op[[a, bidx]] * cl[bidx];
            }
            b[a] = acc;
        }
        for (row, cj) in states.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..n {
                acc += cj[a] * b[a];
            }
            out[[row, col]] = acc;
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// d = 2: separable Chebyshev expansion + SVD compression
// ---------------------------------------------------------------------------

/// 2D Chebyshev series on [cx ± rx] × [cxi ± rxi].
#[derive(Debug, Clone)]
pub struct Cheb2 {
    coeff: Array2<f64>,
    rx: f64,
    rxi: f64,
}

impl Cheb2 {
    pub fn eval(&self, x: f64, xi: f64) -> f64 {
        let tx = (x / self.rx).clamp(-1.0, 1.0);
        let ty = (xi / self.rxi).clamp(-1.0, 1.0);
        // Clenshaw over rows, then over the resulting column
        let (n, m) = (self.coeff.nrows(), self.coeff.ncols());
        let mut col = vec![0.0; n];
        for i in 0..n {
            let mut b1 = 0.0;
            let mut b2 = 0.0;
            for j in (1..m).rev() {
                let b0 = 2.0 * ty * b1 - b2 + self.coeff[[i, j]];
                b2 = b1;
                b1 = b0;
            }
            col[i] = ty * b1 - b2 + self.coeff[[i, 0]];
        }
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for i in (1..n).rev() {
            let b0 = 2.0 * tx * b1 - b2 + col[i];
            b2 = b1;
            b1 = b0;
        }
        tx * b1 - b2 + col[0]
    }
}

/// Separated form A(x1,ξ1,x2,ξ2) ≈ Σ_q f_q(x1,ξ1) g_q(x2,ξ2).
#[derive(Debug)]
pub struct SeparatedSymbol2 {
    pub terms: Vec<(Cheb2, Cheb2)>,
    pub truncation: f64,
}

/// Chebyshev coefficient transform matrix for Gauss–Lobatto samples.
fn cheb_transform(n: usize) -> Array2<f64> {
    let deg = n - 1;
    let mut d = Array2::zeros((n, n));
    for k in 0..n {
        for i in 0..n {
            let w = if i == 0 || i == deg { 0.5 } else { 1.0 };
            let ck = if k == 0 || k == deg { 0.5 } else { 1.0 };
            d[[k, i]] = 2.0 / deg as f64
                * ck
                * w
                * ((std::f64::consts::PI * (k * i) as f64) / deg as f64).cos();
        }
    }
    d
}

/// Expand and compress a 4D observable. `deg + 1` Chebyshev points per
/// axis; ranks kept while σ_q > rank_tol · σ_0.
pub fn separate_symbol_2d<F>(
    f: &F,
    radius_x: f64,
    radius_xi: f64,
    deg: usize,
    rank_tol: f64,
) -> Result<SeparatedSymbol2>
where
    F: Fn(&[f64], &[f64]) -> f64 + Sync,
{
    let n = deg + 1;
    let pts: Vec<f64> = (0..n)
        .map(|i| (std::f64::consts::PI * i as f64 / deg as f64).cos())
        .collect();
    let xs: Vec<f64> = pts.iter().map(|&t| radius_x * t).collect();
    let xis: Vec<f64> = pts.iter().map(|&t| radius_xi * t).collect();

    // samples F[i1, j1, i2, j2], flattened
    let stride = [n * n * n, n * n, n, 1];
    let samples: Vec<Vec<f64>> = par::map_indexed(n, Parallelism::Auto, |i1| {
        let mut block = vec![0.0; n * n * n];
        for j1 in 0..n {
            for i2 in 0..n {
                for j2 in 0..n {
                    block[j1 * n * n + i2 * n + j2] =
                        f(&[xs[i1], xs[i2]], &[xis[j1], xis[j2]]);
                }
            }
        }
        block
    });
    let mut data = vec![0.0; n * n * n * n];
    for (i1, block) in samples.into_iter().enumerate() {
        data[i1 * stride[0]..(i1 + 1) * stride[0]].copy_from_slice(&block);
    }

    // Chebyshev transform along each axis
    let d = cheb_transform(n);
    for axis in 0..4 {
        let mut out = vec![0.0; data.len()];
        let sa = stride[axis];
        // iterate over all positions with axis index 0
        let outer = data.len() / n;
        for o in 0..outer {
            // compute the base offset with a "hole" at `axis`
            let mut rem = o;
            let mut base = 0;
            for ax in 0..4 {
                if ax == axis {
                    continue;
                }
                let size = n;
                let idx = rem % size;
                rem /= size;
                base += idx * stride[ax];
            }
            for k in 0..n {
                let mut acc = 0.0;
                for i in 0..n {
                    acc += d[[k, i]] * data[base + i * sa];
                }
                out[base + k * sa] = acc;
            }
        }
        data = out;
    }

    // reshape to M[(i1 j1), (i2 j2)] and SVD via the Gram matrix
    let rows = n * n;
    let mut mmat = Array2::zeros((rows, rows));
    for i1 in 0..n {
        for j1 in 0..n {
            for i2 in 0..n {
                for j2 in 0..n {
                    mmat[[i1 * n + j1, i2 * n + j2]] =
                        data[i1 * stride[0] + j1 * stride[1] + i2 * stride[2] + j2 * stride[3]];
                }
            }
        }
    }
    let gram = mmat.t().dot(&mmat);
    let (evals, evecs) = symmetric_eigen(&gram)?;
    // descending
    let mut order: Vec<usize> = (0..rows).collect();
    order.sort_by(|&a, &b| evals[b].partial_cmp(&evals[a]).unwrap());
    let sigma0 = evals[order[0]].max(0.0).sqrt();
    let mut terms = Vec::new();
    let mut truncation = 0.0;
    for &q in &order {
        let sq = evals[q].max(0.0).sqrt();
        if sq <= rank_tol * sigma0 || !sq.is_finite() || sq == 0.0 {
            truncation += sq * sq;
            continue;
        }
        let v = evecs.column(q);
        let u = mmat.dot(&v.to_owned()) / sq;
        let scale = sq.sqrt();
        let mut cf = Array2::zeros((n, n));
        let mut cg = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                cf[[i, j]] = scale * u[i * n + j];
                cg[[i, j]] = scale * v[i * n + j];
            }
        }
        terms.push((
            Cheb2 {
                coeff: cf,
                rx: radius_x,
                rxi: radius_xi,
            },
            Cheb2 {
                coeff: cg,
                rx: radius_x,
                rxi: radius_xi,
            },
        ));
    }
    Ok(SeparatedSymbol2 {
        terms,
        truncation: truncation.sqrt(),
    })
}

/// d = 2 grid quantization in tensor-factored form.
pub struct GridOp2 {
    pub n_basis: usize,
    pub terms: Vec<(Array2<Complex64>, Array2<Complex64>)>,
}

/// Quantize a separated observable: Op = Σ_q Op1(f_q) ⊗ Op1(g_q).
pub fn quantize_grid_2d(
    sep: &SeparatedSymbol2,
    h_quant: f64,
    n_basis: usize,
    sigma: f64,
    cfg: &GridQuantConfig,
) -> GridOp2 {
    let plan = Grid1dPlan::new(h_quant, n_basis, sigma, cfg);
    let terms = sep
        .terms
        .iter()
        .map(|(fq, gq)| {
            let o1 = plan.quantize(&|x, xi| fq.eval(x, xi));
            let o2 = plan.quantize(&|x, xi| gq.eval(x, xi));
            (o1, o2)
        })
        .collect();
    GridOp2 { n_basis, terms }
}

impl GridOp2 {
    /// Window block over factorized (Identity/Product) or dense states.
    pub fn window_block(
        &self,
        basis: &EigenBasis,
        window: &SpectralWindow,
    ) -> Result<Array2<Complex64>> {
        assert_eq!(basis.n_axis(), self.n_basis);
        let idx = &window.indices;
        for &j in idx {
            basis.check_trusted(j)?;
        }
        let n = self.n_basis;
        let nw = idx.len();
        let mut out = Array2::from_elem((nw, nw), Complex64::new(0.0, 0.0));
        match basis.coefficients() {
            StateCoefficients::Identity { order } => {
                for (o1, o2) in &self.terms {
                    for (row, &j) in idx.iter().enumerate() {
                        let (j1, j2) = (order[j] / n, order[j] % n);
                        for (col, &l) in idx.iter().enumerate() {
                            let (l1, l2) = (order[l] / n, order[l] % n);
                            out[[row, col]] += o1[[j1, l1]] * o2[[j2, l2]];
                        }
                    }
                }
            }
            StateCoefficients::Product { order, axis1, axis2 } => {
                for (o1, o2) in &self.terms {
                    let m1 = conjugate_complex(axis1, o1);
                    let m2 = conjugate_complex(axis2, o2);
                    for (row, &j) in idx.iter().enumerate() {
                        let (j1, j2) = order[j];
                        for (col, &l) in idx.iter().enumerate() {
                            let (l1, l2) = order[l];
                            out[[row, col]] += m1[[j1, l1]] * m2[[j2, l2]];
                        }
                    }
                }
            }
            StateCoefficients::Dense(_) => {
                let gs: Vec<Array2<f64>> = idx.iter().map(|&j| basis.state_matrix(j)).collect();
                for (o1, o2) in &self.terms {
                    for (col, gl) in gs.iter().enumerate() {
                        let b = sandwich(o1, gl, o2);
                        for (row, gj) in gs.iter().enumerate() {
                            let mut acc = Complex64::new(0.0, 0.0);
                            for a1 in 0..n {
                                for a2 in 0..n {
                                    acc += gj[[a1, a2]] * b[[a1, a2]];
                                }
                            }
                            out[[row, col]] += acc;
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Cᵀ O C for real C, complex O.
fn conjugate_complex(c: &Array2<f64>, o: &Array2<Complex64>) -> Array2<Complex64> {
    let (n, m) = (c.nrows(), c.ncols());
    let mut o_re = Array2::zeros((n, n));
    let mut o_im = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            o_re[[i, j]] = o[[i, j]].re;
            o_im[[i, j]] = o[[i, j]].im;
        }
    }
    let re = c.t().dot(&o_re).dot(c);
    let im = c.t().dot(&o_im).dot(c);
    let mut out = Array2::from_elem((m, m), Complex64::new(0.0, 0.0));
    for i in 0..m {
        for j in 0..m {
            out[[i, j]] = Complex64::new(re[[i, j]], im[[i, j]]);
        }
    }
    out
}

/// O1 · G · O2ᵀ for real G, complex O1/O2.
fn sandwich(o1: &Array2<Complex64>, g: &Array2<f64>, o2: &Array2<Complex64>) -> Array2<Complex64> {
    let n = g.nrows();
    let mut tmp = Array2::from_elem((n, n), Complex64::new(0.0, 0.0));
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += o1[[i, k]] * g[[k, j]];
            }
            tmp[[i, j]] = acc;
        }
    }
    let mut out = Array2::from_elem((n, n), Complex64::new(0.0, 0.0));
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += tmp[[i, k]] * o2[[j, k]];
            }
            out[[i, j]] = acc;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::windows::make_window;
    use approx::assert_abs_diff_eq;

    #[test]
    fn unit_symbol_gives_identity_1d() {
        let f = |_x: f64, _xi: f64| 1.0;
        let n = 12;
        let cfg = GridQuantConfig {
            radius_x: 8.0,
            radius_xi: 12.0,
            spacing: std::f64::consts::PI / (3.0 * 12.0),
            n_xi: 420,
        };
        let op = quantize_grid_1d(&f, 1.0, n, 1.0, &cfg);
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(op[[i, j]].re, expect, epsilon = 2e-6);
                assert_abs_diff_eq!(op[[i, j]].im, 0.0, epsilon = 2e-6);
            }
        }
    }

    #[test]
    fn position_squared_matches_exact_1d() {
        // f = x²: grid path vs the exact Hermite section
        let f = |x: f64, _xi: f64| x * x;
        let n = 10;
        let cfg = GridQuantConfig {
            radius_x: 9.0,
            radius_xi: 11.0,
            spacing: std::f64::consts::PI / (3.0 * 11.0),
            n_xi: 500,
        };
        let op = quantize_grid_1d(&f, 1.0, n, 1.0, &cfg);
        let exact = crate::hermite::position_squared_matrix(n);
        for i in 0..n {
            for j in 0..n {
                assert_abs_diff_eq!(op[[i, j]].re, exact[[i, j]], epsilon = 5e-6);
                assert_abs_diff_eq!(op[[i, j]].im, 0.0, epsilon = 5e-6);
            }
        }
    }

    #[test]
    fn underresolved_grid_detected() {
        let f = |x: f64, xi: f64| (x * x) / (x * x + xi * xi + 0.1);
        let cfg = GridQuantConfig {
            radius_x: 6.0,
            radius_xi: 7.0,
            spacing: 0.9, // far too coarse
            n_xi: 24,
        };
        let r = quantize_grid_1d_checked(&f, 1.0, 8, 1.0, &cfg, 1e-4);
        assert!(matches!(r, Err(Error::GridUnderresolved { .. })));
    }

    #[test]
    fn separation_reconstructs_observable() {
        // polynomial: exact at low degree
        let poly = |x: &[f64], xi: &[f64]| {
            x[0] * x[0] * xi[1] + 0.3 * x[1] * xi[0] * xi[0] - 1.7 * x[0] * x[1]
        };
        let sep = separate_symbol_2d(&poly, 3.0, 3.0, 8, 1e-12).unwrap();
        for &(x1, xi1, x2, xi2) in &[(0.5, -1.0, 2.0, 0.3), (1.5, 0.2, -0.7, -2.1)] {
            let exact = poly(&[x1, x2], &[xi1, xi2]);
            let mut approx = 0.0;
            for (fq, gq) in &sep.terms {
                approx += fq.eval(x1, xi1) * gq.eval(x2, xi2);
            }
            assert_abs_diff_eq!(approx, exact, epsilon = 1e-10);
        }
        // smooth rational: spectral but not exact, modest degree
        let f = |x: &[f64], xi: &[f64]| {
            let r2 = x[0] * x[0] + x[1] * x[1] + xi[0] * xi[0] + xi[1] * xi[1];
            x[0] * x[0] / (r2 + 0.5)
        };
        let sep = separate_symbol_2d(&f, 3.0, 3.0, 28, 1e-10).unwrap();
        assert!(sep.terms.len() >= 2);
        for &(x1, xi1, x2, xi2) in &[(0.5, -1.0, 2.0, 0.3), (1.5, 0.2, -0.7, -2.1)] {
            let exact = f(&[x1, x2], &[xi1, xi2]);
            let mut approx = 0.0;
            for (fq, gq) in &sep.terms {
                approx += fq.eval(x1, xi1) * gq.eval(x2, xi2);
            }
            assert_abs_diff_eq!(approx, exact, epsilon = 2e-3 * exact.abs().max(0.1));
        }
    }

    #[test]
    fn unit_symbol_gives_identity_2d_window() {
        // A ≡ 1 through the separated 2D path: identity on the window
        let basis = EigenBasis::harmonic_analytic(2, 1.0, 14);
        let w = make_window(&basis, 0.5, 2.0, 3.0, 0.0, 1.0).unwrap();
        let sep = separate_symbol_2d(&|_x, _xi| 1.0, 6.0, 7.0, 8, 1e-10).unwrap();
        assert_eq!(sep.terms.len(), 1);
        let cfg = GridQuantConfig {
            radius_x: 6.0,
            radius_xi: 7.0,
            spacing: std::f64::consts::PI / (3.0 * 7.0),
            n_xi: 260,
        };
        let op = quantize_grid_2d(&sep, 1.0, basis.n_axis(), basis.sigma(), &cfg);
        let block = op.window_block(&basis, &w).unwrap();
        for i in 0..w.count() {
            for j in 0..w.count() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(block[[i, j]].re, expect, epsilon = 1e-5);
                assert_abs_diff_eq!(block[[i, j]].im, 0.0, epsilon = 1e-5);
            }
        }
    }
}
