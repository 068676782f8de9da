//! Galerkin eigensolver for Ĥ(h) = -h²Δ + V in a scaled tensor Hermite
//! basis (d ∈ {1, 2}), with an exact analytic path for the harmonic
//! oscillator and a product path for axis-separable potentials.
//!
//! Basis: per axis, e_n(x) = σ^{-1/2} h_n(x/σ). The kinetic part is
//! assembled from the exact Hermite sections of -d²/dz², the potential part
//! from Gauss–Hermite quadrature with enough nodes to be exact for
//! polynomials of degree 2k, so the Galerkin matrix itself carries no
//! quadrature error.

use ndarray::{Array1, Array2};

use crate::hermite::{self, QuadratureRule};
use crate::numerics::{symmetric_eigen, symmetric_eigenvalues};
use crate::par::{self, Parallelism};
use crate::potential::PolynomialPotential;
use crate::{Error, Result};

/// Relative eigenvalue drift below which the half-basis comparison calls an
/// eigenvalue converged.
const TRUST_DRIFT: f64 = 1e-8;

/// How the eigenstates are stored over the tensor basis.
#[derive(Debug, Clone)]
pub enum StateCoefficients {
    /// State j is exactly the tensor basis function `order[j]`
    /// (harmonic analytic path).
    Identity { order: Vec<usize> },
    /// State j is a product of 1D Galerkin states: axis coefficient
    /// matrices and the (i, k) pair per state (separable path, d = 2).
    Product {
        order: Vec<(usize, usize)>,
        axis1: Array2<f64>,
        axis2: Array2<f64>,
    },
    /// Column j holds the tensor coefficients of state j.
    Dense(Array2<f64>),
}

/// Sorted eigenpairs of -h²Δ + V with evaluators on grids and points.
#[derive(Debug, Clone)]
pub struct EigenBasis {
    potential: PolynomialPotential,
    h: f64,
    sigma: f64,
    n_axis: usize,
    eigenvalues: Vec<f64>,
    coefficients: StateCoefficients,
    trust_count: usize,
}

/// Default basis scale from the ellipticity margin:
/// sigma = margin^{-1/(2k+2)}.
pub fn default_sigma(v: &PolynomialPotential) -> f64 {
    let margin = v
        .ellipticity_margin(4096.max(8 * v.dimension()))
        .expect("potential validated at construction");
    margin.powf(-1.0 / (2.0 * v.half_degree() as f64 + 2.0))
}

/// Basis scale balancing spatial and momentum reach at energy `lambda`:
/// the turning point sits at (lambda/margin)^{1/2k}, the momentum shell at
/// sqrt(lambda), and sigma² is their ratio. Reduces to [`default_sigma`]
/// for k = 1.
pub fn sigma_for_energy(v: &PolynomialPotential, lambda: f64) -> f64 {
    let k = v.half_degree() as f64;
    let margin = v
        .ellipticity_margin(4096.max(8 * v.dimension()))
        .expect("potential validated at construction");
    let x_turn = (lambda / margin).powf(1.0 / (2.0 * k));
    (x_turn / lambda.sqrt()).sqrt()
}

/// Per-axis basis size sized so that the *half* basis still converges
/// eigenvalues up to `lambda` (half-basis drift is the trust criterion, so
/// the margin here is deliberately generous).
pub fn n_axis_for_energy(v: &PolynomialPotential, lambda: f64, sigma: f64) -> usize {
    let k = v.half_degree() as f64;
    let margin = v
        .ellipticity_margin(4096.max(8 * v.dimension()))
        .expect("potential validated at construction");
    let x_turn = (lambda / margin).powf(1.0 / (2.0 * k));
    let momentum = lambda.sqrt();
    let n_space = (2.2 * x_turn / sigma).powi(2) / 2.0;
    let n_mom = (2.2 * momentum * sigma).powi(2) / 2.0;
    (2.0 * n_space.max(n_mom)).ceil() as usize + 8
}

fn is_standard_harmonic(v: &PolynomialPotential) -> bool {
    if v.half_degree() != 1 {
        return false;
    }
    let d = v.dimension();
    let mut seen = vec![false; d];
    for (alpha, c) in v.monomials() {
        let deg: usize = alpha.iter().sum();
        if deg == 0 {
            continue;
        }
        let axis = match alpha.iter().position(|&a| a > 0) {
            Some(i) => i,
            None => continue,
        };
        if alpha[axis] != 2 || *c != 1.0 || seen[axis] {
            return false;
        }
        if alpha.iter().enumerate().any(|(j, &a)| j != axis && a != 0) {
            return false;
        }
        seen[axis] = true;
    }
    seen.iter().all(|&s| s)
}

/// Split V into per-axis 1D potentials when no monomial couples the axes.
fn split_axes(v: &PolynomialPotential) -> Option<Vec<PolynomialPotential>> {
    let d = v.dimension();
    if d == 1 {
        return Some(vec![v.clone()]);
    }
    let mut per_axis: Vec<Vec<(Vec<usize>, f64)>> = vec![Vec::new(); d];
    for (alpha, c) in v.monomials() {
        let active: Vec<usize> = (0..d).filter(|&i| alpha[i] > 0).collect();
        match active.len() {
            0 => {
                // constant monomial: fold into axis 0
                per_axis[0].push((vec![0], *c));
            }
            1 => per_axis[active[0]].push((vec![alpha[active[0]]], *c)),
            _ => return None,
        }
    }
    let mut out = Vec::with_capacity(d);
    for axis in per_axis {
        let p = PolynomialPotential::new(1, v.half_degree(), axis).ok()?;
        out.push(p);
    }
    Some(out)
}

/// Galerkin matrix of -h²Δ + V in the scaled tensor Hermite basis.
pub fn assemble(
    v: &PolynomialPotential,
    h: f64,
    n_axis: usize,
    sigma: f64,
) -> Result<Array2<f64>> {
    assert!(n_axis >= 4, "n_axis must be at least 4");
    assert!(h > 0.0 && sigma > 0.0);
    let d = v.dimension();
    let k = v.half_degree();
    if d > 2 {
        return Err(Error::DimensionUnsupported(d));
    }
    let kin = hermite::kinetic_matrix(n_axis);
    let moments = hermite::moment_matrices(n_axis, 2 * k)?;
    let kin_scale = h * h / (sigma * sigma);

    match d {
        1 => {
            let mut m = Array2::zeros((n_axis, n_axis));
            for a in 0..n_axis {
                for b in 0..n_axis {
                    let mut val = kin_scale * kin[[a, b]];
                    for (alpha, c) in v.monomials() {
                        let j = alpha[0];
                        val += c * sigma.powi(j as i32) * moments[j][[a, b]];
                    }
                    if a == b {
                        val += v.shift();
                    }
                    m[[a, b]] = val;
                }
            }
            Ok(m)
        }
        2 => {
            let n = n_axis * n_axis;
            let mut m = Array2::zeros((n, n));
            for a1 in 0..n_axis {
                for a2 in 0..n_axis {
                    let row = a1 * n_axis + a2;
                    for b1 in 0..n_axis {
                        for b2 in 0..n_axis {
                            let col = b1 * n_axis + b2;
                            if col < row {
                                continue;
                            }
                            let mut val = 0.0;
                            if a2 == b2 {
                                val += kin_scale * kin[[a1, b1]];
                            }
                            if a1 == b1 {
                                val += kin_scale * kin[[a2, b2]];
                            }
                            for (alpha, c) in v.monomials() {
                                let deg = alpha[0] + alpha[1];
                                val += c
                                    * sigma.powi(deg as i32)
                                    * moments[alpha[0]][[a1, b1]]
                                    * moments[alpha[1]][[a2, b2]];
                            }
                            if row == col {
                                val += v.shift();
                            }
                            m[[row, col]] = val;
                            m[[col, row]] = val;
                        }
                    }
                }
            }
            Ok(m)
        }
        _ => unreachable!(),
    }
}

impl EigenBasis {
    /// Solve, preferring the cheapest exact route: analytic for the
    /// standard harmonic with sigma = sqrt(h), product of 1D solves for
    /// axis-separable potentials, dense tensor Galerkin otherwise.
    pub fn solve(v: &PolynomialPotential, h: f64, n_axis: usize, sigma: f64) -> Result<Self> {
        if is_standard_harmonic(v) && (sigma * sigma / h - 1.0).abs() < 1e-12 {
            return Ok(Self::harmonic_analytic_with(v.clone(), h, n_axis));
        }
        if v.dimension() == 2 && split_axes(v).is_some() {
            return Self::solve_separable(v, h, n_axis, sigma);
        }
        Self::solve_dense(v, h, n_axis, sigma)
    }

    /// Full dense tensor Galerkin with half-basis trust certification;
    /// never takes an analytic or product shortcut.
    pub fn solve_dense(v: &PolynomialPotential, h: f64, n_axis: usize, sigma: f64) -> Result<Self> {
        let full = assemble(v, h, n_axis, sigma)?;
        let (vals, vecs) = symmetric_eigen(&full)?;
        let half_n = (n_axis / 2).max(4);
        let half = assemble(v, h, half_n, sigma)?;
        let half_vals = symmetric_eigenvalues(&half)?;
        let trust = certify(&vals.to_vec(), &half_vals.to_vec(), boundary_diag_min(v, h, n_axis, sigma));
        Ok(EigenBasis {
            potential: v.clone(),
            h,
            sigma,
            n_axis,
            eigenvalues: vals.to_vec(),
            coefficients: StateCoefficients::Dense(vecs),
            trust_count: trust,
        })
    }

    /// Product path for separable V = V1(x1) + V2(x2): two 1D solves,
    /// eigenvalues mu_i + nu_k, states are products of 1D states.
    pub fn solve_separable(
        v: &PolynomialPotential,
        h: f64,
        n_axis: usize,
        sigma: f64,
    ) -> Result<Self> {
        let axes = split_axes(v).ok_or_else(|| {
            Error::InvalidPotential("potential couples axes; use the dense solver".into())
        })?;
        if axes.len() != 2 {
            return Err(Error::DimensionUnsupported(axes.len()));
        }
        let solve_axis = |p: &PolynomialPotential| -> Result<(Vec<f64>, Array2<f64>, usize)> {
            let m = assemble(p, h, n_axis, sigma)?;
            let (vals, vecs) = symmetric_eigen(&m)?;
            let half = assemble(p, h, (n_axis / 2).max(4), sigma)?;
            let half_vals = symmetric_eigenvalues(&half)?;
            let trust = certify(
                &vals.to_vec(),
                &half_vals.to_vec(),
                boundary_diag_min(p, h, n_axis, sigma),
            );
            Ok((vals.to_vec(), vecs, trust))
        };
        let (mu, u, trust1) = solve_axis(&axes[0])?;
        let (nu, w, trust2) = solve_axis(&axes[1])?;

        let mut states: Vec<(f64, (usize, usize))> = Vec::with_capacity(mu.len() * nu.len());
        for (i, &a) in mu.iter().enumerate() {
            for (k, &b) in nu.iter().enumerate() {
                states.push((a + b + v.shift(), (i, k)));
            }
        }
        states.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));

        // complete & certified: both factors trusted, and the sum below the
        // cheapest pair involving an untrusted factor
        let cap1 = if trust1 < mu.len() { mu[trust1] } else { f64::INFINITY };
        let cap2 = if trust2 < nu.len() { nu[trust2] } else { f64::INFINITY };
        let cap = (cap1 + nu[0]).min(cap2 + mu[0]) + v.shift();
        let trust = states
            .iter()
            .take_while(|(lam, (i, k))| *lam < cap && *i < trust1 && *k < trust2)
            .count();

        Ok(EigenBasis {
            potential: v.clone(),
            h,
            sigma,
            n_axis,
            eigenvalues: states.iter().map(|s| s.0).collect(),
            coefficients: StateCoefficients::Product {
                order: states.iter().map(|s| s.1).collect(),
                axis1: u,
                axis2: w,
            },
            trust_count: trust,
        })
    }

    /// Exact harmonic-oscillator basis: eigenvalues h(2|alpha| + d) + shift,
    /// states are the scaled tensor Hermite functions themselves
    /// (sigma = sqrt(h)).
    pub fn harmonic_analytic(dimension: usize, h: f64, n_axis: usize) -> Self {
        Self::harmonic_analytic_with(PolynomialPotential::harmonic(dimension), h, n_axis)
    }

    fn harmonic_analytic_with(v: PolynomialPotential, h: f64, n_axis: usize) -> Self {
        let d = v.dimension();
        assert!(d <= 2, "analytic path only for d <= 2");
        let shift = v.shift();
        let mut states: Vec<(f64, usize)> = Vec::new();
        match d {
            1 => {
                for n in 0..n_axis {
                    states.push((h * (2.0 * n as f64 + 1.0) + shift, n));
                }
            }
            2 => {
                for a1 in 0..n_axis {
                    for a2 in 0..n_axis {
                        let level = (a1 + a2) as f64;
                        states.push((h * (2.0 * level + 2.0) + shift, a1 * n_axis + a2));
                    }
                }
            }
            _ => unreachable!(),
        }
        states.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        let trust = match d {
            1 => n_axis,
            _ => states
                .iter()
                .take_while(|(lam, _)| *lam <= h * (2.0 * (n_axis - 1) as f64 + 2.0) + shift)
                .count(),
        };
        EigenBasis {
            potential: v,
            h,
            sigma: h.sqrt(),
            n_axis,
            eigenvalues: states.iter().map(|s| s.0).collect(),
            coefficients: StateCoefficients::Identity {
                order: states.iter().map(|s| s.1).collect(),
            },
            trust_count: trust,
        }
    }

    /// Rebuild from parts (used by the binary cache).
    pub(crate) fn from_parts(
        potential: PolynomialPotential,
        h: f64,
        sigma: f64,
        n_axis: usize,
        eigenvalues: Vec<f64>,
        coefficients: StateCoefficients,
        trust_count: usize,
    ) -> Self {
        EigenBasis {
            potential,
            h,
            sigma,
            n_axis,
            eigenvalues,
            coefficients,
            trust_count,
        }
    }

    pub fn potential(&self) -> &PolynomialPotential {
        &self.potential
    }

    pub fn dimension(&self) -> usize {
        self.potential.dimension()
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn n_axis(&self) -> usize {
        self.n_axis
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn trust_count(&self) -> usize {
        self.trust_count
    }

    pub fn coefficients(&self) -> &StateCoefficients {
        &self.coefficients
    }

    pub(crate) fn check_trusted(&self, index: usize) -> Result<()> {
        if index >= self.trust_count {
            return Err(Error::UntrustedIndex {
                index,
                trust_count: self.trust_count,
            });
        }
        Ok(())
    }

    /// Tensor dimension of the basis (n_axis^d).
    pub fn tensor_dim(&self) -> usize {
        match self.dimension() {
            1 => self.n_axis,
            _ => self.n_axis * self.n_axis,
        }
    }

    /// Tensor coefficient vector of state `j` (dense copy).
    pub fn state_vector(&self, j: usize) -> Array1<f64> {
        let dim = self.tensor_dim();
        match &self.coefficients {
            StateCoefficients::Identity { order } => {
                let mut v = Array1::zeros(dim);
                v[order[j]] = 1.0;
                v
            }
            StateCoefficients::Product { order, axis1, axis2 } => {
                let (i, k) = order[j];
                let n = self.n_axis;
                let mut v = Array1::zeros(dim);
                for a1 in 0..n {
                    for a2 in 0..n {
                        v[a1 * n + a2] = axis1[[a1, i]] * axis2[[a2, k]];
                    }
                }
                v
            }
            StateCoefficients::Dense(c) => c.column(j).to_owned(),
        }
    }

    /// Per-axis table T[n, p] = sigma^{-1/2} h_n(x_p / sigma).
    pub fn axis_table(&self, points: &[f64]) -> Array2<f64> {
        let z: Vec<f64> = points.iter().map(|&x| x / self.sigma).collect();
        let mut t = hermite::hermite_functions(self.n_axis - 1, &z);
        let s = self.sigma.powf(-0.5);
        t.mapv_inplace(|x| s * x);
        t
    }

    /// Values of the 1D factors of state j on tabulated axis points
    /// (d = 2): returns (f1 over t1 columns, f2 over t2 columns).
    fn factor_values(
        &self,
        j: usize,
        t1: &Array2<f64>,
        t2: &Array2<f64>,
    ) -> Option<(Vec<f64>, Vec<f64>)> {
        let n = self.n_axis;
        match &self.coefficients {
            StateCoefficients::Identity { order } => {
                let (a1, a2) = (order[j] / n, order[j] % n);
                Some((t1.row(a1).to_vec(), t2.row(a2).to_vec()))
            }
            StateCoefficients::Product { order, axis1, axis2 } => {
                let (i, k) = order[j];
                let mut f1 = vec![0.0; t1.ncols()];
                for a in 0..n {
                    let c = axis1[[a, i]];
                    if c == 0.0 {
                        continue;
                    }
                    for p in 0..t1.ncols() {
                        f1[p] += c * t1[[a, p]];
                    }
                }
                let mut f2 = vec![0.0; t2.ncols()];
                for a in 0..n {
                    let c = axis2[[a, k]];
                    if c == 0.0 {
                        continue;
                    }
                    for p in 0..t2.ncols() {
                        f2[p] += c * t2[[a, p]];
                    }
                }
                Some((f1, f2))
            }
            StateCoefficients::Dense(_) => None,
        }
    }

    /// phi_j(x) for the requested states at arbitrary points.
    /// Rows follow `indices`, columns follow `points`.
    pub fn evaluate_states(&self, indices: &[usize], points: &[Vec<f64>]) -> Result<Array2<f64>> {
        for &j in indices {
            self.check_trusted(j)?;
        }
        let d = self.dimension();
        let n_pts = points.len();
        let mut out = Array2::zeros((indices.len(), n_pts));
        match d {
            1 => {
                let xs: Vec<f64> = points.iter().map(|p| p[0]).collect();
                let t = self.axis_table(&xs);
                for (r, &j) in indices.iter().enumerate() {
                    let c = self.state_vector(j);
                    for p in 0..n_pts {
                        let mut s = 0.0;
                        for n in 0..self.n_axis {
                            s += c[n] * t[[n, p]];
                        }
                        out[[r, p]] = s;
                    }
                }
            }
            2 => {
                let xs1: Vec<f64> = points.iter().map(|p| p[0]).collect();
                let xs2: Vec<f64> = points.iter().map(|p| p[1]).collect();
                let t1 = self.axis_table(&xs1);
                let t2 = self.axis_table(&xs2);
                for (r, &j) in indices.iter().enumerate() {
                    if let Some((f1, f2)) = self.factor_values(j, &t1, &t2) {
                        for p in 0..n_pts {
                            out[[r, p]] = f1[p] * f2[p];
                        }
                    } else {
                        let g = self.state_matrix(j);
                        for p in 0..n_pts {
                            let mut s = 0.0;
                            for a1 in 0..self.n_axis {
                                let mut inner = 0.0;
                                for a2 in 0..self.n_axis {
                                    inner += g[[a1, a2]] * t2[[a2, p]];
                                }
                                s += inner * t1[[a1, p]];
                            }
                            out[[r, p]] = s;
                        }
                    }
                }
            }
            d => return Err(Error::DimensionUnsupported(d)),
        }
        Ok(out)
    }

    /// Reshape the coefficient vector of state j into an n_axis × n_axis
    /// matrix (d = 2 only).
    pub fn state_matrix(&self, j: usize) -> Array2<f64> {
        let n = self.n_axis;
        let mut g = Array2::zeros((n, n));
        match &self.coefficients {
            StateCoefficients::Identity { order } => {
                g[[order[j] / n, order[j] % n]] = 1.0;
            }
            StateCoefficients::Product { order, axis1, axis2 } => {
                let (i, k) = order[j];
                for a1 in 0..n {
                    let u = axis1[[a1, i]];
                    if u == 0.0 {
                        continue;
                    }
                    for a2 in 0..n {
                        g[[a1, a2]] = u * axis2[[a2, k]];
                    }
                }
            }
            StateCoefficients::Dense(c) => {
                for a1 in 0..n {
                    for a2 in 0..n {
                        g[[a1, a2]] = c[[a1 * n + a2, j]];
                    }
                }
            }
        }
        g
    }

    /// Values of one state on a tensor grid (d = 2), as a P1 × P2 array.
    /// `t1`, `t2` come from [`axis_table`](Self::axis_table).
    pub fn state_on_grid2(&self, j: usize, t1: &Array2<f64>, t2: &Array2<f64>) -> Array2<f64> {
        if let Some((f1, f2)) = self.factor_values(j, t1, t2) {
            let mut out = Array2::zeros((t1.ncols(), t2.ncols()));
            for p in 0..t1.ncols() {
                for q in 0..t2.ncols() {
                    out[[p, q]] = f1[p] * f2[q];
                }
            }
            out
        } else {
            let g = self.state_matrix(j);
            t1.t().dot(&g).dot(t2)
        }
    }

    /// Σ_{j in indices} |phi_j|² on a tensor grid (d = 2).
    pub fn sum_squares_grid2(
        &self,
        indices: &[usize],
        xs1: &[f64],
        xs2: &[f64],
        mode: Parallelism,
    ) -> Result<Array2<f64>> {
        let ones = vec![1.0; indices.len()];
        self.weighted_sum_squares_grid2(indices, &ones, xs1, xs2, mode)
    }

    /// Σ_{j in indices} w_j |phi_j|² on a tensor grid (d = 2).
    pub fn weighted_sum_squares_grid2(
        &self,
        indices: &[usize],
        weights: &[f64],
        xs1: &[f64],
        xs2: &[f64],
        mode: Parallelism,
    ) -> Result<Array2<f64>> {
        for &j in indices {
            self.check_trusted(j)?;
        }
        let t1 = self.axis_table(xs1);
        let t2 = self.axis_table(xs2);
        // chunk states to bound the number of temporaries
        let chunk = 64usize;
        let n_chunks = indices.len().div_ceil(chunk);
        let parts = par::map_indexed(n_chunks, mode, |ci| {
            let lo = ci * chunk;
            let hi = (lo + chunk).min(indices.len());
            let mut acc = Array2::zeros((xs1.len(), xs2.len()));
            for r in lo..hi {
                let v = self.state_on_grid2(indices[r], &t1, &t2);
                let w = weights[r];
                acc.zip_mut_with(&v, |a, &b| *a += w * b * b);
            }
            acc
        });
        let mut out = Array2::zeros((xs1.len(), xs2.len()));
        for p in parts {
            out += &p;
        }
        Ok(out)
    }

    /// Σ_{j in indices} w_j |phi_j(x)|² on points (d = 1).
    pub fn weighted_sum_squares_grid1(
        &self,
        indices: &[usize],
        weights: &[f64],
        xs: &[f64],
    ) -> Result<Vec<f64>> {
        for &j in indices {
            self.check_trusted(j)?;
        }
        let t = self.axis_table(xs);
        let mut out = vec![0.0; xs.len()];
        for (r, &j) in indices.iter().enumerate() {
            let c = self.state_vector(j);
            for p in 0..xs.len() {
                let mut v = 0.0;
                for n in 0..self.n_axis {
                    v += c[n] * t[[n, p]];
                }
                out[p] += weights[r] * v * v;
            }
        }
        Ok(out)
    }

    /// Tensor-coefficient matrix G of u = Σ_r coeff_r phi_{indices[r]}
    /// (d = 2).
    fn synthesis_matrix(&self, indices: &[usize], coeff: &[f64]) -> Array2<f64> {
        let n = self.n_axis;
        match &self.coefficients {
            StateCoefficients::Identity { order } => {
                let mut g = Array2::zeros((n, n));
                for (r, &j) in indices.iter().enumerate() {
                    let (a1, a2) = (order[j] / n, order[j] % n);
                    g[[a1, a2]] += coeff[r];
                }
                g
            }
            StateCoefficients::Product { order, axis1, axis2 } => {
                // G = U S W^T with S[i,k] += coeff_r
                let mut s = Array2::zeros((n, n));
                for (r, &j) in indices.iter().enumerate() {
                    let (i, k) = order[j];
                    s[[i, k]] += coeff[r];
                }
                axis1.dot(&s).dot(&axis2.t())
            }
            StateCoefficients::Dense(c) => {
                let mut g = Array2::zeros((n, n));
                for (r, &j) in indices.iter().enumerate() {
                    for a1 in 0..n {
                        for a2 in 0..n {
                            g[[a1, a2]] += coeff[r] * c[[a1 * n + a2, j]];
                        }
                    }
                }
                g
            }
        }
    }

    /// Synthesis u = Σ c_j phi_j on a tensor grid (d = 2), complex
    /// coefficients as two real passes. Returns (re, im) on the grid.
    pub fn synthesize_grid2(
        &self,
        indices: &[usize],
        coeff_re: &[f64],
        coeff_im: &[f64],
        t1: &Array2<f64>,
        t2: &Array2<f64>,
    ) -> (Array2<f64>, Array2<f64>) {
        let g_re = self.synthesis_matrix(indices, coeff_re);
        let g_im = self.synthesis_matrix(indices, coeff_im);
        let re = t1.t().dot(&g_re).dot(t2);
        let im = t1.t().dot(&g_im).dot(t2);
        (re, im)
    }

    /// Synthesis on 1D points (d = 1). Returns (re, im).
    pub fn synthesize_grid1(
        &self,
        indices: &[usize],
        coeff_re: &[f64],
        coeff_im: &[f64],
        table: &Array2<f64>,
    ) -> (Vec<f64>, Vec<f64>) {
        let n = self.n_axis;
        let mut g_re = vec![0.0; n];
        let mut g_im = vec![0.0; n];
        for (r, &j) in indices.iter().enumerate() {
            let c = self.state_vector(j);
            for a in 0..n {
                g_re[a] += coeff_re[r] * c[a];
                g_im[a] += coeff_im[r] * c[a];
            }
        }
        let p = table.ncols();
        let mut re = vec![0.0; p];
        let mut im = vec![0.0; p];
        for a in 0..n {
            if g_re[a] == 0.0 && g_im[a] == 0.0 {
                continue;
            }
            for q in 0..p {
                re[q] += g_re[a] * table[[a, q]];
                im[q] += g_im[a] * table[[a, q]];
            }
        }
        (re, im)
    }

    /// ⟨phi_j, (-Δ)phi_j⟩ (m = 1) or ‖Δ phi_j‖² (m = 2), from the exact
    /// Hermite sections of the per-axis Laplacian, applied in a padded
    /// basis so the products carry no truncation error.
    pub fn laplacian_form(&self, j: usize, m: usize) -> Result<f64> {
        self.check_trusted(j)?;
        assert!(m == 1 || m == 2, "only (-Δ) and Δ² are assembled");
        let n = self.n_axis;
        let pad = n + 2;
        let kin = hermite::kinetic_matrix(pad);
        let s2 = 1.0 / (self.sigma * self.sigma);
        match self.dimension() {
            1 => {
                let c = self.state_vector(j);
                let mut w = vec![0.0; pad];
                for a in 0..pad {
                    let mut s = 0.0;
                    for b in 0..n {
                        s += kin[[a, b]] * c[b];
                    }
                    w[a] = s2 * s;
                }
                if m == 1 {
                    Ok((0..n).map(|a| c[a] * w[a]).sum())
                } else {
                    Ok(w.iter().map(|x| x * x).sum())
                }
            }
            2 => {
                let g = self.state_matrix(j);
                let mut w: Array2<f64> = Array2::zeros((pad, pad));
                for a1 in 0..pad {
                    for b1 in 0..n {
                        if kin[[a1, b1]] == 0.0 {
                            continue;
                        }
                        for a2 in 0..n {
                            w[[a1, a2]] += s2 * kin[[a1, b1]] * g[[b1, a2]];
                        }
                    }
                }
                for a2 in 0..pad {
                    for b2 in 0..n {
                        if kin[[a2, b2]] == 0.0 {
                            continue;
                        }
                        for a1 in 0..n {
                            w[[a1, a2]] += s2 * kin[[a2, b2]] * g[[a1, b2]];
                        }
                    }
                }
                if m == 1 {
                    let mut s = 0.0;
                    for a1 in 0..n {
                        for a2 in 0..n {
                            s += g[[a1, a2]] * w[[a1, a2]];
                        }
                    }
                    Ok(s)
                } else {
                    Ok(w.iter().map(|x| x * x).sum())
                }
            }
            d => Err(Error::DimensionUnsupported(d)),
        }
    }

    /// ⟨phi_j, |x|^p phi_j⟩ by Gauss–Hermite quadrature (exact for even
    /// integer p).
    pub fn radial_moment(&self, j: usize, p: f64) -> Result<f64> {
        self.check_trusted(j)?;
        let extra = (p.ceil() as usize) / 2 + 2;
        let rule = hermite::gauss_hermite(self.n_axis + extra)?.scaled(self.sigma);
        match self.dimension() {
            1 => {
                let t = self.axis_table(&rule.nodes);
                let c = self.state_vector(j);
                let mut s = 0.0;
                for (q, (&x, &w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
                    let mut v = 0.0;
                    for n in 0..self.n_axis {
                        v += c[n] * t[[n, q]];
                    }
                    s += w * x.abs().powf(p) * v * v;
                }
                Ok(s)
            }
            2 => {
                let t = self.axis_table(&rule.nodes);
                let phi = self.state_on_grid2(j, &t, &t);
                let mut s = 0.0;
                for (qa, (&xa, &wa)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
                    for (qb, (&xb, &wb)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
                        let r2 = xa * xa + xb * xb;
                        s += wa * wb * r2.powf(p / 2.0) * phi[[qa, qb]] * phi[[qa, qb]];
                    }
                }
                Ok(s)
            }
            d => Err(Error::DimensionUnsupported(d)),
        }
    }

    /// Scaled Gauss–Hermite rule adapted to this basis: exact for
    /// phi_i * phi_j * (polynomial of degree <= extra_degree).
    pub fn quadrature(&self, extra_degree: usize) -> Result<QuadratureRule> {
        let rule = hermite::gauss_hermite(self.n_axis + extra_degree / 2 + 1)?;
        Ok(rule.scaled(self.sigma))
    }
}

fn certify(vals: &[f64], half_vals: &[f64], boundary: f64) -> usize {
    let mut trust = 0;
    for j in 0..half_vals.len().min(vals.len()) {
        let drift = (vals[j] - half_vals[j]).abs() / vals[j].abs().max(1.0);
        if drift < TRUST_DRIFT {
            trust = j + 1;
        } else {
            break;
        }
    }
    while trust > 0 && vals[trust - 1] > 0.9 * boundary {
        trust -= 1;
    }
    trust
}

fn boundary_diag_min(v: &PolynomialPotential, h: f64, n_axis: usize, sigma: f64) -> f64 {
    // energy of the cheapest tensor state with a per-axis index at the
    // truncation boundary, from the diagonal of the assembled operator
    let k = v.half_degree();
    let kin_scale = h * h / (sigma * sigma);
    let kin_diag = |n: usize| kin_scale * (n as f64 + 0.5);
    let moments = hermite::moment_matrices(n_axis, 2 * k).expect("moment quadrature");
    let pot_diag = |alpha: &[usize]| -> f64 {
        let mut s = v.shift();
        for (beta, c) in v.monomials() {
            let mut term = *c;
            for (axis, &b) in beta.iter().enumerate() {
                term *= sigma.powi(b as i32) * moments[b][[alpha[axis], alpha[axis]]];
            }
            s += term;
        }
        s
    };
    let top = n_axis - 1;
    match v.dimension() {
        1 => kin_diag(top) + pot_diag(&[top]),
        _ => {
            let mut min = f64::INFINITY;
            for a2 in 0..n_axis {
                let e = kin_diag(top) + kin_diag(a2) + pot_diag(&[top, a2]);
                min = min.min(e);
            }
            min
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn harmonic_assembly_is_diagonal() {
        let v = PolynomialPotential::harmonic(1);
        let m = assemble(&v, 1.0, 8, 1.0).unwrap();
        for a in 0..8 {
            for b in 0..8 {
                let expect = if a == b { 2.0 * a as f64 + 1.0 } else { 0.0 };
                assert_abs_diff_eq!(m[[a, b]], expect, epsilon = 1e-12);
            }
        }
        let v = PolynomialPotential::harmonic(2);
        let m = assemble(&v, 1.0, 6, 1.0).unwrap();
        for a1 in 0..6 {
            for a2 in 0..6 {
                let i = a1 * 6 + a2;
                assert_abs_diff_eq!(m[[i, i]], 2.0 * (a1 + a2) as f64 + 2.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn quartic_assembly_corner_entry() {
        // <h0, P² h0> + <h0, x^4 h0> = 1/2 + 3/4
        let v = PolynomialPotential::quartic_separable(1);
        let m = assemble(&v, 1.0, 8, 1.0).unwrap();
        assert_abs_diff_eq!(m[[0, 0]], 0.5 + 0.75, epsilon = 1e-12);
    }

    #[test]
    fn harmonic_analytic_levels_and_multiplicities() {
        let basis = EigenBasis::harmonic_analytic(2, 1.0, 12);
        let ev = basis.eigenvalues();
        let mut idx = 0;
        for j in 0..8usize {
            for _ in 0..=j {
                assert_abs_diff_eq!(ev[idx], 2.0 * j as f64 + 2.0, epsilon = 0.0);
                idx += 1;
            }
        }
        assert!(basis.trust_count() == 12 * 13 / 2);
    }

    #[test]
    fn harmonic_galerkin_matches_analytic() {
        let v = PolynomialPotential::harmonic(2);
        // sigma != sqrt(h) forces the Galerkin path
        let basis = EigenBasis::solve_dense(&v, 1.0, 10, 1.000000001).unwrap();
        let exact = EigenBasis::harmonic_analytic(2, 1.0, 10);
        for j in 0..15 {
            assert_abs_diff_eq!(
                basis.eigenvalues()[j],
                exact.eigenvalues()[j],
                epsilon = 1e-7
            );
        }
    }

    #[test]
    fn harmonic_small_h() {
        let basis = EigenBasis::harmonic_analytic(1, 0.1, 8);
        assert_abs_diff_eq!(basis.eigenvalues()[0], 0.1, epsilon = 1e-15);
    }

    #[test]
    fn ground_state_values() {
        let basis = EigenBasis::harmonic_analytic(1, 1.0, 6);
        let v = basis.evaluate_states(&[0], &[vec![0.0]]).unwrap();
        assert_abs_diff_eq!(v[[0, 0]], std::f64::consts::PI.powf(-0.25), epsilon = 1e-12);
        let basis = EigenBasis::harmonic_analytic(2, 1.0, 6);
        let v = basis.evaluate_states(&[0], &[vec![0.0, 0.0]]).unwrap();
        assert_abs_diff_eq!(v[[0, 0]], std::f64::consts::PI.powf(-0.5), epsilon = 1e-12);
    }

    #[test]
    fn quartic_ground_state_normalized() {
        let v = PolynomialPotential::quartic_separable(1);
        let basis = EigenBasis::solve(&v, 1.0, 48, sigma_for_energy(&v, 10.0)).unwrap();
        assert!(basis.trust_count() >= 1, "trust={}", basis.trust_count());
        let rule = basis.quadrature(0).unwrap();
        let t = basis.axis_table(&rule.nodes);
        let c = basis.state_vector(0);
        let mut norm = 0.0;
        for (q, &w) in rule.weights.iter().enumerate() {
            let mut val = 0.0;
            for n in 0..basis.n_axis() {
                val += c[n] * t[[n, q]];
            }
            norm += w * val * val;
        }
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn separable_matches_dense_on_product_potential() {
        // both paths diagonalize the same Galerkin space, so eigenvalues
        // agree to solver precision even where trust has not set in
        let v = PolynomialPotential::quartic_separable(2);
        let sigma = sigma_for_energy(&v, 12.0);
        let prod = EigenBasis::solve_separable(&v, 1.0, 24, sigma).unwrap();
        let dense = EigenBasis::solve_dense(&v, 1.0, 24, sigma).unwrap();
        for j in 0..10 {
            assert_abs_diff_eq!(
                prod.eigenvalues()[j],
                dense.eigenvalues()[j],
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn untrusted_index_rejected() {
        let basis = EigenBasis::harmonic_analytic(2, 1.0, 6);
        let r = basis.evaluate_states(&[basis.trust_count()], &[vec![0.0, 0.0]]);
        assert!(matches!(r, Err(Error::UntrustedIndex { .. })));
    }

    #[test]
    fn variational_monotonicity() {
        let v = PolynomialPotential::quartic_separable(1);
        let sigma = sigma_for_energy(&v, 30.0);
        let small = EigenBasis::solve(&v, 1.0, 56, sigma).unwrap();
        let large = EigenBasis::solve(&v, 1.0, 64, sigma).unwrap();
        assert!(small.trust_count() >= 8, "trust={}", small.trust_count());
        for j in 0..small.trust_count().min(8) {
            assert!(
                large.eigenvalues()[j] <= small.eigenvalues()[j] + 1e-10,
                "monotonicity violated at {j}"
            );
        }
    }

    #[test]
    fn scale_invariance_of_trusted_eigenvalues() {
        let v = PolynomialPotential::quartic_separable(1);
        let sigma = sigma_for_energy(&v, 40.0);
        let a = EigenBasis::solve(&v, 1.0, 80, sigma).unwrap();
        let b = EigenBasis::solve(&v, 1.0, 80, 1.2 * sigma).unwrap();
        let common = a.trust_count().min(b.trust_count()).min(6);
        assert!(common >= 4, "trusts: {} {}", a.trust_count(), b.trust_count());
        for j in 0..common {
            let rel = (a.eigenvalues()[j] - b.eigenvalues()[j]).abs()
                / a.eigenvalues()[j].abs().max(1.0);
            assert!(rel < 1e-8, "j={j} rel={rel}");
        }
    }

    #[test]
    fn rescaling_law() {
        // eigenvalues of -h²Δ + V_eps with eps = h^{1/(k+1)} equal
        // h^{2k/(k+1)} * eigenvalues of -Δ + V; x^4 alone is
        // scale-covariant, so use x^4 + x^2
        let k = 2usize;
        let h: f64 = 0.25;
        let eps = h.powf(1.0 / (k as f64 + 1.0));
        let v_mixed = PolynomialPotential::new(1, 2, vec![(vec![4], 1.0), (vec![2], 1.0)]).unwrap();
        let eps2k = eps.powi(2 * k as i32);
        let v_eps = PolynomialPotential::new(
            1,
            2,
            v_mixed
                .monomials()
                .iter()
                .map(|(a, c)| {
                    let deg = a.iter().sum::<usize>() as i32;
                    (a.clone(), c * eps2k * eps.powi(-deg))
                })
                .collect(),
        )
        .unwrap();
        let sigma = sigma_for_energy(&v_mixed, 25.0);
        let base = EigenBasis::solve(&v_mixed, 1.0, 64, sigma).unwrap();
        let scaled = EigenBasis::solve(&v_eps, h, 64, sigma * eps).unwrap();
        let factor = h.powf(2.0 * k as f64 / (k as f64 + 1.0));
        let common = base.trust_count().min(scaled.trust_count()).min(8);
        assert!(common >= 4, "common={common}");
        for j in 0..common {
            let expect = factor * base.eigenvalues()[j];
            let got = scaled.eigenvalues()[j];
            assert!(
                (got - expect).abs() / expect.abs().max(1.0) < 1e-8,
                "j={j} got={got} expect={expect}"
            );
        }
    }

    #[test]
    fn residual_in_padded_basis() {
        let v = PolynomialPotential::quartic_separable(1);
        let sigma = sigma_for_energy(&v, 30.0);
        let basis = EigenBasis::solve(&v, 1.0, 56, sigma).unwrap();
        assert!(basis.trust_count() >= 6, "trust={}", basis.trust_count());
        let n = basis.n_axis();
        let pad = n + 2 * v.half_degree();
        let big = assemble(&v, 1.0, pad, sigma).unwrap();
        for j in (0..basis.trust_count().min(8)).step_by(3) {
            let c = basis.state_vector(j);
            let lam = basis.eigenvalues()[j];
            let mut resid2 = 0.0;
            for a in 0..pad {
                let mut s = 0.0;
                for b in 0..n {
                    s += big[[a, b]] * c[b];
                }
                if a < n {
                    s -= lam * c[a];
                }
                resid2 += s * s;
            }
            assert!(
                resid2.sqrt() < 1e-7 * lam,
                "j={j} resid={} lam={lam}",
                resid2.sqrt()
            );
        }
    }

    #[test]
    fn laplacian_and_radial_forms_harmonic() {
        // virial: <phi_n, (-Δ) phi_n> = lambda_n / 2 = <phi_n, x² phi_n>
        let basis = EigenBasis::harmonic_analytic(1, 1.0, 12);
        for j in 0..8 {
            let lam = basis.eigenvalues()[j];
            assert_abs_diff_eq!(basis.laplacian_form(j, 1).unwrap(), lam / 2.0, epsilon = 1e-10);
            assert_abs_diff_eq!(basis.radial_moment(j, 2.0).unwrap(), lam / 2.0, epsilon = 1e-9);
        }
        let basis = EigenBasis::harmonic_analytic(2, 1.0, 8);
        for j in 0..6 {
            let lam = basis.eigenvalues()[j];
            assert_abs_diff_eq!(basis.laplacian_form(j, 1).unwrap(), lam / 2.0, epsilon = 1e-10);
            assert_abs_diff_eq!(basis.radial_moment(j, 2.0).unwrap(), lam / 2.0, epsilon = 1e-9);
        }
    }
}
