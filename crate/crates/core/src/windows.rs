//! Spectral windows Λ_h in normalized energy, Weyl-law counting, the
//! spectral function and window kernel e_{x,h}, weighted L^{r,s} norms,
//! Sobolev norms on spectral subspaces, heat-kernel diagonals and the
//! no-smoothing ratios.
//!
//! Window convention: the basis is solved with h = 1 and the window selects
//! eigenvalues of the normalized Hamiltonian Ĥ^{(k+1)/2k} in
//! I_h = [a_h/h, b_h/h).

use crate::eigensolver::EigenBasis;
use crate::numerics::adaptive_simpson;
use crate::par::Parallelism;
use crate::potential::PolynomialPotential;
use crate::{Error, Result};

/// Exponent turning Ĥ into the normalized Hamiltonian: (k+1)/(2k).
pub fn normalized_exponent(k: usize) -> f64 {
    (k as f64 + 1.0) / (2.0 * k as f64)
}

/// Exponent β_{r,θ} = ((d - kθ)/(k+1)) (1 - 2/r) of the two-sided window
/// integrals, exposed as a pure function so it cannot silently drift.
pub fn beta_exponent(r: f64, theta: f64, d: usize, k: usize) -> f64 {
    let (d, k) = (d as f64, k as f64);
    (d - k * theta) / (k + 1.0) * (1.0 - 2.0 / r)
}

/// A spectral window [a_h/h, b_h/h) in normalized energy with its index set.
#[derive(Debug, Clone)]
pub struct SpectralWindow {
    pub h: f64,
    pub a_h: f64,
    pub b_h: f64,
    pub delta: f64,
    pub big_d: f64,
    /// Λ_h: indices into the owning basis, ascending.
    pub indices: Vec<usize>,
}

impl SpectralWindow {
    /// N_h = |Λ_h|.
    pub fn count(&self) -> usize {
        self.indices.len()
    }

    /// Normalized-energy interval endpoints [a_h/h, b_h/h).
    pub fn interval(&self) -> (f64, f64) {
        (self.a_h / self.h, self.b_h / self.h)
    }
}

/// Select Λ_h = { j : λ_j^{(k+1)/2k} ∈ [a_h/h, b_h/h) } against a basis
/// solved at h = 1.
pub fn make_window(
    basis: &EigenBasis,
    h: f64,
    a_h: f64,
    b_h: f64,
    delta: f64,
    big_d: f64,
) -> Result<SpectralWindow> {
    assert!(
        (basis.h() - 1.0).abs() < 1e-14,
        "windows are selected on the h = 1 spectrum"
    );
    assert!(h > 0.0 && h <= 1.0 && a_h > 0.0 && a_h <= b_h);
    let width = b_h - a_h;
    let required = big_d * h.powf(delta);
    if width < required * (1.0 - 1e-12) {
        return Err(Error::WindowTooNarrow { width, required });
    }
    let ex = normalized_exponent(basis.potential().half_degree());
    let (lo, hi) = (a_h / h, b_h / h);
    let mut indices = Vec::new();
    for (j, &lam) in basis.eigenvalues().iter().enumerate() {
        let nor = lam.powf(ex);
        if nor >= lo && nor < hi {
            if j >= basis.trust_count() {
                return Err(Error::WindowTooWide {
                    lo,
                    hi,
                    trust_count: basis.trust_count(),
                });
            }
            indices.push(j);
        }
    }
    if indices.is_empty() {
        return Err(Error::WindowEmpty { lo, hi });
    }
    Ok(SpectralWindow {
        h,
        a_h,
        b_h,
        delta,
        big_d,
        indices,
    })
}

/// Exact eigenvalue count below λ and the Weyl phase-space volume
/// (2π)^{-d} vol{ |ξ|² + V(x) <= λ }, the latter by exact reduction over
/// the ξ ball and adaptive quadrature in x.
pub fn weyl_count(basis: &EigenBasis, lambda: f64) -> Result<(usize, f64)> {
    let t = basis.trust_count();
    if t == 0 || basis.eigenvalues()[t - 1] < lambda {
        return Err(Error::WindowTooWide {
            lo: lambda,
            hi: lambda,
            trust_count: t,
        });
    }
    let count = basis
        .eigenvalues()
        .iter()
        .take(t)
        .filter(|&&l| l <= lambda)
        .count();
    Ok((count, phase_space_volume(basis.potential(), lambda)))
}

/// (2π)^{-d} ω_d ∫ (λ - V(x))_+^{d/2} dx.
pub fn phase_space_volume(v: &PolynomialPotential, lambda: f64) -> f64 {
    let d = v.dimension();
    let r = v.confinement_radius(lambda) * 1.05;
    let tol = 1e-9 * lambda.powf(1.0 + d as f64 / 2.0).max(1.0);
    match d {
        1 => {
            let f = |x: f64| {
                let gap = lambda - v.eval(&[x]);
                if gap > 0.0 {
                    gap.sqrt()
                } else {
                    0.0
                }
            };
            let integral = adaptive_simpson(&f, -r, r, tol);
            // omega_1 = 2, (2 pi)^{-1}
            2.0 * integral / (2.0 * std::f64::consts::PI)
        }
        2 => {
            let inner = |x1: f64| {
                let f = |x2: f64| {
                    let gap = lambda - v.eval(&[x1, x2]);
                    if gap > 0.0 {
                        gap
                    } else {
                        0.0
                    }
                };
                adaptive_simpson(&f, -r, r, tol)
            };
            let integral = adaptive_simpson(&inner, -r, r, tol);
            // omega_2 = pi, (2 pi)^{-2}
            std::f64::consts::PI * integral / (2.0 * std::f64::consts::PI).powi(2)
        }
        _ => panic!("phase volume only for d <= 2"),
    }
}

/// Spectral function π_H(set; x, x) = Σ_{j in set} |phi_j(x)|² at points.
pub fn spectral_function(
    basis: &EigenBasis,
    indices: &[usize],
    points: &[Vec<f64>],
) -> Result<Vec<f64>> {
    let vals = basis.evaluate_states(indices, points)?;
    let mut out = vec![0.0; points.len()];
    for r in 0..indices.len() {
        for p in 0..points.len() {
            out[p] += vals[[r, p]] * vals[[r, p]];
        }
    }
    Ok(out)
}

/// Indices of all trusted eigenvalues <= λ.
pub fn level_indices(basis: &EigenBasis, lambda: f64) -> Result<Vec<usize>> {
    let t = basis.trust_count();
    if t == 0 || basis.eigenvalues()[t - 1] < lambda {
        return Err(Error::WindowTooWide {
            lo: lambda,
            hi: lambda,
            trust_count: t,
        });
    }
    Ok((0..t)
        .filter(|&j| basis.eigenvalues()[j] <= lambda)
        .collect())
}

/// Window kernel e_{x,h} = Σ_{j in Λ_h} |phi_j(x)|² at points.
pub fn window_kernel(
    basis: &EigenBasis,
    window: &SpectralWindow,
    points: &[Vec<f64>],
) -> Result<Vec<f64>> {
    spectral_function(basis, &window.indices, points)
}

/// L^p exponent of a weighted norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LpExponent {
    Finite(f64),
    Infinity,
}

/// Weighted norm spec ‖u‖_{L^{r,s}}: weight ⟨x⟩^s against |u|^r.
#[derive(Debug, Clone, Copy)]
pub struct WeightedNormSpec {
    pub r: LpExponent,
    pub s: f64,
}

/// Weighted norm of field values: quadrature for finite r (needs weights),
/// weighted max for r = ∞. `x_sq` holds |x|² per point.
pub fn weighted_norm(
    values: &[f64],
    x_sq: &[f64],
    quad_weights: Option<&[f64]>,
    spec: WeightedNormSpec,
) -> f64 {
    match spec.r {
        LpExponent::Infinity => {
            let mut m: f64 = 0.0;
            for (v, &x2) in values.iter().zip(x_sq) {
                m = m.max((1.0 + x2).powf(spec.s / 2.0) * v.abs());
            }
            m
        }
        LpExponent::Finite(r) => {
            assert!(r >= 1.0, "Lp exponent must be >= 1");
            let w = quad_weights.expect("finite r needs quadrature weights");
            let mut acc = 0.0;
            for ((v, &x2), &wi) in values.iter().zip(x_sq).zip(w) {
                acc += wi * (1.0 + x2).powf(spec.s / 2.0) * v.abs().powf(r);
            }
            acc.powf(1.0 / r)
        }
    }
}

/// Sobolev norm on the window span: p = 2 via the spectral sum with
/// multiplier λ_j^{(k+1)s/2k} per coefficient; p = ∞ via synthesis of
/// Ĥ_nor^s u followed by an (unweighted) sup over the grid.
pub struct SobolevNorm<'a> {
    pub basis: &'a EigenBasis,
    pub window: &'a SpectralWindow,
}

impl<'a> SobolevNorm<'a> {
    pub fn l2(&self, coeff_re: &[f64], coeff_im: &[f64], s: f64) -> f64 {
        let ex = normalized_exponent(self.basis.potential().half_degree());
        let mut acc = 0.0;
        for (r, &j) in self.window.indices.iter().enumerate() {
            let mul = self.basis.eigenvalues()[j].powf(ex * s);
            let c2 = coeff_re[r] * coeff_re[r] + coeff_im[r] * coeff_im[r];
            acc += mul * mul * c2;
        }
        acc.sqrt()
    }

    /// Sup of |Ĥ_nor^s u| on a supplied axis grid (d = 2) or points (d = 1).
    pub fn l_inf_grid2(
        &self,
        coeff_re: &[f64],
        coeff_im: &[f64],
        s: f64,
        axis_points: &[f64],
    ) -> f64 {
        let ex = normalized_exponent(self.basis.potential().half_degree());
        let mut cr = Vec::with_capacity(coeff_re.len());
        let mut ci = Vec::with_capacity(coeff_im.len());
        for (r, &j) in self.window.indices.iter().enumerate() {
            let mul = self.basis.eigenvalues()[j].powf(ex * s);
            cr.push(mul * coeff_re[r]);
            ci.push(mul * coeff_im[r]);
        }
        let t = self.basis.axis_table(axis_points);
        let (re, im) = self
            .basis
            .synthesize_grid2(&self.window.indices, &cr, &ci, &t, &t);
        let mut m: f64 = 0.0;
        for (a, b) in re.iter().zip(im.iter()) {
            m = m.max((a * a + b * b).sqrt());
        }
        m
    }
}

/// Turning radius with margin for a window with upper edge b_h/h:
/// R = 1.5 (b_h/h)^{1/(k+1)} margin^{-1/2k}.
pub fn turning_radius(v: &PolynomialPotential, b_over_h: f64) -> f64 {
    let k = v.half_degree() as f64;
    let margin = v
        .ellipticity_margin(4096.max(8 * v.dimension()))
        .expect("validated potential");
    1.5 * b_over_h.powf(1.0 / (k + 1.0)) * margin.powf(-1.0 / (2.0 * k))
}

/// Axis points for sup-norms: scaled quadrature nodes merged with a
/// uniform grid of `refine`× the node count on [-R, R].
pub fn sup_axis_points(basis: &EigenBasis, radius: f64, refine: usize) -> Vec<f64> {
    let n_quad = basis.n_axis() + basis.potential().half_degree() + 1;
    let rule = crate::hermite::gauss_hermite(n_quad).expect("quadrature");
    let mut pts: Vec<f64> = rule
        .nodes
        .iter()
        .map(|&z| z * basis.sigma())
        .filter(|x| x.abs() <= radius)
        .collect();
    let n_uniform = refine * n_quad + 1;
    for i in 0..n_uniform {
        pts.push(-radius + 2.0 * radius * i as f64 / (n_uniform - 1) as f64);
    }
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    pts
}

/// Heat-kernel diagonal Σ e^{-tλ_j} |phi_j(x)|² over trusted states, with
/// a truncation bound per point. Runs whose bound exceeds 1e-8 of the
/// value are flagged.
pub struct HeatDiag {
    pub values: Vec<f64>,
    pub bounds: Vec<f64>,
    pub flagged: bool,
}

pub fn heat_diag(basis: &EigenBasis, t: f64, points: &[Vec<f64>]) -> Result<HeatDiag> {
    assert!(t > 0.0 && t <= 1.0, "t in (0, 1]");
    let trust = basis.trust_count();
    let idx: Vec<usize> = (0..trust).collect();
    let lam_top = basis.eigenvalues()[trust - 1];
    let vals = basis.evaluate_states(&idx, points)?;
    let mut values = vec![0.0; points.len()];
    let mut half = vec![0.0; points.len()];
    for (r, &j) in idx.iter().enumerate() {
        let lam = basis.eigenvalues()[j];
        let w = (-t * lam).exp();
        let wh = (-0.5 * t * lam).exp();
        for p in 0..points.len() {
            let sq = vals[[r, p]] * vals[[r, p]];
            values[p] += w * sq;
            half[p] += wh * sq;
        }
    }
    // tail(t) <= e^{-(t/2) λ_top} K(t/2; x, x), and K(t/2) itself is
    // estimated by its truncated sum with the same contraction factor
    let q = (-0.5 * t * lam_top).exp();
    let mut bounds = vec![0.0; points.len()];
    let mut flagged = false;
    let scale = values.iter().cloned().fold(0.0f64, f64::max);
    for p in 0..points.len() {
        let k_half = if q < 0.5 { half[p] / (1.0 - 2.0 * q) } else { f64::INFINITY };
        bounds[p] = q * k_half.max(0.0);
        // relative certification with an absolute floor far below anything
        // asserted downstream: deep in the forbidden region the value
        // underflows while the additive tail bound does not
        if !(bounds[p] <= 1e-8 * values[p] + 1e-18 * scale) {
            flagged = true;
        }
    }
    Ok(HeatDiag {
        values,
        bounds,
        flagged,
    })
}

/// No-smoothing ratios r1(n) = ⟨phi_n, (-Δ)^{2s} phi_n⟩^{1/2} / λ_n^s and
/// r2(n) = ⟨phi_n, |x|^{2s} phi_n⟩^{1/2} / λ_n^{s/2k} for 2s ∈ {1, 2}.
pub fn no_smoothing_ratios(
    basis: &EigenBasis,
    s: f64,
    range: std::ops::Range<usize>,
) -> Result<Vec<(usize, f64, f64)>> {
    let two_s = 2.0 * s;
    assert!(
        (two_s - 1.0).abs() < 1e-12 || (two_s - 2.0).abs() < 1e-12,
        "s must be 1/2 or 1"
    );
    let m = two_s.round() as usize;
    let k = basis.potential().half_degree() as f64;
    let mut out = Vec::new();
    for n in range {
        basis.check_trusted(n)?;
        let lam = basis.eigenvalues()[n];
        let r1 = basis.laplacian_form(n, m)?.sqrt() / lam.powf(s);
        let r2 = basis.radial_moment(n, two_s)?.sqrt() / lam.powf(s / (2.0 * k));
        out.push((n, r1, r2));
    }
    Ok(out)
}

/// Convenience: e_{x,h} on a tensor grid (d = 2).
pub fn window_kernel_grid2(
    basis: &EigenBasis,
    window: &SpectralWindow,
    xs1: &[f64],
    xs2: &[f64],
    mode: Parallelism,
) -> Result<ndarray::Array2<f64>> {
    basis.sum_squares_grid2(&window.indices, xs1, xs2, mode)
}
