//! Liouville averages L_η(A) on energy shells of the classical Hamiltonian:
//! exact sphere sampling for the harmonic case, thin-shell rejection Monte
//! Carlo for general elliptic polynomial H_0, and a 1D closed-form surface
//! quadrature oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::numerics::tanh_sinh;
use crate::par::{self, Parallelism};
use crate::potential::PolynomialPotential;
use crate::{Error, Result};

/// Factor convention for the classical Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HamiltonianConvention {
    /// H_0 = |ξ|² + V(x) (the quantization side's convention; default).
    FullSymbol,
    /// H_0 = |ξ|²/2 + V_0(x) (top part only, kinetic halved).
    HalfTop,
}

/// An energy shell H_0 = η with its thin-shell half-width.
#[derive(Debug, Clone)]
pub struct EnergySurfaceSpec {
    pub potential: PolynomialPotential,
    pub convention: HamiltonianConvention,
    pub eta: f64,
    pub shell_width: f64,
}

impl EnergySurfaceSpec {
    /// Default shell width 0.01 η.
    pub fn new(potential: PolynomialPotential, convention: HamiltonianConvention, eta: f64) -> Self {
        EnergySurfaceSpec {
            potential,
            convention,
            eta,
            shell_width: 0.01 * eta,
        }
    }

    pub fn h0(&self, x: &[f64], xi: &[f64]) -> f64 {
        let kin: f64 = xi.iter().map(|v| v * v).sum();
        match self.convention {
            HamiltonianConvention::FullSymbol => kin + self.potential.eval(x),
            HamiltonianConvention::HalfTop => 0.5 * kin + self.potential.eval_top(x),
        }
    }

    pub fn grad_norm(&self, x: &[f64], xi: &[f64]) -> f64 {
        let (gx, kfac) = match self.convention {
            HamiltonianConvention::FullSymbol => (self.potential.eval_gradient(x), 2.0),
            HamiltonianConvention::HalfTop => (self.potential.eval_top_gradient(x), 1.0),
        };
        let mut s: f64 = gx.iter().map(|v| v * v).sum();
        s += xi.iter().map(|v| kfac * kfac * v * v).sum::<f64>();
        s.sqrt()
    }

    /// Bounding box half-widths (x, ξ) containing the shell.
    fn bounding_box(&self) -> (f64, f64) {
        let cap = self.eta + self.shell_width;
        let rx = match self.convention {
            HamiltonianConvention::FullSymbol => self.potential.confinement_radius(cap),
            HamiltonianConvention::HalfTop => {
                // V0 >= margin |x|^{2k}
                let k = self.potential.half_degree() as f64;
                let m = self
                    .potential
                    .ellipticity_margin(4096)
                    .expect("validated potential");
                (cap / m).powf(1.0 / (2.0 * k)) * 1.05
            }
        };
        let rxi = match self.convention {
            HamiltonianConvention::FullSymbol => cap.sqrt() * 1.02,
            HamiltonianConvention::HalfTop => (2.0 * cap).sqrt() * 1.02,
        };
        (rx, rxi)
    }
}

/// A Monte Carlo estimate with its provenance.
#[derive(Debug, Clone)]
pub struct McResult {
    pub estimate: f64,
    pub se: f64,
    pub n_proposals: u64,
    pub n_accepted: u64,
    pub seed: u64,
}

const BATCH: usize = 16384;

/// Thin-shell rejection estimator of L_η(A): uniform samples in
/// {|H_0 - η| < ε} converge to dΣ/|∇H_0| normalized by the co-area
/// formula. A ≡ 1 returns exactly 1.
pub fn liouville_mc<F>(
    spec: &EnergySurfaceSpec,
    a: &F,
    n_proposals: u64,
    seed: u64,
    mode: Parallelism,
) -> Result<McResult>
where
    F: Fn(&[f64], &[f64]) -> f64 + Sync,
{
    let d = spec.potential.dimension();
    let (rx, rxi) = spec.bounding_box();
    let n_batches = n_proposals.div_ceil(BATCH as u64) as usize;
    // per-batch accumulation, deterministic combine in batch order
    let parts: Vec<(f64, f64, u64, f64)> = par::map_indexed(n_batches, mode, |b| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(b as u64 + 1);
        let in_batch = BATCH.min((n_proposals - (b as u64) * BATCH as u64) as usize);
        let mut sum = 0.0;
        let mut sum2 = 0.0;
        let mut acc = 0u64;
        let mut min_grad = f64::INFINITY;
        let mut x = vec![0.0; d];
        let mut xi = vec![0.0; d];
        for _ in 0..in_batch {
            for v in x.iter_mut() {
                *v = rng.random_range(-rx..rx);
            }
            for v in xi.iter_mut() {
                *v = rng.random_range(-rxi..rxi);
            }
            if (spec.h0(&x, &xi) - spec.eta).abs() < spec.shell_width {
                let val = a(&x, &xi);
                sum += val;
                sum2 += val * val;
                acc += 1;
                min_grad = min_grad.min(spec.grad_norm(&x, &xi));
            }
        }
        (sum, sum2, acc, min_grad)
    });
    let mut sum = 0.0;
    let mut sum2 = 0.0;
    let mut acc = 0u64;
    let mut min_grad = f64::INFINITY;
    for (s, s2, a, g) in parts {
        sum += s;
        sum2 += s2;
        acc += a;
        min_grad = min_grad.min(g);
    }
    let rate = acc as f64 / n_proposals as f64;
    if rate < 1e-4 {
        return Err(Error::RejectionStarved { rate });
    }
    // noncriticality: the shell must stay away from critical points of H_0
    debug_assert!(min_grad >= 1e-3, "shell too close to a critical level");
    let mean = sum / acc as f64;
    let var = (sum2 / acc as f64 - mean * mean).max(0.0);
    let se = (var / acc as f64).sqrt();
    Ok(McResult {
        estimate: mean,
        se,
        n_proposals,
        n_accepted: acc,
        seed,
    })
}

/// Exact shell sampling for the isotropic harmonic H_0 = |x|² + |ξ|²:
/// Gaussian direction × fixed radius sqrt(η) on S^{2d-1}.
pub fn liouville_sphere<F>(
    d: usize,
    eta: f64,
    a: &F,
    n_samples: u64,
    seed: u64,
    mode: Parallelism,
) -> McResult
where
    F: Fn(&[f64], &[f64]) -> f64 + Sync,
{
    let radius = eta.sqrt();
    let n_batches = n_samples.div_ceil(BATCH as u64) as usize;
    let parts: Vec<(f64, f64, u64)> = par::map_indexed(n_batches, mode, |b| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(b as u64 + 1);
        let in_batch = BATCH.min((n_samples - (b as u64) * BATCH as u64) as usize);
        let normal = rand_distr::StandardNormal;
        let mut z = vec![0.0; 2 * d];
        let mut sum = 0.0;
        let mut sum2 = 0.0;
        let mut n = 0u64;
        for _ in 0..in_batch {
            let mut norm2 = 0.0;
            for v in z.iter_mut() {
                let g: f64 = rng.sample(normal);
                *v = g;
                norm2 += g * g;
            }
            if norm2 < 1e-12 {
                continue;
            }
            let scale = radius / norm2.sqrt();
            let x: Vec<f64> = z[..d].iter().map(|v| v * scale).collect();
            let xi: Vec<f64> = z[d..].iter().map(|v| v * scale).collect();
            let val = a(&x, &xi);
            sum += val;
            sum2 += val * val;
            n += 1;
        }
        (sum, sum2, n)
    });
    let (mut sum, mut sum2, mut n) = (0.0, 0.0, 0u64);
    for (s, s2, m) in parts {
        sum += s;
        sum2 += s2;
        n += m;
    }
    let mean = sum / n as f64;
    let var = (sum2 / n as f64 - mean * mean).max(0.0);
    McResult {
        estimate: mean,
        se: (var / n as f64).sqrt(),
        n_proposals: n_samples,
        n_accepted: n,
        seed,
    }
}

/// Closed-form surface quadrature for d = 1, H_0 = ξ² + V(x) with a single
/// even well: L_η(A) = (Σ_± ∫ A(x, ±ξ(x)) / (2 ξ(x)) dx) / (same with
/// A ≡ 1), ξ(x) = sqrt(η - V(x)). The endpoint singularity is handled by
/// tanh-sinh quadrature.
pub fn liouville_surface_1d<F>(v: &PolynomialPotential, eta: f64, a: &F) -> f64
where
    F: Fn(&[f64], &[f64]) -> f64,
{
    assert_eq!(v.dimension(), 1);
    // turning point by bisection on [0, R]
    let mut lo = 0.0;
    let mut hi = v.confinement_radius(eta) * 1.1;
    assert!(v.eval(&[0.0]) < eta, "well bottom must lie below eta");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if v.eval(&[mid]) < eta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x_turn = 0.5 * (lo + hi);
    let weighted = |f: &dyn Fn(f64, f64) -> f64| -> f64 {
        tanh_sinh(
            &|x: f64| {
                let gap = eta - v.eval(&[x]);
                if gap <= 0.0 {
                    return 0.0;
                }
                let xi = gap.sqrt();
                (f(x, xi) + f(x, -xi)) / (2.0 * xi)
            },
            -x_turn,
            x_turn,
            1e-10,
        )
    };
    let num = weighted(&|x, xi| a(&[x], &[xi]));
    let den = weighted(&|_, _| 1.0);
    num / den
}
