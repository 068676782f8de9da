//! Random quantum ergodicity: samples of ⟨u, Âu⟩ for isotropic random
//! window states against the Liouville average, with variance-vs-N_h
//! regression and sub-Gaussian deviation tails.
//!
//! Observables are degree-0 normalizations of quasi-homogeneous polynomial
//! symbols: D^{-1/2} Op_1(P)|_window D^{-1/2} with D the normalized-energy
//! multiplier, so the window blocks are exact and the classical limits have
//! closed forms.

use num_complex::Complex64;
use serde_json::json;

use crate::eigensolver::EigenBasis;
use crate::ensembles::{gaussian_tail_check, sample_states, CoefficientProfile, Distribution};
use crate::liouville;
use crate::numerics::linear_fit;
use crate::par::{self, Parallelism};
use crate::quantization::normalized_window_block;
use crate::symbols::PolySymbol;
use crate::windows::make_window;
use crate::Result;

use super::{derive_seed, Check, ExperimentReport, Row};

/// Built-in degree-0 observables (after energy normalization).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErgodicObservable {
    /// (x1² + ξ1²)/H: energy share of the first axis, Liouville average
    /// 1/d. Commutes with the flow, so window blocks have no edge loss.
    PairShare,
    /// x1² / H: Liouville average 1/(2d).
    PositionShare,
    /// (x1 ξ2 - x2 ξ1)/H: odd under reflection, Liouville average 0.
    AngularMomentum,
}

impl ErgodicObservable {
    pub fn name(&self) -> &'static str {
        match self {
            ErgodicObservable::PairShare => "pair-share",
            ErgodicObservable::PositionShare => "x1sq-share",
            ErgodicObservable::AngularMomentum => "angular-momentum",
        }
    }

    pub fn from_name(s: &str) -> crate::Result<Self> {
        match s {
            "pair-share" => Ok(ErgodicObservable::PairShare),
            "x1sq-share" => Ok(ErgodicObservable::PositionShare),
            "angular-momentum" => Ok(ErgodicObservable::AngularMomentum),
            other => Err(crate::Error::Parse(format!("unknown observable '{other}'"))),
        }
    }

    fn symbol(&self, d: usize) -> PolySymbol {
        match self {
            ErgodicObservable::PairShare => {
                PolySymbol::x(d, 0).pow(2).add(&PolySymbol::xi(d, 0).pow(2))
            }
            ErgodicObservable::PositionShare => PolySymbol::x(d, 0).pow(2),
            ErgodicObservable::AngularMomentum => {
                let a = PolySymbol::x(d, 0).mul(&PolySymbol::xi(d, 1));
                let b = PolySymbol::x(d, 1).mul(&PolySymbol::xi(d, 0));
                a.add(&b.scale(Complex64::new(-1.0, 0.0)))
            }
        }
    }

    /// Classical symbol of the normalized observable, for the Liouville
    /// side (H_0 = |ξ|² + V, full-symbol convention).
    fn classical(&self, x: &[f64], xi: &[f64], v: &crate::potential::PolynomialPotential) -> f64 {
        let h0 = xi.iter().map(|s| s * s).sum::<f64>() + v.eval(x);
        match self {
            ErgodicObservable::PairShare => (x[0] * x[0] + xi[0] * xi[0]) / h0,
            ErgodicObservable::PositionShare => x[0] * x[0] / h0,
            ErgodicObservable::AngularMomentum => (x[0] * xi[1] - x[1] * xi[0]) / h0,
        }
    }

    fn exact_average(&self) -> Option<f64> {
        match self {
            ErgodicObservable::PairShare => Some(0.5),
            ErgodicObservable::PositionShare => Some(0.25),
            ErgodicObservable::AngularMomentum => Some(0.0),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ErgodicityConfig {
    pub h_list: Vec<f64>,
    pub window: (f64, f64),
    pub delta: f64,
    pub big_d: f64,
    pub observables: Vec<ErgodicObservable>,
    pub dist: Distribution,
    pub m: usize,
    pub seed: u64,
    pub liouville_samples: u64,
    /// Allowance added to 3·SE in the mean check.
    pub mean_tol: f64,
    pub slope_tol: f64,
}

impl Default for ErgodicityConfig {
    fn default() -> Self {
        ErgodicityConfig {
            h_list: vec![1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0],
            window: (2.0, 2.5),
            delta: 0.0,
            big_d: 0.5,
            observables: vec![
                ErgodicObservable::PairShare,
                ErgodicObservable::AngularMomentum,
            ],
            dist: Distribution::ComplexGaussian,
            m: 2000,
            seed: 13,
            liouville_samples: 400_000,
            mean_tol: 0.05,
            slope_tol: 0.2,
        }
    }
}

/// Sparse COO view of a Hermitian block.
struct SparseBlock {
    entries: Vec<(usize, usize, Complex64)>,
}

impl SparseBlock {
    fn from_dense(b: &ndarray::Array2<Complex64>) -> Self {
        let n = b.nrows();
        let mut entries = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if b[[i, j]].norm() > 1e-14 {
                    entries.push((i, j, b[[i, j]]));
                }
            }
        }
        SparseBlock { entries }
    }

    fn quadratic_form(&self, re: &[f64], im: &[f64]) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(i, j, b) in &self.entries {
            let ci = Complex64::new(re[i], -im[i]);
            let cj = Complex64::new(re[j], im[j]);
            acc += ci * b * cj;
        }
        acc.re
    }
}

pub fn ergodicity(basis: &EigenBasis, cfg: &ErgodicityConfig) -> Result<ExperimentReport> {
    let start = std::time::Instant::now();
    let d = basis.dimension();
    let mut report = ExperimentReport::new(
        "ergodicity",
        json!({
            "h_list": cfg.h_list,
            "window": cfg.window,
            "observables": cfg.observables.iter().map(|o| o.name()).collect::<Vec<_>>(),
            "dist": cfg.dist.name(),
            "m": cfg.m,
            "liouville_samples": cfg.liouville_samples,
        }),
        cfg.seed,
    );

    // A = 1 control: block is the identity, every sample is exactly 1
    {
        let h = cfg.h_list[0];
        let w = make_window(basis, h, cfg.window.0, cfg.window.1, cfg.delta, cfg.big_d)?;
        let profile = CoefficientProfile::isotropic(w.count());
        let s = sample_states(&profile, cfg.dist, 64, derive_seed(cfg.seed, "ctrl", 0), Parallelism::Auto);
        let mut max_dev: f64 = 0.0;
        for i in 0..s.m {
            let mut q = 0.0;
            for j in 0..w.count() {
                q += s.coeff_re[[i, j]] * s.coeff_re[[i, j]] + s.coeff_im[[i, j]] * s.coeff_im[[i, j]];
            }
            max_dev = max_dev.max((q - 1.0).abs());
        }
        report.push_check(Check::le("unit_observable_zero_deviation", max_dev, 1e-12));
    }

    for (oi, obs) in cfg.observables.iter().enumerate() {
        // Liouville reference at the window's limiting shell
        let eta = 0.5 * (cfg.window.0 + cfg.window.1);
        let spec = liouville::EnergySurfaceSpec::new(
            basis.potential().clone(),
            liouville::HamiltonianConvention::FullSymbol,
            eta,
        );
        let pot = basis.potential().clone();
        let l_mc = liouville::liouville_mc(
            &spec,
            &|x: &[f64], xi: &[f64]| obs.classical(x, xi, &pot),
            cfg.liouville_samples,
            derive_seed(cfg.seed, "liouville", oi as u64),
            Parallelism::Auto,
        )?;
        let l_ref = obs.exact_average().unwrap_or(l_mc.estimate);

        let symbol = obs.symbol(d);
        let mut log_nh = Vec::new();
        let mut log_var = Vec::new();
        let mut pooled_scaled: Vec<f64> = Vec::new();
        let mut mean_dev_smallest = f64::NAN;
        let mut se_smallest = f64::NAN;

        for (hi, &h) in cfg.h_list.iter().enumerate() {
            let w = make_window(basis, h, cfg.window.0, cfg.window.1, cfg.delta, cfg.big_d)?;
            let n_h = w.count();
            let block = normalized_window_block(basis, &w, &symbol, 1.0)?;
            let sparse = SparseBlock::from_dense(&block);
            let trace: Complex64 = (0..n_h).map(|i| block[[i, i]]).sum();
            let trace_avg = trace.re / n_h as f64;

            let seed_h = derive_seed(cfg.seed, obs.name(), hi as u64);
            let profile = CoefficientProfile::isotropic(n_h);
            let sample = sample_states(&profile, cfg.dist, cfg.m, seed_h, Parallelism::Auto);
            let values: Vec<f64> = par::map_indexed(cfg.m, Parallelism::Auto, |i| {
                let re: Vec<f64> = (0..n_h).map(|j| sample.coeff_re[[i, j]]).collect();
                let im: Vec<f64> = (0..n_h).map(|j| sample.coeff_im[[i, j]]).collect();
                sparse.quadratic_form(&re, &im)
            });
            let mean = values.iter().sum::<f64>() / cfg.m as f64;
            let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                / (cfg.m as f64 - 1.0);
            let se = (var / cfg.m as f64).sqrt();

            log_nh.push((n_h as f64).ln());
            log_var.push(var.max(1e-300).ln());
            for &v in &values {
                pooled_scaled.push((n_h as f64).sqrt() * (v - mean));
            }
            if hi == cfg.h_list.len() - 1 {
                mean_dev_smallest = (mean - l_ref).abs();
                se_smallest = se;
            }
            report.push_row(
                Row::new(format!("obs={},h={h}", obs.name()))
                    .counted(cfg.m as u64, seed_h)
                    .with("n_h", n_h as f64)
                    .with("mean", mean)
                    .with("variance", var)
                    .with("se", se)
                    .with("trace_avg", trace_avg)
                    .with("trace_avg_minus_liouville", trace_avg - l_ref)
                    .with("mean_minus_trace_avg", mean - trace_avg)
                    .with("liouville_mc", l_mc.estimate)
                    .with("liouville_mc_se", l_mc.se)
                    .with("sparse_nnz", sparse.entries.len() as f64),
            );
        }

        let (_, slope, r2) = linear_fit(&log_nh, &log_var);
        report.push_check(Check::le(
            format!("variance_slope_high_{}", obs.name()),
            slope,
            -1.0 + cfg.slope_tol,
        ));
        report.push_check(Check::ge(
            format!("variance_slope_low_{}", obs.name()),
            slope,
            -1.0 - cfg.slope_tol,
        ));
        report.push_check(Check::ge(format!("variance_fit_r2_{}", obs.name()), r2, 0.9));
        report.push_check(Check::le(
            format!("mean_vs_liouville_{}", obs.name()),
            mean_dev_smallest,
            3.0 * (se_smallest + l_mc.se) + cfg.mean_tol,
        ));
        // pooled deviations scaled by sqrt(N_h): sub-Gaussian tail in N_h r²
        match gaussian_tail_check(&pooled_scaled, None) {
            Ok(tail) => {
                report.push_check(Check::le(
                    format!("tail_slope_negative_{}", obs.name()),
                    tail.slope,
                    -1e-6,
                ));
                report.push_check(Check::ge(format!("tail_fit_r2_{}", obs.name()), tail.r2, 0.8));
            }
            Err(crate::Error::InsufficientTail { .. }) => {
                report.flag(format!(
                    "tail fit skipped for {}: fewer than 2000 pooled samples",
                    obs.name()
                ));
            }
            Err(e) => return Err(e),
        }
    }
    report.wall_time_s = start.elapsed().as_secs_f64();
    Ok(report)
}
