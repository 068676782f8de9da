//! Window uniformity of the spectral function: the increment
//! π_nor(λ+μ; x, x) - π_nor(λ; x, x) for |μ| <= C0 λ^{1-δ}, normalized by
//! the λ^α bound with α = (d/(k+1))(k + 1/r) - δ + (kθ/(k+1))(1 - 1/r) at
//! r = ∞.

use serde_json::json;

use crate::eigensolver::EigenBasis;
use crate::windows::normalized_exponent;
use crate::Result;

use super::{Check, ExperimentReport, Row};

#[derive(Debug, Clone)]
pub struct UniformityConfig {
    pub lambda_list: Vec<f64>,
    pub mu_factor: f64,
    pub delta: f64,
    pub theta_list: Vec<f64>,
    pub grid_points: usize,
    pub spread_tol: f64,
}

impl Default for UniformityConfig {
    fn default() -> Self {
        UniformityConfig {
            lambda_list: vec![20.0, 30.0, 40.0, 50.0, 60.0],
            mu_factor: 0.5,
            delta: 0.0,
            theta_list: vec![0.0, 2.0],
            grid_points: 28,
            spread_tol: 4.0,
        }
    }
}

/// Spectral function of the normalized Hamiltonian at level λ on a tensor
/// grid (d = 2) or points (d = 1).
fn pi_nor_grid(
    basis: &EigenBasis,
    lambda_nor: f64,
    axis: &[f64],
) -> Result<ndarray::Array2<f64>> {
    let ex = normalized_exponent(basis.potential().half_degree());
    let t = basis.trust_count();
    let idx: Vec<usize> = (0..t)
        .filter(|&j| basis.eigenvalues()[j].powf(ex) <= lambda_nor)
        .collect();
    if let Some(&last) = idx.last() {
        // need completeness: the trusted spectrum must extend past λ
        if last + 1 >= t && basis.eigenvalues()[t - 1].powf(ex) <= lambda_nor {
            return Err(crate::Error::WindowTooWide {
                lo: lambda_nor,
                hi: lambda_nor,
                trust_count: t,
            });
        }
    }
    basis.sum_squares_grid2(&idx, axis, axis, crate::par::Parallelism::Auto)
}

pub fn window_uniformity(basis: &EigenBasis, cfg: &UniformityConfig) -> Result<ExperimentReport> {
    let start = std::time::Instant::now();
    let d = basis.dimension();
    assert_eq!(d, 2, "uniformity scan drives the d = 2 path");
    let k = basis.potential().half_degree() as f64;
    let mut report = ExperimentReport::new(
        "window-uniformity",
        json!({
            "lambda_list": cfg.lambda_list,
            "mu_factor": cfg.mu_factor,
            "delta": cfg.delta,
            "theta_list": cfg.theta_list,
        }),
        0,
    );

    let mut normalized: Vec<Vec<f64>> = vec![Vec::new(); cfg.theta_list.len()];
    for &lambda in &cfg.lambda_list {
        let mu = cfg.mu_factor * lambda.powf(1.0 - cfg.delta);
        // grid covering the turning region of the upper level
        let lam_phys = (lambda + mu).powf(2.0 * k / (k + 1.0));
        let radius = crate::windows::turning_radius(basis.potential(), lambda + mu)
            .min(1.6 * lam_phys.powf(1.0 / (2.0 * k)).max(2.0));
        let axis: Vec<f64> = (0..cfg.grid_points)
            .map(|i| -radius + 2.0 * radius * i as f64 / (cfg.grid_points - 1) as f64)
            .collect();
        let lo = pi_nor_grid(basis, lambda, &axis)?;
        let hi = pi_nor_grid(basis, lambda + mu, &axis)?;
        // μ = 0 sanity: identical sums
        for (ti, &theta) in cfg.theta_list.iter().enumerate() {
            let alpha = (2.0 / (k + 1.0)) * k - cfg.delta + (k * theta / (k + 1.0));
            let mut sup = 0.0f64;
            for (i, &x1) in axis.iter().enumerate() {
                for (j, &x2) in axis.iter().enumerate() {
                    let wgt = (1.0 + x1 * x1 + x2 * x2).powf(k * theta / 2.0);
                    let v = wgt * (hi[[i, j]] - lo[[i, j]]).abs();
                    sup = sup.max(v);
                }
            }
            let norm = sup / lambda.powf(alpha);
            normalized[ti].push(norm);
            report.push_row(
                Row::new(format!("lambda={lambda},theta={theta}"))
                    .with("mu", mu)
                    .with("sup_increment", sup)
                    .with("normalized", norm),
            );
        }
    }
    for (ti, &theta) in cfg.theta_list.iter().enumerate() {
        let max = normalized[ti].iter().cloned().fold(f64::MIN, f64::max);
        let min = normalized[ti].iter().cloned().fold(f64::MAX, f64::min);
        report.push_check(Check::le(
            format!("normalized_spread_theta_{theta}"),
            max / min.max(1e-300),
            cfg.spread_tol,
        ));
    }
    report.wall_time_s = start.elapsed().as_secs_f64();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigensolver::EigenBasis;

    #[test]
    fn zero_increment_at_zero_mu() {
        let basis = EigenBasis::harmonic_analytic(2, 1.0, 40);
        let cfg = UniformityConfig {
            lambda_list: vec![20.0, 30.0],
            mu_factor: 0.0,
            grid_points: 12,
            ..Default::default()
        };
        let rep = window_uniformity(&basis, &cfg).unwrap();
        for row in &rep.rows {
            assert_eq!(row.values["sup_increment"], 0.0, "{}", row.key);
        }
    }

    #[test]
    fn normalized_sup_stable_across_lambda() {
        let basis = EigenBasis::harmonic_analytic(2, 1.0, 60);
        let rep = window_uniformity(&basis, &UniformityConfig::default()).unwrap();
        assert!(rep.passed, "{}", rep.summary());
    }
}
