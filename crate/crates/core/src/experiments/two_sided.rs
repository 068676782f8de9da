//! Two-sided spectral integrals: (∫ <x>^{kθ(p-1)} e_{x,h}^p dx)^{1/p}
//! normalized by N_h h^{β_{2p,θ}}. The integrals are evaluated exactly:
//! e^p times the polynomial weight is a polynomial against the Gaussian
//! e^{-p|x|²/σ²}, so a rescaled Gauss–Hermite rule with enough nodes is
//! exact to rounding.

use serde_json::json;

use crate::eigensolver::EigenBasis;
use crate::hermite;
use crate::par::Parallelism;
use crate::windows::{beta_exponent, make_window};
use crate::Result;

use super::{Check, ExperimentReport, Row};

#[derive(Debug, Clone)]
pub struct TwoSidedConfig {
    pub h_list: Vec<f64>,
    pub window: (f64, f64),
    pub delta: f64,
    pub big_d: f64,
    pub p_list: Vec<usize>,
    pub theta_list: Vec<f64>,
    /// Allowed ratio spread C1/C0 across the h list.
    pub spread_tol: f64,
}

impl Default for TwoSidedConfig {
    fn default() -> Self {
        TwoSidedConfig {
            h_list: vec![1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0],
            window: (2.0, 2.5),
            delta: 0.0,
            big_d: 0.5,
            p_list: vec![1, 2, 4],
            theta_list: vec![0.0, 2.0],
            spread_tol: 25.0,
        }
    }
}

/// Exact ∫ (1+|x|²)^{m} e_{x,h}(x)^p dx for d = 2 via a rescaled rule.
fn exact_integral_2d(
    basis: &EigenBasis,
    indices: &[usize],
    p: usize,
    weight_pow: usize,
) -> Result<f64> {
    let n_b = basis.n_axis();
    let sigma = basis.sigma();
    // per-axis polynomial degree of e^p (1+r²)^m: 2p(n_b-1) + 2m
    let need = p * (n_b - 1) + weight_pow + 2;
    let rule = hermite::gauss_hermite(need)?;
    let scale = sigma / (p as f64).sqrt();
    let nodes: Vec<f64> = rule.nodes.iter().map(|&y| scale * y).collect();
    let weights: Vec<f64> = rule.weights.iter().map(|&w| scale * w).collect();
    let e = basis.sum_squares_grid2(indices, &nodes, &nodes, Parallelism::Auto)?;
    let mut acc = 0.0;
    for (i, &wi) in weights.iter().enumerate() {
        for (j, &wj) in weights.iter().enumerate() {
            let base = 1.0 + nodes[i] * nodes[i] + nodes[j] * nodes[j];
            // e^p (1+|x|²)^m is polynomial × e^{-p|x|²/σ²}; the rescaled
            // rule integrates it exactly
            acc += wi * wj * base.powi(weight_pow as i32) * e[[i, j]].powi(p as i32);
        }
    }
    Ok(acc)
}

/// d = 1 version.
fn exact_integral_1d(
    basis: &EigenBasis,
    indices: &[usize],
    p: usize,
    weight_pow: usize,
) -> Result<f64> {
    let n_b = basis.n_axis();
    let sigma = basis.sigma();
    let need = p * (n_b - 1) + weight_pow + 2;
    let rule = hermite::gauss_hermite(need)?;
    let scale = sigma / (p as f64).sqrt();
    let nodes: Vec<f64> = rule.nodes.iter().map(|&y| scale * y).collect();
    let weights: Vec<f64> = rule.weights.iter().map(|&w| scale * w).collect();
    let e = basis.weighted_sum_squares_grid1(indices, &vec![1.0; indices.len()], &nodes)?;
    let mut acc = 0.0;
    for (i, &wi) in weights.iter().enumerate() {
        let base = 1.0 + nodes[i] * nodes[i];
        acc += wi * base.powi(weight_pow as i32) * e[i].powi(p as i32);
    }
    Ok(acc)
}

pub fn two_sided_integrals(basis: &EigenBasis, cfg: &TwoSidedConfig) -> Result<ExperimentReport> {
    let start = std::time::Instant::now();
    let d = basis.dimension();
    let k = basis.potential().half_degree();
    let mut report = ExperimentReport::new(
        "two-sided",
        json!({
            "h_list": cfg.h_list,
            "window": cfg.window,
            "p_list": cfg.p_list,
            "theta_list": cfg.theta_list,
        }),
        0,
    );

    for &theta in &cfg.theta_list {
        for &p in &cfg.p_list {
            let weight_exp = (k as f64 * theta * (p as f64 - 1.0)).round();
            assert!(
                (k as f64 * theta * (p as f64 - 1.0) - weight_exp).abs() < 1e-12
                    && (weight_exp as i64) % 2 == 0,
                "weight power kθ(p-1) must be an even integer for the exact rule"
            );
            let weight_pow = (weight_exp as usize) / 2;
            let mut ratios = Vec::new();
            for &h in &cfg.h_list {
                let w = make_window(basis, h, cfg.window.0, cfg.window.1, cfg.delta, cfg.big_d)?;
                let integral = match d {
                    2 => exact_integral_2d(basis, &w.indices, p, weight_pow)?,
                    1 => exact_integral_1d(basis, &w.indices, p, weight_pow)?,
                    other => return Err(crate::Error::DimensionUnsupported(other)),
                };
                let beta = beta_exponent(2.0 * p as f64, theta, d, k);
                let ratio = integral.powf(1.0 / p as f64) / (w.count() as f64 * h.powf(beta));
                ratios.push(ratio);
                report.push_row(
                    Row::new(format!("h={h},p={p},theta={theta}"))
                        .with("n_h", w.count() as f64)
                        .with("integral", integral)
                        .with("beta", beta)
                        .with("ratio", ratio),
                );
            }
            let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
            let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
            report.push_check(Check::le(
                format!("ratio_spread_p{p}_theta{theta}"),
                max / min,
                cfg.spread_tol,
            ));
            if p == 1 && theta == 0.0 {
                let dev = ratios.iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max);
                report.push_check(Check::le("p1_theta0_exact_one", dev, 1e-8));
            }
        }
    }
    report.wall_time_s = start.elapsed().as_secs_f64();
    Ok(report)
}
