//! Weyl-law scan: exact counting function against the phase-space volume,
//! and the log-log slope d(k+1)/2k over a decade of λ.

use serde_json::json;

use crate::eigensolver::EigenBasis;
use crate::numerics::linear_fit;
use crate::windows::weyl_count;
use crate::Result;

use super::{Check, ExperimentReport, Row};

#[derive(Debug, Clone)]
pub struct WeylScanConfig {
    pub lambda_list: Vec<f64>,
    pub slope_tol: f64,
    /// λ at which the count/volume ratio is asserted (None = skip).
    pub ratio_at: Option<f64>,
    pub ratio_tol: f64,
}

impl WeylScanConfig {
    pub fn decade(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
            .collect()
    }
}

impl Default for WeylScanConfig {
    fn default() -> Self {
        WeylScanConfig {
            lambda_list: Self::decade(4.0, 40.0, 9),
            slope_tol: 0.1,
            ratio_at: Some(40.0),
            ratio_tol: 0.15,
        }
    }
}

pub fn weyl_scan(basis: &EigenBasis, cfg: &WeylScanConfig) -> Result<ExperimentReport> {
    let start = std::time::Instant::now();
    let d = basis.dimension() as f64;
    let k = basis.potential().half_degree() as f64;
    let mut report = ExperimentReport::new(
        "weyl-law",
        json!({ "lambda_list": cfg.lambda_list }),
        0,
    );
    let mut logs_l = Vec::new();
    let mut logs_c = Vec::new();
    for &lambda in &cfg.lambda_list {
        let (count, volume) = weyl_count(basis, lambda)?;
        report.push_row(
            Row::new(format!("lambda={lambda}"))
                .with("count", count as f64)
                .with("phase_volume", volume)
                .with("ratio", count as f64 / volume),
        );
        if count > 0 {
            logs_l.push(lambda.ln());
            logs_c.push((count as f64).ln());
        }
    }
    let (_, slope, r2) = linear_fit(&logs_l, &logs_c);
    let expect = d * (k + 1.0) / (2.0 * k);
    report.push_check(Check::le("slope_high", slope, expect + cfg.slope_tol));
    report.push_check(Check::ge("slope_low", slope, expect - cfg.slope_tol));
    report.push_check(Check::ge("slope_fit_r2", r2, 0.98));
    if let Some(at) = cfg.ratio_at {
        let (count, volume) = weyl_count(basis, at)?;
        let dev = (count as f64 / volume - 1.0).abs();
        report.push_check(Check::le("count_over_volume_dev", dev, cfg.ratio_tol));
    }
    report.wall_time_s = start.elapsed().as_secs_f64();
    Ok(report)
}
