//! No-smoothing divergence: truncated flat-Sobolev norms of randomized
//! series with a divergent coefficient rule grow along the cutoff ladder
//! (Paley–Zygmund keeps a positive fraction of samples above half the
//! deterministic level), while a convergent control plateaus.

use serde_json::json;

use crate::eigensolver::EigenBasis;
use crate::numerics::median;
use crate::par::{self, Parallelism};
use crate::Result;

use super::{derive_seed, Check, ExperimentReport, Row};

#[derive(Debug, Clone)]
pub struct SmoothingConfig {
    /// Sobolev index s of the target scale H_k^s (1/2 or 1 supported).
    pub s: f64,
    /// Spectral cutoffs λ <= N.
    pub cutoffs: Vec<f64>,
    pub m: usize,
    pub seed: u64,
    pub growth_factor: f64,
    pub plateau_factor: f64,
    pub pz_floor: f64,
}

impl Default for SmoothingConfig {
    fn default() -> Self {
        SmoothingConfig {
            s: 0.5,
            cutoffs: vec![4.0, 16.0, 64.0, 256.0, 1024.0, 4094.0],
            m: 400,
            seed: 29,
            growth_factor: 2.0,
            plateau_factor: 1.4,
            pz_floor: 0.05,
        }
    }
}

/// Quadratic form ⟨v, (-Δ)^{2s} v⟩ restricted to the first `active` states
/// of a d = 1 basis, for 2s in {1, 2}, kept sparse (banded for the
/// analytic harmonic basis).
struct FlatForm {
    diag: Vec<f64>,
    /// (i, j, q_ij) with i < j
    off: Vec<(usize, usize, f64)>,
}

impl FlatForm {
    fn new(basis: &EigenBasis, active: usize, two_s: usize) -> Self {
        assert_eq!(basis.dimension(), 1);
        let n = basis.n_axis();
        let pad = n + 2;
        let kin = crate::hermite::kinetic_matrix(pad);
        let s2 = 1.0 / (basis.sigma() * basis.sigma());
        // Phi: n × active state matrix, W = s2 · K · Phi (padded)
        let mut phi = ndarray::Array2::zeros((n, active));
        for j in 0..active {
            let c = basis.state_vector(j);
            for a in 0..n {
                phi[[a, j]] = c[a];
            }
        }
        let kin_rect = kin.slice(ndarray::s![.., ..n]).to_owned();
        let w = kin_rect.dot(&phi) * s2;
        let q = match two_s {
            1 => phi.t().dot(&w.slice(ndarray::s![..n, ..])),
            2 => w.t().dot(&w),
            _ => panic!("2s must be 1 or 2"),
        };
        let mut diag = vec![0.0; active];
        let mut off = Vec::new();
        let scale: f64 = q.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..active {
            diag[i] = q[[i, i]];
            for j in i + 1..active {
                if q[[i, j]].abs() > 1e-13 * scale {
                    off.push((i, j, q[[i, j]]));
                }
            }
        }
        FlatForm { diag, off }
    }

    /// s_N² = Σ_{mn} conj(g_m) g_n Q_mn over the first `count` modes with
    /// g = γ X (real/imag parts given separately).
    fn value(&self, gamma: &[f64], re: &[f64], im: &[f64], count: usize) -> f64 {
        let mut acc = 0.0;
        for i in 0..count {
            let g2 = gamma[i] * gamma[i] * (re[i] * re[i] + im[i] * im[i]);
            acc += self.diag[i] * g2;
        }
        for &(i, j, q) in &self.off {
            if j >= count {
                continue;
            }
            let cross = gamma[i] * gamma[j] * (re[i] * re[j] + im[i] * im[j]);
            acc += 2.0 * q * cross;
        }
        acc
    }
}

pub fn smoothing_divergence(basis: &EigenBasis, cfg: &SmoothingConfig) -> Result<ExperimentReport> {
    let start = std::time::Instant::now();
    assert_eq!(basis.dimension(), 1, "the divergence ladder runs on d = 1");
    let k = basis.potential().half_degree() as f64;
    let two_s = (2.0 * cfg.s).round() as usize;
    assert!(two_s == 1 || two_s == 2, "s must be 1/2 or 1");
    let mut report = ExperimentReport::new(
        "no-smoothing-divergence",
        json!({
            "s": cfg.s,
            "cutoffs": cfg.cutoffs,
            "m": cfg.m,
        }),
        cfg.seed,
    );
    let top = *cfg
        .cutoffs
        .iter()
        .max_by(|a, b| a.partial_cmp(b).unwrap())
        .unwrap();
    let trust = basis.trust_count();
    let active = (0..trust)
        .take_while(|&j| basis.eigenvalues()[j] <= top)
        .count();
    assert!(active >= 4, "cutoff ladder reaches only {active} states");

    let form = FlatForm::new(basis, active, two_s);
    // coefficient rules: γ_n² = λ_n^{-(k+1)s/k} / n (divergent) and /n²
    // (convergent control); n is the 1-based eigenindex
    let pow = -((k + 1.0) * cfg.s / k);
    let gamma_div: Vec<f64> = (0..active)
        .map(|j| (basis.eigenvalues()[j].powf(pow) / (j as f64 + 1.0)).sqrt())
        .collect();
    let gamma_conv: Vec<f64> = (0..active)
        .map(|j| (basis.eigenvalues()[j].powf(pow) / (j as f64 + 1.0).powi(2)).sqrt())
        .collect();

    // raw i.i.d. complex gaussian draws (the series is not normalized)
    let seed = derive_seed(cfg.seed, "smoothing", 0);
    use rand::SeedableRng;
    let raw: Vec<(Vec<f64>, Vec<f64>)> = par::map_indexed(cfg.m, Parallelism::Auto, |i| {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64 + 1);
        let mut re = vec![0.0; active];
        let mut im = vec![0.0; active];
        let normal = rand_distr::StandardNormal;
        for j in 0..active {
            use rand::Rng;
            let a: f64 = rng.sample(normal);
            let b: f64 = rng.sample(normal);
            re[j] = a / 2.0_f64.sqrt();
            im[j] = b / 2.0_f64.sqrt();
        }
        (re, im)
    });

    let mut med_div = Vec::new();
    let mut med_conv = Vec::new();
    for &cut in &cfg.cutoffs {
        let count = (0..active)
            .take_while(|&j| basis.eigenvalues()[j] <= cut)
            .count();
        let eval_rule = |gamma: &[f64]| -> (f64, Vec<f64>) {
            // deterministic level σ_N² = Σ γ_n² Q_nn
            let sigma2: f64 = (0..count).map(|j| gamma[j] * gamma[j] * form.diag[j]).sum();
            let vals: Vec<f64> = raw
                .iter()
                .map(|(re, im)| form.value(gamma, re, im, count).max(0.0).sqrt())
                .collect();
            (sigma2, vals)
        };
        let (sig2_d, vals_d) = eval_rule(&gamma_div);
        let (sig2_c, vals_c) = eval_rule(&gamma_conv);
        let pz_frac = vals_d
            .iter()
            .filter(|&&v| v * v >= 0.5 * sig2_d)
            .count() as f64
            / vals_d.len() as f64;
        let md = median(&vals_d);
        let mc = median(&vals_c);
        med_div.push(md);
        med_conv.push(mc);
        report.push_row(
            Row::new(format!("cutoff={cut}"))
                .counted(cfg.m as u64, seed)
                .with("modes", count as f64)
                .with("sigma_div", sig2_d.sqrt())
                .with("median_s_div", md)
                .with("sigma_conv", sig2_c.sqrt())
                .with("median_s_conv", mc)
                .with("paley_zygmund_fraction", pz_frac),
        );
        report.push_check(Check::ge(
            format!("paley_zygmund_cut_{cut}"),
            pz_frac,
            cfg.pz_floor,
        ));
    }
    report.push_check(Check::ge(
        "divergent_median_growth",
        med_div.last().unwrap() / med_div.first().unwrap(),
        cfg.growth_factor,
    ));
    report.push_check(Check::le(
        "convergent_median_plateau",
        med_conv.last().unwrap() / med_conv.first().unwrap(),
        cfg.plateau_factor,
    ));
    report.wall_time_s = start.elapsed().as_secs_f64();
    Ok(report)
}
