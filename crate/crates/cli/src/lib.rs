//! Library side of the batch front-end: config handling, experiment
//! dispatch and artifact writing. The binary is a thin argument parser on
//! top of [`execute`].

pub mod config;
pub mod plots;

use std::path::{Path, PathBuf};

use speclab_core::eigensolver::{self, EigenBasis};
use speclab_core::ensembles::Distribution;
use speclab_core::experiments::{self, ExperimentReport};
use speclab_core::potential::PolynomialPotential;
use speclab_core::windows;
use speclab_core::{Error, Result};

use config::RunConfig;

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub dry_run: bool,
}

/// Summary of an executed run.
pub struct RunSummary {
    pub reports: Vec<ExperimentReport>,
    pub all_passed: bool,
    pub out_dir: PathBuf,
}

pub fn build_potential(cfg: &RunConfig) -> Result<PolynomialPotential> {
    let p = &cfg.potential;
    match p.kind.as_str() {
        "harmonic" => Ok(PolynomialPotential::harmonic(p.dimension)),
        "quartic-separable" => Ok(PolynomialPotential::quartic_separable(p.dimension)),
        "quartic-isotropic" => Ok(PolynomialPotential::quartic_isotropic(p.dimension)),
        "inline" => {
            let text = p
                .text
                .as_ref()
                .ok_or_else(|| Error::Parse("inline potential needs `text`".into()))?;
            PolynomialPotential::from_text(text)
        }
        other => Err(Error::Parse(format!("unknown potential kind '{other}'"))),
    }
}

pub fn solve_basis(cfg: &RunConfig, v: &PolynomialPotential) -> Result<EigenBasis> {
    let s = &cfg.solver;
    let sigma = match s.sigma {
        Some(x) => x,
        None => match s.target_energy {
            Some(e) => eigensolver::sigma_for_energy(v, e),
            None => {
                if s.h == 1.0 {
                    eigensolver::default_sigma(v)
                } else {
                    eigensolver::default_sigma(v) * s.h.sqrt()
                }
            }
        },
    };
    if let Ok(dir) = std::env::var("SPECLAB_CACHE_DIR") {
        speclab_core::cache::load_or_solve(Path::new(&dir), v, s.h, s.n_axis, sigma)
    } else {
        EigenBasis::solve(v, s.h, s.n_axis, sigma)
    }
}

fn dist_of(cfg: &RunConfig) -> Result<Distribution> {
    Distribution::from_name(&cfg.ensemble.dist)
}

/// Run one named experiment against the configured basis.
pub fn run_experiment(name: &str, cfg: &RunConfig, basis: &EigenBasis) -> Result<ExperimentReport> {
    let win = &cfg.window;
    let ens = &cfg.ensemble;
    match name {
        "sobolev-scan" => {
            let x = &cfg.experiments.sobolev;
            experiments::sobolev::sobolev_scan(
                basis,
                &experiments::sobolev::SobolevScanConfig {
                    h_list: win.h_list.clone(),
                    window: (win.a, win.b),
                    delta: win.delta,
                    big_d: win.big_d,
                    theta_list: x.theta_list.clone(),
                    dist: dist_of(cfg)?,
                    m: ens.m,
                    seed: ens.seed,
                    refine: x.refine,
                    spread_tol: x.spread_tol,
                },
            )
        }
        "lr-scan" => {
            let x = &cfg.experiments.lr;
            experiments::lr::lr_scan(
                basis,
                &experiments::lr::LrScanConfig {
                    h: x.h,
                    window: (win.a, win.b),
                    delta: win.delta,
                    big_d: win.big_d,
                    r_list: x.r_list.clone(),
                    dist: dist_of(cfg)?,
                    m: ens.m,
                    seed: ens.seed,
                    oversample: x.oversample,
                    slope_range: x.slope_range,
                    ratio82_range: x.ratio82_range,
                },
            )
        }
        "two-sided" => {
            let x = &cfg.experiments.two_sided;
            experiments::two_sided::two_sided_integrals(
                basis,
                &experiments::two_sided::TwoSidedConfig {
                    h_list: win.h_list.clone(),
                    window: (win.a, win.b),
                    delta: win.delta,
                    big_d: win.big_d,
                    p_list: x.p_list.clone(),
                    theta_list: x.theta_list.clone(),
                    spread_tol: x.spread_tol,
                },
            )
        }
        "window-uniformity" => {
            let x = &cfg.experiments.uniformity;
            experiments::uniformity::window_uniformity(
                basis,
                &experiments::uniformity::UniformityConfig {
                    lambda_list: x.lambda_list.clone(),
                    mu_factor: x.mu_factor,
                    delta: x.delta,
                    theta_list: x.theta_list.clone(),
                    grid_points: 28,
                    spread_tol: 4.0,
                },
            )
        }
        "ergodicity" => {
            let x = &cfg.experiments.ergodicity;
            let observables = x
                .observables
                .iter()
                .map(|s| experiments::ergodicity::ErgodicObservable::from_name(s))
                .collect::<Result<Vec<_>>>()?;
            experiments::ergodicity::ergodicity(
                basis,
                &experiments::ergodicity::ErgodicityConfig {
                    h_list: win.h_list.clone(),
                    window: (win.a, win.b),
                    delta: win.delta,
                    big_d: win.big_d,
                    observables,
                    dist: dist_of(cfg)?,
                    m: ens.m,
                    seed: ens.seed,
                    liouville_samples: x.liouville_samples,
                    mean_tol: x.mean_tol,
                    slope_tol: x.slope_tol,
                },
            )
        }
        "que" => {
            let x = &cfg.experiments.que;
            experiments::que::que_run(&experiments::que::QueConfig {
                j_list: x.j_list.clone(),
                bases_per_level: x.bases_per_level,
                seed: ens.seed,
                cutoff_eps: x.cutoff_eps,
                cheb_deg: x.cheb_deg,
                rank_tol: 1e-7,
                decay_factor: x.decay_factor,
            })
        }
        "heat-bound" => {
            let x = &cfg.experiments.heat;
            let hb_cfg = experiments::heat::HeatBoundConfig {
                t_list: x.t_list.clone(),
                x_list: x.x_list.clone(),
                bound_n: 2,
                c_max: x.c_max,
                check_mehler: x.check_mehler,
            };
            match x.n_axis {
                Some(n) => {
                    let deep = EigenBasis::solve(
                        basis.potential(),
                        basis.h(),
                        n,
                        basis.sigma(),
                    )?;
                    experiments::heat::heat_bound(&deep, &hb_cfg)
                }
                None => experiments::heat::heat_bound(basis, &hb_cfg),
            }
        }
        "no-smoothing" => {
            let x = &cfg.experiments.smoothing;
            let mut report = experiments::smoothing::smoothing_divergence(
                basis,
                &experiments::smoothing::SmoothingConfig {
                    s: x.s,
                    cutoffs: x.cutoffs.clone(),
                    m: ens.m,
                    seed: ens.seed,
                    growth_factor: 2.0,
                    plateau_factor: 1.4,
                    pz_floor: 0.05,
                },
            )?;
            // append the deterministic ratio rows r1, r2
            let lo = x.ratio_range.first().copied().unwrap_or(5);
            let hi = x
                .ratio_range
                .get(1)
                .copied()
                .unwrap_or(25)
                .min(basis.trust_count());
            for (n, r1, r2) in windows::no_smoothing_ratios(basis, x.s, lo..hi)? {
                report.push_row(
                    experiments::Row::new(format!("mode={n}"))
                        .with("r1", r1)
                        .with("r2", r2),
                );
            }
            Ok(report)
        }
        "weyl-law" => {
            let x = &cfg.experiments.weyl;
            experiments::weyl::weyl_scan(
                basis,
                &experiments::weyl::WeylScanConfig {
                    lambda_list: experiments::weyl::WeylScanConfig::decade(
                        x.lambda_lo,
                        x.lambda_hi,
                        x.points,
                    ),
                    slope_tol: x.slope_tol,
                    ratio_at: x.ratio_at,
                    ratio_tol: 0.15,
                },
            )
        }
        "spectrum" => {
            let mut report = ExperimentReport::new(
                "spectrum",
                serde_json::json!({"n_axis": basis.n_axis(), "h": basis.h()}),
                0,
            );
            for j in 0..basis.trust_count() {
                report.push_row(
                    experiments::Row::new(format!("j={j}"))
                        .with("lambda", basis.eigenvalues()[j]),
                );
            }
            report.push_check(experiments::Check::ge(
                "trusted_count",
                basis.trust_count() as f64,
                1.0,
            ));
            Ok(report)
        }
        "spectral-function" => {
            let lam = basis.eigenvalues()[basis.trust_count() - 1] * 0.8;
            let idx = windows::level_indices(basis, lam)?;
            let radius = windows::turning_radius(basis.potential(), lam);
            let n_pts = 41;
            let points: Vec<Vec<f64>> = (0..n_pts)
                .map(|i| {
                    let x = -radius + 2.0 * radius * i as f64 / (n_pts - 1) as f64;
                    match basis.dimension() {
                        1 => vec![x],
                        _ => vec![x, 0.0],
                    }
                })
                .collect();
            let vals = windows::spectral_function(basis, &idx, &points)?;
            let mut report = ExperimentReport::new(
                "spectral-function",
                serde_json::json!({"lambda": lam}),
                0,
            );
            for (p, v) in points.iter().zip(&vals) {
                report.push_row(
                    experiments::Row::new(format!("x={:.4}", p[0])).with("pi_diag", *v),
                );
            }
            report.push_check(experiments::Check::ge(
                "nonnegative",
                vals.iter().cloned().fold(f64::INFINITY, f64::min),
                0.0,
            ));
            Ok(report)
        }
        "moyal-check" => Ok(experiments::moyal::moyal_check()),
        other => Err(Error::Parse(format!("unknown experiment '{other}'"))),
    }
}

pub use experiments::moyal::moyal_check;

/// Execute the experiments in `names` (or the config's suite list) and
/// write artifacts. Returns the reports.
pub fn execute(cfg: &RunConfig, names: &[String], ov: &Overrides) -> Result<RunSummary> {
    let mut cfg = cfg.clone();
    if let Some(seed) = ov.seed {
        cfg.ensemble.seed = seed;
    }
    let out_dir = ov
        .out_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
    let names: Vec<String> = if names.is_empty() {
        cfg.experiments.run.clone()
    } else {
        names.to_vec()
    };
    if names.is_empty() {
        return Err(Error::Parse("no experiments selected".into()));
    }
    if ov.dry_run {
        println!("dry run: potential kind = {}", cfg.potential.kind);
        println!("dry run: solver n_axis = {}", cfg.solver.n_axis);
        for n in &names {
            println!("dry run: would run {n}");
        }
        return Ok(RunSummary {
            reports: vec![],
            all_passed: true,
            out_dir,
        });
    }
    let v = build_potential(&cfg)?;
    let basis = solve_basis(&cfg, &v)?;
    let mut reports = Vec::new();
    let mut all_passed = true;
    std::fs::create_dir_all(&out_dir)?;
    for name in &names {
        let report = run_experiment(name, &cfg, &basis)?;
        report.write_artifacts(&out_dir)?;
        if cfg.output.svg {
            if let Some(col) = plots::default_column(&report.experiment) {
                if let Some(svg) = plots::render_svg(&report, col) {
                    std::fs::write(
                        out_dir.join(format!("{}.svg", report.experiment)),
                        svg,
                    )?;
                }
            }
        }
        print!("{}", report.summary());
        all_passed &= report.passed;
        reports.push(report);
    }
    // suite summary
    let mut summary = String::new();
    for r in &reports {
        summary.push_str(&r.summary());
    }
    summary.push_str(&format!(
        "overall: {}\n",
        if all_passed { "pass" } else { "FAIL" }
    ));
    std::fs::write(out_dir.join("summary.txt"), summary)?;
    Ok(RunSummary {
        reports,
        all_passed,
        out_dir,
    })
}
