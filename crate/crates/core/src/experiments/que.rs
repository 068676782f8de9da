//! Quantum unique ergodicity of random Hermite bases: for each harmonic
//! level j (d = 2, eigenvalue 2j + 2, multiplicity j + 1), draw Haar bases
//! of the eigenspace and record D_j(B) = max_l |⟨phi_{j,l}, Â phi_{j,l}⟩ -
//! L_2(A)|. The observable is a cutoff quasi-homogeneous symbol quantized
//! through the separated grid path, so low levels carry their honest
//! semiclassical bias.

use num_complex::Complex64;
use serde_json::json;

use crate::eigensolver::{EigenBasis, StateCoefficients};
use crate::ensembles::haar_basis;
use crate::gridquant::{quantize_grid_2d, separate_symbol_2d, GridQuantConfig};
use crate::numerics::median;
use crate::par::{self, Parallelism};
use crate::symbols::{CutoffSymbol, PolySymbol};
use crate::windows::SpectralWindow;
use crate::Result;

use super::{derive_seed, Check, ExperimentReport, Row};

#[derive(Debug, Clone)]
pub struct QueConfig {
    pub j_list: Vec<usize>,
    pub bases_per_level: usize,
    pub seed: u64,
    /// Inner cutoff radius of the observable (quasi-norm units).
    pub cutoff_eps: f64,
    pub cheb_deg: usize,
    pub rank_tol: f64,
    /// Required decay: median D at the last level < decay_factor × median
    /// at the first level.
    pub decay_factor: f64,
}

impl Default for QueConfig {
    fn default() -> Self {
        QueConfig {
            j_list: vec![6, 12, 24, 48],
            bases_per_level: 200,
            seed: 21,
            cutoff_eps: 1.0,
            cheb_deg: 48,
            rank_tol: 1e-7,
            decay_factor: 0.5,
        }
    }
}

pub fn que_run(cfg: &QueConfig) -> Result<ExperimentReport> {
    let start = std::time::Instant::now();
    let mut report = ExperimentReport::new(
        "que",
        json!({
            "j_list": cfg.j_list,
            "bases_per_level": cfg.bases_per_level,
            "cutoff_eps": cfg.cutoff_eps,
            "cheb_deg": cfg.cheb_deg,
        }),
        cfg.seed,
    );
    let j_max = *cfg.j_list.iter().max().expect("nonempty level list");
    let n_axis = j_max + 1;
    let basis = EigenBasis::harmonic_analytic(2, 1.0, n_axis);
    let lam_max = 2.0 * j_max as f64 + 2.0;

    // observable A = chi(rho/eps) x1²/rho², rho² = |x|² + |ξ|² (k = 1)
    let a = CutoffSymbol::new(
        PolySymbol::x(2, 0).pow(2),
        1,
        cfg.cutoff_eps,
        1.0,
        0.0,
    )?;
    assert!(a.check_quasi_homogeneity(1e-10));
    let l_ref = 0.25; // Liouville average of x1²/rho² on any shell

    let grid = GridQuantConfig::auto(basis.potential(), lam_max, 1.0, 1.3);
    let sep = separate_symbol_2d(
        &|x: &[f64], xi: &[f64]| a.eval(x, xi),
        grid.radius_x,
        grid.radius_xi,
        cfg.cheb_deg,
        cfg.rank_tol,
    )?;
    report.flag(format!(
        "observable separation rank {}, truncation {:.3e}",
        sep.terms.len(),
        sep.truncation
    ));
    let op = quantize_grid_2d(&sep, 1.0, n_axis, basis.sigma(), &grid);

    let mut medians = Vec::new();
    let mut tail_fracs = Vec::new();
    let mut max_unit_dev: f64 = 0.0;
    for &j in &cfg.j_list {
        let dim = j + 1;
        // the level-j eigenspace as a window
        let indices: Vec<usize> = match basis.coefficients() {
            StateCoefficients::Identity { .. } => (0..basis.trust_count())
                .filter(|&i| (basis.eigenvalues()[i] - (2.0 * j as f64 + 2.0)).abs() < 1e-9)
                .collect(),
            _ => unreachable!("analytic harmonic basis"),
        };
        assert_eq!(indices.len(), dim);
        let window = SpectralWindow {
            h: 1.0 / j.max(1) as f64,
            a_h: 2.0 + 2.0 / j.max(1) as f64,
            b_h: 2.0 + 4.0 / j.max(1) as f64,
            delta: 1.0,
            big_d: 2.0,
            indices,
        };
        let mut block = op.window_block(&basis, &window)?;
        // Hermitianize away grid noise
        for r in 0..dim {
            for c in r..dim {
                let sym = 0.5 * (block[[r, c]] + block[[c, r]].conj());
                block[[r, c]] = sym;
                block[[c, r]] = sym.conj();
            }
        }
        let trace_avg: f64 = (0..dim).map(|i| block[[i, i]].re).sum::<f64>() / dim as f64;

        let ds: Vec<(f64, f64)> = par::map_indexed(cfg.bases_per_level, Parallelism::Auto, |b| {
            let u = haar_basis(dim, derive_seed(cfg.seed, "que-haar", (j as u64) << 20 | b as u64));
            let mut d_obs: f64 = 0.0;
            let mut d_unit: f64 = 0.0;
            for l in 0..dim {
                // q = u_l† B u_l and the unit-observable control
                let mut q = Complex64::new(0.0, 0.0);
                let mut nrm = 0.0;
                for r in 0..dim {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for c in 0..dim {
                        acc += block[[r, c]] * u[[c, l]];
                    }
                    q += u[[r, l]].conj() * acc;
                    nrm += u[[r, l]].norm_sqr();
                }
                d_obs = d_obs.max((q.re - l_ref).abs());
                d_unit = d_unit.max((nrm - 1.0).abs());
            }
            (d_obs, d_unit)
        });
        let dvals: Vec<f64> = ds.iter().map(|d| d.0).collect();
        for d in &ds {
            max_unit_dev = max_unit_dev.max(d.1);
        }
        let med = median(&dvals);
        let dmax = dvals.iter().cloned().fold(0.0f64, f64::max);
        let tail_frac =
            dvals.iter().filter(|&&v| v > 3.0 * med).count() as f64 / dvals.len() as f64;
        medians.push(med);
        tail_fracs.push(tail_frac);
        report.push_row(
            Row::new(format!("j={j}"))
                .counted(cfg.bases_per_level as u64, cfg.seed)
                .with("dim", dim as f64)
                .with("median_d", med)
                .with("max_d", dmax)
                .with("tail_frac_over_3x", tail_frac)
                .with("trace_avg", trace_avg)
                .with("trace_avg_minus_l", trace_avg - l_ref),
        );
    }

    let ratio = medians.last().unwrap() / medians.first().unwrap();
    report.push_check(Check::le("median_decay_ratio", ratio, cfg.decay_factor));
    report.push_check(Check::le(
        "tail_fraction_not_growing",
        tail_fracs.last().unwrap() - tail_fracs.first().unwrap(),
        0.05,
    ));
    report.push_check(Check::le("unit_observable_dev", max_unit_dev, 1e-12));
    report.wall_time_s = start.elapsed().as_secs_f64();
    Ok(report)
}
