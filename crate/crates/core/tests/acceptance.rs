//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line. Tolerances are pinned in code. Criteria 8 and 10 are asserted
//! exactly as declared; at desk scale they measure known constant-level
//! obstructions (see the FAIL messages), and the suite reports them
//! honestly rather than loosening the thresholds.

use num_complex::Complex64;
use speclab_core::eigensolver::{assemble, sigma_for_energy, EigenBasis};
use speclab_core::experiments::ergodicity::{ergodicity, ErgodicityConfig, ErgodicObservable};
use speclab_core::experiments::heat::{heat_bound, HeatBoundConfig};
use speclab_core::experiments::lr::{lr_scan, LrScanConfig};
use speclab_core::experiments::moyal::moyal_check;
use speclab_core::experiments::que::{que_run, QueConfig};
use speclab_core::experiments::smoothing::{smoothing_divergence, SmoothingConfig};
use speclab_core::experiments::sobolev::{sobolev_scan, SobolevScanConfig};
use speclab_core::experiments::two_sided::{two_sided_integrals, TwoSidedConfig};
use speclab_core::experiments::weyl::{weyl_scan, WeylScanConfig};
use speclab_core::gridquant::{quantize_grid_1d, window_block_1d, GridQuantConfig};
use speclab_core::numerics::tridiag_lowest_eigenvalues;
use speclab_core::potential::PolynomialPotential;
use speclab_core::quantization::{rescaled_basis, weyl_quantize_poly};
use speclab_core::symbols::{CutoffSymbol, PolySymbol};
use speclab_core::windows::make_window;

fn verdict(n: usize, name: &str, ok: bool, detail: &str) -> bool {
    println!(
        "criterion {n:2} ({name}): {} — {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    ok
}

#[test]
fn criterion_01_harmonic_exactness() {
    let t0 = std::time::Instant::now();
    let v = PolynomialPotential::harmonic(2);
    let basis = EigenBasis::solve_dense(&v, 1.0, 40, 1.0).unwrap();
    // expected spectrum: eigenvalue 2j+2 with multiplicity j+1
    let mut expected = Vec::new();
    let mut j = 0usize;
    while expected.len() < 105 {
        for _ in 0..=j {
            expected.push(2.0 * j as f64 + 2.0);
        }
        j += 1;
    }
    let mut max_dev: f64 = 0.0;
    for i in 0..100 {
        max_dev = max_dev.max((basis.eigenvalues()[i] - expected[i]).abs());
    }
    // multiplicities exact for the complete levels inside the first 100
    let mut mult_ok = true;
    let mut idx = 0usize;
    for level in 0..13usize {
        let lam = 2.0 * level as f64 + 2.0;
        let mut count = 0;
        while idx < basis.eigenvalues().len() && (basis.eigenvalues()[idx] - lam).abs() < 1e-8 {
            count += 1;
            idx += 1;
        }
        mult_ok &= count == level + 1;
    }
    let elapsed = t0.elapsed().as_secs_f64();
    let ok = max_dev < 1e-8 && mult_ok && elapsed < 30.0;
    assert!(
        verdict(
            1,
            "harmonic exactness",
            ok,
            &format!("max |dev| = {max_dev:.2e}, multiplicities exact = {mult_ok}, runtime {elapsed:.1} s < 30 s")
        ),
        "galerkin harmonic spectrum deviated"
    );
}

#[test]
fn criterion_02_quartic_oracle() {
    // independent finite-difference oracle on [-10, 10], second order,
    // Richardson extrapolated from 4000 and 8000 interior nodes
    let fd = |n: usize| -> Vec<f64> {
        let l = 10.0;
        let dx = 2.0 * l / (n as f64 + 1.0);
        let diag: Vec<f64> = (1..=n)
            .map(|i| {
                let x = -l + i as f64 * dx;
                2.0 / (dx * dx) + x.powi(4)
            })
            .collect();
        let off = vec![-1.0 / (dx * dx); n - 1];
        tridiag_lowest_eigenvalues(&diag, &off, 20)
    };
    let a = fd(4000);
    let b = fd(8000);
    let oracle: Vec<f64> = a.iter().zip(&b).map(|(x, y)| (4.0 * y - x) / 3.0).collect();

    let v = PolynomialPotential::quartic_separable(1);
    let basis = EigenBasis::solve(&v, 1.0, 160, sigma_for_energy(&v, 120.0)).unwrap();
    assert!(basis.trust_count() >= 20);
    let d0 = (basis.eigenvalues()[0] - oracle[0]).abs();
    let mut d_all: f64 = 0.0;
    for j in 0..20 {
        d_all = d_all.max((basis.eigenvalues()[j] - oracle[j]).abs());
    }
    let ok = d0 < 1e-6 && d_all < 1e-5;
    assert!(
        verdict(
            2,
            "quartic FD oracle",
            ok,
            &format!("ground dev {d0:.2e} < 1e-6, first 20 levels dev {d_all:.2e} < 1e-5")
        ),
        "quartic spectrum disagrees with the finite-difference oracle"
    );
}

#[test]
fn criterion_03_weyl_slope() {
    // d = 2, k = 1: slope 2.0
    let basis = EigenBasis::harmonic_analytic(2, 1.0, 60);
    let rep = weyl_scan(
        &basis,
        &WeylScanConfig {
            lambda_list: WeylScanConfig::decade(4.0, 40.0, 9),
            slope_tol: 0.1,
            ratio_at: Some(40.0),
            ratio_tol: 0.15,
        },
    )
    .unwrap();
    let ok1 = rep.passed;
    // d = 2, k = 2: slope 1.5
    let v = PolynomialPotential::quartic_separable(2);
    let basis = EigenBasis::solve(&v, 1.0, 128, sigma_for_energy(&v, 60.0)).unwrap();
    let rep2 = weyl_scan(
        &basis,
        &WeylScanConfig {
            lambda_list: WeylScanConfig::decade(4.0, 40.0, 9),
            slope_tol: 0.1,
            ratio_at: None,
            ratio_tol: 0.15,
        },
    )
    .unwrap();
    let ok = ok1 && rep2.passed;
    assert!(
        verdict(
            3,
            "Weyl slope",
            ok,
            &format!("harmonic d2 k1 -> 2.0 ± 0.1: {}; quartic d2 k2 -> 1.5 ± 0.1: {}", ok1, rep2.passed)
        ),
        "{}\n{}",
        rep.summary(),
        rep2.summary()
    );
}

#[test]
fn criterion_04_moyal_operator_identity() {
    let rep = moyal_check();
    assert!(
        verdict(4, "Moyal/operator identity", rep.passed, "five pairs at h in {1, 1/4} to 1e-10; x#ξ-ξ#x = ih exact"),
        "{}",
        rep.summary()
    );
}

#[test]
fn criterion_05_quantization_cross_validation() {
    // (a) polynomial path vs grid path on a window block
    let basis = EigenBasis::harmonic_analytic(1, 1.0, 48);
    let w = make_window(&basis, 0.125, 2.0, 2.5, 0.0, 0.5).unwrap();
    let cfg = GridQuantConfig::auto(basis.potential(), 20.0, 1.0, 1.8);
    let sym = PolySymbol::x(1, 0).pow(2);
    let bp = weyl_quantize_poly(&sym, 1.0, basis.n_axis(), basis.sigma())
        .unwrap()
        .window_block(&basis, &w)
        .unwrap();
    let og = quantize_grid_1d(&|x, _xi| x * x, 1.0, basis.n_axis(), basis.sigma(), &cfg);
    let bg = window_block_1d(&basis, &w, &og).unwrap();
    let mut cross_dev: f64 = 0.0;
    for i in 0..w.count() {
        for j in 0..w.count() {
            cross_dev = cross_dev.max((bp[[i, j]] - bg[[i, j]]).norm());
        }
    }

    // (b) rescaling identity at h = 1/32 for cutoff quasi-homogeneous
    // observables; the physical-side grid is refined so the comparison
    // measures the operator-level difference, not grid error
    let h = 1.0 / 32.0;
    let basis = EigenBasis::harmonic_analytic(1, 1.0, 90);
    let w = make_window(&basis, h, 3.0, 3.5, 0.0, 0.5).unwrap();
    let lam_top = 3.5 / h;
    let observables = [
        (
            CutoffSymbol::new(
                PolySymbol::x(1, 0).mul(&PolySymbol::xi(1, 0)),
                1,
                0.05,
                1.0,
                0.0,
            )
            .unwrap(),
            5.0,
        ),
        (
            CutoffSymbol::new(PolySymbol::x(1, 0).pow(2), 1, 0.10, 1.0, 0.5).unwrap(),
            3.0,
        ),
    ];
    let mut lemma_dev: f64 = 0.0;
    for (a, refine) in &observables {
        assert!(a.check_quasi_homogeneity(1e-10));
        let f = |x: f64, xi: f64| a.eval(&[x], &[xi]);
        let mut cfg_phys = GridQuantConfig::auto(basis.potential(), lam_top, 1.0, 1.5);
        cfg_phys.spacing /= refine;
        cfg_phys.n_xi = (cfg_phys.n_xi as f64 * refine).ceil() as usize;
        let op_phys = quantize_grid_1d(&f, 1.0, basis.n_axis(), basis.sigma(), &cfg_phys);
        let lhs = window_block_1d(&basis, &w, &op_phys).unwrap();
        let resc = rescaled_basis(&basis, h);
        let cfg_resc = GridQuantConfig::auto(resc.potential(), lam_top * h, h, 1.5);
        let op_resc = quantize_grid_1d(&f, h, resc.n_axis(), resc.sigma(), &cfg_resc);
        let rhs = window_block_1d(&resc, &w, &op_resc).unwrap();
        for i in 0..w.count() {
            for j in 0..w.count() {
                lemma_dev = lemma_dev.max((lhs[[i, j]] - rhs[[i, j]]).norm());
            }
        }
    }
    let ok = cross_dev < 1e-5 && lemma_dev < 1e-3;
    assert!(
        verdict(
            5,
            "quantization cross-validation",
            ok,
            &format!("poly vs grid dev {cross_dev:.2e} < 1e-5; rescaling identity dev {lemma_dev:.2e} < 1e-3 at h=1/32")
        ),
        "quantization paths disagree"
    );
}

#[test]
fn criterion_06_two_sided_integrals() {
    let basis = EigenBasis::harmonic_analytic(2, 1.0, 84);
    let rep = two_sided_integrals(
        &basis,
        &TwoSidedConfig {
            h_list: vec![1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0],
            window: (2.0, 2.5),
            delta: 0.0,
            big_d: 0.5,
            p_list: vec![1, 2, 4],
            theta_list: vec![0.0, 2.0],
            spread_tol: 25.0,
        },
    )
    .unwrap();
    assert!(
        verdict(
            6,
            "two-sided spectral integrals",
            rep.passed,
            "ratio stable within factor 25 across h in {1/8..1/64}, p in {1,2,4}, θ in {0, d/k}; p=1 θ=0 exact"
        ),
        "{}",
        rep.summary()
    );
}

#[test]
fn criterion_07_sup_norm_law() {
    let basis = EigenBasis::harmonic_analytic(2, 1.0, 84);
    let rep = sobolev_scan(
        &basis,
        &SobolevScanConfig {
            h_list: vec![1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0],
            m: 1000,
            theta_list: vec![2.0],
            ..Default::default()
        },
    )
    .unwrap();
    assert!(
        verdict(
            7,
            "sup-norm law",
            rep.passed,
            "median ratio spread < 3 across the ladder, < 1% outside [med/3, 3 med], ceiling holds"
        ),
        "{}",
        rep.summary()
    );
}

#[test]
fn criterion_08_sqrt_r_law() {
    let basis = EigenBasis::harmonic_analytic(2, 1.0, 84);
    let rep = lr_scan(
        &basis,
        &LrScanConfig {
            h: 1.0 / 32.0,
            m: 600,
            ..Default::default()
        },
    )
    .unwrap();
    let slope = rep
        .checks
        .iter()
        .find(|c| c.name == "sqrt_r_exponent_high")
        .map(|c| c.value)
        .unwrap();
    let ok = (0.35..=0.65).contains(&slope);
    verdict(
        8,
        "sqrt(r) law exponent",
        ok,
        &format!("fitted exponent {slope:.3} vs 0.5 ± 0.15 over r in {{2,4,8,16}}"),
    );
    assert!(
        ok,
        "fitted exponent {slope:.3} is outside 0.5 ± 0.15: at desk scale the moment \
         growth Γ(r/2+1)^(1/r) ~ sqrt(r) is offset by the decay of the weighted \
         window-integral constants between p = 1 and p = 2 (the same constants whose \
         h-stability criterion 6 verifies), flattening the fitted exponent; the \
         two-sided sandwich itself holds with constant spread ~2.5 (see the \
         sandwich_constant_spread check in the lr-scan report)"
    );
}

#[test]
fn criterion_09_ergodicity() {
    let basis = EigenBasis::harmonic_analytic(2, 1.0, 84);
    let rep = ergodicity(
        &basis,
        &ErgodicityConfig {
            h_list: vec![1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0],
            m: 2000,
            observables: vec![
                ErgodicObservable::PairShare,
                ErgodicObservable::AngularMomentum,
            ],
            ..Default::default()
        },
    )
    .unwrap();
    assert!(
        verdict(
            9,
            "ergodicity concentration",
            rep.passed,
            "variance slope -1 ± 0.2, mean within 3 SE + 0.05 of the Liouville average, sub-Gaussian tails (R² > 0.8), two observables, M = 2000"
        ),
        "{}",
        rep.summary()
    );
}

#[test]
fn criterion_10_que_trend() {
    let rep = que_run(&QueConfig {
        j_list: vec![6, 12, 24, 48],
        bases_per_level: 200,
        decay_factor: 0.5,
        ..Default::default()
    })
    .unwrap();
    let ratio = rep
        .checks
        .iter()
        .find(|c| c.name == "median_decay_ratio")
        .map(|c| c.value)
        .unwrap();
    let unit_ok = rep
        .checks
        .iter()
        .find(|c| c.name == "unit_observable_dev")
        .map(|c| c.passed)
        .unwrap();
    let ok = ratio < 0.5 && unit_ok;
    verdict(
        10,
        "QUE trend",
        ok,
        &format!("median D at j=48 / median D at j=6 = {ratio:.3} vs < 0.5; unit observable exact: {unit_ok}"),
    );
    assert!(
        ok,
        "median decay ratio {ratio:.3} exceeds 0.5: D_j is a max over the j+1 basis \
         vectors, so its median carries a sqrt(2 ln(j+1)) factor on top of the \
         (j+1)^(-1/2) concentration scale; between dimensions 7 and 49 that factor \
         inflates the ratio from 0.38 to ~0.55-0.60 for every fixed degree-0 \
         observable (level blocks converge to the flow-averaged symbol distribution, \
         whose spread is j-independent), and the honest bias of the quantized cutoff \
         observable at j=6 (~2e-3) is an order of magnitude too small to close the \
         gap; the decay itself and the per-vector median (which scales like \
         (j+1)^(-1/2) without the log factor) are monotone as expected"
    );
}

#[test]
fn criterion_11_heat_bound() {
    let mut c_worst: f64 = 0.0;
    let mut all_ok = true;
    let mut mehler_dev: f64 = 0.0;

    // harmonic d = 1 and d = 2, full t list, Mehler cross-check
    for d in [1usize, 2] {
        let n_axis = if d == 1 { 460 } else { 460 };
        let basis = EigenBasis::harmonic_analytic(d, 1.0, n_axis);
        let rep = heat_bound(
            &basis,
            &HeatBoundConfig {
                t_list: vec![0.05, 0.1, 0.5, 1.0],
                check_mehler: true,
                ..Default::default()
            },
        )
        .unwrap();
        all_ok &= rep.passed;
        for c in &rep.checks {
            if c.name == "heat_constant" {
                c_worst = c_worst.max(c.value);
            }
            if c.name == "mehler_rel_dev" {
                mehler_dev = mehler_dev.max(c.value);
            }
        }
    }
    // quartic d = 1 and d = 2
    let v = PolynomialPotential::quartic_separable(1);
    let basis = EigenBasis::solve(&v, 1.0, 384, sigma_for_energy(&v, 450.0)).unwrap();
    let rep = heat_bound(
        &basis,
        &HeatBoundConfig {
            t_list: vec![0.05, 0.1, 0.5, 1.0],
            ..Default::default()
        },
    )
    .unwrap();
    all_ok &= rep.passed;
    for c in &rep.checks {
        if c.name == "heat_constant" {
            c_worst = c_worst.max(c.value);
        }
    }
    let v = PolynomialPotential::quartic_separable(2);
    let basis = EigenBasis::solve(&v, 1.0, 384, sigma_for_energy(&v, 400.0)).unwrap();
    let rep = heat_bound(
        &basis,
        &HeatBoundConfig {
            t_list: vec![0.05, 0.1, 0.5, 1.0],
            x_list: vec![0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0],
            ..Default::default()
        },
    )
    .unwrap();
    all_ok &= rep.passed;
    for c in &rep.checks {
        if c.name == "heat_constant" {
            c_worst = c_worst.max(c.value);
        }
    }
    let ok = all_ok && c_worst <= 20.0 && mehler_dev < 1e-8;
    assert!(
        verdict(
            11,
            "heat-kernel bound",
            ok,
            &format!("single constant C = {c_worst:.3} <= 20 over harmonic and quartic d in {{1,2}}; Mehler dev {mehler_dev:.2e} < 1e-8")
        ),
        "heat bound failed"
    );
}

#[test]
fn criterion_12_no_smoothing() {
    // harmonic exactness of the ratios
    let basis = EigenBasis::harmonic_analytic(1, 1.0, 64);
    let mut exact_dev: f64 = 0.0;
    for (_, r1, _) in speclab_core::windows::no_smoothing_ratios(&basis, 0.5, 5..25).unwrap() {
        exact_dev = exact_dev.max((r1 * r1 - 0.5).abs());
    }
    for (_, _, r2) in speclab_core::windows::no_smoothing_ratios(&basis, 1.0, 5..25).unwrap() {
        exact_dev = exact_dev.max((r2 * r2 - 0.5).abs());
    }
    // quartic ratios within [0.1, 1.5] for trusted n >= 5
    let v = PolynomialPotential::quartic_separable(1);
    let qb = EigenBasis::solve(&v, 1.0, 160, sigma_for_energy(&v, 120.0)).unwrap();
    let hi = qb.trust_count();
    let mut in_range = true;
    for &s in &[0.5, 1.0] {
        for (n, r1, r2) in speclab_core::windows::no_smoothing_ratios(&qb, s, 5..hi).unwrap() {
            let ok = (0.1..=1.5).contains(&r1) && (0.1..=1.5).contains(&r2);
            if !ok {
                println!("  quartic ratio out of range at n={n}, s={s}: r1={r1:.3} r2={r2:.3}");
            }
            in_range &= ok;
        }
    }
    // divergence ladder with convergent control
    let hb = EigenBasis::harmonic_analytic(1, 1.0, 2048);
    let rep = smoothing_divergence(&hb, &SmoothingConfig::default()).unwrap();
    let ok = exact_dev < 1e-10 && in_range && rep.passed;
    assert!(
        verdict(
            12,
            "no-smoothing ratios and divergence",
            ok,
            &format!("harmonic r² dev {exact_dev:.2e} < 1e-10; quartic ratios in [0.1, 1.5]: {in_range}; divergent median doubles while control plateaus: {}", rep.passed)
        ),
        "{}",
        rep.summary()
    );
}

#[test]
fn complex_identity_discrete_covariance() {
    // the grid quantizer commutes exactly with the symplectic rescaling
    // when the lattices are matched: a structural check of the scheme
    let h = 1.0 / 32.0;
    let basis = EigenBasis::harmonic_analytic(1, 1.0, 64);
    let w = make_window(&basis, h, 2.0, 2.5, 0.0, 0.5).unwrap();
    let a = CutoffSymbol::new(PolySymbol::x(1, 0).pow(2), 1, 0.1, 1.0, 0.5).unwrap();
    let f = |x: f64, xi: f64| a.eval(&[x], &[xi]);
    let cfg_phys = GridQuantConfig::auto(basis.potential(), 2.5 / h, 1.0, 1.5);
    let lhs = window_block_1d(
        &basis,
        &w,
        &quantize_grid_1d(&f, 1.0, basis.n_axis(), basis.sigma(), &cfg_phys),
    )
    .unwrap();
    let resc = rescaled_basis(&basis, h);
    let cfg_resc = GridQuantConfig::auto(resc.potential(), 2.5, h, 1.5);
    let sqh = h.sqrt();
    let fh = |x: f64, xi: f64| a.eval(&[x / sqh], &[xi / sqh]);
    let rhs = window_block_1d(
        &resc,
        &w,
        &quantize_grid_1d(&fh, h, resc.n_axis(), resc.sigma(), &cfg_resc),
    )
    .unwrap();
    let mut dev: f64 = 0.0;
    for i in 0..w.count() {
        for j in 0..w.count() {
            dev = dev.max((lhs[[i, j]] - rhs[[i, j]]).norm());
        }
    }
    assert!(dev < 1e-12, "discrete covariance violated: {dev:.3e}");
}

#[test]
fn moyal_h_grading_example() {
    // x # ξ = xξ + ih/2 at numeric h, checked through the operator path too
    let x = PolySymbol::x(1, 0);
    let xi = PolySymbol::xi(1, 0);
    for &h in &[1.0, 0.25] {
        let prod = speclab_core::symbols::moyal_product(&x, &xi, h);
        let v = prod.eval(&[1.0], &[1.0]);
        assert!((v - Complex64::new(1.0, h / 2.0)).norm() < 1e-14);
    }
}

#[test]
fn assembly_matches_quantization_of_hamiltonian_symbol() {
    // Op_1(|ξ|² + V) equals the Galerkin matrix of -Δ + V on the exact
    // section (two independent assembly routes)
    let v = PolynomialPotential::quartic_separable(1);
    let n = 14usize;
    let sigma = 0.8;
    let galerkin = assemble(&v, 1.0, n, sigma).unwrap();
    let sym = PolySymbol::xi(1, 0)
        .pow(2)
        .add(&PolySymbol::x(1, 0).pow(4));
    let quant = weyl_quantize_poly(&sym, 1.0, n, sigma).unwrap().dense();
    for i in 0..n {
        for j in 0..n {
            let dev = (quant[[i, j]] - galerkin[[i, j]]).norm();
            assert!(dev < 1e-10, "entry ({i},{j}) dev {dev:.2e}");
        }
    }
}
