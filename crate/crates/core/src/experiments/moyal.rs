//! Moyal product / operator identity checks: Op(A # B) = Op(A) Op(B) on
//! exact sections for polynomial pairs, and the symbol-level canonical
//! commutation x # ξ - ξ # x = ih.

use num_complex::Complex64;
use serde_json::json;

use crate::quantization::weyl_quantize_poly;
use crate::symbols::{moyal_product, PolySymbol};

use super::{Check, ExperimentReport, Row};

pub fn moyal_check() -> ExperimentReport {
    let start = std::time::Instant::now();
    let mut report = ExperimentReport::new("moyal-check", json!({}), 0);
    let x = PolySymbol::x(1, 0);
    let xi = PolySymbol::xi(1, 0);
    let pairs: Vec<(String, PolySymbol, PolySymbol)> = vec![
        ("x2_xi2".into(), x.pow(2), xi.pow(2)),
        ("x3_xi".into(), x.pow(3), xi.clone()),
        ("xxi_xxi".into(), x.mul(&xi), x.mul(&xi)),
        ("x2xi_xi2".into(), x.pow(2).mul(&xi), xi.pow(2)),
        (
            "mixed2d".into(),
            PolySymbol::x(2, 0).mul(&PolySymbol::xi(2, 1)),
            PolySymbol::x(2, 1).pow(2),
        ),
    ];
    let mut worst: f64 = 0.0;
    for &h in &[1.0, 0.25] {
        for (name, a, b) in &pairs {
            let ab = moyal_product(a, b, h);
            let n = 10usize;
            let pad = a.total_degree() + b.total_degree() + 2;
            let big = n + pad;
            let op_a = weyl_quantize_poly(a, h, big, 1.0).unwrap().dense();
            let op_b = weyl_quantize_poly(b, h, big, 1.0).unwrap().dense();
            let prod = op_a.dot(&op_b);
            let op_ab = weyl_quantize_poly(&ab, h, n, 1.0).unwrap().dense();
            let dim = if a.dimension() == 1 { n } else { n * n };
            let mut dev: f64 = 0.0;
            for i in 0..dim {
                for j in 0..dim {
                    let (bi, bj) = if a.dimension() == 1 {
                        (i, j)
                    } else {
                        ((i / n) * big + (i % n), (j / n) * big + (j % n))
                    };
                    dev = dev.max((prod[[bi, bj]] - op_ab[[i, j]]).norm());
                }
            }
            worst = worst.max(dev);
            report.push_row(Row::new(format!("pair={name},h={h}")).with("max_dev", dev));
        }
    }
    report.push_check(Check::le("operator_identity", worst, 1e-10));
    // symbol-level canonical commutation: exact in the symbol algebra
    let h = 0.5;
    let comm = moyal_product(&x, &xi, h)
        .add(&moyal_product(&xi, &x, h).scale(Complex64::new(-1.0, 0.0)));
    let val = comm.eval(&[0.7], &[-0.3]);
    let dev = (val - Complex64::new(0.0, h)).norm();
    report.push_check(Check::le("symbol_commutator_ih", dev, 0.0));
    report.wall_time_s = start.elapsed().as_secs_f64();
    report
}

#[cfg(test)]
mod tests {
    #[test]
    fn moyal_check_passes() {
        let report = super::moyal_check();
        assert!(report.passed, "{}", report.summary());
    }
}
