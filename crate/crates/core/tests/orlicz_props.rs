use proptest::prelude::*;

use sharpcomm::orlicz::{luxemburg_values, orlicz_maximal};
use sharpcomm::{Domain, Flavor, SampledFunction, YoungFunction};

fn families() -> Vec<YoungFunction> {
    vec![
        YoungFunction::Power(1.0),
        YoungFunction::Power(2.5),
        YoungFunction::llogl(),
        YoungFunction::LogBump { r: 2.0, s: 3.5 },
        YoungFunction::Quotient { r: 2.0, s: 1.5 },
        YoungFunction::ExpL,
        YoungFunction::LogBump { r: 1.0, s: 2.0 }.substituted(1.5),
    ]
}

fn samples() -> impl Strategy<Value = Vec<f64>> {
    (prop::collection::vec(0.0..1.0f64, 1..96), -3.0..3.0f64)
        .prop_map(|(v, e)| v.into_iter().map(|x| x.powi(3) * 10f64.powf(e)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn homogeneity(v in samples(), c in -50.0..50.0f64, k in 0usize..7) {
        let phi = &families()[k];
        let base = luxemburg_values(&v, phi).unwrap();
        let scaled: Vec<f64> = v.iter().map(|x| c * x).collect();
        let got = luxemburg_values(&scaled, phi).unwrap();
        prop_assert!((got - c.abs() * base).abs() <= 1e-9 * (c.abs() * base).max(1e-300));
    }

    #[test]
    fn power_agreement(v in samples(), r in 1.0..4.0f64) {
        let got = luxemburg_values(&v, &YoungFunction::Power(r)).unwrap();
        let want = (v.iter().map(|x| x.powf(r)).sum::<f64>() / v.len() as f64).powf(1.0 / r);
        prop_assert!((got - want).abs() <= 1e-8 * want.max(1e-300));
    }

    #[test]
    fn generalized_holder(f in samples(), seed in prop::collection::vec(0.0..4.0f64, 96), k in 0usize..7) {
        let phi = &families()[k];
        let g: Vec<f64> = seed[..f.len()].to_vec();
        let mean = f.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>() / f.len() as f64;
        let bound = luxemburg_values(&f, phi).unwrap() * luxemburg_values(&g, &phi.associate()).unwrap();
        prop_assert!(mean <= 2.0 * bound * (1.0 + 1e-9));
    }

    #[test]
    fn three_function_holder(f in samples(), g in samples(), p in 1.2..3.0f64, delta in 0.1..1.0f64) {
        let pp = p / (p - 1.0);
        let a = YoungFunction::LogBump { r: p, s: 2.0 * p - 1.0 + delta };
        let c = YoungFunction::Quotient { r: pp, s: 1.0 + (pp - 1.0) * delta };
        let n = f.len().min(g.len());
        let fg: Vec<f64> = f[..n].iter().zip(&g[..n]).map(|(x, y)| x * y).collect();
        let lhs = luxemburg_values(&fg, &YoungFunction::llogl()).unwrap();
        let rhs = luxemburg_values(&f[..n], &a).unwrap() * luxemburg_values(&g[..n], &c).unwrap();
        // observed constants stay below 1.5 on this distribution
        prop_assert!(lhs <= 4.0 * rhs);
    }

    #[test]
    fn maximal_operator_does_not_blow_up(freq in 1.0..60.0f64, amp in 0.1..10.0f64) {
        let phi = YoungFunction::llogl();
        let ratio = |level: u32| {
            let dom = Domain::new(vec![0.0], 1.0).unwrap();
            let f = SampledFunction::from_cell_fn(dom, level, |lo, _| {
                if lo[0] < 0.5 { amp * (freq * lo[0]).sin().abs() } else { 0.0 }
            })
            .unwrap();
            orlicz_maximal(&f, &phi, 0.0, Flavor::Dyadic).unwrap().lp_norm(2.0) / f.lp_norm(2.0)
        };
        let (coarse, fine) = (ratio(6), ratio(9));
        prop_assert!(fine <= 1.1 * coarse, "{coarse} -> {fine}");
    }
}
