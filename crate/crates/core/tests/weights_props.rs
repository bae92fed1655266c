use proptest::prelude::*;

use sharpcomm::expr::conjugate;
use sharpcomm::weights::{ap_constant, apq_constant, bmo_norm, bump_terms, factored_pair};
use sharpcomm::{CubeFamily, Domain, Flavor, FunctionId, SampledFunction, YoungFunction};

fn log_random(seed: u64, dim: usize, level: u32) -> SampledFunction {
    FunctionId::LogRandom { seed, blocks: 8 }
        .sample(&Domain::new(vec![0.0; dim], 1.0).unwrap(), level)
        .unwrap()
}

fn families() -> [CubeFamily; 2] {
    [CubeFamily::dyadic(), CubeFamily::shifted()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn ap_is_at_least_one(seed in 0u64..10_000, p in 1.1..5.0f64, dim in 1usize..3) {
        let w = log_random(seed, dim, if dim == 1 { 7 } else { 4 });
        for fam in families() {
            prop_assert!(ap_constant(&w, p, &fam).unwrap().constant >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn apq_equals_ap_of_the_power(seed in 0u64..10_000, p in 1.1..3.0f64, gap in 0.0..3.0f64) {
        let q = p + gap + 0.05;
        let w = log_random(seed, 1, 7);
        let fam = CubeFamily::dyadic();
        let lhs = apq_constant(&w, p, q, &fam).unwrap().constant;
        let wq = w.map(|x| x.powf(q)).unwrap();
        let rhs = ap_constant(&wq, 1.0 + q / conjugate(p), &fam).unwrap().constant;
        prop_assert!((lhs / rhs - 1.0).abs() < 1e-6);
    }

    #[test]
    fn enlarging_the_family_never_decreases(seed in 0u64..10_000, p in 1.1..4.0f64) {
        let w = log_random(seed, 1, 7);
        let coarse = CubeFamily::Dyadic { depths: Some((0, 3)) };
        let small = ap_constant(&w, p, &coarse).unwrap().constant;
        let dyadic = ap_constant(&w, p, &CubeFamily::dyadic()).unwrap().constant;
        let shifted = ap_constant(&w, p, &CubeFamily::shifted()).unwrap().constant;
        prop_assert!(small <= dyadic && dyadic <= shifted);
        let b = w.map(f64::ln).unwrap();
        prop_assert!(bmo_norm(&b, &coarse).unwrap().constant <= bmo_norm(&b, &CubeFamily::shifted()).unwrap().constant);
    }

    #[test]
    fn factored_pair_terms_within_product_bound(s1 in 0u64..10_000, s2 in 0u64..10_000, p in 1.3..3.0f64, delta in 0.1..1.0f64) {
        let (w1, w2) = (log_random(s1, 1, 6), log_random(s2, 1, 6));
        let pp = conjugate(p);
        let phi = YoungFunction::LogBump { r: 1.0, s: 2.0 * p + delta };
        let psi = YoungFunction::LogBump { r: 1.0, s: pp + 1.0 };
        let pair = factored_pair(&w1, &w2, &phi, &psi, p, 0.0, Flavor::Dyadic).unwrap();
        let terms = bump_terms(&pair, &phi.substituted(p), &psi.substituted(pp), &CubeFamily::dyadic()).unwrap();
        prop_assert!(terms.iter().all(|(_, t)| t.is_finite() && *t <= 4.0));
    }
}
