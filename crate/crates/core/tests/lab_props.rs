use proptest::prelude::*;

use sharpcomm::lab::{
    default_two_weight_radii, slope_fit, sweep_frac_commutator, sweep_sobolev, two_weight_failure, RadialProfile,
    Radius, SobolevOptions, Tail, Transform, DEFAULT_DELTAS, DEFAULT_REL_TOL,
};
use sharpcomm::Error;

#[test]
fn sweeps_are_reproducible() {
    let opts = SobolevOptions {
        resolution: Some(6),
        ..SobolevOptions::default()
    };
    assert_eq!(
        sweep_sobolev(2, 1.5, &DEFAULT_DELTAS, opts).unwrap(),
        sweep_sobolev(2, 1.5, &DEFAULT_DELTAS, opts).unwrap()
    );
    assert_eq!(
        sweep_frac_commutator(3, 1.0, 1.2, &DEFAULT_DELTAS, DEFAULT_REL_TOL).unwrap(),
        sweep_frac_commutator(3, 1.0, 1.2, &DEFAULT_DELTAS, DEFAULT_REL_TOL).unwrap()
    );
    let radii = default_two_weight_radii(6);
    assert_eq!(
        two_weight_failure(3, 1.0, 2, &radii, DEFAULT_REL_TOL).unwrap(),
        two_weight_failure(3, 1.0, 2, &radii, DEFAULT_REL_TOL).unwrap()
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn slopes_ignore_weight_scaling(log_c in -3.0..3.0f64, p in 1.1..1.9f64) {
        let base = SobolevOptions { resolution: Some(5), ..SobolevOptions::default() };
        let scaled = SobolevOptions { weight_scale: 10f64.powf(log_c), ..base };
        let a = sweep_sobolev(2, p, &DEFAULT_DELTAS, base).unwrap();
        let b = sweep_sobolev(2, p, &DEFAULT_DELTAS, scaled).unwrap();
        for (x, y) in a.slopes.iter().zip(&b.slopes) {
            prop_assert!((x.fit.slope - y.fit.slope).abs() < 1e-10, "{} vs {}", x.fit.slope, y.fit.slope);
        }
    }

    #[test]
    fn slope_fit_recovers_power_laws(e in -3.0..3.0f64, c in 0.01..100.0f64, xs in prop::collection::btree_set(1u32..1000, 3..10)) {
        let pts: Vec<(f64, f64)> = xs.iter().map(|&x| (x as f64, c * (x as f64).powf(e))).collect();
        let fit = slope_fit(&pts, Transform::LogLog).unwrap();
        prop_assert!((fit.slope - e).abs() < 1e-9);
        prop_assert!(fit.residual < 1e-9);
    }

    #[test]
    fn tail_classification_matches_partial_integrals(
        dim in 1usize..4,
        da in -0.3..0.3f64,
        b in -2.0..0.5f64,
        c in -2.0..0.5f64,
        d in -1.0..1.0f64,
    ) {
        let g = RadialProfile::new(dim)
            .power(-(dim as f64) + da)
            .logs(b, c, d)
            .support(Radius::from_loglog(3.0), Radius::INFINITY);
        let partial = |u: f64| g.clone().support(Radius::from_loglog(3.0), Radius::from_loglog(u)).integrate(1e-10).unwrap();
        // r^{da} overflows long before log log r = 60 when da > 0
        let far = if da > 0.0 { 5.5 } else { 60.0 };
        let (p1, p2) = (partial(4.0), partial(far));
        prop_assert!(0.0 < p1 && p1 <= p2);
        match g.tail() {
            Tail::Converges => {
                let total = g.integrate(1e-10).unwrap();
                prop_assert!(p2 <= total * (1.0 + 1e-8));
            }
            Tail::Diverges { .. } => {
                prop_assert!(da >= 0.0);
                let diverges = matches!(g.integrate(1e-10), Err(Error::Diverges(_)));
                prop_assert!(diverges);
            }
        }
    }
}
