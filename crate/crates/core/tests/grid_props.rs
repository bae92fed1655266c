use proptest::prelude::*;

use sharpcomm::{CellCube, Domain, DyadicGrid, Pyramid, SampledFunction};

fn random_function(dim: usize, level: u32) -> impl Strategy<Value = SampledFunction> {
    let len = 1usize << (dim as u32 * level);
    prop::collection::vec(-5.0..5.0f64, len)
        .prop_map(move |v| SampledFunction::from_values(Domain::new(vec![0.0; dim], 1.0).unwrap(), level, v).unwrap())
}

fn dims_and_functions() -> impl Strategy<Value = SampledFunction> {
    prop_oneof![random_function(1, 6), random_function(2, 4), random_function(3, 2)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn partition_additivity(f in dims_and_functions(), depth in 0usize..4, pick in any::<u64>()) {
        let p = Pyramid::new(&f);
        let depth = depth.min(p.depth() - 1);
        let nodes = p.level(depth).len();
        let c = p.node(depth, (pick % nodes as u64) as usize);
        let kids = c.children(f.dim());
        let mean = kids.iter().map(|k| f.average_cells(k)).sum::<f64>() / kids.len() as f64;
        prop_assert!((f.average_cells(&c) - mean).abs() < 1e-12);
    }

    #[test]
    fn shift_consistency(f in random_function(1, 6), k in 0usize..64, level in -4i32..=0, m in 0i64..16) {
        let beta = k as f64 / 64.0;
        let g = f.translated(&[beta]).unwrap();
        let m = m % (1i64 << (-level));
        let standard = DyadicGrid::standard(1).cube(level, vec![m]);
        let shifted = DyadicGrid::new(1, 1.0, vec![beta]).unwrap().cube(level, vec![m]);
        prop_assert!((f.average(&standard).unwrap() - g.average(&shifted).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn integration_is_linear_and_positive(f in dims_and_functions(), a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let g = f.map(|x| x * x - 1.0).unwrap();
        let lhs = f.scale(a).add(&g.scale(b)).unwrap().integral();
        prop_assert!((lhs - (a * f.integral() + b * g.integral())).abs() < 1e-10);
        let root = f.root();
        let quarter = CellCube::new([0; 3], root.size / 2);
        prop_assert!(f.abs().average_cells(&quarter) >= 0.0);
        prop_assert!(f.abs().integral() >= 0.0);
    }
}
