use proptest::prelude::*;

use sharpcomm::oscillation::{
    cz_cubes, dyadic_maximal_in, lerner_decompose, local_oscillation, median, rearrangement_value,
};
use sharpcomm::{CellCube, Domain, FunctionId, SampledFunction};

fn random(seed: u64, dim: usize, level: u32) -> SampledFunction {
    FunctionId::Random {
        seed,
        blocks: 1 << level,
    }
    .sample(&Domain::new(vec![0.0; dim], 1.0).unwrap(), level)
    .unwrap()
}

fn sub_cube(f: &SampledFunction, depth: u32, pick: u64) -> CellCube {
    let size = f.cells_per_axis() >> depth;
    let per = 1u64 << depth;
    let mut corner = [0; 3];
    let mut k = pick;
    for c in corner.iter_mut().take(f.dim()) {
        *c = (k % per) as usize * size;
        k /= per;
    }
    CellCube::new(corner, size)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn lerner_invariants_hold_exactly(seed in 0u64..100_000, dim in 1usize..3) {
        let f = random(seed, dim, if dim == 1 { 8 } else { 5 });
        let tree = lerner_decompose(&f, &f.root()).unwrap();
        let report = tree.check(&f);
        prop_assert!(report.all(), "{report:?}");
        prop_assert!(tree.c_hat.unwrap().is_finite());
    }

    #[test]
    fn median_is_bounded_by_rearrangement(seed in 0u64..100_000, depth in 0u32..4, pick in any::<u64>()) {
        let f = random(seed, 1, 7);
        let q = sub_cube(&f, depth, pick);
        let half = 0.5 * f.cell_cube_volume(&q);
        prop_assert!(median(&f, &q).unwrap().abs() <= rearrangement_value(&f, &q, half).unwrap());
    }

    #[test]
    fn oscillation_invariances(seed in 0u64..100_000, c in -10.0..10.0f64, s in -4.0..4.0f64, l1 in 0.01..0.98f64, dl in 0.0..0.5f64) {
        let f = random(seed, 2, 4);
        let q = f.root();
        let w = local_oscillation(&f, &q, l1).unwrap();
        let shifted = local_oscillation(&f.map(|x| x + c).unwrap(), &q, l1).unwrap();
        prop_assert!((w - shifted).abs() <= 1e-12 * (1.0 + c.abs()));
        let scaled = local_oscillation(&f.scale(s), &q, l1).unwrap();
        prop_assert!((scaled - s.abs() * w).abs() <= 1e-12 * (1.0 + w));
        let l2 = (l1 + dl).min(0.99);
        prop_assert!(local_oscillation(&f, &q, l2).unwrap() <= w);
    }

    #[test]
    fn cz_cubes_reproduce_maximal_superlevel_sets(seed in 0u64..100_000, dim in 1usize..3, k in -2i32..3) {
        let f = random(seed, dim, if dim == 1 { 8 } else { 5 }).abs().scale(4.0);
        let root = f.root();
        let a = 4f64.powi(dim as i32);
        let h = a.powi(k) * 0.5;
        let cz = cz_cubes(&f, h, &root).unwrap();
        let m = dyadic_maximal_in(&f, &root).unwrap();
        let mut covered = vec![false; f.len()];
        for c in &cz.cubes {
            for i in f.cells(c) {
                prop_assert!(!covered[i]);
                covered[i] = true;
            }
        }
        for (i, &v) in m.values().iter().enumerate() {
            prop_assert_eq!(covered[i], v > h);
        }
    }
}
