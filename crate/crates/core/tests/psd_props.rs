use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use coneray::psd::{gram_to_squares, max_min_eig, sym_eigen, AffinePsdProblem, SliceStatus};
use coneray::suites::{lemma41_suite, psd_dual_suite, random_psd};
use coneray::SymMatrix;

fn arb_sym(n: usize) -> impl Strategy<Value = SymMatrix<f64>> {
    proptest::collection::vec(-3.0f64..3.0, n * n).prop_map(move |v| {
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                m.set(i, j, v[i * n + j]);
            }
        }
        m
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn psd_pairs_have_nonnegative_inner_product(seed in any::<u64>(), n in 2usize..=6) {
        let r = psd_dual_suite(n, 20, seed);
        prop_assert!(r.all_passed(), "{:?}", r);
    }

    #[test]
    fn minor_sums_decrease_with_order(seed in any::<u64>(), n in 3usize..=4) {
        let r = lemma41_suite(n, 20, seed);
        prop_assert!(r.all_passed(), "{:?}", r);
    }

    #[test]
    fn gram_factorization_reconstructs(seed in any::<u64>(), n in 1usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_psd(&mut rng, n);
        let tol = 1e-8;
        let squares = gram_to_squares(&g, tol).unwrap();
        let scale = g.max_abs().max(1.0);
        for i in 0..n {
            for j in 0..n {
                let s: f64 = squares.iter().map(|v| v[i] * v[j]).sum();
                prop_assert!((s - g.get(i, j)).abs() <= n as f64 * tol * scale);
            }
        }
    }

    #[test]
    fn slice_results_are_sound_and_deterministic(
        base in arb_sym(4),
        dirs in proptest::collection::vec(arb_sym(4), 0..3),
    ) {
        let problem = AffinePsdProblem::new(base.clone(), dirs.clone());
        let a = max_min_eig(&problem).unwrap();
        let b = max_min_eig(&problem).unwrap();
        prop_assert_eq!(&a.c_star, &b.c_star);
        prop_assert_eq!(a.t_star.to_bits(), b.t_star.to_bits());
        if a.status == SliceStatus::Feasible {
            let mut g = base;
            for (d, &c) in dirs.iter().zip(&a.c_star) {
                g.axpy(c, d);
            }
            prop_assert!(sym_eigen(&g).values[0] >= a.t_star - problem.tolerance);
        }
    }
}
