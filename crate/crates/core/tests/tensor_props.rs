use num_rational::BigRational;
use proptest::prelude::*;

use coneray::scalar::{rat, ratio};
use coneray::tensor::{acoustic_tensor, mixed_det_expansion, orbit, symbolic_det_cof, MatrixRole};
use coneray::{ElastTensor, HomPoly, RatPoly};

type Term = ((usize, usize), (usize, usize), BigRational);

fn arb_terms(d: usize) -> impl Strategy<Value = Vec<Term>> {
    let idx = 0..d;
    proptest::collection::vec(
        ((idx.clone(), idx.clone()), (idx.clone(), idx), -4i64..=4).prop_map(|(a, b, c)| (a, b, rat(c))),
        0..10,
    )
}

fn arb_tensor(d: usize) -> impl Strategy<Value = ElastTensor> {
    arb_terms(d).prop_map(move |t| ElastTensor::from_quadratic_form(d, &t).unwrap())
}

fn arb_rational_vec(n: usize) -> impl Strategy<Value = Vec<BigRational>> {
    proptest::collection::vec((-9i64..=9, 1i64..=5).prop_map(|(p, q)| ratio(p, q)), n)
}

fn det(c: &ElastTensor, role: MatrixRole) -> RatPoly {
    symbolic_det_cof(&acoustic_tensor(c, role)).unwrap().0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn expansion_is_closed_under_the_symmetries(c in arb_tensor(3)) {
        let d = 3;
        let full = c.expand();
        let at = |q: [usize; 4]| full[((q[0] * d + q[1]) * d + q[2]) * d + q[3]].clone();
        for i in 0..d { for j in 0..d { for k in 0..d { for l in 0..d {
            for m in orbit([i, j, k, l]) {
                prop_assert_eq!(at(m), at([i, j, k, l]));
            }
        }}}}
    }

    #[test]
    fn rank_one_values_match_the_acoustic_tensor(
        c in arb_tensor(3),
        x in arb_rational_vec(3),
        y in arb_rational_vec(3),
    ) {
        let t = acoustic_tensor(&c, MatrixRole::YMatrix).eval(&y);
        let mut quad = rat(0);
        for i in 0..3 {
            for k in 0..3 {
                quad += &x[i] * &t[i][k] * &x[k];
            }
        }
        prop_assert_eq!(c.eval_rank_one(&x, &y).unwrap(), quad);
    }

    #[test]
    fn adjugate_identity(c in arb_tensor(3)) {
        let m = acoustic_tensor(&c, MatrixRole::YMatrix);
        let (det, cof) = symbolic_det_cof(&m).unwrap();
        let prod = m.checked_mul(&cof.transpose()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { det.clone() } else { HomPoly::zero(det.nvars(), det.degree()) };
                prop_assert_eq!(prod.get(i, j), &want);
            }
        }
    }

    #[test]
    fn adjugate_identity_in_four_dimensions(c in arb_tensor(4)) {
        let m = acoustic_tensor(&c, MatrixRole::YMatrix);
        let (det, cof) = symbolic_det_cof(&m).unwrap();
        let prod = m.checked_mul(&cof.transpose()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { det.clone() } else { HomPoly::zero(det.nvars(), det.degree()) };
                prop_assert_eq!(prod.get(i, j), &want);
            }
        }
    }

    #[test]
    fn transpose_swaps_the_acoustic_roles(c in arb_tensor(3)) {
        prop_assert_eq!(
            acoustic_tensor(&c, MatrixRole::XMatrix),
            acoustic_tensor(&c.transposed(), MatrixRole::YMatrix)
        );
    }

    #[test]
    fn block_determinant(c in arb_tensor(3), a in 1i64..=5) {
        let corner = ElastTensor::from_quadratic_form(4, &[((3, 3), (3, 3), rat(a))]).unwrap();
        let big = c.embed(4).add(&corner).unwrap();
        let y4sq = HomPoly::var(4, 3).square().scale(&rat(a));
        prop_assert_eq!(det(&big, MatrixRole::YMatrix), &det(&c, MatrixRole::YMatrix).embed(4, &[0, 1, 2]) * &y4sq);
    }

    #[test]
    fn mixed_expansion_matches_exact_evaluation(
        c in arb_tensor(3),
        c1 in arb_tensor(3),
        y in arb_rational_vec(3),
        lambda in (-6i64..=6, 1i64..=3).prop_map(|(p, q)| ratio(p, q)),
    ) {
        let (t, t1) = (acoustic_tensor(&c, MatrixRole::YMatrix), acoustic_tensor(&c1, MatrixRole::YMatrix));
        let coeffs = mixed_det_expansion(&t, &t1).unwrap();
        let diff = t.checked_sub(&t1.scale(&lambda)).unwrap();
        let direct = symbolic_det_cof(&diff).unwrap().0.eval(&y);
        prop_assert_eq!(coeffs.eval(&lambda, &y), direct);
    }
}
