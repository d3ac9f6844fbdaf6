use proptest::prelude::*;

use coneray::poly::json::poly_from_str;
use coneray::poly::{monomials_of_degree, perfect_square_test, poly_divide, quad_classify, ShapeVerdict, SquareRoot};
use coneray::scalar::rat;
use coneray::{HomPoly, QuadForm, RatPoly};

fn poly(nvars: usize, degree: u32, coeffs: &[i64]) -> RatPoly {
    let mut p = HomPoly::zero(nvars, degree);
    for (m, &c) in monomials_of_degree(nvars, degree).into_iter().zip(coeffs) {
        p.add_term(m, rat(c));
    }
    p
}

fn arb_poly(nvars: usize, degree: u32) -> impl Strategy<Value = RatPoly> {
    let len = monomials_of_degree(nvars, degree).len();
    proptest::collection::vec(prop_oneof![3 => Just(0i64), 2 => -5i64..=5], len)
        .prop_map(move |c| poly(nvars, degree, &c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn json_round_trip(p in (1usize..=4, 0u32..=4).prop_flat_map(|(n, d)| arb_poly(n, d))) {
        let s = serde_json::to_string(&p).unwrap();
        let back: RatPoly = poly_from_str(&s).unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), s);
    }

    #[test]
    fn euler_identity(p in (1usize..=4, 1u32..=5).prop_flat_map(|(n, d)| arb_poly(n, d))) {
        let n = p.nvars();
        let mut acc = HomPoly::zero(n, p.degree());
        for i in 0..n {
            acc = acc.checked_add(&(&HomPoly::var(n, i) * &p.partial(i))).unwrap();
        }
        prop_assert!(acc.checked_sub(&p.scale(&rat(p.degree() as i64))).unwrap().is_zero());
    }

    #[test]
    fn division_recovers_factors(a in arb_poly(3, 2), b in arb_poly(3, 2)) {
        prop_assume!(!b.is_zero());
        let prod = &a * &b;
        let q = poly_divide(&prod, &b).unwrap().expect("exact quotient");
        prop_assert_eq!(&(&q * &b), &prod);
    }

    #[test]
    fn division_is_sound(p in arb_poly(3, 4), b in arb_poly(3, 2)) {
        prop_assume!(!b.is_zero());
        if let Some(q) = poly_divide(&p, &b).unwrap() {
            prop_assert_eq!(&(&q * &b), &p);
        }
    }

    #[test]
    fn square_test_is_idempotent(q in arb_poly(3, 3)) {
        let sq = q.square();
        match perfect_square_test(&sq) {
            Some(SquareRoot::Exact { root }) => {
                prop_assert!(root == q || root == -q.clone());
                let again = perfect_square_test(&root.square());
                let same = matches!(again, Some(SquareRoot::Exact { root: r }) if r == root || r == -root.clone());
                prop_assert!(same);
            }
            other => prop_assert!(false, "{:?}", other),
        }
    }

    #[test]
    fn square_test_is_sound(p in arb_poly(3, 4)) {
        if let Some(SquareRoot::Exact { root }) = perfect_square_test(&p) {
            prop_assert_eq!(root.square(), p);
        }
    }

    #[test]
    fn quadratic_factors_reconstruct(p in arb_poly(3, 2)) {
        let q = QuadForm::new(p.clone()).unwrap();
        if let Some(r) = quad_classify(&q).reconstruct(3) {
            prop_assert_eq!(r, p);
        }
    }

    #[test]
    fn rational_products_factor_exactly(l1 in arb_poly(3, 1), l2 in arb_poly(3, 1)) {
        let p = &l1 * &l2;
        let v = quad_classify(&QuadForm::new(p.clone()).unwrap());
        prop_assert!(
            matches!(v, ShapeVerdict::Zero | ShapeVerdict::SquareOfLinear { .. } | ShapeVerdict::ProductOfTwoLinears { .. }),
            "{:?}", v
        );
        prop_assert_eq!(v.reconstruct(3).unwrap(), p);
    }
}
