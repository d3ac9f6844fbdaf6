use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use coneray::extremality::{
    extremality_test, find_zeros, zero_constraints, ExtremalKind, ExtremalityOptions, ALL_LEVELS,
};
use coneray::poly::monomials_of_degree;
use coneray::scalar::rat;
use coneray::{FloatPoly, HomPoly, RatPoly};

fn poly(degree: u32, coeffs: &[i64]) -> RatPoly {
    let mut p = HomPoly::zero(3, degree);
    for (m, &c) in monomials_of_degree(3, degree).into_iter().zip(coeffs) {
        p.add_term(m, rat(c));
    }
    p
}

fn arb_nonzero(degree: u32) -> impl Strategy<Value = RatPoly> {
    let len = monomials_of_degree(3, degree).len();
    proptest::collection::vec(prop_oneof![1 => Just(0i64), 2 => -3i64..=3], len)
        .prop_map(move |c| poly(degree, &c))
        .prop_filter("nonzero", |p| !p.is_zero())
}

/// `(l·r)²` with `l` linear and `r` quadratic: nonnegative with a zero curve
/// `l = 0`, so sums of two such squares keep isolated common zeros.
fn arb_square_sextic() -> impl Strategy<Value = RatPoly> {
    (arb_nonzero(1), arb_nonzero(2)).prop_map(|(l, r)| (&l * &r).square())
}

fn sphere_min(p: &FloatPoly, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::INFINITY;
    for _ in 0..4000 {
        let v: Vec<f64> = (0..3).map(|_| rng.sample(StandardNormal)).collect();
        let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        let u: Vec<f64> = v.iter().map(|a| a / n).collect();
        best = best.min(p.eval_f64(&u));
    }
    best
}

fn fast_opts() -> ExtremalityOptions {
    ExtremalityOptions {
        starts: 48,
        ..Default::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn summands_satisfy_every_zero_constraint(q1 in arb_square_sextic(), q2 in arb_square_sextic()) {
        let p = &q1 + &q2;
        let zeros = find_zeros(&p, &fast_opts()).unwrap();
        let sys = zero_constraints(&p, &zeros, &ALL_LEVELS);
        prop_assert!(sys.residual(&q1) <= 1e-6, "{}", sys.residual(&q1));
        prop_assert!(sys.residual(&q2) <= 1e-6, "{}", sys.residual(&q2));
        prop_assert!(sys.residual(&p) <= 1e-8, "{} {:?}", sys.residual(&p), zeros);
    }

    #[test]
    fn zero_sets_ignore_positive_scaling(q1 in arb_square_sextic(), q2 in arb_square_sextic(), s in 1i64..=9) {
        let p = &q1 + &q2;
        let opts = fast_opts();
        let a = find_zeros(&p, &opts).unwrap();
        let b = find_zeros(&p.scale(&rat(s)), &opts).unwrap();
        prop_assert_eq!(a.len(), b.len());
        for z in &a.points {
            prop_assert!(b.contains(z, 1e-8));
        }
    }

    #[test]
    fn nonextremal_witnesses_split_the_form(q1 in arb_square_sextic(), q2 in arb_square_sextic()) {
        let p = &q1 + &q2;
        let v = extremality_test(&p, &fast_opts()).unwrap();
        prop_assert!(v.evidence.membership_residual <= 1e-8, "{:?}", v.evidence);
        if let ExtremalKind::NotExtremal { witness, scale } = &v.kind {
            let pf = p.to_f64();
            let wscale = witness.max_abs_coeff();
            prop_assert!(sphere_min(witness, 1) >= -1e-8 * wscale);
            let rest = &pf.scale(scale) - witness;
            prop_assert!(sphere_min(&rest, 2) >= -1e-8 * rest.max_abs_coeff().max(wscale));
            let (a, b) = (pf.coeff_vector(), witness.coeff_vector());
            let dot: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
            let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
            let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
            prop_assert!(1.0 - dot.abs() / (na * nb) >= 1e-12);
        }
    }
}
