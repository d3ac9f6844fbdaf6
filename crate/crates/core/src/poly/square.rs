//! Square roots of even-degree forms by graded-lex peeling.

use serde::Serialize;

use super::HomPoly;
use crate::scalar::Scalar;

/// Outcome of a successful square-root extraction.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", bound(serialize = "S: Scalar"))]
pub enum SquareRoot<S> {
    /// `root² = p` exactly.
    Exact { root: HomPoly<S> },
    /// Floating root with max-coefficient residual `|root² - p|`.
    Approximate { root: HomPoly<f64>, residual: f64 },
}

impl<S: Scalar> SquareRoot<S> {
    pub fn root_f64(&self) -> HomPoly<f64> {
        match self {
            SquareRoot::Exact { root } => root.to_f64(),
            SquareRoot::Approximate { root, .. } => root.clone(),
        }
    }
}

enum Peel<S> {
    Root(HomPoly<S>),
    Irrational,
    NotSquare,
}

fn leading_above<S: Scalar>(p: &HomPoly<S>, tol: f64) -> Option<(super::Monomial, S)> {
    p.terms()
        .rev()
        .find(|(_, c)| c.to_f64_lossy().abs() > tol || (S::EXACT && !c.is_zero()))
        .map(|(m, c)| (m.clone(), c.clone()))
}

fn peel<S: Scalar>(p: &HomPoly<S>, tol: f64) -> Peel<S> {
    let half = p.degree() / 2;
    let n = p.nvars();
    let Some((lm, lc)) = leading_above(p, tol) else {
        return Peel::Root(HomPoly::zero(n, half));
    };
    if !lm.is_even() || !lc.is_positive() {
        return Peel::NotSquare;
    }
    let Some(a) = lc.sqrt_exact() else {
        return Peel::Irrational;
    };
    let qm = super::Monomial::new(lm.exps().iter().map(|e| e / 2).collect());
    let mut root = HomPoly::monomial(qm.clone(), a.clone());
    let two_a = S::from_i64(2) * a;
    let mut last = qm.clone();
    let mut rem = p - &root.square();
    for _ in 0..=p.num_terms() + super::monomials_of_degree(n, half).len() {
        let Some((m, c)) = leading_above(&rem, tol) else {
            return Peel::Root(root);
        };
        let Some(next) = m.div(&qm) else {
            return Peel::NotSquare;
        };
        if next >= last {
            return Peel::NotSquare;
        }
        let t = HomPoly::monomial(next.clone(), c / two_a.clone());
        // (root + t)² - root² = 2·root·t + t²
        let delta = &(&root * &t).scale(&S::from_i64(2)) + &t.square();
        rem = &rem - &delta;
        root = &root + &t;
        last = next;
    }
    Peel::NotSquare
}

/// Square root of an even-degree form, if it is the square of a form.
///
/// Exact coefficients are peeled exactly; an irrational leading coefficient
/// (or a floating input) falls back to floating peeling accepted when the
/// residual is at most `1e-10·max|coeff(p)|`.
pub fn perfect_square_test<S: Scalar>(p: &HomPoly<S>) -> Option<SquareRoot<S>> {
    if !p.degree().is_multiple_of(2) {
        return None;
    }
    if S::EXACT {
        match peel(p, 0.0) {
            Peel::Root(root) => return Some(SquareRoot::Exact { root }),
            Peel::NotSquare => return None,
            Peel::Irrational => {}
        }
    }
    let pf = p.to_f64();
    let scale = pf.max_abs_coeff();
    let bound = 1e-10 * scale;
    match peel(&pf, 1e-13 * scale) {
        Peel::Root(root) => {
            let residual = (&root.square() - &pf).max_abs_coeff();
            (residual <= bound).then_some(SquareRoot::Approximate { root, residual })
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use crate::{FloatPoly, RatPoly};

    fn y(i: usize) -> RatPoly {
        RatPoly::var(3, i)
    }

    fn exact_root(p: &RatPoly) -> Option<RatPoly> {
        match perfect_square_test(p)? {
            SquareRoot::Exact { root } => Some(root),
            SquareRoot::Approximate { .. } => panic!("expected exact root"),
        }
    }

    #[test]
    fn sixth_power() {
        assert_eq!(exact_root(&y(0).pow(6)), Some(y(0).pow(3)));
    }

    #[test]
    fn expanded_square() {
        let q = &y(0).pow(3) - &(&y(0) * &y(1).square());
        let r = exact_root(&q.square()).unwrap();
        assert!(r == q || r == -&q);
    }

    #[test]
    fn sum_of_sixth_powers_is_not_square() {
        assert!(perfect_square_test(&(&y(0).pow(6) + &y(1).pow(6))).is_none());
        let cl = RatPoly::from_int_terms(
            3,
            6,
            &[(&[4, 2, 0], 1), (&[0, 4, 2], 1), (&[2, 0, 4], 1), (&[2, 2, 2], -3)],
        );
        assert!(perfect_square_test(&cl).is_none());
        assert!(perfect_square_test(&y(0).pow(6).scale(&rat(-1))).is_none());
    }

    #[test]
    fn zero_is_square_of_zero() {
        let r = exact_root(&RatPoly::zero(3, 6)).unwrap();
        assert!(r.is_zero());
        assert_eq!(r.degree(), 3);
    }

    #[test]
    fn irrational_leading_coefficient_falls_back() {
        let p = &y(2).pow(6).scale(&rat(2)) + &y(0).pow(6).scale(&rat(2));
        assert!(perfect_square_test(&p).is_none());
        // (√2·y3³ + y1³)² = 2y3⁶ + 2√2 y1³y3³ + y1⁶ has an irrational term, so
        // use (y1³ + y2³)²·2 instead: root √2(y1³ + y2³)
        let q = (&y(0).pow(3) + &y(1).pow(3)).square().scale(&rat(2));
        match perfect_square_test(&q) {
            Some(SquareRoot::Approximate { root, residual }) => {
                assert!(residual <= 1e-10 * 4.0);
                let want = 2f64.sqrt();
                assert!((root.coeff_of(&[3, 0, 0]) - want).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn floating_input() {
        let q = FloatPoly::linear(&[0.5, -1.5, 2.0]).pow(3);
        let r = perfect_square_test(&q.square()).unwrap();
        assert!(matches!(r, SquareRoot::Approximate { .. }));
    }
}
