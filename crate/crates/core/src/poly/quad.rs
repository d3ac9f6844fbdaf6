//! Quadratic and linear forms: Gram view, inertia and factor structure.

use serde::Serialize;

use super::HomPoly;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Linear form `Σ c_i y_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearForm<S> {
    pub coeffs: Vec<S>,
}

impl<S: Scalar> Serialize for LinearForm<S> {
    fn serialize<Z: serde::Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        s.collect_seq(self.coeffs.iter().map(super::json::coeff_to_json))
    }
}

impl<S: Scalar> LinearForm<S> {
    pub fn new(coeffs: Vec<S>) -> Self {
        LinearForm { coeffs }
    }

    pub fn from_poly(p: &HomPoly<S>) -> Result<Self> {
        if p.degree() != 1 {
            return Err(Error::DimensionMismatch(format!(
                "linear form needs degree 1, got {}",
                p.degree()
            )));
        }
        let n = p.nvars();
        Ok(LinearForm {
            coeffs: (0..n)
                .map(|i| p.coeff(&super::Monomial::var(n, i)))
                .collect(),
        })
    }

    pub fn to_poly(&self) -> HomPoly<S> {
        HomPoly::linear(&self.coeffs)
    }

    pub fn nvars(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn eval(&self, y: &[S]) -> S {
        self.coeffs
            .iter()
            .zip(y)
            .fold(S::zero(), |acc, (c, v)| acc + c.clone() * v.clone())
    }

    pub fn scale(&self, s: &S) -> Self {
        LinearForm {
            coeffs: self.coeffs.iter().map(|c| c.clone() * s.clone()).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        LinearForm {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    /// Scale so the first nonzero coefficient is 1; returns the removed factor.
    pub fn make_monic(&self) -> (S, Self) {
        match self.coeffs.iter().find(|c| !c.is_zero()) {
            None => (S::one(), self.clone()),
            Some(lead) => {
                let lead = lead.clone();
                (lead.clone(), self.scale(&(S::one() / lead)))
            }
        }
    }

    pub fn to_f64(&self) -> LinearForm<f64> {
        LinearForm {
            coeffs: self.coeffs.iter().map(|c| c.to_f64_lossy()).collect(),
        }
    }
}

/// `q = Σ weights[k]·forms[k]²` with linearly independent forms.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedSquares<S> {
    pub weights: Vec<S>,
    pub forms: Vec<LinearForm<S>>,
}

impl<S: Scalar> WeightedSquares<S> {
    pub fn to_poly(&self, nvars: usize) -> HomPoly<S> {
        let mut acc = HomPoly::zero(nvars, 2);
        for (w, l) in self.weights.iter().zip(&self.forms) {
            acc = &acc + &l.to_poly().square().scale(w);
        }
        acc
    }
}

/// Degree-2 form together with its symmetric Gram matrix and inertia.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadForm<S> {
    pub poly: HomPoly<S>,
    pub gram: Vec<Vec<S>>,
    pub rank: usize,
    pub signature: (usize, usize),
}

/// Structure of a quadratic form over the reals.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", bound(serialize = "S: Scalar"))]
pub enum ShapeVerdict<S> {
    Zero,
    /// `q = coeff·form²`, `form` monic.
    SquareOfLinear {
        #[serde(serialize_with = "super::json::ser_scalar")]
        coeff: S,
        form: LinearForm<S>,
    },
    /// `q = coeff·first·second`, both monic.
    ProductOfTwoLinears {
        #[serde(serialize_with = "super::json::ser_scalar")]
        coeff: S,
        first: LinearForm<S>,
        second: LinearForm<S>,
    },
    /// Rank-2 indefinite form whose linear factors are irrational.
    ProductOfTwoLinearsApprox {
        coeff: f64,
        first: LinearForm<f64>,
        second: LinearForm<f64>,
    },
    IrreducibleDefinite { positive: bool },
    IrreducibleIndefinite,
}

impl<S: Scalar> QuadForm<S> {
    pub fn new(poly: HomPoly<S>) -> Result<Self> {
        if poly.degree() != 2 {
            return Err(Error::DimensionMismatch(format!(
                "quadratic form needs degree 2, got {}",
                poly.degree()
            )));
        }
        let n = poly.nvars();
        let half = S::one() / S::from_i64(2);
        let mut gram = vec![vec![S::zero(); n]; n];
        for (m, c) in poly.terms() {
            let idx: Vec<usize> = m
                .exps()
                .iter()
                .enumerate()
                .flat_map(|(i, &e)| std::iter::repeat_n(i, e as usize))
                .collect();
            let (i, j) = (idx[0], idx[1]);
            if i == j {
                gram[i][i] = c.clone();
            } else {
                gram[i][j] = c.clone() * half.clone();
                gram[j][i] = c.clone() * half.clone();
            }
        }
        let squares = lagrange(&gram);
        let pos = squares.weights.iter().filter(|w| w.is_positive()).count();
        let neg = squares.weights.len() - pos;
        Ok(QuadForm {
            poly,
            gram,
            rank: pos + neg,
            signature: (pos, neg),
        })
    }

    pub fn from_gram(gram: Vec<Vec<S>>) -> Result<Self> {
        let n = gram.len();
        let mut p = HomPoly::zero(n, 2);
        for i in 0..n {
            if gram[i].len() != n {
                return Err(Error::DimensionMismatch("gram matrix is not square".into()));
            }
            let mut e = vec![0; n];
            e[i] = 2;
            p.add_term(super::Monomial::new(e), gram[i][i].clone());
            for j in i + 1..n {
                let mut e = vec![0; n];
                e[i] = 1;
                e[j] = 1;
                p.add_term(
                    super::Monomial::new(e),
                    gram[i][j].clone() + gram[j][i].clone(),
                );
            }
        }
        Self::new(p)
    }

    pub fn nvars(&self) -> usize {
        self.poly.nvars()
    }

    pub fn eval(&self, y: &[S]) -> S {
        self.poly.eval(y)
    }

    pub fn is_indefinite(&self) -> bool {
        self.signature.0 > 0 && self.signature.1 > 0
    }

    pub fn is_psd(&self) -> bool {
        self.signature.1 == 0
    }

    /// Lagrange diagonalization `q = Σ w_k ℓ_k²`.
    pub fn weighted_squares(&self) -> WeightedSquares<S> {
        lagrange(&self.gram)
    }
}

fn zero_tol<S: Scalar>(a: &[Vec<S>]) -> f64 {
    if S::EXACT {
        0.0
    } else {
        let scale = a
            .iter()
            .flatten()
            .map(|v| v.to_f64_lossy().abs())
            .fold(0.0, f64::max);
        1e-10 * scale.max(f64::MIN_POSITIVE)
    }
}

fn is_zero_tol<S: Scalar>(v: &S, tol: f64) -> bool {
    if S::EXACT {
        v.is_zero()
    } else {
        v.to_f64_lossy().abs() <= tol
    }
}

fn lagrange<S: Scalar>(gram: &[Vec<S>]) -> WeightedSquares<S> {
    let n = gram.len();
    let tol = zero_tol(gram);
    let mut a: Vec<Vec<S>> = gram.to_vec();
    let mut weights = Vec::new();
    let mut forms = Vec::new();
    let subtract = |a: &mut Vec<Vec<S>>, w: &S, l: &[S]| {
        for i in 0..n {
            for j in 0..n {
                a[i][j] = a[i][j].clone() - w.clone() * l[i].clone() * l[j].clone();
            }
        }
    };
    for _ in 0..n {
        let mut piv: Option<usize> = None;
        for i in 0..n {
            if is_zero_tol(&a[i][i], tol) {
                continue;
            }
            if piv.is_none_or(|p| a[i][i].abs() > a[p][p].abs()) {
                piv = Some(i);
            }
        }
        if let Some(p) = piv {
            let d = a[p][p].clone();
            let l: Vec<S> = (0..n).map(|j| a[p][j].clone() / d.clone()).collect();
            subtract(&mut a, &d, &l);
            weights.push(d);
            forms.push(LinearForm::new(l));
            continue;
        }
        let mut off: Option<(usize, usize)> = None;
        for i in 0..n {
            for j in i + 1..n {
                if is_zero_tol(&a[i][j], tol) {
                    continue;
                }
                if off.is_none_or(|(p, q)| a[i][j].abs() > a[p][q].abs()) {
                    off = Some((i, j));
                }
            }
        }
        let Some((p, q)) = off else { break };
        let apq = a[p][q].clone();
        let two = S::from_i64(2);
        let plus: Vec<S> = (0..n).map(|j| a[p][j].clone() + a[q][j].clone()).collect();
        let minus: Vec<S> = (0..n).map(|j| a[p][j].clone() - a[q][j].clone()).collect();
        let wp = S::one() / (two.clone() * apq.clone());
        let wm = -wp.clone();
        subtract(&mut a, &wp, &plus);
        subtract(&mut a, &wm, &minus);
        weights.push(wp);
        forms.push(LinearForm::new(plus));
        weights.push(wm);
        forms.push(LinearForm::new(minus));
    }
    WeightedSquares { weights, forms }
}

/// Decide the real factor structure of a quadratic form.
pub fn quad_classify<S: Scalar>(q: &QuadForm<S>) -> ShapeVerdict<S> {
    let ws = q.weighted_squares();
    match (q.rank, q.signature) {
        (0, _) => ShapeVerdict::Zero,
        (1, _) => {
            let (lead, form) = ws.forms[0].make_monic();
            ShapeVerdict::SquareOfLinear {
                coeff: ws.weights[0].clone() * lead.clone() * lead,
                form,
            }
        }
        (2, (1, 1)) => {
            let (ip, ineg) = if ws.weights[0].is_positive() { (0, 1) } else { (1, 0) };
            let (d1, d2) = (ws.weights[ip].clone(), ws.weights[ineg].clone());
            let (l1, l2) = (&ws.forms[ip], &ws.forms[ineg]);
            // q = d1·(l1 - s·l2)(l1 + s·l2) with s² = -d2/d1
            match (-d2.clone() / d1.clone()).sqrt_exact() {
                Some(s) => {
                    let (ca, first) = l1.add(&l2.scale(&-s.clone())).make_monic();
                    let (cb, second) = l1.add(&l2.scale(&s)).make_monic();
                    ShapeVerdict::ProductOfTwoLinears {
                        coeff: d1 * ca * cb,
                        first,
                        second,
                    }
                }
                None => {
                    let s = (-d2.to_f64_lossy() / d1.to_f64_lossy()).sqrt();
                    let (f1, f2) = (l1.to_f64(), l2.to_f64());
                    let (ca, first) = f1.add(&f2.scale(&-s)).make_monic();
                    let (cb, second) = f1.add(&f2.scale(&s)).make_monic();
                    ShapeVerdict::ProductOfTwoLinearsApprox {
                        coeff: d1.to_f64_lossy() * ca * cb,
                        first,
                        second,
                    }
                }
            }
        }
        (_, (p, 0)) => ShapeVerdict::IrreducibleDefinite { positive: p > 0 },
        (_, (0, _)) => ShapeVerdict::IrreducibleDefinite { positive: false },
        _ => ShapeVerdict::IrreducibleIndefinite,
    }
}

impl<S: Scalar> ShapeVerdict<S> {
    /// Rebuild the form from its factors (exact variants only).
    pub fn reconstruct(&self, nvars: usize) -> Option<HomPoly<S>> {
        match self {
            ShapeVerdict::Zero => Some(HomPoly::zero(nvars, 2)),
            ShapeVerdict::SquareOfLinear { coeff, form } => {
                Some(form.to_poly().square().scale(coeff))
            }
            ShapeVerdict::ProductOfTwoLinears {
                coeff,
                first,
                second,
            } => Some((&first.to_poly() * &second.to_poly()).scale(coeff)),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use crate::scalar::{rat, ratio};
    use crate::RatPoly;

    fn y(i: usize) -> RatPoly {
        RatPoly::var(3, i)
    }

    fn classify(p: RatPoly) -> ShapeVerdict<BigRational> {
        quad_classify(&QuadForm::new(p).unwrap())
    }

    #[test]
    fn square_of_linear() {
        assert_eq!(
            classify(y(0).square()),
            ShapeVerdict::SquareOfLinear {
                coeff: rat(1),
                form: LinearForm::new(vec![rat(1), rat(0), rat(0)])
            }
        );
        let p = (&y(0).scale(&rat(2)) - &y(2)).square().scale(&rat(-3));
        let v = classify(p.clone());
        assert!(matches!(v, ShapeVerdict::SquareOfLinear { .. }));
        assert_eq!(v.reconstruct(3).unwrap(), p);
    }

    #[test]
    fn difference_of_squares() {
        let v = classify(&y(0).square() - &y(1).square());
        assert_eq!(
            v,
            ShapeVerdict::ProductOfTwoLinears {
                coeff: rat(1),
                first: LinearForm::new(vec![rat(1), rat(-1), rat(0)]),
                second: LinearForm::new(vec![rat(1), rat(1), rat(0)]),
            }
        );
        let p = &y(0) * &y(1);
        assert_eq!(classify(p.clone()).reconstruct(3).unwrap(), p);
    }

    #[test]
    fn irrational_factors_are_approximate() {
        let p = &y(0).square() - &y(1).square().scale(&rat(2));
        match classify(p) {
            ShapeVerdict::ProductOfTwoLinearsApprox { coeff, first, second } => {
                for pt in [[0.3, -1.2, 0.7], [1.0, 2.0, 3.0]] {
                    let want = pt[0] * pt[0] - 2.0 * pt[1] * pt[1];
                    let got = coeff * first.eval(&pt) * second.eval(&pt);
                    assert!((want - got).abs() < 1e-12);
                }
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn definite_and_indefinite() {
        let s = &(&y(0).square() + &y(1).square()) + &y(2).square();
        assert_eq!(classify(s), ShapeVerdict::IrreducibleDefinite { positive: true });
        let t = &(&y(0).square() + &y(1).square()) - &y(2).square();
        assert_eq!(classify(t), ShapeVerdict::IrreducibleIndefinite);
        let u = (&y(0).square() + &y(1).square()).scale(&rat(-1));
        assert_eq!(classify(u), ShapeVerdict::IrreducibleDefinite { positive: false });
        assert_eq!(classify(RatPoly::zero(3, 2)), ShapeVerdict::Zero);
    }

    #[test]
    fn gram_reproduces_form() {
        let p = RatPoly::from_int_terms(3, 2, &[(&[1, 1, 0], 3), (&[0, 0, 2], -1), (&[1, 0, 1], 1)]);
        let q = QuadForm::new(p.clone()).unwrap();
        assert_eq!(q.gram[0][1], ratio(3, 2));
        assert_eq!(QuadForm::from_gram(q.gram.clone()).unwrap().poly, p);
        assert_eq!(q.weighted_squares().to_poly(3), p);
        assert_eq!(q.rank, 3);
        let pts = [ratio(1, 3), rat(-2), ratio(5, 7)];
        let g = &q.gram;
        let mut quad = rat(0);
        for i in 0..3 {
            for j in 0..3 {
                quad += &g[i][j] * &pts[i] * &pts[j];
            }
        }
        assert_eq!(quad, p.eval(&pts));
    }

    #[test]
    fn numeric_signature() {
        let p = crate::FloatPoly::from_terms(2, 2, vec![(vec![2, 0], 1.0), (vec![1, 1], 4.0), (vec![0, 2], 1.0)])
            .unwrap();
        let q = QuadForm::new(p).unwrap();
        assert_eq!(q.signature, (1, 1));
    }
}
