//! Homogeneous multivariate polynomials with sparse, canonically ordered terms.

mod calculus;
mod divide;
pub mod json;
mod quad;
mod square;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use calculus::poly_calculus;
pub use divide::{gcd, gcd_all, normalize_integer, poly_divide, DivRem};
pub use quad::{quad_classify, LinearForm, QuadForm, ShapeVerdict, WeightedSquares};
pub use square::{perfect_square_test, SquareRoot};

/// Exponent vector of a monomial.
///
/// Ordered graded-lexicographically with `y1 < y2 < ... < yn`: after total
/// degree, the exponent of the last variable is the most significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other` when every exponent stays nonnegative.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Monomial)
    }

    pub fn is_even(&self) -> bool {
        self.0.iter().all(|e| e % 2 == 0)
    }

    pub fn eval_f64(&self, y: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(y)
            .map(|(&e, &v)| v.powi(e as i32))
            .product()
    }

    pub fn eval<S: Scalar>(&self, y: &[S]) -> S {
        let mut acc = S::one();
        for (&e, v) in self.0.iter().zip(y) {
            for _ in 0..e {
                acc = acc * v.clone();
            }
        }
        acc
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.iter().rev().cmp(other.0.iter().rev()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All exponent vectors of total degree `degree` in `nvars` variables, ascending.
pub fn monomials_of_degree(nvars: usize, degree: u32) -> Vec<Monomial> {
    fn rec(prefix: &mut Vec<u32>, left: usize, rem: u32, out: &mut Vec<Monomial>) {
        if left == 1 {
            prefix.push(rem);
            out.push(Monomial(prefix.clone()));
            prefix.pop();
            return;
        }
        for e in 0..=rem {
            prefix.push(e);
            rec(prefix, left - 1, rem - e, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        return out;
    }
    rec(&mut Vec::new(), nvars, degree, &mut out);
    out.sort();
    out
}

/// Homogeneous polynomial in `nvars` variables with coefficients in `S`.
///
/// Terms are stored sparsely; zero coefficients are never stored, and the zero
/// polynomial keeps its nominal degree.
#[derive(Clone, Debug, PartialEq)]
pub struct HomPoly<S> {
    nvars: usize,
    degree: u32,
    terms: BTreeMap<Monomial, S>,
}

/// Arithmetic operation accepted by [`poly_algebra`].
#[derive(Clone, Debug)]
pub enum PolyOp<S> {
    Add,
    Sub,
    Mul,
    Scale(S),
}

/// Checked polynomial arithmetic; `Scale` ignores `q`.
pub fn poly_algebra<S: Scalar>(
    p: &HomPoly<S>,
    q: &HomPoly<S>,
    op: PolyOp<S>,
) -> Result<HomPoly<S>> {
    match op {
        PolyOp::Add => p.checked_add(q),
        PolyOp::Sub => p.checked_sub(q),
        PolyOp::Mul => p.checked_mul(q),
        PolyOp::Scale(s) => Ok(p.scale(&s)),
    }
}

impl<S: Scalar> HomPoly<S> {
    pub fn zero(nvars: usize, degree: u32) -> Self {
        HomPoly {
            nvars,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: S) -> Self {
        let mut p = Self::zero(nvars, 0);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    /// The variable `y_{i+1}`.
    pub fn var(nvars: usize, i: usize) -> Self {
        Self::monomial(Monomial::var(nvars, i), S::one())
    }

    pub fn monomial(m: Monomial, c: S) -> Self {
        let mut p = Self::zero(m.nvars(), m.degree());
        p.add_term(m, c);
        p
    }

    /// Build from `(exponents, coefficient)` pairs, validating the invariants.
    pub fn from_terms<I>(nvars: usize, degree: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, S)>,
    {
        let mut p = Self::zero(nvars, degree);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::DimensionMismatch(format!(
                    "exponent {e:?} has length {} but nvars = {nvars}",
                    e.len()
                )));
            }
            let m = Monomial(e);
            if m.degree() != degree {
                return Err(Error::DimensionMismatch(format!(
                    "exponent {:?} has degree {} but polynomial degree is {degree}",
                    m.0,
                    m.degree()
                )));
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    /// Linear form `Σ c_i y_i`.
    pub fn linear(coeffs: &[S]) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(n, 1);
        for (i, c) in coeffs.iter().enumerate() {
            p.add_term(Monomial::var(n, i), c.clone());
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &S)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> S {
        self.terms.get(m).cloned().unwrap_or_else(S::zero)
    }

    pub fn coeff_of(&self, exps: &[u32]) -> S {
        self.coeff(&Monomial(exps.to_vec()))
    }

    /// Largest term in graded-lex order.
    pub fn leading_term(&self) -> Option<(&Monomial, &S)> {
        self.terms.iter().next_back()
    }

    /// Adds `c·m` in place, keeping the sparse form canonical.
    pub fn add_term(&mut self, m: Monomial, c: S) {
        debug_assert_eq!(m.nvars(), self.nvars);
        debug_assert_eq!(m.degree(), self.degree);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v = v.clone() + c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub(crate) fn remove_term(&mut self, m: &Monomial) {
        self.terms.remove(m);
    }

    fn check_compatible(&self, other: &Self, same_degree: bool) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch(format!(
                "nvars {} vs {}",
                self.nvars, other.nvars
            )));
        }
        if same_degree && self.degree != other.degree {
            return Err(Error::DimensionMismatch(format!(
                "degree {} vs {}",
                self.degree, other.degree
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other, true)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other, true)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other, false)?;
        let mut out = Self::zero(self.nvars, self.degree + other.degree);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1.clone() * c2.clone());
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut out = Self::zero(self.nvars, self.degree);
        if s.is_zero() {
            return out;
        }
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.clone() * s.clone());
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::constant(self.nvars, S::one());
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn eval(&self, y: &[S]) -> S {
        let mut acc = S::zero();
        for (m, c) in &self.terms {
            acc = acc + c.clone() * m.eval(y);
        }
        acc
    }

    pub fn eval_f64(&self, y: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| c.to_f64_lossy() * m.eval_f64(y))
            .sum()
    }

    /// Largest absolute coefficient (0 for the zero polynomial).
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.to_f64_lossy().abs())
            .fold(0.0, f64::max)
    }

    pub fn map_coeffs<T: Scalar>(&self, f: impl Fn(&S) -> T) -> HomPoly<T> {
        let mut out = HomPoly::zero(self.nvars, self.degree);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    pub fn to_f64(&self) -> HomPoly<f64> {
        self.map_coeffs(|c| c.to_f64_lossy())
    }

    /// Coefficient vector on the ascending monomial basis of this degree.
    pub fn coeff_vector(&self) -> Vec<f64> {
        monomials_of_degree(self.nvars, self.degree)
            .iter()
            .map(|m| self.coeff(m).to_f64_lossy())
            .collect()
    }

    /// Inverse of [`HomPoly::coeff_vector`].
    pub fn from_coeff_vector(nvars: usize, degree: u32, v: &[f64]) -> Self {
        let mut p = Self::zero(nvars, degree);
        for (m, c) in monomials_of_degree(nvars, degree).into_iter().zip(v) {
            p.add_term(m, S::from_f64_lossy(*c));
        }
        p
    }

    /// Substitute each variable by a polynomial of common degree (all in the same ring).
    pub fn compose(&self, subs: &[HomPoly<S>]) -> HomPoly<S> {
        assert_eq!(subs.len(), self.nvars, "one substitution per variable");
        let target_nvars = subs.first().map_or(0, |s| s.nvars);
        let sub_deg = subs.first().map_or(0, |s| s.degree);
        let mut out = HomPoly::zero(target_nvars, self.degree * sub_deg);
        for (m, c) in &self.terms {
            let mut t = HomPoly::constant(target_nvars, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    t = &t * &subs[i];
                }
            }
            out = &out + &t;
        }
        out
    }

    /// Re-embed into `new_nvars` variables, mapping variable `i` to `map[i]`.
    pub fn embed(&self, new_nvars: usize, map: &[usize]) -> HomPoly<S> {
        let mut out = HomPoly::zero(new_nvars, self.degree);
        for (m, c) in &self.terms {
            let mut e = vec![0; new_nvars];
            for (i, &x) in m.0.iter().enumerate() {
                e[map[i]] += x;
            }
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    /// Drop coefficients whose magnitude is at most `tol` (numeric clean-up).
    pub fn prune(&self, tol: f64) -> Self {
        let mut out = Self::zero(self.nvars, self.degree);
        for (m, c) in &self.terms {
            if c.to_f64_lossy().abs() > tol {
                out.add_term(m.clone(), c.clone());
            }
        }
        out
    }

    /// Human-readable form using the given variable names.
    pub fn display_with(&self, names: &[&str]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            let mono: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    let name = names
                        .get(i)
                        .map(|s| s.to_string())
                        .unwrap_or_else(|| format!("y{}", i + 1));
                    if e == 1 {
                        name
                    } else {
                        format!("{name}^{e}")
                    }
                })
                .collect();
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let is_one = abs == S::one();
            if mono.is_empty() {
                out.push_str(&format!("{abs}"));
            } else if is_one {
                out.push_str(&mono.join(" "));
            } else {
                out.push_str(&format!("{abs} {}", mono.join(" ")));
            }
        }
        out
    }
}

impl HomPoly<BigRational> {
    /// Exact rational polynomial from integer `(exponents, coefficient)` pairs.
    pub fn from_int_terms(nvars: usize, degree: u32, terms: &[(&[u32], i64)]) -> Self {
        Self::from_terms(
            nvars,
            degree,
            terms
                .iter()
                .map(|(e, c)| (e.to_vec(), crate::scalar::rat(*c))),
        )
        .expect("valid integer terms")
    }
}

impl<S: Scalar> fmt::Display for HomPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&[]))
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl<'a, S: Scalar> std::ops::$tr<&'a HomPoly<S>> for &'a HomPoly<S> {
            type Output = HomPoly<S>;
            fn $method(self, rhs: &'a HomPoly<S>) -> HomPoly<S> {
                self.$checked(rhs).expect("incompatible polynomials")
            }
        }
        impl<S: Scalar> std::ops::$tr<HomPoly<S>> for HomPoly<S> {
            type Output = HomPoly<S>;
            fn $method(self, rhs: HomPoly<S>) -> HomPoly<S> {
                self.$checked(&rhs).expect("incompatible polynomials")
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl<S: Scalar> std::ops::Neg for &HomPoly<S> {
    type Output = HomPoly<S>;
    fn neg(self) -> HomPoly<S> {
        self.scale(&-S::one())
    }
}

impl<S: Scalar> std::ops::Neg for HomPoly<S> {
    type Output = HomPoly<S>;
    fn neg(self) -> HomPoly<S> {
        self.scale(&-S::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use crate::RatPoly;

    fn y(i: usize) -> RatPoly {
        RatPoly::var(3, i)
    }

    #[test]
    fn graded_lex_order() {
        let a = Monomial::new(vec![4, 2, 0]);
        let b = Monomial::new(vec![0, 4, 2]);
        let c = Monomial::new(vec![6, 0, 0]);
        assert!(b > a);
        assert!(a > c);
        assert!(Monomial::new(vec![0, 0, 1]) < Monomial::new(vec![5, 0, 0]));
        let basis = monomials_of_degree(3, 6);
        assert_eq!(basis.len(), 28);
        assert_eq!(basis[0], c);
        assert_eq!(basis[27], Monomial::new(vec![0, 0, 6]));
        assert!(basis.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn algebra_examples() {
        let s = poly_algebra(&y(0).square(), &y(1).square(), PolyOp::Add).unwrap();
        assert_eq!(s.num_terms(), 2);
        let d = poly_algebra(&(&y(0) + &y(1)), &(&y(0) - &y(1)), PolyOp::Mul).unwrap();
        assert_eq!(d, &y(0).square() - &y(1).square());
        let p = &(&y(0).pow(4) * &y(1).square()) - &y(2).pow(6).scale(&rat(3));
        let z = poly_algebra(&p, &p, PolyOp::Sub).unwrap();
        assert!(z.is_zero());
        assert_eq!(z.degree(), 6);
    }

    #[test]
    fn mismatches_are_errors() {
        let a = y(0);
        let b = y(0).square();
        assert!(matches!(
            poly_algebra(&a, &b, PolyOp::Add),
            Err(Error::DimensionMismatch(_))
        ));
        let c = RatPoly::var(2, 0);
        assert!(poly_algebra(&a, &c, PolyOp::Mul).is_err());
        assert!(RatPoly::from_terms(3, 2, vec![(vec![1, 0, 0], rat(1))]).is_err());
        assert!(RatPoly::from_terms(3, 1, vec![(vec![1, 0], rat(1))]).is_err());
    }

    #[test]
    fn display_uses_explicit_exponents() {
        let p = RatPoly::from_int_terms(3, 6, &[(&[4, 2, 0], 1), (&[2, 2, 2], -3)]);
        assert_eq!(p.to_string(), "-3 y1^2 y2^2 y3^2 + y1^4 y2^2");
        assert_eq!(RatPoly::zero(3, 2).to_string(), "0");
    }

    #[test]
    fn compose_and_embed() {
        // (y1 + y2)^2 with y1 -> y2, y2 -> y3 in three variables
        let p = (&RatPoly::var(2, 0) + &RatPoly::var(2, 1)).square();
        let e = p.embed(3, &[1, 2]);
        assert_eq!(e, (&y(1) + &y(2)).square());
        let c = p.compose(&[y(0), y(0)]);
        assert_eq!(c, y(0).square().scale(&rat(4)));
    }
}
