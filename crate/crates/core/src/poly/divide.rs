//! Division with remainder and exact gcd for homogeneous polynomials.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{HomPoly, Monomial};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Quotient and remainder of a multivariate division.
#[derive(Clone, Debug, PartialEq)]
pub struct DivRem<S> {
    pub quotient: HomPoly<S>,
    pub remainder: HomPoly<S>,
}

impl<S: Scalar> HomPoly<S> {
    /// Graded-lex division `self = quotient·q + remainder`.
    ///
    /// No term of the remainder is divisible by the leading monomial of `q`,
    /// so the remainder is zero exactly when `q` divides `self`.
    pub fn div_rem(&self, q: &HomPoly<S>) -> Result<DivRem<S>> {
        if self.nvars() != q.nvars() {
            return Err(Error::DimensionMismatch(format!(
                "nvars {} vs {}",
                self.nvars(),
                q.nvars()
            )));
        }
        let (lm, lc) = match q.leading_term() {
            Some((m, c)) => (m.clone(), c.clone()),
            None => return Err(Error::PreconditionViolated("division by zero polynomial".into())),
        };
        let n = self.nvars();
        if q.degree() > self.degree() {
            return Ok(DivRem {
                quotient: HomPoly::zero(n, 0),
                remainder: self.clone(),
            });
        }
        let mut quotient = HomPoly::zero(n, self.degree() - q.degree());
        let mut remainder = HomPoly::zero(n, self.degree());
        let mut work = self.clone();
        while let Some((m, c)) = work.leading_term().map(|(m, c)| (m.clone(), c.clone())) {
            match m.div(&lm) {
                Some(shift) => {
                    let t = c / lc.clone();
                    quotient.add_term(shift.clone(), t.clone());
                    for (qm, qc) in q.terms() {
                        work.add_term(qm.mul(&shift), -(t.clone() * qc.clone()));
                    }
                    // guard against rounding leaving the leading term behind
                    work.remove_term(&m);
                }
                None => {
                    remainder.add_term(m.clone(), c);
                    work.remove_term(&m);
                }
            }
        }
        Ok(DivRem {
            quotient,
            remainder,
        })
    }

    /// Exact quotient when `q` divides `self`.
    pub fn exact_div(&self, q: &HomPoly<S>) -> Option<HomPoly<S>> {
        let dr = self.div_rem(q).ok()?;
        dr.remainder.is_zero().then_some(dr.quotient)
    }

    /// Highest power of variable `v` present.
    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms().map(|(m, _)| m.exps()[v]).max().unwrap_or(0)
    }

    /// Terms whose exponent of `v` equals `k`, with that factor removed.
    pub fn slice_in(&self, v: usize, k: u32) -> HomPoly<S> {
        let mut out = HomPoly::zero(self.nvars(), self.degree() - k);
        for (m, c) in self.terms() {
            if m.exps()[v] == k {
                let mut e = m.exps().to_vec();
                e[v] = 0;
                out.add_term(Monomial::new(e), c.clone());
            }
        }
        out
    }

    fn highest_var(&self) -> Option<usize> {
        (0..self.nvars())
            .rev()
            .find(|&v| self.terms().any(|(m, _)| m.exps()[v] > 0))
    }
}

/// Exact division: `Some(quotient)` when `q` divides `p`, `None` otherwise.
pub fn poly_divide<S: Scalar>(p: &HomPoly<S>, q: &HomPoly<S>) -> Result<Option<HomPoly<S>>> {
    if !S::EXACT {
        return Err(Error::ModeError);
    }
    if q.is_zero() {
        return Err(Error::PreconditionViolated("division by zero polynomial".into()));
    }
    Ok(p.exact_div(q))
}

type Rp = HomPoly<BigRational>;

fn var_pow(n: usize, v: usize, k: u32) -> Rp {
    let mut e = vec![0; n];
    e[v] = k;
    HomPoly::monomial(Monomial::new(e), BigRational::one())
}

/// Scale to integer coefficients with unit content and positive leading coefficient.
pub fn normalize_integer(p: &Rp) -> Rp {
    if p.is_zero() {
        return p.clone();
    }
    let mut den = BigInt::one();
    for (_, c) in p.terms() {
        den = den.lcm(c.denom());
    }
    let mut g = BigInt::zero();
    for (_, c) in p.terms() {
        let v = c.numer() * (&den / c.denom());
        g = g.gcd(&v);
    }
    let mut s = BigRational::new(den, g);
    if p.leading_term().is_some_and(|(_, c)| c.is_negative()) {
        s = -s;
    }
    p.scale(&s)
}

fn content_in(p: &Rp, v: usize) -> Rp {
    let mut g: Option<Rp> = None;
    for k in (0..=p.degree_in(v)).rev() {
        let s = p.slice_in(v, k);
        if s.is_zero() {
            continue;
        }
        g = Some(match g {
            None => normalize_integer(&s),
            Some(g) => gcd_rec(&g, &s, v.checked_sub(1)),
        });
    }
    g.unwrap_or_else(|| HomPoly::zero(p.nvars(), 0))
}

fn primitive_in(p: &Rp, v: usize) -> Rp {
    let c = content_in(p, v);
    p.exact_div(&c).expect("content divides")
}

fn prem(a: &Rp, b: &Rp, v: usize) -> Rp {
    let n = a.nvars();
    let db = b.degree_in(v);
    let lcb = b.slice_in(v, db);
    let mut r = a.clone();
    let mut e = a.degree_in(v) as i64 - db as i64 + 1;
    while !r.is_zero() && r.degree_in(v) >= db {
        let dr = r.degree_in(v);
        let lr = r.slice_in(v, dr);
        let s = &lr * &var_pow(n, v, dr - db);
        r = &(&lcb * &r) - &(&s * b);
        e -= 1;
    }
    if e > 0 {
        r = &lcb.pow(e as u32) * &r;
    }
    r
}

/// gcd of polynomials involving only variables `0..=top`.
fn gcd_rec(a: &Rp, b: &Rp, top: Option<usize>) -> Rp {
    let n = a.nvars();
    if a.is_zero() {
        return normalize_integer(b);
    }
    if b.is_zero() {
        return normalize_integer(a);
    }
    let v = match top {
        None => return HomPoly::constant(n, BigRational::one()),
        Some(v) => v,
    };
    let below = v.checked_sub(1);
    let c = gcd_rec(&content_in(a, v), &content_in(b, v), below);
    let (mut pa, mut pb) = (primitive_in(a, v), primitive_in(b, v));
    if pa.degree_in(v) < pb.degree_in(v) {
        std::mem::swap(&mut pa, &mut pb);
    }
    while !pb.is_zero() {
        if pb.degree_in(v) == 0 {
            pa = HomPoly::constant(n, BigRational::one());
            break;
        }
        let r = prem(&pa, &pb, v);
        pa = pb;
        pb = if r.is_zero() { r } else { primitive_in(&r, v) };
    }
    normalize_integer(&(&c * &pa))
}

/// Greatest common divisor over the rationals, normalized to integer
/// coefficients with unit content and positive leading coefficient.
pub fn gcd(a: &Rp, b: &Rp) -> Rp {
    assert_eq!(a.nvars(), b.nvars(), "gcd of polynomials in different rings");
    let top = a.highest_var().into_iter().chain(b.highest_var()).max();
    gcd_rec(a, b, top)
}

/// gcd of a list (zero entries are skipped; all-zero gives the zero polynomial).
pub fn gcd_all<'a>(items: impl IntoIterator<Item = &'a Rp>) -> Option<Rp> {
    let mut acc: Option<Rp> = None;
    for p in items {
        if p.is_zero() {
            continue;
        }
        acc = Some(match acc {
            None => normalize_integer(p),
            Some(g) => gcd(&g, p),
        });
    }
    acc
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
    fn division_examples() {
        let p = &y(0).square() * &y(1);
        assert_eq!(poly_divide(&p, &y(0)).unwrap(), Some(&y(0) * &y(1)));
        let p = &y(0).pow(3) + &(&y(0) * &y(1).square());
        assert_eq!(
            poly_divide(&p, &y(0)).unwrap(),
            Some(&y(0).square() + &y(1).square())
        );
        let p = &y(0).pow(3) + &y(1).pow(3);
        assert_eq!(poly_divide(&p, &(&y(0) * &y(1))).unwrap(), None);
    }

    #[test]
    fn numeric_mode_rejected() {
        let p = crate::FloatPoly::var(2, 0);
        assert_eq!(poly_divide(&p, &p), Err(Error::ModeError));
    }

    #[test]
    fn remainder_identity() {
        let p = &(&y(0) + &y(2)).pow(3) + &y(1).pow(3);
        let q = &y(0).square() - &(&y(1) * &y(2));
        let dr = p.div_rem(&q).unwrap();
        assert_eq!(&(&dr.quotient * &q) + &dr.remainder, p);
    }

    #[test]
    fn gcd_recovers_common_factor() {
        let common = &(&y(0) + &y(1).scale(&rat(2))) * &(&y(2) - &y(0));
        let a = &common * &(&y(0).square() + &y(2).square());
        let b = &common * &(&y(1) + &y(2).scale(&rat(3)));
        let g = gcd(&a, &b);
        assert_eq!(g, normalize_integer(&common));
        let one = gcd(&y(0).square(), &y(1));
        assert_eq!(one, RatPoly::constant(3, rat(1)));
        assert_eq!(gcd(&y(0).pow(3), &(&y(0).square() * &y(1))), y(0).square());
    }

    #[test]
    fn normalization_is_primitive() {
        let p = (&y(0).scale(&crate::scalar::ratio(-2, 3)) + &y(1).scale(&crate::scalar::ratio(4, 9)))
            .scale(&rat(1));
        let n = normalize_integer(&p);
        // -6 y1 + 4 y2 over 9 -> 3 y1 - 2 y2 with positive leading term y2 coefficient
        assert_eq!(n, &y(1).scale(&rat(2)) - &y(0).scale(&rat(3)));
    }
}
