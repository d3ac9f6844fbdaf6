//! Coefficient scalars.
//!
//! Polynomials and matrices are generic over [`Scalar`]; the exact mode uses
//! [`BigRational`], the numeric mode `f64` (or `f32`).

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// A coefficient field usable by [`crate::HomPoly`].
pub trait Scalar:
    Num + Signed + Clone + PartialOrd + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    /// `true` when arithmetic is exact (no rounding).
    const EXACT: bool;

    fn from_rational(r: &BigRational) -> Self;
    fn from_f64_lossy(v: f64) -> Self;
    fn to_f64_lossy(&self) -> f64;
    /// Exact rational value (`None` for non-finite floats).
    fn to_rational(&self) -> Option<BigRational>;

    /// Square root inside the field, if it exists there.
    fn sqrt_exact(&self) -> Option<Self>;

    fn from_i64(v: i64) -> Self {
        Self::from_f64_lossy(v as f64)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn from_f64_lossy(v: f64) -> Self {
        BigRational::from_f64(v).unwrap_or_else(BigRational::zero)
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn to_rational(&self) -> Option<BigRational> {
        Some(self.clone())
    }

    fn sqrt_exact(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = int_sqrt(self.numer())?;
        let d = int_sqrt(self.denom())?;
        Some(BigRational::new(n, d))
    }

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
}

fn int_sqrt(v: &BigInt) -> Option<BigInt> {
    let r = v.sqrt();
    (&r * &r == *v).then_some(r)
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn from_rational(r: &BigRational) -> Self {
                r.to_f64().unwrap_or(f64::NAN) as $t
            }

            fn from_f64_lossy(v: f64) -> Self {
                v as $t
            }

            fn to_f64_lossy(&self) -> f64 {
                *self as f64
            }

            fn to_rational(&self) -> Option<BigRational> {
                BigRational::from_f64(*self as f64)
            }

            fn sqrt_exact(&self) -> Option<Self> {
                (*self >= 0.0).then(|| self.sqrt())
            }
        }
    };
}

float_scalar!(f64);
float_scalar!(f32);

/// Rational from an integer.
pub fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Rational `n/d`.
pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Parse `"p/q"` or `"p"` into a reduced rational with positive denominator.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            (!d.is_zero()).then(|| BigRational::new(n, d))
        }
        None => {
            if let Ok(n) = s.parse::<BigInt>() {
                return Some(BigRational::from_integer(n));
            }
            // decimal literal such as "0.25"
            let v: f64 = s.parse().ok()?;
            let (int, frac) = s.trim_start_matches('-').split_once('.')?;
            let digits = frac.len() as u32;
            let num: BigInt = format!("{int}{frac}").parse().ok()?;
            let den = BigInt::from(10u32).pow(digits);
            let r = BigRational::new(num, den);
            Some(if v < 0.0 { -r } else { r })
        }
    }
}

/// Best rational approximation of `x` with denominator at most `max_den`.
pub fn rationalize(x: f64, max_den: u64) -> BigRational {
    assert!(x.is_finite(), "cannot rationalize {x}");
    let neg = x < 0.0;
    let mut v = x.abs();
    let (mut p0, mut q0, mut p1, mut q1): (i128, i128, i128, i128) = (0, 1, 1, 0);
    let max_den = max_den.max(1) as i128;
    for _ in 0..64 {
        let a = v.floor();
        if a > 1e30 {
            break;
        }
        let a_i = a as i128;
        let q2 = a_i * q1 + q0;
        if q2 > max_den {
            // semiconvergent
            let k = (max_den - q0) / q1.max(1);
            let (ps, qs) = (k * p1 + p0, k * q1 + q0);
            let semi = ps as f64 / qs as f64;
            let conv = if q1 == 0 { f64::INFINITY } else { p1 as f64 / q1 as f64 };
            if qs > 0 && (semi - x.abs()).abs() < (conv - x.abs()).abs() {
                p1 = ps;
                q1 = qs;
            }
            break;
        }
        let p2 = a_i * p1 + p0;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = v - a;
        if frac <= f64::EPSILON * v.max(1.0) {
            break;
        }
        v = 1.0 / frac;
    }
    if q1 == 0 {
        q1 = 1;
    }
    let r = BigRational::new(BigInt::from(p1), BigInt::from(q1));
    if neg {
        -r
    } else {
        r
    }
}

/// Shortest continued-fraction convergent within relative accuracy `10^-digits`.
pub fn rationalize_digits(x: f64, digits: i32) -> BigRational {
    assert!(x.is_finite(), "cannot rationalize {x}");
    let tol = 10f64.powi(-digits) * x.abs().max(1.0);
    let neg = x < 0.0;
    let target = x.abs();
    let mut v = target;
    let (mut p0, mut q0, mut p1, mut q1): (i128, i128, i128, i128) = (0, 1, 1, 0);
    for _ in 0..64 {
        let a = v.floor();
        if a > 1e30 {
            break;
        }
        let a_i = a as i128;
        let (p2, q2) = (a_i * p1 + p0, a_i * q1 + q0);
        if q2 > (1i128 << 100) {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        if (p1 as f64 / q1 as f64 - target).abs() <= tol {
            break;
        }
        let frac = v - a;
        if frac <= 0.0 {
            break;
        }
        v = 1.0 / frac;
    }
    if q1 == 0 {
        q1 = 1;
    }
    let r = BigRational::new(BigInt::from(p1), BigInt::from(q1));
    if neg {
        -r
    } else {
        r
    }
}

/// `1` in any scalar type.
pub fn one<S: Scalar>() -> S {
    S::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_square_roots() {
        assert_eq!(ratio(9, 4).sqrt_exact(), Some(ratio(3, 2)));
        assert_eq!(rat(2).sqrt_exact(), None);
        assert_eq!(rat(-4).sqrt_exact(), None);
        assert_eq!(4.0f64.sqrt_exact(), Some(2.0));
    }

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("6/-4"), Some(ratio(-3, 2)));
        assert_eq!(parse_rational("7"), Some(rat(7)));
        assert_eq!(parse_rational("-0.25"), Some(ratio(-1, 4)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(format!("{}", ratio(-3, 2)), "-3/2");
        assert_eq!(format!("{}", rat(5)), "5");
    }

    #[test]
    fn rationalization() {
        assert_eq!(rationalize(0.5, 1_000_000), ratio(1, 2));
        assert_eq!(rationalize(-2.0 / 3.0, 1_000_000), ratio(-2, 3));
        let pi = rationalize(std::f64::consts::PI, 1000);
        assert_eq!(pi, ratio(355, 113));
        assert_eq!(rationalize_digits(0.1 + 0.2, 12), ratio(3, 10));
        assert_eq!(rationalize_digits(1.0 - 1e-17, 12), rat(1));
        assert_eq!(rationalize_digits(3.0, 12), rat(3));
    }
}
