//! JSON form `{"nvars", "degree", "terms": [{"exp", "coeff"}]}`.
//!
//! Exact coefficients are written as reduced `"p/q"` strings (`"p"` for
//! integers); floating coefficients as JSON numbers. Both are accepted on input.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use super::{HomPoly, Monomial};
use crate::error::{Error, Result};
use crate::scalar::{parse_rational, Scalar};

#[derive(Serialize, Deserialize)]
struct TermRepr {
    exp: Vec<u32>,
    coeff: Value,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    nvars: usize,
    degree: u32,
    terms: Vec<TermRepr>,
}

/// JSON value for a single coefficient.
pub fn coeff_to_json<S: Scalar>(c: &S) -> Value {
    if S::EXACT {
        Value::String(c.to_string())
    } else {
        serde_json::Number::from_f64(c.to_f64_lossy())
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }
}

/// `serialize_with` adapter for scalar fields.
pub fn ser_scalar<S: Scalar, Z: Serializer>(c: &S, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
    coeff_to_json(c).serialize(s)
}

/// Parse a coefficient given as `"p/q"`, `"p"`, a decimal string, or a number.
pub fn coeff_from_json<S: Scalar>(v: &Value) -> Result<S> {
    match v {
        Value::String(s) => parse_rational(s)
            .map(|r| S::from_rational(&r))
            .ok_or_else(|| Error::Parse(format!("bad coefficient {s:?}"))),
        Value::Number(n) => n
            .as_f64()
            .map(S::from_f64_lossy)
            .ok_or_else(|| Error::Parse(format!("bad coefficient {n}"))),
        other => Err(Error::Parse(format!("bad coefficient {other}"))),
    }
}

impl<S: Scalar> Serialize for HomPoly<S> {
    fn serialize<Z: Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        PolyRepr {
            nvars: self.nvars(),
            degree: self.degree(),
            terms: self
                .terms()
                .map(|(m, c)| TermRepr {
                    exp: m.exps().to_vec(),
                    coeff: coeff_to_json(c),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for HomPoly<S> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = PolyRepr::deserialize(d)?;
        from_repr(repr).map_err(D::Error::custom)
    }
}

fn from_repr<S: Scalar>(repr: PolyRepr) -> Result<HomPoly<S>> {
    if repr.nvars == 0 {
        return Err(Error::Parse("nvars must be positive".into()));
    }
    let mut seen = std::collections::BTreeSet::new();
    let mut terms = Vec::with_capacity(repr.terms.len());
    for t in repr.terms {
        if !seen.insert(Monomial::new(t.exp.clone())) {
            return Err(Error::Parse(format!("duplicate exponent {:?}", t.exp)));
        }
        terms.push((t.exp, coeff_from_json::<S>(&t.coeff)?));
    }
    HomPoly::from_terms(repr.nvars, repr.degree, terms)
}

/// Parse a polynomial from JSON text.
pub fn poly_from_str<S: Scalar>(s: &str) -> Result<HomPoly<S>> {
    let repr: PolyRepr = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    from_repr(repr)
}

/// Parse a polynomial from a JSON value.
pub fn poly_from_value<S: Scalar>(v: &Value) -> Result<HomPoly<S>> {
    let repr = PolyRepr::deserialize(v).map_err(|e| Error::Parse(e.to_string()))?;
    from_repr(repr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use crate::{FloatPoly, RatPoly};

    #[test]
    fn exact_round_trip() {
        let p = RatPoly::from_terms(
            3,
            2,
            vec![(vec![2, 0, 0], ratio(-3, 6)), (vec![0, 1, 1], ratio(7, 1))],
        )
        .unwrap();
        let text = serde_json::to_string(&p).unwrap();
        assert!(text.contains("\"-1/2\""));
        assert!(text.contains("\"7\""));
        let back: RatPoly = poly_from_str(&text).unwrap();
        assert_eq!(back, p);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    #[test]
    fn float_and_mixed_input() {
        let text = r#"{"nvars":2,"degree":2,"terms":[{"exp":[2,0],"coeff":0.5},{"exp":[1,1],"coeff":"3/4"}]}"#;
        let p: RatPoly = poly_from_str(text).unwrap();
        assert_eq!(p.coeff_of(&[2, 0]), ratio(1, 2));
        let f: FloatPoly = poly_from_str(text).unwrap();
        assert_eq!(f.coeff_of(&[1, 1]), 0.75);
    }

    #[test]
    fn invalid_input_rejected() {
        for bad in [
            r#"{"nvars":2,"degree":2,"terms":[{"exp":[2,1],"coeff":"1"}]}"#,
            r#"{"nvars":2,"degree":2,"terms":[{"exp":[2],"coeff":"1"}]}"#,
            r#"{"nvars":2,"degree":2,"terms":[{"exp":[2,0],"coeff":"x"}]}"#,
            r#"{"nvars":2,"degree":2,"terms":[{"exp":[2,0],"coeff":"1"},{"exp":[2,0],"coeff":"1"}]}"#,
            r#"{"nvars":0,"degree":0,"terms":[]}"#,
        ] {
            assert!(poly_from_str::<num_rational::BigRational>(bad).is_err(), "{bad}");
        }
    }
}
