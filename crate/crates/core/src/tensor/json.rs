//! JSON form `{"d", "entries": [{"i", "j", "k", "l", "value"}], "strict"}`
//! with one-based indices.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{canonicalize_tensor, CanonOptions, ElastTensor};
use crate::error::{Error, Result};
use crate::poly::json::{coeff_from_json, coeff_to_json};

#[derive(Serialize, Deserialize)]
struct EntryRepr {
    i: usize,
    j: usize,
    k: usize,
    l: usize,
    value: Value,
}

#[derive(Serialize, Deserialize)]
struct TensorRepr {
    d: usize,
    entries: Vec<EntryRepr>,
    #[serde(default)]
    strict: bool,
}

/// Canonical JSON: one entry per stored orbit, smallest member, exact values.
pub fn tensor_to_json(t: &ElastTensor) -> Value {
    let repr = TensorRepr {
        d: t.dim(),
        entries: t
            .components()
            .map(|(q, v)| EntryRepr {
                i: q[0] + 1,
                j: q[1] + 1,
                k: q[2] + 1,
                l: q[3] + 1,
                value: coeff_to_json(v),
            })
            .collect(),
        strict: false,
    };
    serde_json::to_value(repr).expect("tensor serializes")
}

pub fn tensor_from_value(v: &Value) -> Result<ElastTensor> {
    let repr = TensorRepr::deserialize(v).map_err(|e| Error::Parse(e.to_string()))?;
    let raw = repr
        .entries
        .iter()
        .map(|e| Ok((e.i, e.j, e.k, e.l, coeff_from_json(&e.value)?)))
        .collect::<Result<Vec<_>>>()?;
    canonicalize_tensor(repr.d, &raw, CanonOptions { strict: repr.strict })
}

pub fn tensor_from_str(s: &str) -> Result<ElastTensor> {
    let v: Value = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    tensor_from_value(&v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::corpus::corpus;

    #[test]
    fn round_trip() {
        for name in ["choi-lam", "remark25", "null-lagrangian", "diag-convex"] {
            let t = corpus(name).unwrap();
            let v = tensor_to_json(&t);
            let back = tensor_from_value(&v).unwrap();
            assert_eq!(back, t, "{name}");
            assert_eq!(tensor_to_json(&back), v);
        }
    }

    #[test]
    fn strict_flag_is_honored() {
        let text = r#"{"d":3,"strict":true,"entries":[
            {"i":1,"j":1,"k":2,"l":2,"value":"1"},
            {"i":2,"j":2,"k":1,"l":1,"value":"2"}]}"#;
        assert!(matches!(tensor_from_str(text), Err(Error::ConflictingAssignment { .. })));
        let lax = text.replace("true", "false");
        assert!(tensor_from_str(&lax).is_ok());
    }
}
