//! JSON and CSV encodings shared by the library types and the CLI.

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix, ComplexVector};

/// Significant digits kept for every float in emitted JSON.
pub const JSON_SIG_DIGITS: usize = 12;

pub fn vector_to_pairs(v: &ComplexVector) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn pairs_to_vector(pairs: &[[f64; 2]]) -> ComplexVector {
    ComplexVector::from_iterator(pairs.len(), pairs.iter().map(|p| c(p[0], p[1])))
}

pub fn matrix_to_pairs(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    m.row_iter().map(|row| row.iter().map(|z| [z.re, z.im]).collect()).collect()
}

/// Serde adapter: `Vec<ComplexVector>` as `[[[re, im], ...], ...]`.
pub mod vectors {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[ComplexVector], s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<_> = v.iter().map(vector_to_pairs).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<ComplexVector>, D::Error> {
        let pairs: Vec<Vec<[f64; 2]>> = Vec::deserialize(d)?;
        Ok(pairs.iter().map(|p| pairs_to_vector(p)).collect())
    }
}

/// Serde adapter: `Option<ComplexVector>` as `[[re, im], ...]` or null.
pub mod opt_vector {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<ComplexVector>, s: S) -> std::result::Result<S::Ok, S::Error> {
        v.as_ref().map(vector_to_pairs).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<ComplexVector>, D::Error> {
        let pairs: Option<Vec<[f64; 2]>> = Option::deserialize(d)?;
        Ok(pairs.map(|p| pairs_to_vector(&p)))
    }
}

/// Serde adapter: `Vec<Vec<ComplexVector>>` (product states as factor lists).
pub mod factor_lists {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Vec<ComplexVector>], s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<Vec<_>> = v.iter().map(|st| st.iter().map(vector_to_pairs).collect()).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<ComplexVector>>, D::Error> {
        let pairs: Vec<Vec<Vec<[f64; 2]>>> = Vec::deserialize(d)?;
        Ok(pairs
            .iter()
            .map(|st| st.iter().map(|p| pairs_to_vector(p)).collect())
            .collect())
    }
}

/// Serde adapter: `Option<Vec<ComplexVector>>` (one product state) or null.
pub mod opt_factors {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<ComplexVector>>, s: S) -> std::result::Result<S::Ok, S::Error> {
        v.as_ref()
            .map(|f| f.iter().map(vector_to_pairs).collect::<Vec<_>>())
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Vec<ComplexVector>>, D::Error> {
        let pairs: Option<Vec<Vec<[f64; 2]>>> = Option::deserialize(d)?;
        Ok(pairs.map(|f| f.iter().map(|p| pairs_to_vector(p)).collect()))
    }
}

/// Serde adapter: `ComplexMatrix` as rows of `[re, im]` pairs.
pub mod matrix {
    use super::*;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &ComplexMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
        matrix_to_pairs(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<ComplexMatrix, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(d)?;
        let n = rows.len();
        let m = rows.first().map(|r| r.len()).unwrap_or(0);
        if rows.iter().any(|r| r.len() != m) {
            return Err(D::Error::custom("ragged matrix rows"));
        }
        Ok(ComplexMatrix::from_fn(n, m, |i, j| c(rows[i][j][0], rows[i][j][1])))
    }
}

/// Rounds to `digits` significant digits; non-finite values pass through.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{:.*e}", digits - 1, x).parse().unwrap_or(x)
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().unwrap_or(0.0), JSON_SIG_DIGITS);
            *v = serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null);
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Canonical JSON: keys sorted, floats rounded to 12 significant digits,
/// pretty-printed with a trailing newline. Identical input gives identical
/// bytes.
pub fn to_canonical_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value).map_err(|e| Error::Invalid(e.to_string()))?;
    round_value(&mut v);
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| Error::Invalid(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// One CSV row per vector: `index,re_0,im_0,re_1,im_1,...`.
pub fn vectors_to_csv(vectors: &[ComplexVector]) -> String {
    let dim = vectors.first().map(|v| v.len()).unwrap_or(0);
    let mut out = String::from("index");
    for k in 0..dim {
        out.push_str(&format!(",re_{k},im_{k}"));
    }
    out.push('\n');
    for (i, v) in vectors.iter().enumerate() {
        out.push_str(&i.to_string());
        for z in v.iter() {
            out.push_str(&format!(",{},{}", fmt_float(z.re), fmt_float(z.im)));
        }
        out.push('\n');
    }
    out
}

/// Float text used in CSV output (12 significant digits, shortest form).
pub fn fmt_float(x: f64) -> String {
    format!("{}", round_sig(x, JSON_SIG_DIGITS))
}
