//! JSON encoding of complex data: every complex number is a `[re, im]` pair, a
//! matrix is an array of rows.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::qstate::{c, CMatrix, CVector};

pub type RawMatrix = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_raw(m: &CMatrix) -> RawMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn matrix_from_raw(raw: &RawMatrix) -> Result<CMatrix> {
    let rows = raw.len();
    let cols = raw.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return Err(Error::parse("matrix", "matrix must be non-empty"));
    }
    if let Some(i) = raw.iter().position(|r| r.len() != cols) {
        return Err(Error::parse(
            format!("matrix row {i}"),
            format!("expected {cols} entries, found {}", raw[i].len()),
        ));
    }
    Ok(CMatrix::from_fn(rows, cols, |i, j| c(raw[i][j][0], raw[i][j][1])))
}

pub fn vector_to_raw(v: &CVector) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn vector_from_raw(raw: &[[f64; 2]]) -> Result<CVector> {
    if raw.is_empty() {
        return Err(Error::parse("vector", "vector must be non-empty"));
    }
    Ok(CVector::from_iterator(raw.len(), raw.iter().map(|p| c(p[0], p[1]))))
}

/// `#[serde(with = "crate::encoding::complex_matrix")]` for `CMatrix` fields.
pub mod complex_matrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &CMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
        matrix_to_raw(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<CMatrix, D::Error> {
        let raw = RawMatrix::deserialize(d)?;
        matrix_from_raw(&raw).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn matrix_json_roundtrip(rows in 1usize..5, cols in 1usize..5, vals in prop::collection::vec(-1e3f64..1e3, 50)) {
            let m = CMatrix::from_fn(rows, cols, |i, j| c(vals[i * 5 + j], vals[25 + i * 5 + j]));
            let text = serde_json::to_string(&matrix_to_raw(&m)).unwrap();
            let raw: RawMatrix = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(matrix_from_raw(&raw).unwrap(), m);
        }
    }

    #[test]
    fn ragged_rows_rejected() {
        let raw: RawMatrix = vec![vec![[1.0, 0.0]], vec![[0.0, 0.0], [1.0, 0.0]]];
        assert!(matrix_from_raw(&raw).is_err());
    }
}
