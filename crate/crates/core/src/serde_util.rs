//! Serde adapters that store matrices row-major with explicit dimensions.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Matrix, Vector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixData {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl From<&Matrix> for MatrixData {
    fn from(m: &Matrix) -> Self {
        let data = (0..m.nrows())
            .flat_map(|i| (0..m.ncols()).map(move |k| (i, k)))
            .map(|(i, k)| m[(i, k)])
            .collect();
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        }
    }
}

impl MatrixData {
    pub fn to_matrix(&self) -> Result<Matrix, String> {
        if self.data.len() != self.rows * self.cols {
            return Err(format!(
                "matrix declares {}x{} but holds {} entries",
                self.rows,
                self.cols,
                self.data.len()
            ));
        }
        Ok(Matrix::from_row_slice(self.rows, self.cols, &self.data))
    }
}

pub mod matrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &Matrix, s: S) -> Result<S::Ok, S::Error> {
        MatrixData::from(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Matrix, D::Error> {
        MatrixData::deserialize(d)?
            .to_matrix()
            .map_err(serde::de::Error::custom)
    }
}

pub mod vector {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Vector, s: S) -> Result<S::Ok, S::Error> {
        v.as_slice().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vector, D::Error> {
        Ok(Vector::from_vec(Vec::<f64>::deserialize(d)?))
    }
}

pub mod vectors {
    use super::*;

    pub fn serialize<S: Serializer>(vs: &[Vector], s: S) -> Result<S::Ok, S::Error> {
        let raw: Vec<&[f64]> = vs.iter().map(|v| v.as_slice()).collect();
        raw.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vector>, D::Error> {
        Ok(Vec::<Vec<f64>>::deserialize(d)?
            .into_iter()
            .map(Vector::from_vec)
            .collect())
    }
}
