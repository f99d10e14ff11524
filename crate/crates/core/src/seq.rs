//! Double-indexed sequences `a_{j,l}`, `j >= 1`, `0 <= l < K^{j+2}`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::means::lq_norm;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DoubleIndexSeq {
    k: u32,
    /// `rows[j - 1]` holds row `j`.
    rows: Vec<Vec<f64>>,
}

impl DoubleIndexSeq {
    pub fn new(k: u32, rows: Vec<Vec<f64>>) -> Result<Self> {
        if k < 2 {
            return Err(Error::Invalid(format!("K must be at least 2, got {k}")));
        }
        for (i, row) in rows.iter().enumerate() {
            let want = row_len(k, i + 1);
            if row.len() != want {
                return Err(Error::Invalid(format!(
                    "row {} has {} entries, expected K^(j+2) = {want}",
                    i + 1,
                    row.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::Invalid("sequence entries must be finite".into()));
            }
        }
        Ok(Self { k, rows })
    }

    pub fn from_fn<F: FnMut(usize, usize) -> f64>(k: u32, j_max: usize, mut f: F) -> Result<Self> {
        let rows = (1..=j_max)
            .map(|j| (0..row_len(k, j)).map(|l| f(j, l)).collect())
            .collect();
        Self::new(k, rows)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn j_max(&self) -> usize {
        self.rows.len()
    }

    /// Row `j` (1-based).
    pub fn row(&self, j: usize) -> &[f64] {
        &self.rows[j - 1]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn get(&self, j: usize, l: usize) -> f64 {
        self.rows[j - 1][l]
    }

    /// Entrywise product with another sequence of the same shape.
    pub fn hadamard(&self, other: &Self) -> Result<Self> {
        if self.k != other.k || self.j_max() != other.j_max() {
            return Err(Error::Invalid("sequence shapes differ".into()));
        }
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x * y).collect())
            .collect();
        Ok(Self { k: self.k, rows })
    }

    /// `l^p` norm of every row.
    pub fn row_norms(&self, p: f64) -> Vec<f64> {
        self.rows.iter().map(|r| lq_norm(r, p)).collect()
    }
}

pub fn row_len(k: u32, j: usize) -> usize {
    (k as usize).pow(j as u32 + 2)
}

/// `|| (|| a_{j,.} ||_{l^p})_j ||_{l^q}`.
pub fn lpq_norm(a: &DoubleIndexSeq, p: f64, q: f64) -> f64 {
    lq_norm(&a.row_norms(p), q)
}
