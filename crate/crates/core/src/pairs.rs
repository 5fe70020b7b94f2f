use ndarray::{Array2, Axis};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::stats::{DifferenceVector, StatsError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PairSetError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("non-finite embedding value at pair {pair}, dimension {dimension}")]
    NonFinite { pair: usize, dimension: usize },
    #[error("pair set is empty")]
    Empty,
}

/// Provenance carried alongside the embedding matrices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingMeta {
    pub model_tag: String,
    pub property: String,
    pub source_hash: String,
    pub pooling: String,
    pub layer: String,
}

impl EmbeddingMeta {
    pub fn new(model_tag: impl Into<String>, property: impl Into<String>) -> Self {
        Self {
            model_tag: model_tag.into(),
            property: property.into(),
            source_hash: String::new(),
            pooling: "mean".into(),
            layer: "final".into(),
        }
    }
}

/// `n_pairs` aligned sentence pairs, stored as two row-major `n_pairs x dim`
/// float32 matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingPairSet {
    pub meta: EmbeddingMeta,
    n_pairs: usize,
    dim: usize,
    s1: Vec<f32>,
    s2: Vec<f32>,
}

impl EmbeddingPairSet {
    pub fn new(meta: EmbeddingMeta, dim: usize, s1: Vec<f32>, s2: Vec<f32>) -> Result<Self, PairSetError> {
        if dim == 0 {
            return Err(PairSetError::ShapeMismatch("dim must be positive".into()));
        }
        if s1.len() != s2.len() || !s1.len().is_multiple_of(dim) {
            return Err(PairSetError::ShapeMismatch(format!(
                "s1 has {} values, s2 has {}, dim is {dim}",
                s1.len(),
                s2.len()
            )));
        }
        let n_pairs = s1.len() / dim;
        if n_pairs == 0 {
            return Err(PairSetError::Empty);
        }
        for (i, (a, b)) in s1.iter().zip(&s2).enumerate() {
            if !a.is_finite() || !b.is_finite() {
                return Err(PairSetError::NonFinite { pair: i / dim, dimension: i % dim });
            }
        }
        Ok(Self { meta, n_pairs, dim, s1, s2 })
    }

    pub fn n_pairs(&self) -> usize {
        self.n_pairs
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn property(&self) -> &str {
        &self.meta.property
    }

    pub fn s1_raw(&self) -> &[f32] {
        &self.s1
    }

    pub fn s2_raw(&self) -> &[f32] {
        &self.s2
    }

    pub fn s1_row(&self, pair: usize) -> &[f32] {
        &self.s1[pair * self.dim..(pair + 1) * self.dim]
    }

    pub fn s2_row(&self, pair: usize) -> &[f32] {
        &self.s2[pair * self.dim..(pair + 1) * self.dim]
    }

    pub fn s1_column(&self, dimension: usize) -> Vec<f64> {
        self.s1.iter().skip(dimension).step_by(self.dim).map(|&v| f64::from(v)).collect()
    }

    pub fn s2_column(&self, dimension: usize) -> Vec<f64> {
        self.s2.iter().skip(dimension).step_by(self.dim).map(|&v| f64::from(v)).collect()
    }

    pub fn difference(&self, dimension: usize) -> Result<DifferenceVector, StatsError> {
        DifferenceVector::from_pairs(&self.s1_column(dimension), &self.s2_column(dimension), dimension)
    }

    /// Pairs at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Self {
        let mut s1 = Vec::with_capacity(indices.len() * self.dim);
        let mut s2 = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            s1.extend_from_slice(self.s1_row(i));
            s2.extend_from_slice(self.s2_row(i));
        }
        Self { meta: self.meta.clone(), n_pairs: indices.len(), dim: self.dim, s1, s2 }
    }

    /// Rows `[s1; s2]` restricted to `dims` (in the given order), with labels
    /// 0 for sentence1 rows and 1 for sentence2 rows.
    pub fn stacked(&self, dims: &[usize]) -> (Array2<f64>, Vec<usize>) {
        let n = self.n_pairs;
        let mut x = Array2::<f64>::zeros((2 * n, dims.len()));
        for (i, mut row) in x.axis_iter_mut(Axis(0)).enumerate() {
            let src = if i < n { self.s1_row(i) } else { self.s2_row(i - n) };
            for (dst, &d) in row.iter_mut().zip(dims) {
                *dst = f64::from(src[d]);
            }
        }
        let y = (0..2 * n).map(|i| usize::from(i >= n)).collect();
        (x, y)
    }

    /// Per-pair differences `s1 - s2` as an `n_pairs x dim` matrix.
    pub fn differences(&self) -> Array2<f64> {
        Array2::from_shape_fn((self.n_pairs, self.dim), |(i, j)| {
            f64::from(self.s1[i * self.dim + j]) - f64::from(self.s2[i * self.dim + j])
        })
    }

    /// Returns the set with every value multiplied by `factor`.
    pub fn scaled(&self, factor: f32) -> Self {
        Self {
            meta: self.meta.clone(),
            n_pairs: self.n_pairs,
            dim: self.dim,
            s1: self.s1.iter().map(|v| v * factor).collect(),
            s2: self.s2.iter().map(|v| v * factor).collect(),
        }
    }
}
