use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{sha256_hex, DataError};
use crate::pairs::{EmbeddingMeta, EmbeddingPairSet};

/// Paired Gaussian embeddings with a known set of shifted dimensions.
///
/// `s1 ~ N(0, noise_std^2)` per coordinate and `s2 = s1 + N(0, noise_std^2)`,
/// plus `shift` on each planted dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n_pairs: usize,
    pub dim: usize,
    /// `(dimension, shift)` pairs.
    #[serde(default)]
    pub planted: Vec<(usize, f64)>,
    pub noise_std: f64,
    pub seed: u64,
    #[serde(default = "default_name")]
    pub property: String,
    #[serde(default = "default_name")]
    pub model_tag: String,
}

fn default_name() -> String {
    "synthetic".into()
}

impl SyntheticSpec {
    pub fn new(n_pairs: usize, dim: usize, planted: Vec<(usize, f64)>, noise_std: f64, seed: u64) -> Self {
        Self { n_pairs, dim, planted, noise_std, seed, property: default_name(), model_tag: default_name() }
    }

    pub fn with_property(mut self, property: impl Into<String>) -> Self {
        self.property = property.into();
        self
    }

    pub fn validate(&self) -> Result<(), DataError> {
        if self.n_pairs == 0 || self.dim == 0 {
            return Err(DataError::InvalidSpec("n_pairs and dim must be positive".into()));
        }
        if !(self.noise_std > 0.0 && self.noise_std.is_finite()) {
            return Err(DataError::InvalidSpec("noise_std must be positive".into()));
        }
        let mut seen = vec![false; self.dim];
        for &(d, shift) in &self.planted {
            if d >= self.dim {
                return Err(DataError::InvalidSpec(format!("planted dimension {d} >= dim {}", self.dim)));
            }
            if std::mem::replace(&mut seen[d], true) {
                return Err(DataError::InvalidSpec(format!("planted dimension {d} listed twice")));
            }
            if !shift.is_finite() {
                return Err(DataError::InvalidSpec(format!("shift for dimension {d} is not finite")));
            }
        }
        Ok(())
    }
}

pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<EmbeddingPairSet, DataError> {
    spec.validate()?;
    let normal = Normal::new(0.0, spec.noise_std).map_err(|e| DataError::InvalidSpec(e.to_string()))?;
    let mut shifts = vec![0.0; spec.dim];
    for &(d, shift) in &spec.planted {
        shifts[d] = shift;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut s1 = Vec::with_capacity(spec.n_pairs * spec.dim);
    let mut s2 = Vec::with_capacity(spec.n_pairs * spec.dim);
    for _ in 0..spec.n_pairs {
        for &shift in &shifts {
            let base: f64 = normal.sample(&mut rng);
            let jitter: f64 = normal.sample(&mut rng);
            s1.push(base as f32);
            s2.push((base + jitter + shift) as f32);
        }
    }
    let mut meta = EmbeddingMeta::new(spec.model_tag.clone(), spec.property.clone());
    meta.source_hash = sha256_hex(&serde_json::to_vec(spec).map_err(|e| DataError::InvalidSpec(e.to_string()))?);
    meta.pooling = "none".into();
    meta.layer = "synthetic".into();
    EmbeddingPairSet::new(meta, spec.dim, s1, s2).map_err(|e| DataError::ShapeMismatch(e.to_string()))
}
