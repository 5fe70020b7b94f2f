//! Embedding Dimension Importance: per-dimension aggregation of the
//! signed-rank test, mutual information and RFE weight for one property.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linear::{rfe, LogisticConfig, ModelError, Standardizer};
use crate::pairs::EmbeddingPairSet;
use crate::stats::{
    min_max_scale, mutual_information, wilcoxon_signed_rank_with, Alternative, StatsError,
    DEFAULT_EXACT_THRESHOLD,
};

#[derive(Debug, Error)]
pub enum EdiError {
    #[error("invalid EDI configuration: {0}")]
    InvalidConfig(String),
    #[error("need at least 2 dimensions to scale scores, got {0}")]
    DegenerateReport(usize),
    #[error("dimension {dimension}: {source}")]
    Stats { dimension: usize, source: StatsError },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EdiConfig {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
    pub bins: usize,
    pub keep_count: usize,
    pub p_floor: f64,
    pub edi_threshold: f64,
    pub exact_threshold: usize,
    pub alternative: Alternative,
    /// Fraction of surviving features removed per RFE round.
    pub step_fraction: f64,
    pub l2_lambda: f64,
    pub solver_tol: f64,
    pub max_iter: usize,
}

impl Default for EdiConfig {
    fn default() -> Self {
        Self {
            w1: 0.6,
            w2: 0.2,
            w3: 0.2,
            bins: 10,
            keep_count: 20,
            p_floor: 1e-300,
            edi_threshold: 0.8,
            exact_threshold: DEFAULT_EXACT_THRESHOLD,
            alternative: Alternative::TwoSided,
            step_fraction: 0.1,
            l2_lambda: 1.0,
            solver_tol: 1e-6,
            max_iter: 1000,
        }
    }
}

impl EdiConfig {
    pub fn validate(&self) -> Result<(), EdiError> {
        let w = [self.w1, self.w2, self.w3];
        if w.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(EdiError::InvalidConfig(format!("weights must be non-negative, got {w:?}")));
        }
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(EdiError::InvalidConfig(format!("weights must sum to 1, got {sum}")));
        }
        if self.bins < 2 {
            return Err(EdiError::InvalidConfig("bins must be >= 2".into()));
        }
        if self.keep_count == 0 {
            return Err(EdiError::InvalidConfig("keep_count must be >= 1".into()));
        }
        if self.p_floor.is_nan() || self.p_floor <= 0.0 {
            return Err(EdiError::InvalidConfig("p_floor must be positive".into()));
        }
        if !(self.step_fraction > 0.0 && self.step_fraction <= 1.0) {
            return Err(EdiError::InvalidConfig("step_fraction must be in (0, 1]".into()));
        }
        Ok(())
    }

    pub fn logistic(&self) -> LogisticConfig {
        LogisticConfig { l2_lambda: self.l2_lambda, tol: self.solver_tol, max_iter: self.max_iter }
    }
}

/// Unscaled evidence for one dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawSignals {
    pub p_value: f64,
    pub mi: f64,
    /// `|weight|` from the final RFE refit, `None` when eliminated.
    pub rfe_weight: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionAnalysis {
    pub dimension: usize,
    pub p_value: f64,
    pub mi: f64,
    pub rfe_weight: f64,
    pub rfe_selected: bool,
    pub neg_log_p_scaled: f64,
    pub mi_scaled: f64,
    pub rfe_weight_scaled: f64,
    pub edi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: String,
    pub model_tag: String,
    pub source_hash: String,
    pub config: EdiConfig,
    /// Sorted by `edi` descending, ties by ascending dimension.
    pub dims: Vec<DimensionAnalysis>,
    /// Dimensions with `edi >= edi_threshold`, in report order.
    pub relevant_dims: Vec<usize>,
}

impl PropertyReport {
    pub fn dim_count(&self) -> usize {
        self.dims.len()
    }

    /// Dimension indices, highest EDI first.
    pub fn ranked_dims(&self) -> Vec<usize> {
        self.dims.iter().map(|d| d.dimension).collect()
    }

    pub fn rfe_selected(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.dims.iter().filter(|d| d.rfe_selected).map(|d| d.dimension).collect();
        v.sort_unstable();
        v
    }

    pub fn get(&self, dimension: usize) -> Option<&DimensionAnalysis> {
        self.dims.iter().find(|d| d.dimension == dimension)
    }
}

/// Scales each signal across dimensions and forms the weighted sum.
/// Output is in dimension order (index `i` describes dimension `i`).
pub fn combine_scores(raw: &[RawSignals], config: &EdiConfig) -> Result<Vec<DimensionAnalysis>, EdiError> {
    if raw.len() < 2 {
        return Err(EdiError::DegenerateReport(raw.len()));
    }
    let neg_log_p: Vec<f64> = raw.iter().map(|r| -r.p_value.max(config.p_floor).ln()).collect();
    let mi: Vec<f64> = raw.iter().map(|r| r.mi).collect();
    let rfe_w: Vec<f64> = raw.iter().map(|r| r.rfe_weight.unwrap_or(0.0)).collect();

    let scale = |v: &[f64]| {
        min_max_scale(v).map_err(|source| {
            let dimension = match source {
                StatsError::NonFiniteInput { index } => index,
                _ => 0,
            };
            EdiError::Stats { dimension, source }
        })
    };
    let a = scale(&neg_log_p)?;
    let b = scale(&mi)?;
    let c = scale(&rfe_w)?;

    Ok((0..raw.len())
        .map(|i| DimensionAnalysis {
            dimension: i,
            p_value: raw[i].p_value,
            mi: raw[i].mi,
            rfe_weight: rfe_w[i],
            rfe_selected: raw[i].rfe_weight.is_some(),
            neg_log_p_scaled: a[i],
            mi_scaled: b[i],
            rfe_weight_scaled: c[i],
            edi: config.w1 * a[i] + config.w2 * b[i] + config.w3 * c[i],
        })
        .collect())
}

fn sort_by_edi(dims: &mut [DimensionAnalysis]) {
    dims.sort_by(|a, b| b.edi.total_cmp(&a.edi).then(a.dimension.cmp(&b.dimension)));
}

/// Signed-rank p-value and MI for every dimension, computed in parallel on
/// the current rayon pool. Results are in dimension order.
pub fn per_dimension_signals(pairs: &EmbeddingPairSet, config: &EdiConfig) -> Result<Vec<(f64, f64)>, EdiError> {
    (0..pairs.dim())
        .into_par_iter()
        .map(|dimension| {
            let wrap = |source| EdiError::Stats { dimension, source };
            let s1 = pairs.s1_column(dimension);
            let s2 = pairs.s2_column(dimension);
            let diff = crate::stats::DifferenceVector::from_pairs(&s1, &s2, dimension).map_err(wrap)?;
            let p = match wilcoxon_signed_rank_with(&diff, config.exact_threshold, config.alternative) {
                Ok(r) => r.p_value,
                Err(StatsError::AllZeroDifferences) => {
                    log::warn!(
                        "{}: dimension {dimension} has identical values in every pair; using p = 1",
                        pairs.property()
                    );
                    1.0
                }
                Err(e) => return Err(wrap(e)),
            };
            let mi = mutual_information(&s1, &s2, config.bins).map_err(wrap)?.mi_nats;
            Ok((p, mi))
        })
        .collect()
}

pub fn compute_edi(pairs: &EmbeddingPairSet, config: &EdiConfig) -> Result<PropertyReport, EdiError> {
    config.validate()?;
    let d = pairs.dim();
    if d < 2 {
        return Err(EdiError::DegenerateReport(d));
    }

    let signals = per_dimension_signals(pairs, config)?;

    let all_dims: Vec<usize> = (0..d).collect();
    let (x, y) = pairs.stacked(&all_dims);
    let (_, z) = Standardizer::fit_transform(x.view());
    let keep = if config.keep_count > d {
        log::warn!("keep_count {} exceeds dimension count {d}; keeping all", config.keep_count);
        d
    } else {
        config.keep_count
    };
    let selection = rfe(z.view(), &y, keep, config.step_fraction, &config.logistic())?;

    let raw: Vec<RawSignals> = signals
        .iter()
        .enumerate()
        .map(|(dim, &(p_value, mi))| RawSignals {
            p_value,
            mi,
            rfe_weight: selection.final_weights.get(&dim).copied(),
        })
        .collect();

    let mut dims = combine_scores(&raw, config)?;
    sort_by_edi(&mut dims);
    let relevant_dims = dims
        .iter()
        .filter(|a| a.edi >= config.edi_threshold)
        .map(|a| a.dimension)
        .collect();

    Ok(PropertyReport {
        property: pairs.meta.property.clone(),
        model_tag: pairs.meta.model_tag.clone(),
        source_hash: pairs.meta.source_hash.clone(),
        config: config.clone(),
        dims,
        relevant_dims,
    })
}

/// The first `top_k` `(dimension, edi)` rows of a report.
pub fn edi_rank_table(report: &PropertyReport, top_k: usize) -> Vec<(usize, f64)> {
    report.dims.iter().take(top_k).map(|a| (a.dimension, a.edi)).collect()
}
