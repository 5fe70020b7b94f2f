//! Classifier-based validation of EDI rankings: the all-dimension baseline,
//! the high-EDI accuracy curve, the low-EDI control, cross-property transfer
//! and the multiclass property classifier on difference vectors.

use std::collections::BTreeMap;

use ndarray::{Array2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linear::{fit_logistic, predict_accuracy, LogisticConfig, ModelError, Standardizer};
use crate::pairs::EmbeddingPairSet;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("need at least 5 pairs to split, got {0}")]
    TooFewPairs(usize),
    #[error("dimension mismatch: expected {expected}, found {found}{}", context.as_deref().map(|c| format!(" ({c})")).unwrap_or_default())]
    DimensionMismatch { expected: usize, found: usize, context: Option<String> },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitUnit {
    /// Both sentences of a pair always land on the same side.
    #[default]
    ByPair,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
    pub unit: SplitUnit,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self { train_fraction: 0.8, seed: 0, unit: SplitUnit::ByPair }
    }
}

impl SplitSpec {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }
}

/// Seeded shuffle of `0..n`; the first `ceil(train_fraction * n)` indices
/// (capped so the test side keeps at least one pair) go to training.
pub fn split_indices(n: usize, spec: &SplitSpec) -> Result<(Vec<usize>, Vec<usize>), EvalError> {
    if n < 5 {
        return Err(EvalError::TooFewPairs(n));
    }
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(EvalError::InvalidArgument(format!(
            "train_fraction must be in (0, 1), got {}",
            spec.train_fraction
        )));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(spec.seed));
    let n_train = ((spec.train_fraction * n as f64 - 1e-9).ceil() as usize).clamp(1, n - 1);
    let test = idx.split_off(n_train);
    Ok((idx, test))
}

pub fn split(pairs: &EmbeddingPairSet, spec: &SplitSpec) -> Result<(EmbeddingPairSet, EmbeddingPairSet), EvalError> {
    let (train, test) = split_indices(pairs.n_pairs(), spec)?;
    Ok((pairs.subset(&train), pairs.subset(&test)))
}

/// Trains a sentence-position classifier on `dims` and returns test accuracy.
/// Columns are taken in ascending index order, so equal feature sets give
/// bit-identical results.
pub fn score_dims(
    train: &EmbeddingPairSet,
    test: &EmbeddingPairSet,
    dims: &[usize],
    config: &LogisticConfig,
) -> Result<f64, EvalError> {
    if train.dim() != test.dim() {
        return Err(EvalError::DimensionMismatch { expected: train.dim(), found: test.dim(), context: None });
    }
    if dims.is_empty() {
        return Err(EvalError::InvalidArgument("empty feature set".into()));
    }
    let mut cols = dims.to_vec();
    cols.sort_unstable();
    if let Some(&bad) = cols.iter().find(|&&c| c >= train.dim()) {
        return Err(EvalError::DimensionMismatch {
            expected: train.dim(),
            found: bad + 1,
            context: Some("feature index out of range".into()),
        });
    }
    let (x_train, y_train) = train.stacked(&cols);
    let (x_test, y_test) = test.stacked(&cols);
    let scaler = Standardizer::fit(x_train.view());
    let model = fit_logistic(scaler.transform(x_train.view()).view(), &y_train, config)?;
    Ok(predict_accuracy(&model, scaler.transform(x_test.view()).view(), &y_test)?)
}

/// Test accuracy using every dimension.
pub fn baseline(train: &EmbeddingPairSet, test: &EmbeddingPairSet, config: &LogisticConfig) -> Result<f64, EvalError> {
    let all: Vec<usize> = (0..train.dim()).collect();
    score_dims(train, test, &all, config)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub k: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HighEdiCurve {
    pub points: Vec<CurvePoint>,
    /// Last `k` evaluated; the first to reach the target when `reached`.
    pub k_at_95: usize,
    pub reached: bool,
}

fn check_ranking(ranked: &[usize], d: usize, what: &str) -> Result<(), EvalError> {
    if ranked.len() != d {
        return Err(EvalError::DimensionMismatch {
            expected: d,
            found: ranked.len(),
            context: Some(format!("{what} ranking length")),
        });
    }
    if let Some(&bad) = ranked.iter().find(|&&r| r >= d) {
        return Err(EvalError::DimensionMismatch {
            expected: d,
            found: bad + 1,
            context: Some(format!("{what} ranking index")),
        });
    }
    Ok(())
}

/// Adds dimensions in descending EDI order until accuracy reaches
/// `stop_ratio * baseline_accuracy` or `k_max` dimensions are in use.
pub fn eval_high_edi(
    train: &EmbeddingPairSet,
    test: &EmbeddingPairSet,
    ranked_dims: &[usize],
    baseline_accuracy: f64,
    stop_ratio: f64,
    k_max: usize,
    config: &LogisticConfig,
) -> Result<HighEdiCurve, EvalError> {
    check_ranking(ranked_dims, train.dim(), "EDI")?;
    let k_max = k_max.clamp(1, ranked_dims.len());
    let target = stop_ratio * baseline_accuracy;
    let mut points = Vec::new();
    for k in 1..=k_max {
        let accuracy = score_dims(train, test, &ranked_dims[..k], config)?;
        points.push(CurvePoint { k, accuracy });
        if accuracy >= target {
            return Ok(HighEdiCurve { points, k_at_95: k, reached: true });
        }
    }
    log::warn!("high-EDI curve never reached {target:.4} within {k_max} dimensions");
    Ok(HighEdiCurve { points, k_at_95: k_max, reached: false })
}

/// Accuracy using only the `bottom_k` lowest-EDI dimensions.
pub fn eval_low_edi(
    train: &EmbeddingPairSet,
    test: &EmbeddingPairSet,
    ranked_dims: &[usize],
    bottom_k: usize,
    config: &LogisticConfig,
) -> Result<f64, EvalError> {
    check_ranking(ranked_dims, train.dim(), "EDI")?;
    if bottom_k == 0 || bottom_k > ranked_dims.len() {
        return Err(EvalError::InvalidArgument(format!(
            "bottom_k must be in 1..={}, got {bottom_k}",
            ranked_dims.len()
        )));
    }
    score_dims(train, test, &ranked_dims[ranked_dims.len() - bottom_k..], config)
}

/// Accuracy of the current property's task restricted to each other
/// property's top `top_k` dimensions.
pub fn eval_cross_property(
    train: &EmbeddingPairSet,
    test: &EmbeddingPairSet,
    others: &BTreeMap<String, Vec<usize>>,
    top_k: usize,
    config: &LogisticConfig,
) -> Result<BTreeMap<String, f64>, EvalError> {
    for ranked in others.values() {
        check_ranking(ranked, train.dim(), "cross-property")?;
    }
    let top_k = top_k.clamp(1, train.dim());
    others
        .par_iter()
        .map(|(name, ranked)| Ok((name.clone(), score_dims(train, test, &ranked[..top_k], config)?)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    pub split: SplitSpec,
    pub stop_ratio: f64,
    /// Upper bound on the high-EDI curve length; `None` means all dimensions.
    pub k_max: Option<usize>,
    pub bottom_k: usize,
    pub cross_k: usize,
    pub l2_lambda: f64,
    pub solver_tol: f64,
    pub max_iter: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            split: SplitSpec::default(),
            stop_ratio: 0.95,
            k_max: None,
            bottom_k: 100,
            cross_k: 25,
            l2_lambda: 1.0,
            solver_tol: 1e-6,
            max_iter: 1000,
        }
    }
}

impl EvalConfig {
    pub fn logistic(&self) -> LogisticConfig {
        LogisticConfig { l2_lambda: self.l2_lambda, tol: self.solver_tol, max_iter: self.max_iter }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub property: String,
    pub model_tag: String,
    pub seed: u64,
    pub train_pairs: usize,
    pub test_pairs: usize,
    pub baseline_accuracy: f64,
    pub stop_ratio: f64,
    pub high_edi_curve: Vec<CurvePoint>,
    pub k_at_95: usize,
    pub reached: bool,
    pub bottom_k: usize,
    pub low_edi_accuracy: f64,
    pub cross_k: usize,
    pub cross_property: BTreeMap<String, f64>,
}

impl EvaluationReport {
    /// Other property whose top dimensions transfer best, if any.
    pub fn best_cross_property(&self) -> Option<(&str, f64)> {
        self.cross_property
            .iter()
            .fold(None, |best: Option<(&str, f64)>, (k, &v)| match best {
                Some((_, b)) if b >= v => best,
                _ => Some((k.as_str(), v)),
            })
    }
}

/// Runs the baseline and all three EDI evaluations on one shared split.
pub fn evaluate_property(
    pairs: &EmbeddingPairSet,
    ranked_dims: &[usize],
    others: &BTreeMap<String, Vec<usize>>,
    config: &EvalConfig,
) -> Result<EvaluationReport, EvalError> {
    let (train, test) = split(pairs, &config.split)?;
    let logistic = config.logistic();
    let baseline_accuracy = baseline(&train, &test, &logistic)?;
    let curve = eval_high_edi(
        &train,
        &test,
        ranked_dims,
        baseline_accuracy,
        config.stop_ratio,
        config.k_max.unwrap_or(pairs.dim()),
        &logistic,
    )?;
    let low_edi_accuracy = eval_low_edi(&train, &test, ranked_dims, config.bottom_k, &logistic)?;
    let cross_property = eval_cross_property(&train, &test, others, config.cross_k, &logistic)?;
    Ok(EvaluationReport {
        property: pairs.meta.property.clone(),
        model_tag: pairs.meta.model_tag.clone(),
        seed: config.split.seed,
        train_pairs: train.n_pairs(),
        test_pairs: test.n_pairs(),
        baseline_accuracy,
        stop_ratio: config.stop_ratio,
        high_edi_curve: curve.points,
        k_at_95: curve.k_at_95,
        reached: curve.reached,
        bottom_k: config.bottom_k,
        low_edi_accuracy,
        cross_k: config.cross_k.min(pairs.dim()),
        cross_property,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub labels: Vec<String>,
    /// `counts[true][predicted]`.
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> u64 {
        (0..self.counts.len()).map(|i| self.counts[i][i]).sum()
    }

    pub fn accuracy(&self) -> f64 {
        match self.total() {
            0 => 0.0,
            t => self.correct() as f64 / t as f64,
        }
    }

    /// Per-class recall, in label order.
    pub fn recall(&self) -> Vec<f64> {
        self.counts
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let n: u64 = row.iter().sum();
                if n == 0 { 0.0 } else { row[i] as f64 / n as f64 }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpClassification {
    pub accuracy: f64,
    pub seed: u64,
    pub train_rows: usize,
    pub test_rows: usize,
    pub confusion: ConfusionMatrix,
}

/// Multiclass classifier predicting the property of a pair from its
/// difference vector `s1 - s2`. Each property's pairs are split separately
/// with the same spec.
pub fn lp_classifier(
    datasets: &BTreeMap<String, EmbeddingPairSet>,
    spec: &SplitSpec,
    config: &LogisticConfig,
) -> Result<LpClassification, EvalError> {
    if datasets.len() < 2 {
        return Err(EvalError::InvalidArgument(format!(
            "need at least 2 properties, got {}",
            datasets.len()
        )));
    }
    let dim = datasets.values().next().map(EmbeddingPairSet::dim).unwrap_or(0);
    for (name, set) in datasets {
        if set.dim() != dim {
            return Err(EvalError::DimensionMismatch {
                expected: dim,
                found: set.dim(),
                context: Some(format!("property {name}")),
            });
        }
    }

    let mut train_blocks = Vec::new();
    let mut test_blocks = Vec::new();
    let mut train_y = Vec::new();
    let mut test_y = Vec::new();
    for (label, set) in datasets.values().enumerate() {
        let diffs = set.differences();
        let (tr, te) = split_indices(set.n_pairs(), spec)?;
        train_blocks.push(diffs.select(Axis(0), &tr));
        test_blocks.push(diffs.select(Axis(0), &te));
        train_y.extend(std::iter::repeat_n(label, tr.len()));
        test_y.extend(std::iter::repeat_n(label, te.len()));
    }
    let stack = |blocks: &[Array2<f64>]| {
        let views: Vec<_> = blocks.iter().map(|b| b.view()).collect();
        ndarray::concatenate(Axis(0), &views).expect("equal widths")
    };
    let x_train = stack(&train_blocks);
    let x_test = stack(&test_blocks);

    let scaler = Standardizer::fit(x_train.view());
    let model = fit_logistic(scaler.transform(x_train.view()).view(), &train_y, config)?;
    let predicted = model.predict(scaler.transform(x_test.view()).view())?;

    let n = datasets.len();
    let mut counts = vec![vec![0u64; n]; n];
    for (&t, &p) in test_y.iter().zip(&predicted) {
        counts[t][p] += 1;
    }
    let confusion = ConfusionMatrix { labels: datasets.keys().cloned().collect(), counts };
    Ok(LpClassification {
        accuracy: confusion.accuracy(),
        seed: spec.seed,
        train_rows: train_y.len(),
        test_rows: test_y.len(),
        confusion,
    })
}
