//! Finds the embedding dimensions that encode a linguistic property.
//!
//! Given sentence pairs that differ in one property and an embedding for
//! each sentence, every dimension is scored by a Wilcoxon signed-rank test on
//! the paired differences, the mutual information between its binned values
//! and the sentence position, and its weight after recursive feature
//! elimination with a logistic probe. The three signals are min-max scaled
//! and combined into an Embedding Dimension Importance (EDI) score in
//! `[0, 1]`, which [`evaluation`] then checks with held-out classifiers.

pub mod edi;
pub mod evaluation;
pub mod generation;
pub mod io;
pub mod linear;
pub mod pairs;
pub mod properties;
pub mod stats;

pub use edi::{compute_edi, edi_rank_table, DimensionAnalysis, EdiConfig, EdiError, PropertyReport};
pub use evaluation::{
    baseline, eval_cross_property, eval_high_edi, eval_low_edi, evaluate_property, lp_classifier, split,
    ConfusionMatrix, EvalConfig, EvalError, EvaluationReport, SplitSpec,
};
pub use io::{DataError, LdspRecord, SyntheticSpec};
pub use pairs::{EmbeddingMeta, EmbeddingPairSet};
pub use properties::LinguisticProperty;
