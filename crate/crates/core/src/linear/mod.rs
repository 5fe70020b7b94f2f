//! L2-regularized logistic regression, feature standardization and
//! recursive feature elimination.

mod lbfgs;
mod logistic;
mod rfe;
mod standardize;

pub use logistic::{fit_logistic, predict_accuracy, FitInfo, LogisticConfig, LogisticModel, LogisticObjective};
pub use rfe::{rfe, RfeResult};
pub use standardize::Standardizer;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("training labels contain a single class")]
    SingleClassInput,
    #[error("non-finite value in design matrix")]
    NonFiniteInput,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("need at least 2 rows, got {0}")]
    TooFewSamples(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
