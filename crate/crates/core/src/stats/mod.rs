//! Per-dimension statistical kernels.
//!
//! Everything here is a pure function of its inputs. Reductions run left to
//! right in a fixed order so results do not depend on how callers schedule
//! dimensions across threads.

mod binning;
mod ranks;
mod scale;
mod wilcoxon;

pub use binning::{bin_index, mi_from_counts, mutual_information, quantile_bin_edges, BinEdges, MutualInfoResult};
pub use ranks::{signed_ranks, SignedRanks};
pub use scale::min_max_scale;
pub use wilcoxon::{
    wilcoxon_signed_rank, wilcoxon_signed_rank_with, Alternative, DifferenceVector, TestMethod,
    WilcoxonResult, DEFAULT_EXACT_THRESHOLD,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("non-finite value at index {index}")]
    NonFiniteInput { index: usize },
    #[error("all differences are zero")]
    AllZeroDifferences,
    #[error("input is empty")]
    EmptyInput,
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub(crate) fn check_finite(values: &[f64]) -> Result<(), StatsError> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(StatsError::NonFiniteInput { index }),
        None => Ok(()),
    }
}
