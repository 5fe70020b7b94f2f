use std::collections::BTreeMap;

use ndarray::{ArrayView2, Axis};

use super::{fit_logistic, LogisticConfig, ModelError};

#[derive(Debug, Clone, PartialEq)]
pub struct RfeResult {
    /// Surviving feature indices, ascending.
    pub selected_dims: Vec<usize>,
    /// Weights of the final refit on exactly the surviving features.
    pub final_weights: BTreeMap<usize, f64>,
    /// Eliminated features, earliest first.
    pub elimination_order: Vec<usize>,
}

/// Recursive feature elimination with a binary logistic base estimator.
///
/// Each round fits on the surviving columns and drops the
/// `ceil(step_fraction * surviving)` smallest `|weight|` features (ties
/// dropped in ascending index order) without going below `keep_count`.
pub fn rfe(
    x: ArrayView2<f64>,
    y: &[usize],
    keep_count: usize,
    step_fraction: f64,
    config: &LogisticConfig,
) -> Result<RfeResult, ModelError> {
    let d = x.ncols();
    if keep_count == 0 || keep_count > d {
        return Err(ModelError::InvalidArgument(format!(
            "keep_count must be in 1..={d}, got {keep_count}"
        )));
    }
    if !(step_fraction > 0.0 && step_fraction <= 1.0) {
        return Err(ModelError::InvalidArgument(format!(
            "step_fraction must be in (0, 1], got {step_fraction}"
        )));
    }

    let mut surviving: Vec<usize> = (0..d).collect();
    let mut elimination_order = Vec::with_capacity(d - keep_count);

    while surviving.len() > keep_count {
        let sub = x.select(Axis(1), &surviving);
        let model = fit_logistic(sub.view(), y, config)?;
        let importance = model.feature_importance();

        let mut order: Vec<usize> = (0..surviving.len()).collect();
        order.sort_by(|&a, &b| importance[a].total_cmp(&importance[b]).then(a.cmp(&b)));

        let step = ((step_fraction * surviving.len() as f64).ceil() as usize).max(1);
        let n_drop = step.min(surviving.len() - keep_count);
        let mut dropped: Vec<usize> = order[..n_drop].iter().map(|&i| surviving[i]).collect();
        elimination_order.extend_from_slice(&dropped);
        dropped.sort_unstable();
        surviving.retain(|f| dropped.binary_search(f).is_err());
    }

    let sub = x.select(Axis(1), &surviving);
    let model = fit_logistic(sub.view(), y, config)?;
    let final_weights = surviving
        .iter()
        .zip(model.feature_importance())
        .map(|(&f, w)| (f, w))
        .collect();
    Ok(RfeResult { selected_dims: surviving, final_weights, elimination_order })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn noise(n: usize, d: usize, seed: u64) -> (Array2<f64>, Vec<usize>) {
        let normal = Normal::new(0.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = Array2::from_shape_fn((n, d), |_| normal.sample(&mut rng));
        let y = (0..n).map(|i| i % 2).collect();
        (x, y)
    }

    #[test]
    fn keep_all() {
        let (x, y) = noise(40, 5, 1);
        let r = rfe(x.view(), &y, 5, 0.1, &LogisticConfig::default()).unwrap();
        assert_eq!(r.selected_dims, vec![0, 1, 2, 3, 4]);
        assert!(r.elimination_order.is_empty());
        assert_eq!(r.final_weights.len(), 5);
    }

    #[test]
    fn full_step_single_keep() {
        let (mut x, y) = noise(60, 6, 2);
        for (i, mut row) in x.rows_mut().into_iter().enumerate() {
            row[4] += if y[i] == 1 { 3.0 } else { -3.0 };
        }
        let r = rfe(x.view(), &y, 1, 1.0, &LogisticConfig::default()).unwrap();
        assert_eq!(r.selected_dims, vec![4]);
        assert_eq!(r.elimination_order.len(), 5);
    }

    #[test]
    fn partition_of_features() {
        let (x, y) = noise(80, 13, 3);
        let r = rfe(x.view(), &y, 4, 0.25, &LogisticConfig::default()).unwrap();
        assert_eq!(r.selected_dims.len(), 4);
        let mut all: Vec<usize> = r.selected_dims.iter().chain(&r.elimination_order).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..13).collect::<Vec<_>>());
    }

    #[test]
    fn bad_arguments() {
        let (x, y) = noise(10, 3, 4);
        let cfg = LogisticConfig::default();
        assert!(rfe(x.view(), &y, 0, 0.1, &cfg).is_err());
        assert!(rfe(x.view(), &y, 4, 0.1, &cfg).is_err());
        assert!(rfe(x.view(), &y, 1, 0.0, &cfg).is_err());
        assert!(rfe(x.view(), &y, 1, 1.5, &cfg).is_err());
    }
}
