use super::{check_finite, StatsError};

/// Interior quantile edges. A value `v` falls in bin `#{e : e < v}`, so bins
/// are right-closed and the lowest bin also takes everything at or below the
/// first edge.
#[derive(Debug, Clone, PartialEq)]
pub struct BinEdges {
    pub edges: Vec<f64>,
    pub bin_count: usize,
}

impl BinEdges {
    pub fn single() -> Self {
        Self { edges: Vec::new(), bin_count: 1 }
    }

    pub fn is_degenerate(&self) -> bool {
        self.bin_count == 1
    }

    pub fn assign(&self, value: f64) -> usize {
        bin_index(&self.edges, value)
    }
}

pub fn bin_index(edges: &[f64], value: f64) -> usize {
    edges.partition_point(|&e| e < value)
}

/// Linear-interpolation quantile of sorted data.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Equal-frequency edges at quantiles `k / requested_bins`, duplicates
/// collapsed. Constant input yields a single bin.
pub fn quantile_bin_edges(pooled: &[f64], requested_bins: usize) -> Result<BinEdges, StatsError> {
    if pooled.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    if requested_bins < 2 {
        return Err(StatsError::InvalidArgument(format!(
            "requested_bins must be >= 2, got {requested_bins}"
        )));
    }
    check_finite(pooled)?;
    let mut sorted = pooled.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted[0] == sorted[sorted.len() - 1] {
        return Ok(BinEdges::single());
    }

    let mut edges: Vec<f64> = Vec::with_capacity(requested_bins - 1);
    for k in 1..requested_bins {
        let e = quantile_sorted(&sorted, k as f64 / requested_bins as f64);
        if edges.last().is_none_or(|&last| e > last) {
            edges.push(e);
        }
    }
    // The top edge can equal the maximum; it then separates nothing.
    if edges.last() == sorted.last() {
        edges.pop();
    }
    let bin_count = edges.len() + 1;
    Ok(BinEdges { edges, bin_count })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MutualInfoResult {
    pub mi_nats: f64,
    /// Rows are bins, columns are the labels (S1 = 0, S2 = 1).
    pub joint_counts: Vec<[u64; 2]>,
    pub n_samples: u64,
}

/// Plug-in mutual information (nats) of a bins x 2 contingency table.
pub fn mi_from_counts(joint: &[[u64; 2]]) -> f64 {
    let n: u64 = joint.iter().map(|r| r[0] + r[1]).sum();
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    let col = [
        joint.iter().map(|r| r[0]).sum::<u64>() as f64,
        joint.iter().map(|r| r[1]).sum::<u64>() as f64,
    ];
    let mut mi = 0.0;
    for row in joint {
        let row_total = (row[0] + row[1]) as f64;
        for (y, &c) in row.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let c = c as f64;
            mi += c / n * (c * n / (row_total * col[y])).ln();
        }
    }
    mi.max(0.0)
}

/// MI between one dimension's values and the sentence-position label, with
/// quantile edges computed on the pooled values of both sentences.
pub fn mutual_information(s1: &[f64], s2: &[f64], bins: usize) -> Result<MutualInfoResult, StatsError> {
    if s1.len() != s2.len() {
        return Err(StatsError::LengthMismatch { left: s1.len(), right: s2.len() });
    }
    if s1.len() < 2 {
        return Err(StatsError::InvalidArgument("need at least 2 pairs".into()));
    }
    let pooled: Vec<f64> = s1.iter().chain(s2).copied().collect();
    let edges = quantile_bin_edges(&pooled, bins)?;

    let mut joint = vec![[0u64; 2]; edges.bin_count];
    for &v in s1 {
        joint[edges.assign(v)][0] += 1;
    }
    for &v in s2 {
        joint[edges.assign(v)][1] += 1;
    }
    let mi_nats = if edges.is_degenerate() { 0.0 } else { mi_from_counts(&joint) };
    Ok(MutualInfoResult {
        mi_nats,
        joint_counts: joint,
        n_samples: pooled.len() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{seq::SliceRandom, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn one_to_hundred_deciles() {
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        let e = quantile_bin_edges(&v, 10).unwrap();
        assert_eq!(e.bin_count, 10);
        // numpy.quantile(arange(1, 101), k/10), linear method
        let expected = [10.9, 20.8, 30.7, 40.6, 50.5, 60.4, 70.3, 80.2, 90.1];
        for (a, b) in e.edges.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn constant_is_single_bin() {
        let e = quantile_bin_edges(&[3.0; 8], 10).unwrap();
        assert_eq!(e.bin_count, 1);
        assert!(e.edges.is_empty());
    }

    #[test]
    fn mostly_zero_collapses_to_two_bins() {
        // ten zeros and a one: every k/10 quantile sits at h = k <= 9, i.e. 0
        let mut v = vec![0.0; 10];
        v.push(1.0);
        let e = quantile_bin_edges(&v, 10).unwrap();
        assert_eq!(e.edges, vec![0.0]);
        assert_eq!(e.bin_count, 2);
        assert_eq!(e.assign(0.0), 0);
        assert_eq!(e.assign(1.0), 1);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert_eq!(quantile_bin_edges(&[], 10), Err(StatsError::EmptyInput));
        assert!(quantile_bin_edges(&[1.0, 2.0], 1).is_err());
        assert!(mutual_information(&[1.0], &[2.0], 10).is_err());
        assert!(mutual_information(&[1.0, 2.0], &[2.0], 10).is_err());
    }

    #[test]
    fn identical_constants_have_zero_mi() {
        let r = mutual_information(&[1.5; 50], &[1.5; 50], 10).unwrap();
        assert_eq!(r.mi_nats, 0.0);
        assert_eq!(r.joint_counts, vec![[50, 50]]);
        assert_eq!(r.n_samples, 100);
    }

    #[test]
    fn perfect_separation_is_ln2() {
        let s1: Vec<f64> = (0..1000).map(|i| -1.0 - i as f64).collect();
        let s2: Vec<f64> = (0..1000).map(|i| 1.0 + i as f64).collect();
        let r = mutual_information(&s1, &s2, 10).unwrap();
        assert!((r.mi_nats - std::f64::consts::LN_2).abs() < 1e-9);
    }

    #[test]
    fn known_two_by_two_table() {
        // 0.75 ln 1.5 - 0.25 ln 2
        let mi = mi_from_counts(&[[30, 10], [10, 30]]);
        assert!((mi - 0.130_812_035_941_136_97).abs() < 1e-12);
    }

    #[test]
    fn shuffled_labels_stay_near_bias_floor() {
        let normal = Normal::new(0.0, 1.0).unwrap();
        let mut ok = 0;
        for seed in 0..100u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut pooled: Vec<f64> = (0..4000)
                .map(|i| normal.sample(&mut rng) + if i < 2000 { 0.0 } else { 1.0 })
                .collect();
            pooled.shuffle(&mut rng);
            let r = mutual_information(&pooled[..2000], &pooled[2000..], 10).unwrap();
            if r.mi_nats < 0.01 {
                ok += 1;
            }
        }
        assert!(ok >= 99, "{ok}/100");
    }

    proptest! {
        #[test]
        fn mi_within_bounds(
            s1 in prop::collection::vec(-5.0f64..5.0, 2..60),
            shift in -3.0f64..3.0,
        ) {
            let s2: Vec<f64> = s1.iter().rev().map(|v| v + shift).collect();
            let r = mutual_information(&s1, &s2, 10).unwrap();
            let bound = (r.joint_counts.len() as f64).ln().min(std::f64::consts::LN_2);
            prop_assert!(r.mi_nats >= 0.0);
            prop_assert!(r.mi_nats <= bound + 1e-12);
            let total: u64 = r.joint_counts.iter().map(|c| c[0] + c[1]).sum();
            prop_assert_eq!(total, r.n_samples);
        }

        #[test]
        fn edges_strictly_increasing(values in prop::collection::vec(-100i32..100, 1..80), bins in 2usize..20) {
            let v: Vec<f64> = values.iter().map(|&x| x as f64).collect();
            let e = quantile_bin_edges(&v, bins).unwrap();
            prop_assert!(e.edges.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(e.bin_count <= bins);
            prop_assert_eq!(e.bin_count, e.edges.len() + 1);
        }

        #[test]
        fn shift_moves_edges_exactly(values in prop::collection::vec(-400i32..400, 2..60), shift in -400i32..400) {
            let v: Vec<f64> = values.iter().map(|&x| x as f64 / 8.0).collect();
            let c = shift as f64 / 8.0;
            let shifted: Vec<f64> = v.iter().map(|x| x + c).collect();
            let e = quantile_bin_edges(&v, 10).unwrap();
            let es = quantile_bin_edges(&shifted, 10).unwrap();
            prop_assert_eq!(e.bin_count, es.bin_count);
            for (a, b) in e.edges.iter().zip(&es.edges) {
                prop_assert!((a + c - b).abs() <= 1e-9);
            }
            for (x, y) in v.iter().zip(&shifted) {
                prop_assert_eq!(e.assign(*x), es.assign(*y));
            }
        }
    }
}
