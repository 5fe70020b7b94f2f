use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use super::{check_finite, signed_ranks, StatsError};

/// Largest tie-free nonzero count for which the null distribution is enumerated.
pub const DEFAULT_EXACT_THRESHOLD: usize = 25;

/// Per-pair differences `s1 - s2` along one embedding dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceVector {
    values: Vec<f64>,
    dimension_index: usize,
}

impl DifferenceVector {
    pub fn new(values: Vec<f64>, dimension_index: usize) -> Result<Self, StatsError> {
        check_finite(&values)?;
        Ok(Self { values, dimension_index })
    }

    pub fn from_pairs(s1: &[f64], s2: &[f64], dimension_index: usize) -> Result<Self, StatsError> {
        if s1.len() != s2.len() {
            return Err(StatsError::LengthMismatch { left: s1.len(), right: s2.len() });
        }
        Self::new(s1.iter().zip(s2).map(|(a, b)| a - b).collect(), dimension_index)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dimension_index(&self) -> usize {
        self.dimension_index
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alternative {
    #[default]
    TwoSided,
    /// Median difference greater than zero.
    Greater,
    /// Median difference less than zero.
    Less,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TestMethod {
    Exact,
    NormalApprox,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilcoxonResult {
    /// Sum of ranks of the positive differences.
    pub statistic: f64,
    pub n_nonzero: usize,
    pub p_value: f64,
    pub method: TestMethod,
}

/// Two-sided Wilcoxon signed-rank test of `median(diff) = 0`.
pub fn wilcoxon_signed_rank(
    diff: &DifferenceVector,
    exact_threshold: usize,
) -> Result<WilcoxonResult, StatsError> {
    wilcoxon_signed_rank_with(diff, exact_threshold, Alternative::TwoSided)
}

pub fn wilcoxon_signed_rank_with(
    diff: &DifferenceVector,
    exact_threshold: usize,
    alternative: Alternative,
) -> Result<WilcoxonResult, StatsError> {
    if diff.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    let ranked = signed_ranks(diff.values())?;
    let n = ranked.n_nonzero;
    if n == 0 {
        return Err(StatsError::AllZeroDifferences);
    }
    let statistic = ranked.positive_rank_sum();

    let (p_value, method) = if n <= exact_threshold && !ranked.has_ties() {
        (exact_p_value(n, statistic as u64, alternative), TestMethod::Exact)
    } else {
        (normal_p_value(n, statistic, &ranked.tie_sizes, alternative), TestMethod::NormalApprox)
    };

    Ok(WilcoxonResult {
        statistic,
        n_nonzero: n,
        p_value: p_value.clamp(0.0, 1.0),
        method,
    })
}

/// Number of sign assignments of ranks 1..=n whose positive rank sum equals
/// each value 0..=n(n+1)/2.
fn rank_sum_counts(n: usize) -> Vec<f64> {
    let max_sum = n * (n + 1) / 2;
    let mut counts = vec![0.0f64; max_sum + 1];
    counts[0] = 1.0;
    let mut reach = 0;
    for rank in 1..=n {
        reach += rank;
        for s in (rank..=reach).rev() {
            counts[s] += counts[s - rank];
        }
    }
    counts
}

fn exact_p_value(n: usize, w: u64, alternative: Alternative) -> f64 {
    let counts = rank_sum_counts(n);
    let w = w as usize;
    let total = 2f64.powi(n as i32);
    let at_most: f64 = counts[..=w].iter().sum();
    let at_least: f64 = counts[w..].iter().sum();
    match alternative {
        Alternative::TwoSided => (2.0 * at_most.min(at_least) / total).min(1.0),
        Alternative::Greater => at_least / total,
        Alternative::Less => at_most / total,
    }
}

fn upper_tail(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

fn normal_p_value(n: usize, w: f64, tie_sizes: &[usize], alternative: Alternative) -> f64 {
    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let tie_term: f64 = tie_sizes
        .iter()
        .map(|&t| {
            let t = t as f64;
            t * t * t - t
        })
        .sum();
    let variance = (nf * (nf + 1.0) * (2.0 * nf + 1.0) - tie_term / 2.0) / 24.0;
    if variance <= 0.0 {
        return 1.0;
    }
    let sd = variance.sqrt();
    let d = w - mean;
    match alternative {
        Alternative::TwoSided => {
            let z = (d.abs() - 0.5).max(0.0) / sd;
            (2.0 * upper_tail(z)).min(1.0)
        }
        Alternative::Greater => upper_tail((d - 0.5) / sd),
        Alternative::Less => upper_tail(-(d + 0.5) / sd),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dv(v: &[f64]) -> DifferenceVector {
        DifferenceVector::new(v.to_vec(), 0).unwrap()
    }

    /// Enumerates all 2^n sign assignments of ranks 1..=n.
    fn brute_force_p(ranks: &[f64], w: f64) -> f64 {
        let n = ranks.len();
        let (mut le, mut ge) = (0u64, 0u64);
        for mask in 0u64..(1 << n) {
            let s: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
            if s <= w {
                le += 1;
            }
            if s >= w {
                ge += 1;
            }
        }
        (2.0 * le.min(ge) as f64 / (1u64 << n) as f64).min(1.0)
    }

    #[test]
    fn all_positive_five() {
        let r = wilcoxon_signed_rank(&dv(&[1.0, 2.0, 3.0, 4.0, 5.0]), 25).unwrap();
        assert_eq!(r.statistic, 15.0);
        assert_eq!(r.method, TestMethod::Exact);
        assert!((r.p_value - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn six_value_example_matches_enumeration() {
        let d = [1.2, -0.5, 0.3, -2.0, 0.8, 1.1];
        let r = wilcoxon_signed_rank(&dv(&d), 25).unwrap();
        let ranks: Vec<f64> = (1..=6).map(|x| x as f64).collect();
        // ranks of |d|: 0.3->1 0.5->2 0.8->3 1.1->4 1.2->5 2.0->6; positives 5+1+3+4
        assert_eq!(r.statistic, 13.0);
        let expected = brute_force_p(&ranks, 13.0);
        assert!((r.p_value - expected).abs() < 1e-12);
        assert!((r.p_value - 0.6875).abs() < 1e-12);
    }

    #[test]
    fn all_zero_is_error() {
        assert_eq!(
            wilcoxon_signed_rank(&dv(&[0.0, 0.0]), 25),
            Err(StatsError::AllZeroDifferences)
        );
        assert_eq!(wilcoxon_signed_rank(&dv(&[]), 25), Err(StatsError::EmptyInput));
    }

    #[test]
    fn ties_force_normal_approx() {
        let r = wilcoxon_signed_rank(&dv(&[1.0, -1.0, 2.0, 3.0]), 25).unwrap();
        assert_eq!(r.method, TestMethod::NormalApprox);
        assert!(r.statistic <= (4 * 5 / 2) as f64);
    }

    #[test]
    fn one_sided_tails_sum_past_one() {
        let d = dv(&[1.2, -0.5, 0.3, -2.0, 0.8, 1.1]);
        let g = wilcoxon_signed_rank_with(&d, 25, Alternative::Greater).unwrap();
        let l = wilcoxon_signed_rank_with(&d, 25, Alternative::Less).unwrap();
        // P(W>=w) + P(W<=w) = 1 + P(W=w)
        assert!(g.p_value + l.p_value >= 1.0);
    }

    #[test]
    fn symmetric_noise_rarely_significant() {
        let mut below = 0;
        for seed in 0..1000u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let v: Vec<f64> = (0..200).map(|_| rng.random_range(-1.0..1.0)).collect();
            let r = wilcoxon_signed_rank(&dv(&v), 25).unwrap();
            if r.p_value <= 0.01 {
                below += 1;
            }
        }
        // P(p <= 0.01) is 0.01 under the null, so allow three binomial
        // standard deviations of Monte-Carlo noise on 1000 trials.
        assert!(below <= 19, "{below} of 1000 trials had p <= 0.01");
    }
}
