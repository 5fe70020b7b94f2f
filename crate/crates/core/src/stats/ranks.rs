use super::{check_finite, StatsError};

/// Ranks of the absolute values of the nonzero entries of a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedRanks {
    /// Average ranks, aligned with the nonzero entries in input order.
    pub ranks: Vec<f64>,
    /// `true` where the corresponding nonzero entry is positive.
    pub positive: Vec<bool>,
    /// Sizes of every group of tied magnitudes (groups of one included).
    pub tie_sizes: Vec<usize>,
    pub n_nonzero: usize,
}

impl SignedRanks {
    pub fn has_ties(&self) -> bool {
        self.tie_sizes.iter().any(|&t| t > 1)
    }

    /// Sum of ranks of the positive entries.
    pub fn positive_rank_sum(&self) -> f64 {
        self.ranks
            .iter()
            .zip(&self.positive)
            .filter(|(_, &p)| p)
            .map(|(r, _)| r)
            .sum()
    }
}

/// Drops zeros and ranks the remaining magnitudes 1..n, averaging ties.
pub fn signed_ranks(values: &[f64]) -> Result<SignedRanks, StatsError> {
    check_finite(values)?;
    let nonzero: Vec<f64> = values.iter().copied().filter(|&v| v != 0.0).collect();
    let n = nonzero.len();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| nonzero[a].abs().total_cmp(&nonzero[b].abs()).then(a.cmp(&b)));

    let mut ranks = vec![0.0; n];
    let mut tie_sizes = Vec::new();
    let mut start = 0;
    while start < n {
        let magnitude = nonzero[order[start]].abs();
        let mut end = start + 1;
        while end < n && nonzero[order[end]].abs() == magnitude {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let avg = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = avg;
        }
        tie_sizes.push(end - start);
        start = end;
    }

    Ok(SignedRanks {
        ranks,
        positive: nonzero.iter().map(|&v| v > 0.0).collect(),
        tie_sizes,
        n_nonzero: n,
    })
}
