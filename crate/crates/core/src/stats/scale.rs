use super::{check_finite, StatsError};

/// Maps values onto [0, 1] by `(v - min) / (max - min)`. A constant input
/// maps to all zeros.
pub fn min_max_scale(values: &[f64]) -> Result<Vec<f64>, StatsError> {
    check_finite(values)?;
    let Some(&first) = values.first() else {
        return Ok(Vec::new());
    };
    let (min, max) = values
        .iter()
        .fold((first, first), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let range = max - min;
    if range == 0.0 {
        return Ok(vec![0.0; values.len()]);
    }
    Ok(values.iter().map(|&v| ((v - min) / range).clamp(0.0, 1.0)).collect())
}
