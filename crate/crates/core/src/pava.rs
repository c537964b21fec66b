//! Pool-adjacent-violators projection onto the cone of non-increasing,
//! non-negative vectors (Euclidean metric, unit weights).

/// Least-squares non-increasing fit of `y`.
pub fn isotonic_decreasing(y: &[f64]) -> Vec<f64> {
    // blocks of (sum, count); each block mean must be >= the next one
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(y.len());
    for &v in y {
        blocks.push((v, 1));
        while blocks.len() >= 2 {
            let (s1, c1) = blocks[blocks.len() - 2];
            let (s2, c2) = blocks[blocks.len() - 1];
            if s1 / c1 as f64 >= s2 / c2 as f64 {
                break;
            }
            blocks.pop();
            *blocks.last_mut().unwrap() = (s1 + s2, c1 + c2);
        }
    }
    blocks
        .into_iter()
        .flat_map(|(s, c)| std::iter::repeat_n(s / c as f64, c))
        .collect()
}

/// Projection onto `{eta : eta_1 >= eta_2 >= ... >= 0}`.
///
/// Clipping the isotonic fit at zero is the exact projection onto the
/// intersection, because the fit is monotone and clipping preserves order.
pub fn project_decreasing_nonneg(y: &[f64]) -> Vec<f64> {
    isotonic_decreasing(y)
        .into_iter()
        .map(|v| v.max(0.0))
        .collect()
}
