//! Order-canonical summation.
//!
//! Every mean in this crate goes through [`pairwise_sum`], so a result only
//! depends on the sequence of terms, never on how they were produced.

/// Below this length a block is summed left to right.
const BLOCK: usize = 8;

/// Pairwise (tree) summation over `values` in slice order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= BLOCK {
        return values.iter().fold(0.0, |acc, v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Arithmetic mean using [`pairwise_sum`] of deviations from the first
/// value, so a constant slice returns that constant exactly. Returns `None`
/// for an empty slice.
pub fn mean(values: &[f64]) -> Option<f64> {
    let &shift = values.first()?;
    let deviations: alloc::vec::Vec<f64> = values.iter().map(|v| v - shift).collect();
    Some(shift + pairwise_sum(&deviations) / values.len() as f64)
}

/// `ln(sum(exp(x)))` without overflow. Returns `-inf` for an empty slice.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let shifted: alloc::vec::Vec<f64> = values.iter().map(|v| libm::exp(v - max)).collect();
    max + libm::log(pairwise_sum(&shifted))
}
