use super::matrix::Matrix;
use crate::error::{check_len, invalid, Result};
use crate::math;

/// Probabilities are clamped to at least this value before taking the log.
pub const LOG_CLAMP: f64 = 1e-12;

fn check_batch(probs: &Matrix, labels: &[usize]) -> Result<()> {
    check_len(probs.rows(), labels.len())?;
    if labels.iter().any(|&l| l >= probs.cols()) {
        return Err(invalid("labels", "class index out of range"));
    }
    Ok(())
}

/// Mean categorical cross-entropy `−(1/M) Σ_o log p_o[label_o]`.
pub fn cross_entropy(probs: &Matrix, labels: &[usize]) -> Result<f64> {
    check_batch(probs, labels)?;
    let mut total = 0.0;
    for (r, &label) in labels.iter().enumerate() {
        let row = probs.row(r);
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > 1e-6 {
            return Err(invalid("probs", "rows must sum to 1"));
        }
        total -= math::log(row[label].max(LOG_CLAMP));
    }
    Ok(total / labels.len() as f64)
}

/// Gradient of [`cross_entropy`] composed with softmax, taken with respect
/// to the logits: `(p − onehot) / M`.
pub fn softmax_cross_entropy_grad(probs: &Matrix, labels: &[usize]) -> Result<Matrix> {
    check_batch(probs, labels)?;
    let m = labels.len() as f64;
    let mut g = probs.clone();
    for (r, &label) in labels.iter().enumerate() {
        let row = g.row_mut(r);
        row[label] -= 1.0;
        row.iter_mut().for_each(|v| *v /= m);
    }
    Ok(g)
}
