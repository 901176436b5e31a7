use std::collections::HashMap;

use crate::error::{Error, Result};

/// Fowlkes–Mallows index `TP / sqrt((TP + FP)(TP + FN))` over sample pairs.
///
/// `TP` counts pairs co-clustered in both labelings, `TP + FP` pairs
/// co-clustered in `truth`, `TP + FN` pairs co-clustered in `predicted`.
/// Returns 0 when either labeling has no co-clustered pair.
pub fn fmi(truth: &[usize], predicted: &[usize]) -> Result<f64> {
    if truth.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            left: truth.len(),
            right: predicted.len(),
        });
    }
    if truth.len() < 2 {
        return Err(Error::InvalidParameter("FMI needs at least two samples".into()));
    }
    let pairs = |count: u64| count * count.saturating_sub(1) / 2;

    let mut joint: HashMap<(usize, usize), u64> = HashMap::new();
    let mut by_truth: HashMap<usize, u64> = HashMap::new();
    let mut by_pred: HashMap<usize, u64> = HashMap::new();
    for (&t, &p) in truth.iter().zip(predicted) {
        *joint.entry((t, p)).or_default() += 1;
        *by_truth.entry(t).or_default() += 1;
        *by_pred.entry(p).or_default() += 1;
    }
    let tp: u64 = joint.values().map(|&c| pairs(c)).sum();
    let truth_pairs: u64 = by_truth.values().map(|&c| pairs(c)).sum();
    let pred_pairs: u64 = by_pred.values().map(|&c| pairs(c)).sum();
    if tp == 0 {
        return Ok(0.0);
    }
    Ok(tp as f64 / ((truth_pairs as f64) * (pred_pairs as f64)).sqrt())
}
