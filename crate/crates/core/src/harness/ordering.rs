//! Sorting score, the global row permutation, and best/worst pairs.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::harness::sweep::SweepRecord;

/// Boundary between the weak and the essential regime.
pub const REGIME_BOUNDARY: f64 = 0.25;

/// `S_k`: mean two-copy tightness of pair `k` over the strong-regime
/// (`ε > 0.25`) grid points. Records with `n ≠ 2` are ignored.
pub fn sorting_score(records: &[SweepRecord], n_pairs: usize) -> Result<Vec<f64>> {
    let mut sums = vec![(0.0, 0usize); n_pairs];
    for r in records.iter().filter(|r| r.n == 2 && r.epsilon > REGIME_BOUNDARY) {
        let slot = sums.get_mut(r.pair_index).ok_or_else(|| {
            Error::InvalidArgument(format!("pair index {} out of range for {n_pairs} pairs", r.pair_index))
        })?;
        slot.0 += r.tightness;
        slot.1 += 1;
    }
    sums.iter()
        .enumerate()
        .map(|(k, &(sum, count))| {
            if count == 0 {
                Err(Error::InvalidArgument(format!(
                    "pair {k} has no n = 2 records with epsilon > 0.25"
                )))
            } else {
                Ok(sum / count as f64)
            }
        })
        .collect()
}

/// Stable ascending order of the scores (0-based pair indices).
pub fn sort_pairs(scores: &[f64]) -> Vec<usize> {
    let mut pi: Vec<usize> = (0..scores.len()).collect();
    pi.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    pi
}

/// `(best, worst)` pair indices for copy number `n`, ranking pairs by the
/// largest optimized `ΔD′ₙ` over weak-regime points `0 < ε < 0.25`. Ties go to
/// the lowest index.
pub fn extract_extremes(records: &[SweepRecord], n: usize) -> Result<(usize, usize)> {
    let mut peaks: BTreeMap<usize, f64> = BTreeMap::new();
    for r in records
        .iter()
        .filter(|r| r.n == n && r.epsilon > 0.0 && r.epsilon < REGIME_BOUNDARY)
    {
        let peak = peaks.entry(r.pair_index).or_insert(f64::NEG_INFINITY);
        *peak = peak.max(r.delta_d_prime);
    }
    let mut it = peaks.into_iter();
    let (first, v) = it
        .next()
        .ok_or_else(|| Error::InvalidArgument(format!("no weak-regime records for n = {n}")))?;
    let (mut best, mut worst) = ((first, v), (first, v));
    for (k, v) in it {
        if v > best.1 {
            best = (k, v);
        }
        if v < worst.1 {
            worst = (k, v);
        }
    }
    Ok((best.0, worst.0))
}
