//! Top-j overlap between two aligned candidate rankings.
//!
//! A ranking is a permutation of candidate indices `0..n`, best first. Two
//! rankings of the same fact in different languages share the index space
//! because candidate lists are translations of each other position by
//! position.

use std::collections::HashSet;

use super::weights::{weights, WeightScheme};
use crate::error::{Error, Result};

fn check_permutation(ranking: &[usize], n: usize, which: &str) -> Result<Vec<usize>> {
    if ranking.len() != n {
        return Err(Error::InvalidRanking(format!(
            "{which} ranking has {} entries, expected {n}",
            ranking.len()
        )));
    }
    let mut position = vec![usize::MAX; n];
    for (rank, &idx) in ranking.iter().enumerate() {
        if idx >= n || position[idx] != usize::MAX {
            return Err(Error::InvalidRanking(format!(
                "{which} ranking is not a permutation of 0..{n}"
            )));
        }
        position[idx] = rank;
    }
    Ok(position)
}

/// Fraction of candidates shared by the top `j` of both rankings.
pub fn precision_at_j(rank_a: &[usize], rank_b: &[usize], j: usize) -> Result<f64> {
    let n = rank_a.len();
    check_permutation(rank_a, n, "first")?;
    check_permutation(rank_b, n, "second")?;
    if j == 0 || j > n {
        return Err(Error::InvalidArgument(format!("j = {j} outside 1..={n}")));
    }
    let top_a: HashSet<usize> = rank_a[..j].iter().copied().collect();
    let shared = rank_b[..j].iter().filter(|c| top_a.contains(c)).count();
    Ok(shared as f64 / j as f64)
}

/// Weighted sum of `P@j` for `j = 1..n`.
///
/// Computed in one pass: at depth `j` the intersection grows by one for
/// `a_j` if it already appeared in the first `j` of `b`, and likewise for
/// `b_j`, counting once when `a_j == b_j`. The sum is accumulated as
/// `1 - Σ w_j (1 - P@j)` so identical rankings give exactly 1.
pub fn consist(rank_a: &[usize], rank_b: &[usize], scheme: WeightScheme) -> Result<f64> {
    let n = rank_a.len();
    if rank_b.len() != n {
        return Err(Error::InvalidRanking(format!(
            "ranking lengths differ: {} vs {}",
            n,
            rank_b.len()
        )));
    }
    let w = weights(scheme, n)?;
    consist_with_weights(rank_a, rank_b, &w)
}

pub(crate) fn consist_with_weights(rank_a: &[usize], rank_b: &[usize], w: &[f64]) -> Result<f64> {
    let n = rank_a.len();
    let pos_a = check_permutation(rank_a, n, "first")?;
    let pos_b = check_permutation(rank_b, n, "second")?;
    let mut shared = 0usize;
    let mut deficit = 0.0;
    for depth in 0..n {
        let (a, b) = (rank_a[depth], rank_b[depth]);
        if a == b {
            shared += 1;
        } else {
            shared += usize::from(pos_b[a] <= depth) + usize::from(pos_a[b] <= depth);
        }
        let j = depth + 1;
        if shared < j {
            deficit += w[depth] * (j - shared) as f64 / j as f64;
        }
    }
    Ok((1.0 - deficit).clamp(0.0, 1.0))
}
