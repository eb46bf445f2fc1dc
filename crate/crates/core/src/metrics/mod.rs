//! Consistency metrics over candidate rankings.

mod matrix;
mod overlap;
mod pair;
mod weights;

pub use matrix::{
    consistency_matrix, format_percent, high_consistency_pairs, mean_clc, round_half_even,
    ConsistencyMatrix, LanguagePairValue, MatrixMetadata, Metric, UNDEFINED_CELL,
};
pub use overlap::{consist, precision_at_j};
pub use pair::{
    coverlap, coverlap_from_outcomes, pairwise_filter, probing_accuracy, rankc, rankc_of_rankings,
    rankc_with, top1_outcomes, CoverlapCounts, PairwiseFilterResult,
};
pub use weights::{weights, WeightScheme};
