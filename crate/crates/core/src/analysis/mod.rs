//! Relating pairwise consistency to language similarity.

mod correlation;
mod similarity;
pub mod special;
mod vocab;

pub use correlation::{linear_regression, pearson, CorrelationResult, LinearFit};
pub use similarity::{
    correlate_consistency, load_similarity, paired_values, read_similarity, SimilarityTable,
};
pub use vocab::{vocab_overlap, TokenVocabulary};
