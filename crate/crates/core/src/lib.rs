//! Cross-lingual consistency of factual knowledge in multilingual language
//! models: datasets of aligned queries, per-candidate scores, ranking
//! consistency metrics and their analysis.

pub mod analysis;
pub mod dataset;
pub mod editing;
pub mod error;
pub mod exec;
pub mod heatmap;
pub mod metrics;
pub mod scores;
pub mod synthetic;

pub use dataset::{Dataset, FactRecord, LanguageId, LocalizedQuery};
pub use error::{Error, Result};
pub use exec::Execution;
pub use metrics::{ConsistencyMatrix, Metric, WeightScheme};
pub use scores::{ScoreRecord, ScoreStore};
