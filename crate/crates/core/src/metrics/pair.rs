use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::overlap::consist_with_weights;
use super::weights::{weights, WeightScheme};
use crate::dataset::{Dataset, LanguageId};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::scores::ScoreStore;

fn require_language(dataset: &Dataset, language: &LanguageId) -> Result<()> {
    if dataset.contains_language(language) {
        Ok(())
    } else {
        Err(Error::UnknownLanguage(language.to_string()))
    }
}

/// Ranking-based consistency between two languages: the mean over all facts
/// of the weighted top-j overlap of their candidate rankings.
pub fn rankc(
    dataset: &Dataset,
    store: &ScoreStore,
    lang_a: &LanguageId,
    lang_b: &LanguageId,
    scheme: WeightScheme,
) -> Result<f64> {
    rankc_with(dataset, store, lang_a, lang_b, scheme, Execution::default())
}

pub fn rankc_with(
    dataset: &Dataset,
    store: &ScoreStore,
    lang_a: &LanguageId,
    lang_b: &LanguageId,
    scheme: WeightScheme,
    exec: Execution,
) -> Result<f64> {
    require_language(dataset, lang_a)?;
    require_language(dataset, lang_b)?;
    let a = store.rankings(dataset, lang_a)?;
    let b = store.rankings(dataset, lang_b)?;
    rankc_of_rankings(&a, &b, scheme, exec)
}

/// RankC over precomputed per-fact rankings (fact order must match).
pub fn rankc_of_rankings(
    rank_a: &[Vec<usize>],
    rank_b: &[Vec<usize>],
    scheme: WeightScheme,
    exec: Execution,
) -> Result<f64> {
    if rank_a.len() != rank_b.len() {
        return Err(Error::InvalidArgument(format!(
            "query sets differ in size: {} vs {}",
            rank_a.len(),
            rank_b.len()
        )));
    }
    if rank_a.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut table: HashMap<usize, Vec<f64>> = HashMap::new();
    for r in rank_a {
        if let Entry::Vacant(slot) = table.entry(r.len()) {
            slot.insert(weights(scheme, r.len())?);
        }
    }
    let pairs: Vec<(&Vec<usize>, &Vec<usize>)> = rank_a.iter().zip(rank_b).collect();
    let per_fact = exec.map(&pairs, |(a, b)| {
        if a.len() != b.len() {
            return Err(Error::InvalidRanking(format!(
                "ranking lengths differ: {} vs {}",
                a.len(),
                b.len()
            )));
        }
        consist_with_weights(a, b, &table[&a.len()])
    });
    let mut total = 0.0;
    for c in per_fact {
        total += c?;
    }
    Ok(total / rank_a.len() as f64)
}

/// Fact ids kept for a language pair: those available in both.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairwiseFilterResult {
    pub retained: Vec<String>,
}

impl PairwiseFilterResult {
    pub fn len(&self) -> usize {
        self.retained.len()
    }

    pub fn is_empty(&self) -> bool {
        self.retained.is_empty()
    }
}

pub fn pairwise_filter<'a>(
    available_a: impl IntoIterator<Item = &'a str>,
    available_b: impl IntoIterator<Item = &'a str>,
) -> PairwiseFilterResult {
    let b: std::collections::HashSet<&str> = available_b.into_iter().collect();
    let mut retained: Vec<String> = available_a
        .into_iter()
        .filter(|id| b.contains(id))
        .map(str::to_string)
        .collect();
    retained.sort();
    retained.dedup();
    PairwiseFilterResult { retained }
}

/// Indicator counts behind the correct-prediction overlap of two languages.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CoverlapCounts {
    pub compared: usize,
    pub both_correct: usize,
    pub any_correct: usize,
}

impl CoverlapCounts {
    /// `both_correct / any_correct`, or `None` when neither language ever
    /// answers correctly.
    pub fn value(&self) -> Option<f64> {
        (self.any_correct > 0).then(|| self.both_correct as f64 / self.any_correct as f64)
    }
}

/// Correct-prediction overlap from per-language top-1 outcomes
/// (fact id → top-1 correct). Only facts present in both maps are counted.
pub fn coverlap_from_outcomes(
    a: &BTreeMap<String, bool>,
    b: &BTreeMap<String, bool>,
) -> CoverlapCounts {
    let kept = pairwise_filter(a.keys().map(String::as_str), b.keys().map(String::as_str));
    let mut counts = CoverlapCounts {
        compared: kept.len(),
        both_correct: 0,
        any_correct: 0,
    };
    for id in &kept.retained {
        let (x, y) = (a[id], b[id]);
        counts.both_correct += usize::from(x && y);
        counts.any_correct += usize::from(x || y);
    }
    counts
}

/// Top-1 correctness of every fact in one language.
pub fn top1_outcomes(
    dataset: &Dataset,
    store: &ScoreStore,
    language: &LanguageId,
) -> Result<BTreeMap<String, bool>> {
    require_language(dataset, language)?;
    dataset
        .facts
        .iter()
        .map(|fact| {
            let query = fact.query(language).ok_or_else(|| Error::UnknownRecord {
                fact_id: fact.fact_id.clone(),
                language: language.to_string(),
            })?;
            let ranked = store.ranked_candidates(&fact.fact_id, language)?;
            Ok((
                fact.fact_id.clone(),
                ranked.first() == Some(&query.answer_index),
            ))
        })
        .collect()
}

pub fn coverlap(
    dataset: &Dataset,
    store: &ScoreStore,
    lang_a: &LanguageId,
    lang_b: &LanguageId,
) -> Result<CoverlapCounts> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let a = top1_outcomes(dataset, store, lang_a)?;
    let b = top1_outcomes(dataset, store, lang_b)?;
    Ok(coverlap_from_outcomes(&a, &b))
}

/// Fraction of facts whose top-ranked candidate is the correct answer.
pub fn probing_accuracy(
    dataset: &Dataset,
    store: &ScoreStore,
    language: &LanguageId,
) -> Result<f64> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let outcomes = top1_outcomes(dataset, store, language)?;
    let correct = outcomes.values().filter(|&&c| c).count();
    Ok(correct as f64 / outcomes.len() as f64)
}
