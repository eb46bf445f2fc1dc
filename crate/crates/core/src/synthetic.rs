//! Seeded synthetic datasets and score stores, for tests and benchmarks.

use std::collections::BTreeMap;

use indexmap::IndexMap;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, FactRecord, LanguageId, LocalizedQuery, SLOT_MARKER};
use crate::error::{Error, Result};
use crate::scores::{ScoreRecord, ScoreStore};

/// Shape of a dataset without its content: languages, relation count and
/// how many facts have each candidate count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetShape {
    pub name: String,
    pub languages: Vec<String>,
    pub relations: usize,
    /// candidate count -> number of facts
    pub candidate_histogram: BTreeMap<usize, usize>,
}

impl DatasetShape {
    pub fn num_facts(&self) -> usize {
        self.candidate_histogram.values().sum()
    }
}

fn query(fact: usize, lang: &LanguageId, n: usize, answer: usize) -> LocalizedQuery {
    LocalizedQuery {
        prompt: format!("{lang} prompt {fact} is {SLOT_MARKER}."),
        candidates: (0..n).map(|c| format!("{lang}-{fact}-{c}")).collect(),
        answer_index: answer,
    }
}

/// A valid dataset matching `shape`. Facts are spread over relations round
/// robin; candidate counts are shuffled over facts.
pub fn dataset_from_shape(shape: &DatasetShape, seed: u64) -> Result<Dataset> {
    let languages = shape
        .languages
        .iter()
        .map(LanguageId::new)
        .collect::<Result<Vec<_>>>()?;
    let total = shape.num_facts();
    if shape.relations == 0 || shape.relations > total {
        return Err(Error::InvalidArgument(format!(
            "cannot spread {total} facts over {} relations",
            shape.relations
        )));
    }
    if shape.candidate_histogram.keys().any(|&n| n < 2) {
        return Err(Error::InvalidArgument(
            "facts need at least 2 candidates".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: Vec<usize> = shape
        .candidate_histogram
        .iter()
        .flat_map(|(&n, &k)| std::iter::repeat_n(n, k))
        .collect();
    counts.shuffle(&mut rng);
    let facts = counts
        .into_iter()
        .enumerate()
        .map(|(i, n)| {
            let answer = rng.gen_range(0..n);
            FactRecord {
                fact_id: format!("f{i:06}"),
                relation_id: format!("P{}", i % shape.relations),
                per_language: languages
                    .iter()
                    .map(|l| (l.clone(), query(i, l, n, answer)))
                    .collect(),
            }
        })
        .collect();
    Ok(Dataset::new(shape.name.clone(), languages, facts))
}

/// A valid dataset with `facts` facts whose candidate counts are drawn
/// uniformly from `min_candidates..=max_candidates`.
pub fn random_dataset(
    languages: &[&str],
    facts: usize,
    min_candidates: usize,
    max_candidates: usize,
    seed: u64,
) -> Result<Dataset> {
    if min_candidates < 2 || max_candidates < min_candidates {
        return Err(Error::InvalidArgument("bad candidate range".into()));
    }
    let languages = languages
        .iter()
        .map(|l| LanguageId::new(*l))
        .collect::<Result<Vec<_>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let facts = (0..facts)
        .map(|i| {
            let n = rng.gen_range(min_candidates..=max_candidates);
            let answer = rng.gen_range(0..n);
            let per_language: IndexMap<_, _> = languages
                .iter()
                .map(|l| (l.clone(), query(i, l, n, answer)))
                .collect();
            FactRecord {
                fact_id: format!("f{i:06}"),
                relation_id: format!("P{}", i % 7),
                per_language,
            }
        })
        .collect();
    Ok(Dataset::new("synthetic", languages, facts))
}

/// Score records where every language shares a per-fact base score vector
/// plus independent noise of amplitude `noise`. Small noise gives highly
/// consistent rankings; large noise gives nearly independent ones.
pub fn random_score_records(
    dataset: &Dataset,
    model_id: &str,
    noise: f64,
    seed: u64,
) -> Vec<ScoreRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(dataset.len() * dataset.languages.len());
    for fact in &dataset.facts {
        let n = fact.candidate_count().unwrap_or(0);
        let base: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..0.0)).collect();
        for lang in &dataset.languages {
            let scores = base
                .iter()
                .map(|b| b + noise * rng.gen_range(-1.0..1.0))
                .collect();
            out.push(ScoreRecord {
                fact_id: fact.fact_id.clone(),
                language: lang.clone(),
                model_id: model_id.to_string(),
                scores,
            });
        }
    }
    out
}

pub fn random_store(
    dataset: &Dataset,
    model_id: &str,
    noise: f64,
    seed: u64,
) -> Result<ScoreStore> {
    ScoreStore::from_records(
        random_score_records(dataset, model_id, noise, seed),
        dataset,
    )
}

/// Score records where every language ranks the same (random) candidate
/// first and orders the rest independently at random.
pub fn top1_agreeing_records(dataset: &Dataset, model_id: &str, seed: u64) -> Vec<ScoreRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(dataset.len() * dataset.languages.len());
    for fact in &dataset.facts {
        let n = fact.candidate_count().unwrap_or(0);
        let top = rng.gen_range(0..n);
        for lang in &dataset.languages {
            let mut scores: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..-1.0)).collect();
            scores[top] = 0.0;
            out.push(ScoreRecord {
                fact_id: fact.fact_id.clone(),
                language: lang.clone(),
                model_id: model_id.to_string(),
                scores,
            });
        }
    }
    out
}
