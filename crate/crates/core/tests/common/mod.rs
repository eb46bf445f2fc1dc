#![allow(dead_code)]

use std::collections::BTreeSet;

use clc_core::{Dataset, FactRecord, LanguageId, LocalizedQuery, ScoreRecord, ScoreStore};
use proptest::prelude::*;

pub fn lang(code: &str) -> LanguageId {
    LanguageId::new(code).unwrap()
}

/// Per fact: answer index and one score vector per language.
#[derive(Clone, Debug)]
pub struct FactScores {
    pub answer: usize,
    pub scores: Vec<Vec<f64>>,
}

pub fn build(langs: &[&str], facts: &[FactScores]) -> (Dataset, ScoreStore) {
    let languages: Vec<LanguageId> = langs.iter().map(|l| lang(l)).collect();
    let mut records = Vec::new();
    let facts_out = facts
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let n = f.scores[0].len();
            let fact_id = format!("f{i:03}");
            let per_language = languages
                .iter()
                .zip(&f.scores)
                .map(|(l, s)| {
                    records.push(ScoreRecord {
                        fact_id: fact_id.clone(),
                        language: l.clone(),
                        model_id: "oracle".into(),
                        scores: s.clone(),
                    });
                    (
                        l.clone(),
                        LocalizedQuery {
                            prompt: format!("{l} {i} [Y]"),
                            candidates: (0..n).map(|c| format!("{l}{c}")).collect(),
                            answer_index: f.answer,
                        },
                    )
                })
                .collect();
            FactRecord {
                fact_id,
                relation_id: "P1".into(),
                per_language,
            }
        })
        .collect();
    let ds = Dataset::new("t", languages, facts_out);
    let store = ScoreStore::from_records(records, &ds).unwrap();
    (ds, store)
}

/// Small integer-valued scores so that ties are common.
pub fn fact_strategy(langs: usize, max_n: usize) -> impl Strategy<Value = FactScores> {
    (2..=max_n).prop_flat_map(move |n| {
        (
            0..n,
            prop::collection::vec(
                prop::collection::vec((-4i32..=4).prop_map(f64::from), n),
                langs,
            ),
        )
            .prop_map(|(answer, scores)| FactScores { answer, scores })
    })
}

pub fn facts_strategy(
    langs: usize,
    max_n: usize,
    max_facts: usize,
) -> impl Strategy<Value = Vec<FactScores>> {
    prop::collection::vec(fact_strategy(langs, max_n), 1..=max_facts)
}

/// Descending by score, ties by ascending index, by selection.
pub fn oracle_ranking(scores: &[f64]) -> Vec<usize> {
    let mut left: Vec<usize> = (0..scores.len()).collect();
    let mut out = Vec::new();
    while !left.is_empty() {
        let mut best = 0;
        for k in 1..left.len() {
            if scores[left[k]] > scores[left[best]] {
                best = k;
            }
        }
        out.push(left.remove(best));
    }
    out
}

/// Weights straight from their defining formulas.
pub fn oracle_weights(scheme: &str, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    let raw: Vec<f64> = (1..=n)
        .map(|j| match scheme {
            "softmax" => ((n - j) as f64).exp(),
            "norm1" => (n - j) as f64,
            "norm2" => ((n - j) as f64).powi(2),
            _ => unreachable!(),
        })
        .collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|w| w / total).collect()
}

/// Sum of w_j * |top_j(a) ∩ top_j(b)| / j with explicit sets.
pub fn oracle_consist(a: &[usize], b: &[usize], w: &[f64]) -> f64 {
    (1..=a.len())
        .map(|j| {
            let sa: BTreeSet<usize> = a[..j].iter().copied().collect();
            let sb: BTreeSet<usize> = b[..j].iter().copied().collect();
            w[j - 1] * sa.intersection(&sb).count() as f64 / j as f64
        })
        .sum()
}
