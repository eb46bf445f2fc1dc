//! Per-candidate model scores, bound to a [`Dataset`].
//!
//! Score files are JSON Lines:
//! `{"fact_id": str, "language": str, "model_id": str, "scores": [float, ...]}`.
//! Scores are opaque reals; only the ranking they induce is used downstream.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, LanguageId};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub fact_id: String,
    pub language: LanguageId,
    pub model_id: String,
    pub scores: Vec<f64>,
}

/// Complete score coverage of one dataset for one model.
#[derive(Clone, Debug)]
pub struct ScoreStore {
    model_id: String,
    records: HashMap<(String, LanguageId), Vec<f64>>,
}

impl ScoreStore {
    /// Binds records to `dataset`, enforcing one finite, correctly sized
    /// record per (fact, language). Records for facts or languages outside
    /// the dataset are ignored with a warning.
    pub fn from_records(
        records: impl IntoIterator<Item = ScoreRecord>,
        dataset: &Dataset,
    ) -> Result<Self> {
        let mut model_id: Option<String> = None;
        let mut map = HashMap::new();
        let mut ignored = 0usize;
        for rec in records {
            match &model_id {
                None => model_id = Some(rec.model_id.clone()),
                Some(m) if *m != rec.model_id => {
                    return Err(Error::MixedModels {
                        first: m.clone(),
                        other: rec.model_id,
                    })
                }
                Some(_) => {}
            }
            let Some(fact) = dataset.fact(&rec.fact_id) else {
                ignored += 1;
                continue;
            };
            let Some(query) = fact.query(&rec.language) else {
                ignored += 1;
                continue;
            };
            if rec.scores.len() != query.candidates.len() {
                return Err(Error::ScoreLength {
                    fact_id: rec.fact_id,
                    language: rec.language.to_string(),
                    expected: query.candidates.len(),
                    actual: rec.scores.len(),
                });
            }
            if let Some(index) = rec.scores.iter().position(|s| !s.is_finite()) {
                return Err(Error::NonFiniteScore {
                    fact_id: rec.fact_id,
                    language: rec.language.to_string(),
                    index,
                });
            }
            let key = (rec.fact_id, rec.language);
            if map.contains_key(&key) {
                return Err(Error::DuplicateScores {
                    fact_id: key.0,
                    language: key.1.to_string(),
                });
            }
            map.insert(key, rec.scores);
        }
        if ignored > 0 {
            log::warn!("ignored {ignored} score records outside the dataset");
        }

        for fact in &dataset.facts {
            for lang in &dataset.languages {
                if !map.contains_key(&(fact.fact_id.clone(), lang.clone())) {
                    return Err(Error::MissingScores {
                        fact_id: fact.fact_id.clone(),
                        language: lang.to_string(),
                    });
                }
            }
        }

        Ok(ScoreStore {
            model_id: model_id.unwrap_or_default(),
            records: map,
        })
    }

    pub fn model_id(&self) -> &str {
        &self.model_id
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn scores(&self, fact_id: &str, language: &LanguageId) -> Result<&[f64]> {
        self.records
            .get(&(fact_id.to_string(), language.clone()))
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownRecord {
                fact_id: fact_id.to_string(),
                language: language.to_string(),
            })
    }

    /// Candidate indices sorted by descending score.
    pub fn ranked_candidates(&self, fact_id: &str, language: &LanguageId) -> Result<Vec<usize>> {
        self.scores(fact_id, language).map(rank_by_score)
    }

    /// Rankings for every fact of `dataset` in one language, in fact order.
    pub fn rankings(&self, dataset: &Dataset, language: &LanguageId) -> Result<Vec<Vec<usize>>> {
        dataset
            .facts
            .iter()
            .map(|f| self.ranked_candidates(&f.fact_id, language))
            .collect()
    }
}

/// Indices of `scores` from highest to lowest score; equal scores keep
/// ascending index order.
pub fn rank_by_score(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
}

pub fn read_score_records(reader: impl BufRead, origin: &str) -> Result<Vec<ScoreRecord>> {
    let mut out = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(origin, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: ScoreRecord = serde_json::from_str(&line)
            .map_err(|e| Error::parse(origin, lineno + 1, e.to_string()))?;
        out.push(rec);
    }
    Ok(out)
}

/// Loads a `*.scores.jsonl` file and binds it to `dataset`.
pub fn load_scores(path: impl AsRef<Path>, dataset: &Dataset) -> Result<ScoreStore> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let records = read_score_records(BufReader::new(file), &path.display().to_string())?;
    ScoreStore::from_records(records, dataset)
}

pub fn write_score_records<'a>(
    records: impl IntoIterator<Item = &'a ScoreRecord>,
    mut out: impl Write,
) -> std::io::Result<()> {
    for rec in records {
        serde_json::to_writer(&mut out, rec)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
