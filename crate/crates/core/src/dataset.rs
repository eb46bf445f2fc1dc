//! Balanced multi-parallel probing datasets.
//!
//! A [`Dataset`] holds facts that exist in every language of the dataset,
//! each with an index-aligned candidate list: candidate `k` in one language
//! is the translation of candidate `k` in every other language, and the
//! correct answer sits at the same index everywhere.
//!
//! On disk a dataset is JSON Lines, one [`FactRecord`] per line:
//!
//! ```text
//! {"fact_id":"P19-17","relation_id":"P19","languages":{"en":{"prompt":"...[Y]...","candidates":["..."],"answer_index":0}}}
//! ```

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Literal marking the object slot inside a prompt.
pub const SLOT_MARKER: &str = "[Y]";

/// Lowercase ISO-639-1/3 language code.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct LanguageId(String);

impl LanguageId {
    pub fn new(code: impl Into<String>) -> Result<Self> {
        let code = code.into();
        let ok = (2..=3).contains(&code.len()) && code.bytes().all(|b| b.is_ascii_lowercase());
        if ok {
            Ok(LanguageId(code))
        } else {
            Err(Error::InvalidLanguage(code))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for LanguageId {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        LanguageId::new(value)
    }
}

impl TryFrom<&str> for LanguageId {
    type Error = Error;

    fn try_from(value: &str) -> Result<Self> {
        LanguageId::new(value)
    }
}

impl From<LanguageId> for String {
    fn from(id: LanguageId) -> String {
        id.0
    }
}

impl fmt::Display for LanguageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::str::FromStr for LanguageId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LanguageId::new(s)
    }
}

/// One language's version of a query: the prompt and its candidate answers
/// in dataset order (not ranked).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalizedQuery {
    pub prompt: String,
    pub candidates: Vec<String>,
    pub answer_index: usize,
}

/// A fact with its aligned queries in every language.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactRecord {
    pub fact_id: String,
    pub relation_id: String,
    #[serde(rename = "languages")]
    pub per_language: IndexMap<LanguageId, LocalizedQuery>,
}

impl FactRecord {
    /// Candidate count of the first language entry; `None` for a fact with no
    /// languages at all.
    pub fn candidate_count(&self) -> Option<usize> {
        self.per_language
            .values()
            .next()
            .map(|q| q.candidates.len())
    }

    pub fn query(&self, language: &LanguageId) -> Option<&LocalizedQuery> {
        self.per_language.get(language)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub languages: Vec<LanguageId>,
    pub facts: Vec<FactRecord>,
}

#[derive(Serialize)]
struct FactLine<'a> {
    fact_id: &'a str,
    relation_id: &'a str,
    languages: IndexMap<&'a LanguageId, &'a LocalizedQuery>,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        languages: Vec<LanguageId>,
        facts: Vec<FactRecord>,
    ) -> Self {
        Dataset {
            name: name.into(),
            languages,
            facts,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn language_index(&self, language: &LanguageId) -> Option<usize> {
        self.languages.iter().position(|l| l == language)
    }

    pub fn contains_language(&self, language: &LanguageId) -> bool {
        self.language_index(language).is_some()
    }

    pub fn fact(&self, fact_id: &str) -> Option<&FactRecord> {
        self.facts.iter().find(|f| f.fact_id == fact_id)
    }

    /// Reads a `*.bmlama.jsonl` file. The dataset name is the file name up to
    /// its first dot; the language list is the union of all language keys in
    /// order of first appearance. No invariants beyond syntax are checked here,
    /// see [`validate`].
    pub fn read_jsonl(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let name = path
            .file_name()
            .and_then(|n| n.to_str())
            .map(|n| n.split('.').next().unwrap_or(n).to_string())
            .unwrap_or_default();
        Self::from_reader(name, BufReader::new(file), &path.display().to_string())
    }

    pub fn from_reader(
        name: impl Into<String>,
        reader: impl BufRead,
        origin: &str,
    ) -> Result<Self> {
        let mut languages: Vec<LanguageId> = Vec::new();
        let mut seen: HashSet<LanguageId> = HashSet::new();
        let mut facts = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(origin, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let fact: FactRecord = serde_json::from_str(&line)
                .map_err(|e| Error::parse(origin, lineno + 1, e.to_string()))?;
            for lang in fact.per_language.keys() {
                if seen.insert(lang.clone()) {
                    languages.push(lang.clone());
                }
            }
            facts.push(fact);
        }
        Ok(Dataset::new(name, languages, facts))
    }

    /// Writes one JSON object per fact, language keys in dataset order.
    pub fn write_jsonl(&self, mut out: impl Write) -> std::io::Result<()> {
        for fact in &self.facts {
            let mut languages: IndexMap<&LanguageId, &LocalizedQuery> = IndexMap::new();
            for lang in &self.languages {
                if let Some(q) = fact.per_language.get(lang) {
                    languages.insert(lang, q);
                }
            }
            for (lang, q) in &fact.per_language {
                languages.entry(lang).or_insert(q);
            }
            let line = FactLine {
                fact_id: &fact.fact_id,
                relation_id: &fact.relation_id,
                languages,
            };
            serde_json::to_writer(&mut out, &line)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("serde_json emits UTF-8")
    }

    /// Splits the dataset back into one raw source per language.
    pub fn to_sources(&self) -> Vec<RawSource> {
        self.languages
            .iter()
            .map(|lang| RawSource {
                language: lang.clone(),
                entries: self
                    .facts
                    .iter()
                    .filter_map(|f| {
                        f.per_language.get(lang).map(|q| RawEntry {
                            fact_id: f.fact_id.clone(),
                            relation_id: f.relation_id.clone(),
                            query: q.clone(),
                        })
                    })
                    .collect(),
            })
            .collect()
    }
}

/// Queries collected for one language, keyed by fact id.
#[derive(Clone, Debug, PartialEq)]
pub struct RawSource {
    pub language: LanguageId,
    pub entries: Vec<RawEntry>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RawEntry {
    pub fact_id: String,
    pub relation_id: String,
    pub query: LocalizedQuery,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum DropReason {
    CandidateCountMismatch { counts: BTreeMap<String, usize> },
    AnswerIndexMismatch { indices: BTreeMap<String, usize> },
    RelationMismatch { relations: BTreeMap<String, String> },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DroppedFact {
    pub fact_id: String,
    #[serde(flatten)]
    pub reason: DropReason,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BuildOutcome {
    pub dataset: Dataset,
    pub dropped: Vec<DroppedFact>,
}

/// Builds a balanced dataset from per-language query collections.
///
/// Keeps the facts present in every source whose candidate lists have the
/// same length and answer index everywhere. Misaligned facts are dropped
/// with a warning and listed in [`BuildOutcome::dropped`]. Output facts are
/// sorted by `fact_id`; languages keep source order.
pub fn build_balanced(name: impl Into<String>, sources: Vec<RawSource>) -> Result<BuildOutcome> {
    let mut languages = Vec::with_capacity(sources.len());
    let mut by_language: Vec<BTreeMap<String, RawEntry>> = Vec::with_capacity(sources.len());
    for source in sources {
        if languages.contains(&source.language) {
            return Err(Error::InvalidArgument(format!(
                "language {} supplied by more than one source",
                source.language
            )));
        }
        let mut entries = BTreeMap::new();
        for entry in source.entries {
            if entries.contains_key(&entry.fact_id) {
                return Err(Error::DuplicateFact {
                    fact_id: entry.fact_id,
                    language: source.language.to_string(),
                });
            }
            entries.insert(entry.fact_id.clone(), entry);
        }
        languages.push(source.language);
        by_language.push(entries);
    }

    let Some((first, rest)) = by_language.split_first() else {
        return Ok(BuildOutcome {
            dataset: Dataset::new(name, languages, Vec::new()),
            dropped: Vec::new(),
        });
    };

    let mut facts = Vec::new();
    let mut dropped = Vec::new();
    let mut partial = 0usize;
    for fact_id in first.keys() {
        let entries: Option<Vec<&RawEntry>> = std::iter::once(first.get(fact_id))
            .chain(rest.iter().map(|m| m.get(fact_id)))
            .collect();
        let Some(entries) = entries else {
            partial += 1;
            continue;
        };
        let keyed = |f: &dyn Fn(&RawEntry) -> usize| -> BTreeMap<String, usize> {
            languages
                .iter()
                .zip(&entries)
                .map(|(l, e)| (l.to_string(), f(e)))
                .collect()
        };

        let reason = if !all_equal(entries.iter().map(|e| e.query.candidates.len())) {
            Some(DropReason::CandidateCountMismatch {
                counts: keyed(&|e| e.query.candidates.len()),
            })
        } else if !all_equal(entries.iter().map(|e| e.query.answer_index)) {
            Some(DropReason::AnswerIndexMismatch {
                indices: keyed(&|e| e.query.answer_index),
            })
        } else if !all_equal(entries.iter().map(|e| e.relation_id.as_str())) {
            Some(DropReason::RelationMismatch {
                relations: languages
                    .iter()
                    .zip(&entries)
                    .map(|(l, e)| (l.to_string(), e.relation_id.clone()))
                    .collect(),
            })
        } else {
            None
        };

        if let Some(reason) = reason {
            log::warn!("dropping fact {fact_id}: {reason:?}");
            dropped.push(DroppedFact {
                fact_id: fact_id.clone(),
                reason,
            });
            continue;
        }

        let per_language = languages
            .iter()
            .zip(&entries)
            .map(|(l, e)| (l.clone(), e.query.clone()))
            .collect();
        facts.push(FactRecord {
            fact_id: fact_id.clone(),
            relation_id: entries[0].relation_id.clone(),
            per_language,
        });
    }
    if partial > 0 {
        log::info!("{partial} facts are missing from at least one language and were excluded");
    }

    Ok(BuildOutcome {
        dataset: Dataset::new(name, languages, facts),
        dropped,
    })
}

fn all_equal<T: PartialEq>(mut it: impl Iterator<Item = T>) -> bool {
    match it.next() {
        None => true,
        Some(first) => it.all(|x| x == first),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    DuplicateLanguage,
    DuplicateFactId,
    EmptyField,
    MissingLanguage,
    UnexpectedLanguage,
    CandidateCountMismatch,
    AnswerIndexMismatch,
    AnswerIndexOutOfRange,
    TooFewCandidates,
    EmptyCandidate,
    DuplicateCandidate,
    PromptSlot,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fact_id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub language: Option<String>,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn kinds(&self) -> BTreeSet<String> {
        self.violations
            .iter()
            .map(|v| {
                serde_json::to_value(v.kind)
                    .unwrap()
                    .as_str()
                    .unwrap()
                    .to_string()
            })
            .collect()
    }

    fn push(
        &mut self,
        kind: ViolationKind,
        fact: Option<&str>,
        lang: Option<&LanguageId>,
        message: String,
    ) {
        self.violations.push(Violation {
            kind,
            fact_id: fact.map(str::to_string),
            language: lang.map(ToString::to_string),
            message,
        });
    }
}

/// Checks every dataset invariant and reports all violations found.
pub fn validate(dataset: &Dataset) -> ValidationReport {
    let mut report = ValidationReport::default();

    let mut langs = HashSet::new();
    for lang in &dataset.languages {
        if !langs.insert(lang) {
            report.push(
                ViolationKind::DuplicateLanguage,
                None,
                Some(lang),
                format!("language {lang} declared more than once"),
            );
        }
    }

    let mut fact_ids = HashSet::new();
    for fact in &dataset.facts {
        let id = fact.fact_id.as_str();
        if !fact_ids.insert(id) {
            report.push(
                ViolationKind::DuplicateFactId,
                Some(id),
                None,
                format!("fact_id {id} appears more than once"),
            );
        }
        if id.is_empty() || fact.relation_id.is_empty() {
            report.push(
                ViolationKind::EmptyField,
                Some(id),
                None,
                "fact_id and relation_id must be non-empty".into(),
            );
        }

        for lang in &dataset.languages {
            if !fact.per_language.contains_key(lang) {
                report.push(
                    ViolationKind::MissingLanguage,
                    Some(id),
                    Some(lang),
                    format!("fact {id} has no query in {lang}"),
                );
            }
        }
        for lang in fact.per_language.keys() {
            if !dataset.languages.contains(lang) {
                report.push(
                    ViolationKind::UnexpectedLanguage,
                    Some(id),
                    Some(lang),
                    format!("fact {id} has a query in undeclared language {lang}"),
                );
            }
        }

        // The first declared language present is the reference for alignment.
        let reference = dataset
            .languages
            .iter()
            .find_map(|l| fact.per_language.get(l).map(|q| (l, q)));

        for (lang, query) in &fact.per_language {
            check_query(&mut report, id, lang, query);
            let Some((ref_lang, ref_query)) = reference else {
                continue;
            };
            if lang == ref_lang {
                continue;
            }
            if query.candidates.len() != ref_query.candidates.len() {
                report.push(
                    ViolationKind::CandidateCountMismatch,
                    Some(id),
                    Some(lang),
                    format!(
                        "{} candidates in {lang} but {} in {ref_lang}",
                        query.candidates.len(),
                        ref_query.candidates.len()
                    ),
                );
            }
            if query.answer_index != ref_query.answer_index {
                report.push(
                    ViolationKind::AnswerIndexMismatch,
                    Some(id),
                    Some(lang),
                    format!(
                        "answer_index {} in {lang} but {} in {ref_lang}",
                        query.answer_index, ref_query.answer_index
                    ),
                );
            }
        }
    }
    report
}

fn check_query(report: &mut ValidationReport, id: &str, lang: &LanguageId, query: &LocalizedQuery) {
    let n = query.candidates.len();
    if n < 2 {
        report.push(
            ViolationKind::TooFewCandidates,
            Some(id),
            Some(lang),
            format!("{n} candidates, at least 2 required"),
        );
    }
    if query.answer_index >= n {
        report.push(
            ViolationKind::AnswerIndexOutOfRange,
            Some(id),
            Some(lang),
            format!(
                "answer_index {} out of range for {n} candidates",
                query.answer_index
            ),
        );
    }
    if query.candidates.iter().any(|c| c.trim().is_empty()) {
        report.push(
            ViolationKind::EmptyCandidate,
            Some(id),
            Some(lang),
            "empty candidate string".into(),
        );
    }
    let mut seen = HashSet::new();
    for c in &query.candidates {
        if !c.trim().is_empty() && !seen.insert(c.as_str()) {
            report.push(
                ViolationKind::DuplicateCandidate,
                Some(id),
                Some(lang),
                format!("candidate {c:?} listed more than once"),
            );
        }
    }
    let slots = query.prompt.matches(SLOT_MARKER).count();
    if slots != 1 {
        report.push(
            ViolationKind::PromptSlot,
            Some(id),
            Some(lang),
            format!("prompt has {slots} {SLOT_MARKER} markers, expected exactly 1"),
        );
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DatasetStats {
    pub num_languages: usize,
    pub num_relations: usize,
    pub num_queries_per_language: usize,
    pub mean_candidates: f64,
}

impl DatasetStats {
    /// Mean candidate count rounded to two decimals, as reported.
    pub fn mean_candidates_rounded(&self) -> f64 {
        (self.mean_candidates * 100.0).round() / 100.0
    }
}

impl fmt::Display for DatasetStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "languages={} relations={} queries/language={} mean candidates={:.2}",
            self.num_languages,
            self.num_relations,
            self.num_queries_per_language,
            self.mean_candidates
        )
    }
}

/// Summary counts for a (valid) dataset.
pub fn stats(dataset: &Dataset) -> Result<DatasetStats> {
    if dataset.facts.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let relations: HashSet<&str> = dataset
        .facts
        .iter()
        .map(|f| f.relation_id.as_str())
        .collect();
    let total: usize = dataset
        .facts
        .iter()
        .map(|f| f.candidate_count().unwrap_or(0))
        .sum();
    Ok(DatasetStats {
        num_languages: dataset.languages.len(),
        num_relations: relations.len(),
        num_queries_per_language: dataset.facts.len(),
        mean_candidates: total as f64 / dataset.facts.len() as f64,
    })
}
