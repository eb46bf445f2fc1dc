//! Propagation of an inserted fact across languages after model editing.
//!
//! Inputs are the model's (positive) values for the originally correct
//! answer and the inserted wrong answer, before and after editing, per
//! query and language. Each pair is normalized to sum to one; a cell
//! "flips" when after editing the wrong answer strictly outweighs the
//! correct one.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::LanguageId;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Pre,
    Post,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Pre => "pre",
            Phase::Post => "post",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Phase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pre" => Ok(Phase::Pre),
            "post" => Ok(Phase::Post),
            other => Err(Error::InvalidArgument(format!("unknown phase {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EditLogitRecord {
    pub query_id: String,
    pub language: LanguageId,
    pub phase: Phase,
    pub logit_correct: f64,
    pub logit_wrong: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormalizedPair {
    pub correct: f64,
    pub wrong: f64,
}

/// `(c / (c + w), w / (c + w))` for strictly positive `c`, `w`.
pub fn normalize_logits(logit_correct: f64, logit_wrong: f64) -> Result<NormalizedPair> {
    for (name, v) in [
        ("logit_correct", logit_correct),
        ("logit_wrong", logit_wrong),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "{name} must be positive and finite, got {v}"
            )));
        }
    }
    let total = logit_correct + logit_wrong;
    Ok(NormalizedPair {
        correct: logit_correct / total,
        wrong: logit_wrong / total,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropagationRow {
    pub query_id: String,
    pub language: LanguageId,
    pub rankc_with_source: Option<f64>,
    pub pre: NormalizedPair,
    pub post: NormalizedPair,
    pub flipped: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct PropagationReport {
    pub rows: Vec<PropagationRow>,
}

/// Pairs pre/post records per (query, language) and normalizes them.
///
/// Rows are grouped by query in order of first appearance; within a query
/// they are sorted by descending consistency with the source language, with
/// languages lacking a value (the source itself) first.
pub fn propagation_report(
    records: &[EditLogitRecord],
    rankc_with_source: &BTreeMap<LanguageId, f64>,
) -> Result<PropagationReport> {
    let mut query_order: Vec<&str> = Vec::new();
    let mut cells: HashMap<(&str, &LanguageId), [Option<&EditLogitRecord>; 2]> = HashMap::new();
    let mut cell_order: Vec<(&str, &LanguageId)> = Vec::new();
    for rec in records {
        if !query_order.contains(&rec.query_id.as_str()) {
            query_order.push(&rec.query_id);
        }
        let key = (rec.query_id.as_str(), &rec.language);
        let slot = cells.entry(key).or_insert_with(|| {
            cell_order.push(key);
            [None, None]
        });
        let idx = rec.phase as usize;
        if slot[idx].is_some() {
            return Err(Error::InvalidArgument(format!(
                "duplicate {} logits for ({}, {})",
                rec.phase, rec.query_id, rec.language
            )));
        }
        slot[idx] = Some(rec);
    }

    let mut rows = Vec::with_capacity(cell_order.len());
    for key in &cell_order {
        let [pre, post] = cells[key];
        let missing = |phase: Phase| Error::MissingPhase {
            query_id: key.0.to_string(),
            language: key.1.to_string(),
            phase: phase.as_str(),
        };
        let pre = pre.ok_or_else(|| missing(Phase::Pre))?;
        let post = post.ok_or_else(|| missing(Phase::Post))?;
        rows.push(PropagationRow {
            query_id: key.0.to_string(),
            language: key.1.clone(),
            rankc_with_source: rankc_with_source.get(key.1).copied(),
            pre: normalize_logits(pre.logit_correct, pre.logit_wrong)?,
            post: normalize_logits(post.logit_correct, post.logit_wrong)?,
            flipped: post.logit_wrong > post.logit_correct,
        });
    }

    rows.sort_by(|a, b| {
        let qa = query_order.iter().position(|q| *q == a.query_id);
        let qb = query_order.iter().position(|q| *q == b.query_id);
        let rank = |r: &PropagationRow| r.rankc_with_source.unwrap_or(f64::INFINITY);
        qa.cmp(&qb)
            .then(rank(b).total_cmp(&rank(a)))
            .then(a.language.cmp(&b.language))
    });
    Ok(PropagationReport { rows })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlipSummary {
    pub threshold: f64,
    pub high_clc_flip_rate: f64,
    pub low_clc_flip_rate: f64,
    pub high_clc_languages: Vec<LanguageId>,
    pub low_clc_languages: Vec<LanguageId>,
}

/// Fraction of flipped cells among languages at or above `threshold`
/// consistency with the source, and among those below it. Rows without a
/// consistency value are not counted.
pub fn flip_consistency_summary(report: &PropagationReport, threshold: f64) -> Result<FlipSummary> {
    let mut high: BTreeMap<&LanguageId, (usize, usize)> = BTreeMap::new();
    let mut low: BTreeMap<&LanguageId, (usize, usize)> = BTreeMap::new();
    for row in &report.rows {
        let Some(v) = row.rankc_with_source else {
            continue;
        };
        let group = if v >= threshold { &mut high } else { &mut low };
        let e = group.entry(&row.language).or_default();
        e.0 += usize::from(row.flipped);
        e.1 += 1;
    }
    if high.is_empty() || low.is_empty() {
        return Err(Error::DegeneratePartition {
            threshold,
            high: high.len(),
            low: low.len(),
        });
    }
    let rate = |g: &BTreeMap<&LanguageId, (usize, usize)>| {
        let (f, n) = g.values().fold((0, 0), |acc, x| (acc.0 + x.0, acc.1 + x.1));
        f as f64 / n as f64
    };
    Ok(FlipSummary {
        threshold,
        high_clc_flip_rate: rate(&high),
        low_clc_flip_rate: rate(&low),
        high_clc_languages: high.keys().map(|l| (*l).clone()).collect(),
        low_clc_languages: low.keys().map(|l| (*l).clone()).collect(),
    })
}

impl PropagationReport {
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(
            out,
            "query_id,language,rankc_with_source,pre_correct,pre_wrong,post_correct,post_wrong,flipped"
        )?;
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(&mut out);
        for r in &self.rows {
            let rankc = r
                .rankc_with_source
                .map(|v| format!("{v:.6}"))
                .unwrap_or_else(|| "-".into());
            w.write_record([
                r.query_id.clone(),
                r.language.to_string(),
                rankc,
                format!("{:.6}", r.pre.correct),
                format!("{:.6}", r.pre.wrong),
                format!("{:.6}", r.post.correct),
                format!("{:.6}", r.post.wrong),
                r.flipped.to_string(),
            ])?;
        }
        w.flush()
    }
}

fn csv_rows(
    reader: impl Read,
    origin: &str,
    header: &str,
    fields: usize,
) -> Result<Vec<(usize, csv::StringRecord)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(i + 1);
            Error::parse(origin, line, e.to_string())
        })?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(i + 1);
        if i == 0 && rec.get(0) == Some(header) {
            continue;
        }
        if rec.len() != fields {
            return Err(Error::parse(
                origin,
                line,
                format!("expected {fields} fields, got {}", rec.len()),
            ));
        }
        out.push((line, rec));
    }
    Ok(out)
}

/// Reads `query_id,language,phase,logit_correct,logit_wrong` rows (header optional).
pub fn read_logits(reader: impl Read, origin: &str) -> Result<Vec<EditLogitRecord>> {
    csv_rows(reader, origin, "query_id", 5)?
        .into_iter()
        .map(|(line, rec)| {
            let bad = |msg: String| Error::parse(origin, line, msg);
            let language = LanguageId::new(&rec[1]).map_err(|e| bad(e.to_string()))?;
            let phase: Phase = rec[2].parse().map_err(|e: Error| bad(e.to_string()))?;
            let num = |s: &str| -> Result<f64> {
                let v: f64 = s.parse().map_err(|_| bad(format!("bad number {s:?}")))?;
                if v.is_finite() && v > 0.0 {
                    Ok(v)
                } else {
                    Err(bad(format!("logit must be positive and finite, got {s}")))
                }
            };
            Ok(EditLogitRecord {
                query_id: rec[0].to_string(),
                language,
                phase,
                logit_correct: num(&rec[3])?,
                logit_wrong: num(&rec[4])?,
            })
        })
        .collect()
}

/// Reads `language,rankc` rows (header optional), values as fractions.
pub fn read_rankc_values(reader: impl Read, origin: &str) -> Result<BTreeMap<LanguageId, f64>> {
    let mut out = BTreeMap::new();
    for (line, rec) in csv_rows(reader, origin, "language", 2)? {
        let bad = |msg: String| Error::parse(origin, line, msg);
        let language = LanguageId::new(&rec[0]).map_err(|e| bad(e.to_string()))?;
        let v: f64 = rec[1]
            .parse()
            .map_err(|_| bad(format!("bad number {:?}", &rec[1])))?;
        if !(0.0..=1.0).contains(&v) {
            return Err(bad(format!("consistency {v} outside [0, 1]")));
        }
        if out.insert(language, v).is_some() {
            return Err(bad(format!("duplicate language {}", &rec[0])));
        }
    }
    Ok(out)
}
