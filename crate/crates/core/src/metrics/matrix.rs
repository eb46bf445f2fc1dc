//! Language-pair consistency matrices and their CSV form.
//!
//! CSV layout: a header row of language codes preceded by an empty corner
//! cell, then one row per language whose first cell is the language code.
//! Cells are fractions with six decimals, or `n/a` where the metric is
//! undefined.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::pair::{coverlap_from_outcomes, rankc_of_rankings};
use super::weights::WeightScheme;
use crate::dataset::{Dataset, LanguageId};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::scores::ScoreStore;

pub const UNDEFINED_CELL: &str = "n/a";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    RankC,
    COverlap,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::RankC => "rankc",
            Metric::COverlap => "coverlap",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rankc" => Ok(Metric::RankC),
            "coverlap" => Ok(Metric::COverlap),
            other => Err(Error::InvalidArgument(format!(
                "unknown metric {other:?} (expected rankc or coverlap)"
            ))),
        }
    }
}

/// Symmetric language × language matrix of metric values in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConsistencyMatrix {
    pub languages: Vec<LanguageId>,
    /// Row-major, `languages.len()²` cells; `None` marks an undefined value.
    pub values: Vec<Option<f64>>,
    pub metric_name: String,
    pub scheme: Option<WeightScheme>,
    pub model_id: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LanguagePairValue {
    pub lang_a: LanguageId,
    pub lang_b: LanguageId,
    pub value: f64,
}

impl ConsistencyMatrix {
    pub fn size(&self) -> usize {
        self.languages.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.values[i * self.size() + j]
    }

    pub fn get_pair(&self, a: &LanguageId, b: &LanguageId) -> Option<f64> {
        let i = self.languages.iter().position(|l| l == a)?;
        let j = self.languages.iter().position(|l| l == b)?;
        self.get(i, j)
    }

    /// Defined values of the unordered off-diagonal pairs, row-major.
    pub fn off_diagonal(&self) -> Vec<LanguagePairValue> {
        let n = self.size();
        let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                if let Some(v) = self.get(i, j) {
                    out.push(LanguagePairValue {
                        lang_a: self.languages[i].clone(),
                        lang_b: self.languages[j].clone(),
                        value: v,
                    });
                }
            }
        }
        out
    }

    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        let mut header = String::new();
        for l in &self.languages {
            header.push(',');
            header.push_str(l.as_str());
        }
        writeln!(out, "{header}")?;
        for (i, l) in self.languages.iter().enumerate() {
            let mut row = l.to_string();
            for j in 0..self.size() {
                row.push(',');
                match self.get(i, j) {
                    Some(v) => row.push_str(&format!("{v:.6}")),
                    None => row.push_str(UNDEFINED_CELL),
                }
            }
            writeln!(out, "{row}")?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is UTF-8")
    }

    /// Parses the CSV layout written by [`write_csv`](Self::write_csv).
    /// Metadata fields are left empty.
    pub fn read_csv(reader: impl Read, origin: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::parse(origin, i + 1, e.to_string()))?;
            rows.push(rec.iter().map(str::to_string).collect::<Vec<_>>());
        }
        let Some((header, body)) = rows.split_first() else {
            return Err(Error::parse(origin, 1, "empty matrix file"));
        };
        let languages = header
            .iter()
            .skip(1)
            .map(|s| LanguageId::new(s.as_str()))
            .collect::<Result<Vec<_>>>()?;
        let n = languages.len();
        if n == 0 || body.len() != n {
            return Err(Error::parse(
                origin,
                1,
                format!("matrix is not square: {n} columns, {} rows", body.len()),
            ));
        }
        let mut values = Vec::with_capacity(n * n);
        for (i, row) in body.iter().enumerate() {
            let line = i + 2;
            if row.len() != n + 1 {
                return Err(Error::parse(
                    origin,
                    line,
                    format!(
                        "matrix is not square: expected {} cells, got {}",
                        n + 1,
                        row.len()
                    ),
                ));
            }
            if row[0] != languages[i].as_str() {
                return Err(Error::parse(
                    origin,
                    line,
                    format!(
                        "row label {:?} does not match column {}",
                        row[0], languages[i]
                    ),
                ));
            }
            for cell in &row[1..] {
                if cell == UNDEFINED_CELL {
                    values.push(None);
                    continue;
                }
                let v: f64 = cell
                    .parse()
                    .map_err(|_| Error::parse(origin, line, format!("bad cell {cell:?}")))?;
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::OutOfRange {
                        what: format!("matrix cell at line {line}"),
                        value: v,
                    });
                }
                values.push(Some(v));
            }
        }
        let m = ConsistencyMatrix {
            languages,
            values,
            metric_name: String::new(),
            scheme: None,
            model_id: String::new(),
        };
        for i in 0..n {
            for j in (i + 1)..n {
                let same = match (m.get(i, j), m.get(j, i)) {
                    (Some(x), Some(y)) => (x - y).abs() <= 1e-9,
                    (None, None) => true,
                    _ => false,
                };
                if !same {
                    return Err(Error::parse(
                        origin,
                        i + 2,
                        format!(
                            "matrix is not symmetric at ({}, {})",
                            m.languages[i], m.languages[j]
                        ),
                    ));
                }
            }
        }
        Ok(m)
    }
}

/// Sidecar metadata written next to a matrix CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixMetadata {
    pub metric: String,
    pub scheme: Option<WeightScheme>,
    pub model_id: String,
    pub mean_clc: Option<f64>,
}

impl MatrixMetadata {
    pub fn of(matrix: &ConsistencyMatrix) -> Self {
        MatrixMetadata {
            metric: matrix.metric_name.clone(),
            scheme: matrix.scheme,
            model_id: matrix.model_id.clone(),
            mean_clc: mean_clc(matrix).ok(),
        }
    }
}

/// Computes the metric for every unordered language pair once and mirrors it.
///
/// Rankings are computed per language, then pairs are evaluated
/// independently (in parallel under [`Execution::Parallel`]) and written back
/// in pair order, so the result does not depend on scheduling.
pub fn consistency_matrix(
    dataset: &Dataset,
    store: &ScoreStore,
    metric: Metric,
    scheme: WeightScheme,
    exec: Execution,
) -> Result<ConsistencyMatrix> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n = dataset.languages.len();
    let rankings = exec
        .map(&dataset.languages, |l| store.rankings(dataset, l))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();

    let cells: Vec<Result<Option<f64>>> = match metric {
        Metric::RankC => exec.map(&pairs, |&(i, j)| {
            if i == j {
                Ok(Some(1.0))
            } else {
                rankc_of_rankings(&rankings[i], &rankings[j], scheme, Execution::Sequential)
                    .map(Some)
            }
        }),
        Metric::COverlap => {
            let outcomes: Vec<_> = (0..n)
                .map(|li| {
                    let lang = &dataset.languages[li];
                    dataset
                        .facts
                        .iter()
                        .zip(&rankings[li])
                        .map(|(fact, ranked)| {
                            let answer = fact.query(lang).map(|q| q.answer_index);
                            (
                                fact.fact_id.clone(),
                                answer.is_some() && ranked.first() == answer.as_ref(),
                            )
                        })
                        .collect()
                })
                .collect();
            exec.map(&pairs, |&(i, j)| {
                Ok(coverlap_from_outcomes(&outcomes[i], &outcomes[j]).value())
            })
        }
    };

    let mut values = vec![None; n * n];
    for (&(i, j), cell) in pairs.iter().zip(cells) {
        let v = cell?;
        values[i * n + j] = v;
        values[j * n + i] = v;
    }
    Ok(ConsistencyMatrix {
        languages: dataset.languages.clone(),
        values,
        metric_name: metric.as_str().to_string(),
        scheme: (metric == Metric::RankC).then_some(scheme),
        model_id: store.model_id().to_string(),
    })
}

/// Mean over the strictly off-diagonal cells; undefined cells are skipped.
pub fn mean_clc(matrix: &ConsistencyMatrix) -> Result<f64> {
    if matrix.size() < 2 {
        return Err(Error::InvalidArgument(
            "mean consistency needs at least two languages".into(),
        ));
    }
    let pairs = matrix.off_diagonal();
    if pairs.is_empty() {
        return Err(Error::InvalidArgument(
            "no defined off-diagonal values".into(),
        ));
    }
    Ok(pairs.iter().map(|p| p.value).sum::<f64>() / pairs.len() as f64)
}

/// Unordered pairs whose value is at least the off-diagonal mean, highest
/// first. Ties keep row-major pair order.
pub fn high_consistency_pairs(matrix: &ConsistencyMatrix) -> Vec<LanguagePairValue> {
    let Ok(mean) = mean_clc(matrix) else {
        return Vec::new();
    };
    // Summation rounding can push the mean a few ulps above a value equal to it.
    let threshold = mean - 1e-12;
    let mut pairs: Vec<_> = matrix
        .off_diagonal()
        .into_iter()
        .filter(|p| p.value >= threshold)
        .collect();
    pairs.sort_by(|a, b| b.value.total_cmp(&a.value));
    pairs
}

/// Rounds half to even at `decimals` places.
pub fn round_half_even(x: f64, decimals: i32) -> f64 {
    let scale = 10f64.powi(decimals);
    let scaled = x * scale;
    let floor = scaled.floor();
    let diff = scaled - floor;
    let rounded = if (diff - 0.5).abs() < 1e-9 {
        if floor.rem_euclid(2.0) == 0.0 {
            floor
        } else {
            floor + 1.0
        }
    } else {
        scaled.round()
    };
    rounded / scale
}

/// Fraction rendered as a percentage with one decimal.
pub fn format_percent(x: f64) -> String {
    format!("{:.1}", round_half_even(x * 100.0, 1))
}
