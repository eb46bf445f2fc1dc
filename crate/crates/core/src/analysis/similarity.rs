use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use super::correlation::{pearson, CorrelationResult};
use crate::dataset::LanguageId;
use crate::error::{Error, Result};
use crate::metrics::ConsistencyMatrix;

/// Symmetric language-pair similarity for one feature type, values in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityTable {
    pub feature: String,
    entries: BTreeMap<(LanguageId, LanguageId), f64>,
}

fn key(a: &LanguageId, b: &LanguageId) -> (LanguageId, LanguageId) {
    if a <= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

impl SimilarityTable {
    pub fn new(feature: impl Into<String>) -> Self {
        SimilarityTable {
            feature: feature.into(),
            entries: BTreeMap::new(),
        }
    }

    /// Inserts a symmetric entry. Re-inserting an equal value is a no-op;
    /// a different value for the same pair is an error.
    pub fn insert(&mut self, a: &LanguageId, b: &LanguageId, value: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::OutOfRange {
                what: format!("{} similarity of ({a}, {b})", self.feature),
                value,
            });
        }
        let k = key(a, b);
        match self.entries.get(&k) {
            Some(&old) if (old - value).abs() > 1e-12 => Err(Error::ConflictingSimilarity {
                a: a.to_string(),
                b: b.to_string(),
                feature: self.feature.clone(),
                first: old,
                second: value,
            }),
            Some(_) => Ok(()),
            None => {
                self.entries.insert(k, value);
                Ok(())
            }
        }
    }

    pub fn get(&self, a: &LanguageId, b: &LanguageId) -> Option<f64> {
        self.entries.get(&key(a, b)).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&LanguageId, &LanguageId, f64)> {
        self.entries.iter().map(|((a, b), v)| (a, b, *v))
    }

    /// Writes `lang_a,lang_b,feature,value` rows, one per unordered pair.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "lang_a,lang_b,feature,value")?;
        for (a, b, v) in self.iter() {
            writeln!(out, "{a},{b},{},{v:.6}", self.feature)?;
        }
        Ok(())
    }
}

/// Reads a `lang_a,lang_b,feature,value` CSV into one table per feature, in
/// order of first appearance. A header row is optional.
pub fn read_similarity(reader: impl Read, origin: &str) -> Result<Vec<SimilarityTable>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut tables: Vec<SimilarityTable> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 1;
        let rec = rec.map_err(|e| Error::parse(origin, line, e.to_string()))?;
        if line == 1 && rec.get(0) == Some("lang_a") {
            continue;
        }
        if rec.len() != 4 {
            return Err(Error::parse(
                origin,
                line,
                format!("expected 4 fields, got {}", rec.len()),
            ));
        }
        let a = LanguageId::new(&rec[0]).map_err(|e| Error::parse(origin, line, e.to_string()))?;
        let b = LanguageId::new(&rec[1]).map_err(|e| Error::parse(origin, line, e.to_string()))?;
        let feature = &rec[2];
        let value: f64 = rec[3]
            .parse()
            .map_err(|_| Error::parse(origin, line, format!("bad value {:?}", &rec[3])))?;
        let table = match tables.iter_mut().position(|t| t.feature == feature) {
            Some(idx) => &mut tables[idx],
            None => {
                tables.push(SimilarityTable::new(feature));
                tables.last_mut().unwrap()
            }
        };
        table.insert(&a, &b, value)?;
    }
    Ok(tables)
}

pub fn load_similarity(path: impl AsRef<Path>) -> Result<Vec<SimilarityTable>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_similarity(file, &path.display().to_string())
}

/// Similarity (x) and matrix value (y) for every unordered off-diagonal
/// pair present in both. Returns the number of matrix pairs skipped.
pub fn paired_values(
    matrix: &ConsistencyMatrix,
    table: &SimilarityTable,
) -> (Vec<f64>, Vec<f64>, usize) {
    let mut x = Vec::new();
    let mut y = Vec::new();
    let mut skipped = 0;
    let n = matrix.size();
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (&matrix.languages[i], &matrix.languages[j]);
            match (table.get(a, b), matrix.get(i, j)) {
                (Some(s), Some(v)) => {
                    x.push(s);
                    y.push(v);
                }
                _ => skipped += 1,
            }
        }
    }
    if skipped > 0 {
        log::warn!(
            "{skipped} language pairs skipped for feature {}: missing similarity or undefined metric",
            table.feature
        );
    }
    (x, y, skipped)
}

/// Pearson correlation between pair similarity and pair consistency over
/// unordered, non-self language pairs.
pub fn correlate_consistency(
    matrix: &ConsistencyMatrix,
    table: &SimilarityTable,
) -> Result<CorrelationResult> {
    let (x, y, _) = paired_values(matrix, table);
    pearson(&x, &y)
}
