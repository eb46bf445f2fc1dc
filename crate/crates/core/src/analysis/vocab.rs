//! Subword vocabularies and their overlap.
//!
//! Vocabulary files are UTF-8, a `#tokenizer=<id>` header line followed by
//! one token per line. Blank lines are ignored.

use std::collections::BTreeSet;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::dataset::LanguageId;
use crate::error::{Error, Result};

const HEADER_PREFIX: &str = "#tokenizer=";

#[derive(Clone, Debug, PartialEq)]
pub struct TokenVocabulary {
    pub language: LanguageId,
    pub tokenizer_id: String,
    tokens: BTreeSet<String>,
}

impl TokenVocabulary {
    pub fn new(
        language: LanguageId,
        tokenizer_id: impl Into<String>,
        tokens: impl IntoIterator<Item = String>,
    ) -> Result<Self> {
        let tokens: BTreeSet<String> = tokens.into_iter().collect();
        if tokens.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "empty vocabulary for {language}"
            )));
        }
        Ok(TokenVocabulary {
            language,
            tokenizer_id: tokenizer_id.into(),
            tokens,
        })
    }

    pub fn tokens(&self) -> &BTreeSet<String> {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn from_reader(language: LanguageId, reader: impl BufRead, origin: &str) -> Result<Self> {
        let mut lines = reader.lines();
        let header = match lines.next() {
            Some(line) => line.map_err(|e| Error::io(origin, e))?,
            None => return Err(Error::parse(origin, 1, "missing #tokenizer= header")),
        };
        let tokenizer_id = header
            .trim_start_matches('\u{feff}')
            .strip_prefix(HEADER_PREFIX)
            .ok_or_else(|| Error::parse(origin, 1, "missing #tokenizer= header"))?
            .trim()
            .to_string();
        let mut tokens = Vec::new();
        for line in lines {
            let line = line.map_err(|e| Error::io(origin, e))?;
            let token = line.trim_end_matches(['\r', '\n']);
            if !token.is_empty() {
                tokens.push(token.to_string());
            }
        }
        Self::new(language, tokenizer_id, tokens)
    }

    /// Loads a vocabulary file; the language is the file name up to its first dot.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let stem = path
            .file_name()
            .and_then(|n| n.to_str())
            .and_then(|n| n.split('.').next())
            .unwrap_or_default();
        let language = LanguageId::new(stem)?;
        Self::load_as(path, language)
    }

    pub fn load_as(path: impl AsRef<Path>, language: LanguageId) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(language, BufReader::new(file), &path.display().to_string())
    }
}

/// Jaccard index of two token sets from the same tokenizer.
pub fn vocab_overlap(a: &TokenVocabulary, b: &TokenVocabulary) -> Result<f64> {
    if a.tokenizer_id != b.tokenizer_id {
        return Err(Error::TokenizerMismatch(
            a.tokenizer_id.clone(),
            b.tokenizer_id.clone(),
        ));
    }
    let shared = a.tokens.intersection(&b.tokens).count();
    let union = a.tokens.len() + b.tokens.len() - shared;
    Ok(shared as f64 / union as f64)
}
