use std::io::BufRead;

use serde::{Deserialize, Serialize};

use super::AlignError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentencePair {
    #[serde(rename = "src")]
    pub source: Vec<String>,
    #[serde(rename = "tgt")]
    pub target: Vec<String>,
}

impl SentencePair {
    pub fn new<S: Into<String>>(
        source: impl IntoIterator<Item = S>,
        target: impl IntoIterator<Item = S>,
    ) -> Self {
        SentencePair {
            source: source.into_iter().map(Into::into).collect(),
            target: target.into_iter().map(Into::into).collect(),
        }
    }

    /// Builds a pair from space-separated token strings.
    pub fn from_spaced(source: &str, target: &str) -> Self {
        Self::new(source.split_whitespace(), target.split_whitespace())
    }
}

/// Ordered sentence pairs with no empty side.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParallelCorpus {
    pairs: Vec<SentencePair>,
}

impl ParallelCorpus {
    pub fn new(pairs: Vec<SentencePair>) -> Result<Self, AlignError> {
        if let Some(k) = pairs
            .iter()
            .position(|p| p.source.is_empty() || p.target.is_empty())
        {
            return Err(AlignError::EmptySide(k));
        }
        Ok(ParallelCorpus { pairs })
    }

    pub fn pairs(&self) -> &[SentencePair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn reversed(&self) -> Self {
        ParallelCorpus {
            pairs: self
                .pairs
                .iter()
                .map(|p| SentencePair {
                    source: p.target.clone(),
                    target: p.source.clone(),
                })
                .collect(),
        }
    }

    /// Two line-aligned files of pre-tokenized, space-separated sentences.
    pub fn from_parallel_text<R1: BufRead, R2: BufRead>(
        source: R1,
        target: R2,
    ) -> Result<Self, AlignError> {
        let src: Vec<String> = source.lines().collect::<Result<_, _>>()?;
        let tgt: Vec<String> = target.lines().collect::<Result<_, _>>()?;
        if src.len() != tgt.len() {
            return Err(AlignError::LengthMismatch(src.len(), tgt.len()));
        }
        Self::new(
            src.iter()
                .zip(&tgt)
                .map(|(s, t)| SentencePair::from_spaced(s, t))
                .collect(),
        )
    }

    /// JSONL with one `{"src": [tokens], "tgt": [tokens]}` object per line.
    pub fn from_jsonl<R: BufRead>(reader: R) -> Result<Self, AlignError> {
        let mut pairs = Vec::new();
        for (n, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let pair: SentencePair =
                serde_json::from_str(&line).map_err(|e| AlignError::Parse {
                    line: n + 1,
                    message: e.to_string(),
                })?;
            pairs.push(pair);
        }
        Self::new(pairs)
    }
}
