//! Answer projection: lift sentence alignments to whole contexts and read
//! the target answer off the aligned words.

mod pipeline;

use serde::{Deserialize, Serialize};

use crate::align::{AlignError, AlignmentLinkSet, Direction};
use crate::squad::{answer_is_embedded, Answer};
use crate::textseg::{
    char_len, char_slice, offset_maps_from_spans, tokenize, Char2Word, Span, Token, Word2Char,
};

pub use pipeline::{
    align_document, retrieve_document, sentence_pairs, split_dataset, synthesize_dataset,
    translate_document, transliterate_document, AlignerChoice, PipelineError, RetrieveOptions,
    Synthesis, SynthesisConfig, TranslitMode, WorkArticle, WorkDocument, WorkParagraph, WorkQa,
    WorkSentence,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DropReason {
    NoAlignment,
    TranslationFailed,
    EmptyAnswer,
    OffsetError,
}

/// Why a source question produced no synthesized sample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DropRecord {
    pub id: String,
    pub reason: DropReason,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    pub reason: DropReason,
    pub detail: String,
}

impl Rejection {
    fn new(reason: DropReason, detail: impl Into<String>) -> Self {
        Rejection {
            reason,
            detail: detail.into(),
        }
    }

    pub fn into_record(self, id: impl Into<String>) -> DropRecord {
        DropRecord {
            id: id.into(),
            reason: self.reason,
            detail: Some(self.detail),
        }
    }
}

/// A context with its sentence layout and word offset maps. Tokens are
/// produced sentence by sentence, so word indices agree with the
/// per-sentence alignments.
#[derive(Debug, Clone, Default)]
pub struct IndexedContext {
    pub text: String,
    pub tokens: Vec<Token>,
    pub sentence_token_counts: Vec<usize>,
    pub char2word: Char2Word,
    pub word2char: Word2Char,
}

impl IndexedContext {
    /// `sentences` must be in order and lie inside `text`.
    pub fn new(text: impl Into<String>, sentences: &[Span]) -> Self {
        let text = text.into();
        let mut tokens = Vec::new();
        let mut counts = Vec::with_capacity(sentences.len());
        for &span in sentences {
            let sentence = char_slice(&text, span).unwrap_or_default();
            let before = tokens.len();
            tokens.extend(tokenize(sentence).tokens.into_iter().map(|t| Token {
                text: t.text,
                span: t.span.shift(span.start),
            }));
            counts.push(tokens.len() - before);
        }
        let (char2word, word2char) = offset_maps_from_spans(tokens.iter().map(|t| t.span));
        IndexedContext {
            text,
            tokens,
            sentence_token_counts: counts,
            char2word,
            word2char,
        }
    }

    /// Words of sentence `k`.
    pub fn sentence_words(&self, k: usize) -> &[Token] {
        let start: usize = self.sentence_token_counts[..k].iter().sum();
        &self.tokens[start..start + self.sentence_token_counts[k]]
    }

    /// Indices of the words overlapping the character range `span`.
    fn words_covering(&self, span: Span) -> Option<(usize, usize)> {
        if span.is_empty() {
            return None;
        }
        let first = match self.char2word.floor(span.start) {
            Some(w) if self.word2char.end(w)? > span.start => w,
            Some(w) => w + 1,
            None => 0,
        };
        let last = self.char2word.floor(span.end - 1)?;
        (first <= last).then_some((first, last))
    }
}

/// Links between word indices of two whole contexts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextAlignment {
    pub links: AlignmentLinkSet,
}

/// Offsets every sentence alignment by the word counts of the sentences
/// before it and takes the union.
pub fn build_context_alignment(
    sentence_alignments: &[AlignmentLinkSet],
    src_token_counts: &[usize],
    tgt_token_counts: &[usize],
) -> Result<ContextAlignment, AlignError> {
    if sentence_alignments.len() != src_token_counts.len() {
        return Err(AlignError::LengthMismatch(
            sentence_alignments.len(),
            src_token_counts.len(),
        ));
    }
    if sentence_alignments.len() != tgt_token_counts.len() {
        return Err(AlignError::LengthMismatch(
            sentence_alignments.len(),
            tgt_token_counts.len(),
        ));
    }
    let mut links = AlignmentLinkSet::new(Direction::Symmetrized);
    let (mut src_offset, mut tgt_offset) = (0, 0);
    for ((a, &n), &m) in sentence_alignments
        .iter()
        .zip(src_token_counts)
        .zip(tgt_token_counts)
    {
        for (i, j) in a.iter() {
            if i >= n || j >= m {
                return Err(AlignError::DimensionMismatch {
                    src: i,
                    tgt: j,
                    src_len: n,
                    tgt_len: m,
                });
            }
            links.insert(i + src_offset, j + tgt_offset);
        }
        src_offset += n;
        tgt_offset += m;
    }
    Ok(ContextAlignment { links })
}

/// Projects a source answer onto the target context: the answer becomes
/// the target text from the first to the last word aligned to any source
/// answer word. A start offset inside a token selects that whole token.
pub fn extract_answer(
    answer_text: &str,
    answer_start: usize,
    source: &IndexedContext,
    alignment: &ContextAlignment,
    target: &IndexedContext,
) -> Result<Answer, Rejection> {
    if answer_text.trim().is_empty() {
        return Err(Rejection::new(
            DropReason::EmptyAnswer,
            "source answer is empty",
        ));
    }
    if !answer_is_embedded(&source.text, answer_text, answer_start) {
        return Err(Rejection::new(
            DropReason::OffsetError,
            format!("source answer not found at offset {answer_start}"),
        ));
    }
    let span = Span::new(answer_start, answer_start + char_len(answer_text));
    let Some((first, last)) = source.words_covering(span) else {
        return Err(Rejection::new(
            DropReason::NoAlignment,
            "answer covers no source words",
        ));
    };
    let mut targets = (first..=last).flat_map(|i| alignment.links.targets_of(i));
    let Some(init) = targets.next() else {
        return Err(Rejection::new(
            DropReason::NoAlignment,
            "no answer word is aligned",
        ));
    };
    let (lo, hi) = targets.fold((init, init), |(lo, hi), j| (lo.min(j), hi.max(j)));
    let (Some(start), Some(end)) = (target.word2char.start(lo), target.word2char.end(hi)) else {
        return Err(Rejection::new(
            DropReason::OffsetError,
            format!("aligned word {hi} outside the target context"),
        ));
    };
    let text = char_slice(&target.text, Span::new(start, end)).ok_or_else(|| {
        Rejection::new(
            DropReason::OffsetError,
            format!("span {start}..{end} escapes the target context"),
        )
    })?;
    if text.trim().is_empty() {
        return Err(Rejection::new(
            DropReason::EmptyAnswer,
            "extracted span is blank",
        ));
    }
    Ok(Answer {
        text: text.to_string(),
        answer_start: start,
    })
}

/// True if `text` has no letters or digits.
pub fn is_punctuation_only(text: &str) -> bool {
    !text.chars().any(char::is_alphanumeric)
}
