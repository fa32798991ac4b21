//! Sentence segmentation, word tokenization and character/word offset maps.
//!
//! Everything here is non-destructive: tokens and sentences are always exact
//! substrings of the input, addressed by [`Span`]s counted in Unicode scalar
//! values (the SQuAD `answer_start` convention), never bytes.

use std::collections::{BTreeMap, HashSet};
use std::io::{self, BufRead};
use std::path::Path;

use serde::{Deserialize, Serialize};

/// Half-open character range `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn shift(&self, by: usize) -> Span {
        Span::new(self.start + by, self.end + by)
    }
}

/// Number of characters in `text`.
pub fn char_len(text: &str) -> usize {
    text.chars().count()
}

/// Substring addressed by character span. Returns `None` if the span does
/// not fit inside `text`.
pub fn char_slice(text: &str, span: Span) -> Option<&str> {
    if span.start > span.end {
        return None;
    }
    let mut begin = None;
    let mut end = None;
    for (n, (b, _)) in text.char_indices().enumerate() {
        if n == span.start {
            begin = Some(b);
        }
        if n == span.end {
            end = Some(b);
            break;
        }
    }
    let total = char_len(text);
    if span.start == total {
        begin = Some(text.len());
    }
    if span.end == total {
        end = Some(text.len());
    }
    Some(&text[begin?..end?])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub text: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TokenizedText {
    pub raw: String,
    pub tokens: Vec<Token>,
}

impl TokenizedText {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn words(&self) -> Vec<String> {
        self.tokens.iter().map(|t| t.text.clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub text: String,
    pub span: Span,
}

/// Abbreviations that never end a sentence. Entries keep their trailing
/// period ("Dr.") and are matched case-insensitively.
#[derive(Debug, Clone, Default)]
pub struct AbbreviationLexicon {
    entries: HashSet<String>,
}

const ENGLISH_ABBREVIATIONS: &str = include_str!("../lexicons/en.txt");
const SERBIAN_ABBREVIATIONS: &str = include_str!("../lexicons/sr.txt");

impl AbbreviationLexicon {
    pub fn new<I, S>(entries: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let entries = entries
            .into_iter()
            .map(|e| e.as_ref().trim().to_lowercase())
            .filter(|e| !e.is_empty() && !e.starts_with('#'))
            .collect();
        AbbreviationLexicon { entries }
    }

    pub fn english() -> Self {
        Self::new(ENGLISH_ABBREVIATIONS.lines())
    }

    pub fn serbian() -> Self {
        Self::new(SERBIAN_ABBREVIATIONS.lines())
    }

    /// Picks the shipped lexicon for a FLORES-style code (`eng_Latn`,
    /// `srp_Cyrl`, ...); unknown languages get an empty lexicon.
    pub fn for_language(code: &str) -> Self {
        let lang = code
            .split(['_', '-'])
            .next()
            .unwrap_or("")
            .to_ascii_lowercase();
        match lang.as_str() {
            "eng" | "en" => Self::english(),
            "srp" | "sr" | "hrv" | "bos" | "hbs" => Self::serbian(),
            _ => Self::default(),
        }
    }

    /// One abbreviation per line, UTF-8. Blank lines and `#` comments are
    /// ignored.
    pub fn from_reader<R: BufRead>(reader: R) -> io::Result<Self> {
        let lines = reader.lines().collect::<io::Result<Vec<_>>>()?;
        Ok(Self::new(lines))
    }

    pub fn load(path: impl AsRef<Path>) -> io::Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_reader(io::BufReader::new(file))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains(&word.to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn is_terminator(c: char) -> bool {
    matches!(c, '.' | '?' | '!' | '…')
}

fn is_closing(c: char) -> bool {
    matches!(c, '"' | '\'' | ')' | ']' | '}' | '»' | '”' | '’' | '›')
}

fn is_opening(c: char) -> bool {
    matches!(
        c,
        '"' | '\'' | '(' | '[' | '{' | '«' | '“' | '„' | '‘' | '‚' | '‹' | '¿' | '¡'
    )
}

/// Rule-based sentence splitter.
///
/// A boundary falls after a run of `.?!…` (plus any closing quotes or
/// brackets) when it is followed by whitespace and then an uppercase letter,
/// an opening quote/bracket or a digit. A period-terminated word listed in
/// `lexicon` never ends a sentence. Periods inside numbers are never
/// followed by whitespace and so never split.
pub fn split_sentences(text: &str, lexicon: &AbbreviationLexicon) -> Vec<Sentence> {
    let chars: Vec<char> = text.chars().collect();
    let n = chars.len();
    let mut spans = Vec::new();
    let mut start: Option<usize> = None;
    let mut i = 0;
    while i < n {
        let c = chars[i];
        if start.is_none() {
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            start = Some(i);
        }
        if !is_terminator(c) {
            i += 1;
            continue;
        }
        let mut end = i + 1;
        while end < n && (is_terminator(chars[end]) || is_closing(chars[end])) {
            end += 1;
        }
        if end >= n || !chars[end].is_whitespace() {
            i = end;
            continue;
        }
        let mut next = end;
        while next < n && chars[next].is_whitespace() {
            next += 1;
        }
        if next == n {
            break;
        }
        let follower = chars[next];
        let starts_sentence =
            follower.is_uppercase() || is_opening(follower) || follower.is_numeric();
        if starts_sentence && !(c == '.' && ends_with_abbreviation(&chars, i, lexicon)) {
            spans.push(Span::new(start.take().unwrap_or(i), end));
            i = next;
        } else {
            i = end;
        }
    }
    if let Some(s) = start {
        let mut e = n;
        while e > s && chars[e - 1].is_whitespace() {
            e -= 1;
        }
        if e > s {
            spans.push(Span::new(s, e));
        }
    }
    spans
        .into_iter()
        .map(|span| Sentence {
            text: chars[span.start..span.end].iter().collect(),
            span,
        })
        .collect()
}

/// Whether the whitespace-delimited word ending with the period at `dot`
/// is an abbreviation from the lexicon.
fn ends_with_abbreviation(chars: &[char], dot: usize, lexicon: &AbbreviationLexicon) -> bool {
    let mut begin = dot;
    while begin > 0 && !chars[begin - 1].is_whitespace() {
        begin -= 1;
    }
    while begin < dot && is_opening(chars[begin]) {
        begin += 1;
    }
    let word: String = chars[begin..=dot].iter().collect();
    lexicon.contains(&word)
}

/// Strips leading/trailing whitespace and collapses interior runs to a
/// single space.
pub fn trim(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || is_mark(c)
}

// combining diacritics that may follow a base letter
fn is_mark(c: char) -> bool {
    matches!(c as u32, 0x0300..=0x036F | 0x1AB0..=0x1AFF | 0x1DC0..=0x1DFF | 0x20D0..=0x20FF | 0xFE20..=0xFE2F)
}

/// Whether `c` at position `at` glues the surrounding word characters into
/// one token.
fn joins(chars: &[char], at: usize) -> bool {
    if at == 0 || at + 1 >= chars.len() {
        return false;
    }
    let (prev, c, next) = (chars[at - 1], chars[at], chars[at + 1]);
    if !is_word_char(prev) || !is_word_char(next) {
        return false;
    }
    match c {
        '-' | '‐' | '\'' | '’' | '_' => true,
        '.' | ',' | ':' => {
            (prev.is_ascii_digit() && next.is_ascii_digit())
                // initials such as "U.S" or "e.g"
                || (c == '.'
                    && prev.is_alphabetic()
                    && next.is_alphabetic()
                    && (at < 2 || !is_word_char(chars[at - 2]) || chars[at - 2] == '.'))
        }
        _ => false,
    }
}

/// Non-destructive word tokenizer.
///
/// Words are runs of letters, digits and combining marks, joined through
/// hyphens, apostrophes and underscores, and through `.`/`,`/`:` between
/// digits ("1.2", "10,000"). Every other non-space character is a token of
/// its own, with runs of the same character ("...", "--") kept together.
pub fn tokenize(text: &str) -> TokenizedText {
    let chars: Vec<char> = text.chars().collect();
    let n = chars.len();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < n {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let mut j = i + 1;
        if is_word_char(c) {
            loop {
                if j < n && is_word_char(chars[j]) {
                    j += 1;
                } else if j < n && joins(&chars, j) {
                    j += 2;
                } else {
                    break;
                }
            }
        } else {
            while j < n && chars[j] == c {
                j += 1;
            }
        }
        tokens.push(Token {
            text: chars[i..j].iter().collect(),
            span: Span::new(i, j),
        });
        i = j;
    }
    TokenizedText {
        raw: text.to_string(),
        tokens,
    }
}

/// First character of each word mapped to the word index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Char2Word(BTreeMap<usize, usize>);

impl Char2Word {
    pub fn get(&self, first_char: usize) -> Option<usize> {
        self.0.get(&first_char).copied()
    }

    /// Index of the word starting at or before `char_index` (floor lookup),
    /// used when an offset falls in the middle of a token.
    pub fn floor(&self, char_index: usize) -> Option<usize> {
        self.0.range(..=char_index).next_back().map(|(_, &w)| w)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0.iter().map(|(&c, &w)| (c, w))
    }
}

/// Word index mapped to the word's character span.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Word2Char(Vec<Span>);

impl Word2Char {
    pub fn start(&self, word: usize) -> Option<usize> {
        self.0.get(word).map(|s| s.start)
    }

    pub fn end(&self, word: usize) -> Option<usize> {
        self.0.get(word).map(|s| s.end)
    }

    pub fn span(&self, word: usize) -> Option<Span> {
        self.0.get(word).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn build_offset_maps(tokenized: &TokenizedText) -> (Char2Word, Word2Char) {
    offset_maps_from_spans(tokenized.tokens.iter().map(|t| t.span))
}

pub(crate) fn offset_maps_from_spans(spans: impl Iterator<Item = Span>) -> (Char2Word, Word2Char) {
    let mut c2w = BTreeMap::new();
    let mut w2c = Vec::new();
    for (w, span) in spans.enumerate() {
        c2w.insert(span.start, w);
        w2c.push(span);
    }
    (Char2Word(c2w), Word2Char(w2c))
}

/// Joins sentences with single spaces, returning where each one landed.
pub fn join_sentences<S: AsRef<str>>(sentences: &[S]) -> (String, Vec<Span>) {
    let mut context = String::new();
    let mut spans = Vec::with_capacity(sentences.len());
    let mut offset = 0;
    for (k, sentence) in sentences.iter().enumerate() {
        if k > 0 {
            context.push(' ');
            offset += 1;
        }
        let s = sentence.as_ref();
        let len = char_len(s);
        context.push_str(s);
        spans.push(Span::new(offset, offset + len));
        offset += len;
    }
    (context, spans)
}
