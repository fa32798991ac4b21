//! Extractive QA scoring (exact match, token F1), question-type analysis
//! and dataset length statistics.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::squad::SquadDataset;
use crate::textseg::{char_len, tokenize};
use crate::translit::cyr_to_lat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PunctuationSet {
    /// Every character in Unicode general category P.
    Unicode,
    /// ASCII punctuation only, as in the reference English scorer.
    Ascii,
}

/// F1 when neither side has a token left after normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EmptyF1 {
    One,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizationOptions {
    pub lowercase: bool,
    pub strip_punctuation: bool,
    pub collapse_whitespace: bool,
    /// Remove the English articles a, an, the.
    pub article_removal: bool,
    pub punctuation: PunctuationSet,
    pub empty_f1: EmptyF1,
}

impl Default for NormalizationOptions {
    fn default() -> Self {
        NormalizationOptions {
            lowercase: true,
            strip_punctuation: true,
            collapse_whitespace: true,
            article_removal: false,
            punctuation: PunctuationSet::Unicode,
            empty_f1: EmptyF1::One,
        }
    }
}

impl NormalizationOptions {
    /// Same numbers as the official SQuAD v1.1 evaluation script.
    pub fn english_compat() -> Self {
        NormalizationOptions {
            article_removal: true,
            punctuation: PunctuationSet::Ascii,
            empty_f1: EmptyF1::Zero,
            ..Self::default()
        }
    }
}

static UNICODE_PUNCT: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\p{P}").expect("valid regex"));
static ARTICLES: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\b(a|an|the)\b").expect("valid regex"));

/// Lowercase, drop punctuation, drop articles, collapse whitespace, in that
/// order, each step only if enabled.
pub fn normalize(text: &str, opts: &NormalizationOptions) -> String {
    let mut s = if opts.lowercase {
        text.to_lowercase()
    } else {
        text.to_string()
    };
    if opts.strip_punctuation {
        s = match opts.punctuation {
            PunctuationSet::Unicode => UNICODE_PUNCT.replace_all(&s, "").into_owned(),
            PunctuationSet::Ascii => s.chars().filter(|c| !c.is_ascii_punctuation()).collect(),
        };
    }
    if opts.article_removal {
        s = ARTICLES.replace_all(&s, " ").into_owned();
    }
    if opts.collapse_whitespace {
        s = s.split_whitespace().collect::<Vec<_>>().join(" ");
    }
    s
}

/// 1 if the normalized prediction equals any normalized gold.
pub fn exact_match<S: AsRef<str>>(
    prediction: &str,
    golds: &[S],
    opts: &NormalizationOptions,
) -> u8 {
    let p = normalize(prediction, opts);
    u8::from(golds.iter().any(|g| normalize(g.as_ref(), opts) == p))
}

fn f1_single(prediction: &[&str], gold: &[&str], opts: &NormalizationOptions) -> f64 {
    if prediction.is_empty() && gold.is_empty() {
        return match opts.empty_f1 {
            EmptyF1::One => 1.0,
            EmptyF1::Zero => 0.0,
        };
    }
    let mut counts: HashMap<&str, i64> = HashMap::new();
    for t in gold {
        *counts.entry(t).or_default() += 1;
    }
    let mut same = 0usize;
    for t in prediction {
        if let Some(c) = counts.get_mut(t) {
            if *c > 0 {
                *c -= 1;
                same += 1;
            }
        }
    }
    if same == 0 {
        return 0.0;
    }
    let precision = 1.0 * same as f64 / prediction.len() as f64;
    let recall = 1.0 * same as f64 / gold.len() as f64;
    (2.0 * precision * recall) / (precision + recall)
}

/// Maximum over golds of the whitespace-token multiset F1.
pub fn f1<S: AsRef<str>>(prediction: &str, golds: &[S], opts: &NormalizationOptions) -> f64 {
    let p = normalize(prediction, opts);
    let p: Vec<&str> = p.split_whitespace().collect();
    golds
        .iter()
        .map(|g| {
            let g = normalize(g.as_ref(), opts);
            f1_single(&p, &g.split_whitespace().collect::<Vec<_>>(), opts)
        })
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum QuestionCategory {
    Who,
    What,
    How,
    When,
    Where,
    HowMany,
    Other,
}

impl QuestionCategory {
    pub const ALL: [QuestionCategory; 7] = [
        QuestionCategory::Who,
        QuestionCategory::What,
        QuestionCategory::How,
        QuestionCategory::When,
        QuestionCategory::Where,
        QuestionCategory::HowMany,
        QuestionCategory::Other,
    ];

    pub fn name(self) -> &'static str {
        match self {
            QuestionCategory::Who => "Who",
            QuestionCategory::What => "What",
            QuestionCategory::How => "How",
            QuestionCategory::When => "When",
            QuestionCategory::Where => "Where",
            QuestionCategory::HowMany => "HowMany",
            QuestionCategory::Other => "Other",
        }
    }
}

const KEYWORDS: [(QuestionCategory, &[&str]); 6] = [
    (QuestionCategory::Who, &["ko", "koji", "koje", "koja"]),
    (QuestionCategory::What, &["šta"]),
    (QuestionCategory::How, &["kako"]),
    (QuestionCategory::When, &["kad", "kada"]),
    (QuestionCategory::Where, &["gde"]),
    (QuestionCategory::HowMany, &["koliko", "koliki", "kolika"]),
];

/// Category of the question's first word, in either script.
pub fn classify_question(question: &str) -> QuestionCategory {
    let tokens = tokenize(question);
    let Some(first) = tokens.tokens.first() else {
        return QuestionCategory::Other;
    };
    let word = cyr_to_lat(&first.text).to_lowercase();
    KEYWORDS
        .iter()
        .find(|(_, words)| words.contains(&word.as_str()))
        .map_or(QuestionCategory::Other, |(c, _)| *c)
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("no prediction for question {0}")]
    MissingPrediction(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleScore {
    pub id: String,
    pub category: QuestionCategory,
    pub exact_match: u8,
    pub f1: f64,
}

/// Scores and mean character lengths for one question category.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryRow {
    pub category: QuestionCategory,
    pub count: usize,
    pub exact_match: f64,
    pub f1: f64,
    /// Mean context length.
    pub cl: f64,
    /// Mean question length.
    pub ql: f64,
    /// Mean predicted answer length.
    pub pal: f64,
    /// Mean reference (first gold) answer length.
    pub ral: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub count: usize,
    /// Percent.
    pub exact_match: f64,
    /// Percent.
    pub f1: f64,
    /// Non-empty categories in fixed order.
    pub categories: Vec<CategoryRow>,
    pub samples: Vec<SampleScore>,
}

#[derive(Default)]
struct Accumulator {
    count: usize,
    em: f64,
    f1: f64,
    cl: usize,
    ql: usize,
    pal: usize,
    ral: usize,
}

/// Scores every question of `dataset`. Totals are summed in document
/// order and scaled by 100 / count, the same arithmetic as the official
/// script, so English-compatible options reproduce its output exactly.
pub fn evaluate(
    predictions: &HashMap<String, String>,
    dataset: &SquadDataset,
    opts: &NormalizationOptions,
) -> Result<EvalReport, EvalError> {
    let mut samples = Vec::new();
    let mut em_total = 0.0;
    let mut f1_total = 0.0;
    let mut acc: HashMap<QuestionCategory, Accumulator> = HashMap::new();
    for article in &dataset.data {
        for par in &article.paragraphs {
            let cl = char_len(&par.context);
            for qa in &par.qas {
                let prediction = predictions
                    .get(&qa.id)
                    .ok_or_else(|| EvalError::MissingPrediction(qa.id.clone()))?;
                let golds: Vec<&str> = qa.answers.iter().map(|a| a.text.as_str()).collect();
                let em = exact_match(prediction, &golds, opts);
                let f = f1(prediction, &golds, opts);
                em_total += f64::from(em);
                f1_total += f;
                let category = classify_question(&qa.question);
                let a = acc.entry(category).or_default();
                a.count += 1;
                a.em += f64::from(em);
                a.f1 += f;
                a.cl += cl;
                a.ql += char_len(&qa.question);
                a.pal += char_len(prediction);
                a.ral += golds.first().map_or(0, |g| char_len(g));
                samples.push(SampleScore {
                    id: qa.id.clone(),
                    category,
                    exact_match: em,
                    f1: f,
                });
            }
        }
    }
    let count = samples.len();
    let pct = |total: f64, n: usize| {
        if n == 0 {
            0.0
        } else {
            100.0 * total / n as f64
        }
    };
    let categories = QuestionCategory::ALL
        .iter()
        .filter_map(|c| {
            let a = acc.get(c)?;
            let mean = |x: usize| x as f64 / a.count as f64;
            Some(CategoryRow {
                category: *c,
                count: a.count,
                exact_match: pct(a.em, a.count),
                f1: pct(a.f1, a.count),
                cl: mean(a.cl),
                ql: mean(a.ql),
                pal: mean(a.pal),
                ral: mean(a.ral),
            })
        })
        .collect();
    Ok(EvalReport {
        count,
        exact_match: pct(em_total, count),
        f1: pct(f1_total, count),
        categories,
        samples,
    })
}

impl EvalReport {
    /// Aligned plain-text table, one row per category plus a total row.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<8} {:>7} {:>7} {:>7} {:>7} {:>7} {:>7} {:>7}",
            "Type", "Count", "EM", "F1", "CL", "QL", "PAL", "RAL"
        );
        for r in &self.categories {
            let _ = writeln!(
                out,
                "{:<8} {:>7} {:>7.2} {:>7.2} {:>7.0} {:>7.0} {:>7.0} {:>7.0}",
                r.category.name(),
                r.count,
                r.exact_match,
                r.f1,
                r.cl,
                r.ql,
                r.pal,
                r.ral
            );
        }
        let _ = writeln!(
            out,
            "{:<8} {:>7} {:>7.2} {:>7.2}",
            "Total", self.count, self.exact_match, self.f1
        );
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub articles: usize,
    pub paragraphs: usize,
    /// Questions.
    pub samples: usize,
    /// Mean lengths in characters, averaged over questions (each question
    /// counts its paragraph's context).
    pub mean_context_chars: f64,
    pub mean_question_chars: f64,
    /// First answer of each question.
    pub mean_answer_chars: f64,
    /// Context length averaged over distinct paragraphs instead.
    pub mean_paragraph_chars: f64,
    pub context_chars: u64,
    pub question_chars: u64,
    pub answer_chars: u64,
}

pub fn dataset_stats(dataset: &SquadDataset) -> DatasetStats {
    let mut s = (0usize, 0usize, 0usize, 0usize, 0usize, 0usize);
    let (mut articles, mut paragraphs, mut paragraph_chars) = (0, 0, 0usize);
    for article in &dataset.data {
        articles += 1;
        for par in &article.paragraphs {
            paragraphs += 1;
            let cl = char_len(&par.context);
            paragraph_chars += cl;
            for qa in &par.qas {
                s.0 += 1;
                s.1 += cl;
                s.2 += char_len(&qa.question);
                s.3 += qa.answers.first().map_or(0, |a| char_len(&a.text));
            }
        }
    }
    let (n, ctx, q, a) = (s.0, s.1, s.2, s.3);
    let mean = |x: usize, n: usize| if n == 0 { 0.0 } else { x as f64 / n as f64 };
    DatasetStats {
        articles,
        paragraphs,
        samples: n,
        mean_context_chars: mean(ctx, n),
        mean_question_chars: mean(q, n),
        mean_answer_chars: mean(a, n),
        mean_paragraph_chars: mean(paragraph_chars, paragraphs),
        context_chars: mean(ctx, n).round() as u64,
        question_chars: mean(q, n).round() as u64,
        answer_chars: mean(a, n).round() as u64,
    }
}
