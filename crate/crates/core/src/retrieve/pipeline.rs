//! Dataset-level Translate, Transliterate, Align, Retrieve.
//!
//! Every stage reads and writes a [`WorkDocument`], so the stages can run
//! one at a time with files in between or chained in memory; both routes
//! go through the same functions.

use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{
    build_context_alignment, extract_answer, is_punctuation_only, DropReason, DropRecord,
    IndexedContext, Rejection,
};
use crate::align::{
    diagonal_alignment, AlignError, AlignerConfig, AlignmentLinkSet, BidirectionalAligner,
    ParallelCorpus, SentencePair,
};
use crate::squad::{Article, Paragraph, Qa, SquadDataset};
use crate::textseg::{join_sentences, split_sentences, tokenize, trim, AbbreviationLexicon, Span};
use crate::translate::{
    translate_batch, BatchOptions, TranslateError, TranslationCache, TranslationProvider,
    TranslationUnit,
};
use crate::translit::{cyr_to_lat_tallied, lat_to_cyr};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error(transparent)]
    Align(#[from] AlignError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkSentence {
    /// Location in the source context.
    pub span: Span,
    /// Trimmed source sentence.
    pub text: String,
    #[serde(default)]
    pub translation: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkQa {
    #[serde(flatten)]
    pub qa: Qa,
    #[serde(default)]
    pub translation: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkParagraph {
    pub context: String,
    pub sentences: Vec<WorkSentence>,
    pub qas: Vec<WorkQa>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkArticle {
    pub title: String,
    #[serde(default)]
    pub title_translation: Option<String>,
    pub paragraphs: Vec<WorkParagraph>,
}

/// Intermediate state shared by the pipeline stages.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkDocument {
    pub version: String,
    pub src_lang: String,
    pub tgt_lang: String,
    pub articles: Vec<WorkArticle>,
}

impl WorkDocument {
    pub fn sentences(&self) -> impl Iterator<Item = &WorkSentence> {
        self.paragraphs().flat_map(|p| &p.sentences)
    }

    pub fn paragraphs(&self) -> impl Iterator<Item = &WorkParagraph> {
        self.articles.iter().flat_map(|a| &a.paragraphs)
    }

    pub fn question_count(&self) -> usize {
        self.paragraphs().map(|p| p.qas.len()).sum()
    }
}

/// Splits every context into trimmed sentences.
pub fn split_dataset(
    dataset: &SquadDataset,
    lexicon: &AbbreviationLexicon,
    src_lang: &str,
    tgt_lang: &str,
) -> WorkDocument {
    let articles = dataset
        .data
        .iter()
        .map(|a| WorkArticle {
            title: a.title.clone(),
            title_translation: None,
            paragraphs: a
                .paragraphs
                .iter()
                .map(|p| WorkParagraph {
                    context: p.context.clone(),
                    sentences: split_sentences(&p.context, lexicon)
                        .into_iter()
                        .map(|s| WorkSentence {
                            span: s.span,
                            text: trim(&s.text),
                            translation: None,
                        })
                        .collect(),
                    qas: p
                        .qas
                        .iter()
                        .map(|q| WorkQa {
                            qa: q.clone(),
                            translation: None,
                        })
                        .collect(),
                })
                .collect(),
        })
        .collect();
    WorkDocument {
        version: dataset.version.clone(),
        src_lang: src_lang.to_string(),
        tgt_lang: tgt_lang.to_string(),
        articles,
    }
}

/// Translates titles, context sentences and questions. Sentence
/// translations are trimmed so they can be rejoined with single spaces.
pub fn translate_document(
    doc: &WorkDocument,
    provider: &dyn TranslationProvider,
    cache: Option<&TranslationCache>,
    options: BatchOptions,
) -> Result<WorkDocument, TranslateError> {
    let unit =
        |id: String, text: &str| TranslationUnit::new(id, trim(text), &doc.src_lang, &doc.tgt_lang);
    let mut units = Vec::new();
    for (a, article) in doc.articles.iter().enumerate() {
        units.push(unit(format!("title/{a}"), &article.title));
        for (p, par) in article.paragraphs.iter().enumerate() {
            for (s, sentence) in par.sentences.iter().enumerate() {
                units.push(unit(format!("sent/{a}/{p}/{s}"), &sentence.text));
            }
            for (q, qa) in par.qas.iter().enumerate() {
                units.push(unit(format!("q/{a}/{p}/{q}"), &qa.qa.question));
            }
        }
    }
    let mut results = translate_batch(&units, provider, cache, options)?.into_iter();
    let mut next = || results.next().expect("one result per unit").target_text;
    let mut out = doc.clone();
    for article in &mut out.articles {
        article.title_translation = Some(next());
        for par in &mut article.paragraphs {
            for sentence in &mut par.sentences {
                sentence.translation = Some(trim(&next()));
            }
            for qa in &mut par.qas {
                qa.translation = Some(next());
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TranslitMode {
    #[default]
    Off,
    Latin,
    Cyrillic,
}

impl FromStr for TranslitMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "off" => Ok(TranslitMode::Off),
            "latin" => Ok(TranslitMode::Latin),
            "cyrillic" => Ok(TranslitMode::Cyrillic),
            other => Err(format!(
                "unknown transliteration mode {other:?} (off|latin|cyrillic)"
            )),
        }
    }
}

/// Converts every translation to the requested script. Returns the
/// document and the number of characters that could not be converted
/// cleanly (non-Serbian Cyrillic letters toward Latin, digraphs toward
/// Cyrillic).
pub fn transliterate_document(doc: &WorkDocument, mode: TranslitMode) -> (WorkDocument, usize) {
    let mut out = doc.clone();
    if mode == TranslitMode::Off {
        return (out, 0);
    }
    let mut tally = 0;
    let mut convert = |text: &mut Option<String>| {
        if let Some(t) = text {
            let (converted, n) = match mode {
                TranslitMode::Latin => {
                    let r = cyr_to_lat_tallied(t);
                    (r.text, r.foreign_letters)
                }
                _ => lat_to_cyr(t),
            };
            *t = converted;
            tally += n;
        }
    };
    for article in &mut out.articles {
        convert(&mut article.title_translation);
        for par in &mut article.paragraphs {
            for sentence in &mut par.sentences {
                convert(&mut sentence.translation);
            }
            for qa in &mut par.qas {
                convert(&mut qa.translation);
            }
        }
    }
    (out, tally)
}

/// Tokenized (source, translation) pair for every sentence in document
/// order; `None` where the translation is missing or has no words.
pub fn sentence_pairs(doc: &WorkDocument) -> Vec<Option<SentencePair>> {
    doc.sentences()
        .map(|s| {
            let tgt = s.translation.as_deref()?;
            let pair = SentencePair::new(tokenize(&s.text).words(), tokenize(tgt).words());
            (!pair.source.is_empty() && !pair.target.is_empty()).then_some(pair)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum AlignerChoice {
    /// Train on the document's own sentence pairs.
    Trained(AlignerConfig),
    /// Word i to word i; only meaningful for identity translation.
    Diagonal,
    /// One link set per sentence, e.g. read from a Pharaoh file.
    External(Vec<AlignmentLinkSet>),
}

/// One symmetrized link set per sentence, in document order. Sentences
/// without a usable translation get an empty set.
pub fn align_document(
    doc: &WorkDocument,
    choice: &AlignerChoice,
) -> Result<Vec<AlignmentLinkSet>, AlignError> {
    let pairs = sentence_pairs(doc);
    let empty = || AlignmentLinkSet::new(crate::align::Direction::Symmetrized);
    match choice {
        AlignerChoice::Diagonal => Ok(pairs
            .iter()
            .map(|p| match p {
                Some(p) => diagonal_alignment(p.source.len(), p.target.len()),
                None => empty(),
            })
            .collect()),
        AlignerChoice::External(links) => {
            if links.len() != pairs.len() {
                return Err(AlignError::LengthMismatch(links.len(), pairs.len()));
            }
            for (l, p) in links.iter().zip(&pairs) {
                let (n, m) = p
                    .as_ref()
                    .map_or((0, 0), |p| (p.source.len(), p.target.len()));
                if let Some((i, j)) = l.iter().find(|&(i, j)| i >= n || j >= m) {
                    return Err(AlignError::DimensionMismatch {
                        src: i,
                        tgt: j,
                        src_len: n,
                        tgt_len: m,
                    });
                }
            }
            Ok(links.clone())
        }
        AlignerChoice::Trained(config) => {
            let corpus = ParallelCorpus::new(pairs.iter().flatten().cloned().collect())?;
            let aligner = BidirectionalAligner::train(&corpus, config)?;
            let align = |p: &Option<SentencePair>| match p {
                Some(p) => aligner.align(&p.source, &p.target),
                None => empty(),
            };
            Ok(if config.threads > 1 {
                pairs.par_iter().map(align).collect()
            } else {
                pairs.iter().map(align).collect()
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RetrieveOptions {
    /// Drop samples whose extracted answer has no letters or digits.
    pub drop_punctuation_only: bool,
    /// Paragraphs processed in parallel when above 1; output order is the
    /// same either way.
    pub jobs: usize,
}

/// Builds the target dataset from translated sentences and per-sentence
/// alignments. Every question ends up either in the dataset or in the drop
/// list, both in input order. Paragraphs and articles left without
/// questions are omitted.
pub fn retrieve_document(
    doc: &WorkDocument,
    alignments: &[AlignmentLinkSet],
    options: RetrieveOptions,
) -> Result<(SquadDataset, Vec<DropRecord>), AlignError> {
    let total: usize = doc.sentences().count();
    if alignments.len() != total {
        return Err(AlignError::LengthMismatch(alignments.len(), total));
    }
    let mut jobs = Vec::new();
    let mut offset = 0;
    for (a, article) in doc.articles.iter().enumerate() {
        for par in &article.paragraphs {
            let n = par.sentences.len();
            jobs.push((a, par, &alignments[offset..offset + n]));
            offset += n;
        }
    }
    let run = |&(a, par, links): &(usize, &WorkParagraph, &[AlignmentLinkSet])| {
        retrieve_paragraph(
            doc.articles[a].title_translation.as_deref(),
            par,
            links,
            options,
        )
        .map(|r| (a, r))
    };
    let results: Vec<_> = if options.jobs > 1 {
        jobs.par_iter().map(run).collect::<Result<_, _>>()?
    } else {
        jobs.iter().map(run).collect::<Result<_, _>>()?
    };

    let mut data: Vec<Article> = Vec::new();
    let mut drops = Vec::new();
    let mut last_article = None;
    for (a, (paragraph, dropped)) in results {
        drops.extend(dropped);
        let Some(paragraph) = paragraph else { continue };
        if last_article != Some(a) {
            let title = doc.articles[a]
                .title_translation
                .clone()
                .unwrap_or_default();
            data.push(Article {
                title,
                paragraphs: Vec::new(),
            });
            last_article = Some(a);
        }
        data.last_mut()
            .expect("article pushed")
            .paragraphs
            .push(paragraph);
    }
    Ok((
        SquadDataset {
            version: doc.version.clone(),
            data,
        },
        drops,
    ))
}

fn failed(text: Option<&str>) -> bool {
    text.is_none_or(|t| t.trim().is_empty())
}

fn retrieve_paragraph(
    title: Option<&str>,
    par: &WorkParagraph,
    links: &[AlignmentLinkSet],
    options: RetrieveOptions,
) -> Result<(Option<Paragraph>, Vec<DropRecord>), AlignError> {
    let mut drops = Vec::new();
    let drop_all = |reason: DropReason, detail: &str| -> Vec<DropRecord> {
        par.qas
            .iter()
            .map(|q| Rejection::new(reason, detail).into_record(&q.qa.id))
            .collect()
    };
    if failed(title) {
        return Ok((
            None,
            drop_all(DropReason::TranslationFailed, "title translation is empty"),
        ));
    }
    if par.sentences.is_empty() {
        return Ok((
            None,
            drop_all(DropReason::NoAlignment, "context has no sentences"),
        ));
    }
    if par
        .sentences
        .iter()
        .any(|s| failed(s.translation.as_deref()))
    {
        return Ok((
            None,
            drop_all(
                DropReason::TranslationFailed,
                "context sentence translation is empty",
            ),
        ));
    }

    let source = IndexedContext::new(
        par.context.clone(),
        &par.sentences.iter().map(|s| s.span).collect::<Vec<_>>(),
    );
    let translated: Vec<&str> = par
        .sentences
        .iter()
        .map(|s| s.translation.as_deref().unwrap_or_default())
        .collect();
    let (tgt_text, tgt_spans) = join_sentences(&translated);
    let target = IndexedContext::new(tgt_text, &tgt_spans);
    let alignment = build_context_alignment(
        links,
        &source.sentence_token_counts,
        &target.sentence_token_counts,
    )?;

    let mut qas = Vec::new();
    for q in &par.qas {
        let id = &q.qa.id;
        if failed(q.translation.as_deref()) {
            drops.push(
                Rejection::new(
                    DropReason::TranslationFailed,
                    "question translation is empty",
                )
                .into_record(id),
            );
            continue;
        }
        let mut answers = Vec::new();
        let mut first_rejection = None;
        for gold in &q.qa.answers {
            let result =
                extract_answer(&gold.text, gold.answer_start, &source, &alignment, &target)
                    .and_then(|ans| {
                        if options.drop_punctuation_only && is_punctuation_only(&ans.text) {
                            Err(Rejection::new(
                                DropReason::EmptyAnswer,
                                format!("punctuation-only answer {:?}", ans.text),
                            ))
                        } else {
                            Ok(ans)
                        }
                    });
            match result {
                Ok(ans) => answers.push(ans),
                Err(r) => {
                    first_rejection.get_or_insert(r);
                }
            }
        }
        if answers.is_empty() {
            let r = first_rejection.unwrap_or_else(|| {
                Rejection::new(DropReason::EmptyAnswer, "question has no answers")
            });
            drops.push(r.into_record(id));
            continue;
        }
        qas.push(Qa {
            id: id.clone(),
            question: q.translation.clone().unwrap_or_default(),
            answers,
        });
    }
    let paragraph = (!qas.is_empty()).then(|| Paragraph {
        context: target.text.clone(),
        qas,
    });
    Ok((paragraph, drops))
}

#[derive(Debug, Clone)]
pub struct SynthesisConfig {
    pub src_lang: String,
    pub tgt_lang: String,
    pub translit: TranslitMode,
    pub aligner: AlignerChoice,
    pub batch: BatchOptions,
    pub retrieve: RetrieveOptions,
}

impl Default for SynthesisConfig {
    fn default() -> Self {
        SynthesisConfig {
            src_lang: "eng_Latn".into(),
            tgt_lang: "srp_Cyrl".into(),
            translit: TranslitMode::Off,
            aligner: AlignerChoice::Trained(AlignerConfig::default()),
            batch: BatchOptions::default(),
            retrieve: RetrieveOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Synthesis {
    pub dataset: SquadDataset,
    pub drops: Vec<DropRecord>,
    pub alignments: Vec<AlignmentLinkSet>,
    pub translit_warnings: usize,
}

/// Runs split, translate, transliterate, align and retrieve in sequence.
pub fn synthesize_dataset(
    dataset: &SquadDataset,
    lexicon: &AbbreviationLexicon,
    provider: &dyn TranslationProvider,
    cache: Option<&TranslationCache>,
    config: &SynthesisConfig,
) -> Result<Synthesis, PipelineError> {
    let doc = split_dataset(dataset, lexicon, &config.src_lang, &config.tgt_lang);
    let doc = translate_document(&doc, provider, cache, config.batch)?;
    let (doc, translit_warnings) = transliterate_document(&doc, config.translit);
    let alignments = align_document(&doc, &config.aligner)?;
    let (dataset, drops) = retrieve_document(&doc, &alignments, config.retrieve)?;
    Ok(Synthesis {
        dataset,
        drops,
        alignments,
        translit_warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::squad::Answer;
    use crate::translate::{identity_provider, FileProvider};

    fn dataset() -> SquadDataset {
        let qa = |id: &str, q: &str, text: &str, start: usize| Qa {
            id: id.into(),
            question: q.into(),
            answers: vec![Answer {
                text: text.into(),
                answer_start: start,
            }],
        };
        SquadDataset {
            version: "1.1".into(),
            data: vec![Article {
                title: "Tesla".into(),
                paragraphs: vec![Paragraph {
                    context: "Tesla was born in Smiljan. He died in 1943.".into(),
                    qas: vec![
                        qa("a", "Where was Tesla born?", "Smiljan", 18),
                        qa("b", "When did he die?", "1943", 38),
                        qa("c", "Who died?", "He", 27),
                    ],
                }],
            }],
        }
    }

    fn identity_config() -> SynthesisConfig {
        SynthesisConfig {
            aligner: AlignerChoice::Diagonal,
            ..SynthesisConfig::default()
        }
    }

    #[test]
    fn identity_round_trip() {
        let d = dataset();
        let out = synthesize_dataset(
            &d,
            &AbbreviationLexicon::english(),
            &identity_provider(),
            None,
            &identity_config(),
        )
        .unwrap();
        assert!(out.drops.is_empty());
        assert_eq!(out.dataset, d);
    }

    #[test]
    fn unaligned_answer_dropped() {
        let d = dataset();
        let doc = split_dataset(&d, &AbbreviationLexicon::english(), "en", "en");
        let doc =
            translate_document(&doc, &identity_provider(), None, BatchOptions::default()).unwrap();
        let mut links = align_document(&doc, &AlignerChoice::Diagonal).unwrap();
        // second sentence "He died in 1943 ." loses the link for "He"
        links[1] = AlignmentLinkSet::from_links(
            links[1].direction,
            links[1].iter().filter(|&(i, _)| i != 0),
        );
        let (out, drops) = retrieve_document(&doc, &links, RetrieveOptions::default()).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(drops.len(), 1);
        assert_eq!(drops[0].id, "c");
        assert_eq!(drops[0].reason, DropReason::NoAlignment);
    }

    #[test]
    fn empty_translations_are_attributed() {
        let pairs = [
            ("Tesla", "Тесла"),
            ("Tesla was born in Smiljan.", "Тесла је рођен у Смиљану."),
            ("He died in 1943.", ""),
            ("Where was Tesla born?", "Где је рођен Тесла?"),
            ("When did he die?", "Када је умро?"),
            ("Who died?", "Ко је умро?"),
        ];
        let jsonl: String = pairs
            .iter()
            .map(|(s, t)| {
                format!(
                    "{}\n",
                    serde_json::json!({"src": s, "tgt": t, "src_lang": "eng_Latn", "tgt_lang": "srp_Cyrl"})
                )
            })
            .collect();
        let provider = FileProvider::from_reader(jsonl.as_bytes()).unwrap();
        let out = synthesize_dataset(
            &dataset(),
            &AbbreviationLexicon::english(),
            &provider,
            None,
            &SynthesisConfig::default(),
        )
        .unwrap();
        assert_eq!(out.dataset.len(), 0);
        assert!(out.dataset.data.is_empty());
        assert_eq!(out.drops.len(), 3);
        assert!(out
            .drops
            .iter()
            .all(|d| d.reason == DropReason::TranslationFailed));
    }

    #[test]
    fn transliteration_applies_to_all_translations() {
        let d = dataset();
        let mut doc = split_dataset(&d, &AbbreviationLexicon::english(), "en", "sr");
        doc.articles[0].title_translation = Some("Њујорк".into());
        let (lat, warnings) = transliterate_document(&doc, TranslitMode::Latin);
        assert_eq!(
            lat.articles[0].title_translation.as_deref(),
            Some("Njujork")
        );
        assert_eq!(warnings, 0);
        let (cyr, ambiguous) = transliterate_document(&lat, TranslitMode::Cyrillic);
        assert_eq!(cyr.articles[0].title_translation.as_deref(), Some("Њујорк"));
        assert_eq!(ambiguous, 1);
        assert_eq!("latin".parse::<TranslitMode>(), Ok(TranslitMode::Latin));
        assert!("greek".parse::<TranslitMode>().is_err());
    }

    #[test]
    fn external_alignments_are_checked() {
        let doc = split_dataset(&dataset(), &AbbreviationLexicon::english(), "en", "en");
        let doc =
            translate_document(&doc, &identity_provider(), None, BatchOptions::default()).unwrap();
        assert!(matches!(
            align_document(&doc, &AlignerChoice::External(vec![])),
            Err(AlignError::LengthMismatch(0, 2))
        ));
        let bad = vec![
            AlignmentLinkSet::from_links(crate::align::Direction::Symmetrized, [(40, 0)]),
            AlignmentLinkSet::new(crate::align::Direction::Symmetrized),
        ];
        assert!(matches!(
            align_document(&doc, &AlignerChoice::External(bad)),
            Err(AlignError::DimensionMismatch { src: 40, .. })
        ));
    }

    #[test]
    fn parallel_retrieve_matches_serial() {
        let doc = split_dataset(&dataset(), &AbbreviationLexicon::english(), "en", "en");
        let doc =
            translate_document(&doc, &identity_provider(), None, BatchOptions::default()).unwrap();
        let links = align_document(&doc, &AlignerChoice::Diagonal).unwrap();
        let serial = retrieve_document(&doc, &links, RetrieveOptions::default()).unwrap();
        let parallel = retrieve_document(
            &doc,
            &links,
            RetrieveOptions {
                jobs: 4,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(serial, parallel);
    }

    #[test]
    fn work_document_serde_round_trip() {
        let doc = split_dataset(&dataset(), &AbbreviationLexicon::english(), "en", "sr");
        let text = serde_json::to_string(&doc).unwrap();
        assert_eq!(serde_json::from_str::<WorkDocument>(&text).unwrap(), doc);
    }
}
