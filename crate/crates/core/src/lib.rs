//! Synthesis of extractive QA datasets by translating a source dataset,
//! aligning words between the original and translated sentences, and
//! projecting answer spans; plus SQuAD-style scoring and statistics.
//!
//! The pipeline is split into independent modules:
//!
//! - [`textseg`]: sentence splitting, tokenization, offset maps
//! - [`translit`]: Serbian Cyrillic/Latin transliteration
//! - [`translate`]: translation providers, batching and caching
//! - [`align`]: IBM Model 1 alignment and symmetrization
//! - [`retrieve`]: answer projection and the dataset pipeline
//! - [`evalkit`]: EM/F1, question types, dataset statistics

pub mod align;
pub mod evalkit;
pub mod retrieve;
pub mod squad;
pub mod textseg;
pub mod translate;
pub mod translit;

pub use align::{AlignmentLinkSet, Direction, LexiconTable, ParallelCorpus};
pub use evalkit::{EvalReport, NormalizationOptions, QuestionCategory};
pub use retrieve::{DropReason, DropRecord};
pub use squad::{QaSample, SquadDataset};
pub use textseg::{Span, Token, TokenizedText};
pub use translate::{TranslationProvider, TranslationResult, TranslationUnit};
