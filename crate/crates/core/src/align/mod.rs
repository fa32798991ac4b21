//! Unsupervised word alignment.
//!
//! Lexical tables are trained with IBM Model 1 EM (or, optionally, a
//! seeded collapsed Gibbs sampler), decoded per direction with Viterbi
//! argmax, and the two directions are merged with grow-diag-final-and.
//! Alignments can also be read from and written to Pharaoh files so that
//! an external aligner can be dropped in.

mod corpus;
mod lexicon;
mod links;
mod pharaoh;
mod symmetrize;
pub mod synthetic;

use std::io;

use thiserror::Error;

pub use corpus::{ParallelCorpus, SentencePair};
pub use lexicon::{
    log_likelihood, train_gibbs, train_ibm1, train_ibm1_traced, viterbi_align, EmConfig,
    GibbsConfig, IterationStats, LexiconTable, NULL_WORD,
};
pub use links::{link_scores, AlignmentLinkSet, Direction, LinkScores};
pub use pharaoh::{
    parse_pharaoh_line, read_pharaoh, read_pharaoh_file, write_pharaoh, write_pharaoh_file,
};
pub use symmetrize::symmetrize_gdfa;

#[derive(Debug, Error)]
pub enum AlignError {
    #[error("corpus has no trainable sentence pairs")]
    EmptyCorpus,
    #[error("sentence pair {0} has an empty side")]
    EmptySide(usize),
    #[error("invalid aligner configuration: {0}")]
    InvalidConfig(String),
    #[error("link ({src}, {tgt}) outside a {src_len}x{tgt_len} sentence pair")]
    DimensionMismatch {
        src: usize,
        tgt: usize,
        src_len: usize,
        tgt_len: usize,
    },
    #[error("parallel inputs differ in length: {0} vs {1} lines")]
    LengthMismatch(usize, usize),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Which trainer fills the lexical tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Trainer {
    Em,
    Gibbs,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AlignerConfig {
    pub trainer: Trainer,
    pub iterations: usize,
    pub alpha: f64,
    pub seed: u64,
    /// Pairs with more tokens than this on either side are left out of
    /// training (they are still decoded).
    pub max_tokens: usize,
    /// Worker threads for the E-step; 1 runs the bit-reproducible serial
    /// path.
    pub threads: usize,
}

impl Default for AlignerConfig {
    fn default() -> Self {
        AlignerConfig {
            trainer: Trainer::Em,
            iterations: 5,
            alpha: 0.001,
            seed: 0,
            max_tokens: 200,
            threads: 1,
        }
    }
}

impl AlignerConfig {
    fn em(&self) -> EmConfig {
        EmConfig {
            iterations: self.iterations,
            alpha: self.alpha,
            max_tokens: self.max_tokens,
            threads: self.threads,
        }
    }

    fn gibbs(&self) -> GibbsConfig {
        GibbsConfig {
            sweeps: self.iterations.max(1) * 2,
            burn_in: self.iterations.max(1),
            alpha: self.alpha,
            seed: self.seed,
            max_tokens: self.max_tokens,
        }
    }
}

/// Forward and reverse lexical tables for one language pair.
#[derive(Debug, Clone)]
pub struct BidirectionalAligner {
    pub forward: LexiconTable,
    pub reverse: LexiconTable,
}

impl BidirectionalAligner {
    pub fn train(corpus: &ParallelCorpus, config: &AlignerConfig) -> Result<Self, AlignError> {
        let reversed = corpus.reversed();
        let (forward, reverse) = match config.trainer {
            Trainer::Em => (
                train_ibm1(corpus, &config.em())?,
                train_ibm1(&reversed, &config.em())?,
            ),
            Trainer::Gibbs => {
                let mut rev = config.gibbs();
                rev.seed = rev.seed.wrapping_add(1);
                (
                    train_gibbs(corpus, &config.gibbs())?,
                    train_gibbs(&reversed, &rev)?,
                )
            }
        };
        Ok(BidirectionalAligner { forward, reverse })
    }

    /// Symmetrized alignment of one sentence pair.
    pub fn align<S: AsRef<str>>(&self, source: &[S], target: &[S]) -> AlignmentLinkSet {
        let fwd = viterbi_align(&self.forward, source, target, Direction::Forward);
        let rev = viterbi_align(&self.reverse, source, target, Direction::Reverse);
        symmetrize_gdfa(&fwd, &rev, source.len(), target.len())
            .expect("decoded links are within sentence bounds")
    }
}

/// Links `(i, i)` for every position both sides share.
pub fn diagonal_alignment(src_len: usize, tgt_len: usize) -> AlignmentLinkSet {
    AlignmentLinkSet::from_links(
        Direction::Symmetrized,
        (0..src_len.min(tgt_len)).map(|i| (i, i)),
    )
}
