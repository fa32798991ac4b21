//! Synthetic parallel corpora with a known one-to-one word translation,
//! used to check that the aligner recovers planted links.

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AlignmentLinkSet, Direction, ParallelCorpus, SentencePair};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SyntheticSpec {
    pub pairs: usize,
    pub min_len: usize,
    pub max_len: usize,
    pub vocab: usize,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            pairs: 500,
            min_len: 3,
            max_len: 10,
            vocab: 100,
            seed: 0,
        }
    }
}

/// Source word `s{k}` always translates to `t{π(k)}` for a fixed random
/// permutation π. Sentences draw distinct words, and the target side is the
/// translated sentence in shuffled order. Returns the corpus and the gold
/// links for every pair.
pub fn bijective_corpus(spec: &SyntheticSpec) -> (ParallelCorpus, Vec<AlignmentLinkSet>) {
    assert!(spec.min_len >= 1 && spec.min_len <= spec.max_len && spec.max_len <= spec.vocab);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut permutation: Vec<usize> = (0..spec.vocab).collect();
    permutation.shuffle(&mut rng);

    let mut pairs = Vec::with_capacity(spec.pairs);
    let mut gold = Vec::with_capacity(spec.pairs);
    for _ in 0..spec.pairs {
        let len = rng.random_range(spec.min_len..=spec.max_len);
        let words = index::sample(&mut rng, spec.vocab, len).into_vec();
        let mut order: Vec<usize> = (0..len).collect();
        order.shuffle(&mut rng);
        // order[j] = source position translated at target position j
        let source = words.iter().map(|k| format!("s{k}"));
        let target = order.iter().map(|&i| format!("t{}", permutation[words[i]]));
        pairs.push(SentencePair::new(source, target));
        gold.push(AlignmentLinkSet::from_links(
            Direction::Symmetrized,
            order.iter().enumerate().map(|(j, &i)| (i, j)),
        ));
    }
    (
        ParallelCorpus::new(pairs).expect("non-empty sentences"),
        gold,
    )
}
