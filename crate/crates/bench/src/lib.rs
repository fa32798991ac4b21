//! Shared inputs for the benchmarks.

use qaforge::align::synthetic::{bijective_corpus, SyntheticSpec};
use qaforge::align::{AlignmentLinkSet, Direction, ParallelCorpus};
use qaforge::squad::SquadDataset;

pub fn squad_fixture() -> SquadDataset {
    SquadDataset::from_reader(include_str!("../../core/tests/fixtures/squad_100.json").as_bytes())
        .expect("fixture parses")
}

/// All contexts of the fixture joined into one long text.
pub fn long_text() -> String {
    let dataset = squad_fixture();
    let contexts: Vec<&str> = dataset
        .data
        .iter()
        .flat_map(|a| &a.paragraphs)
        .map(|p| p.context.as_str())
        .collect();
    contexts.join(" ")
}

pub fn synthetic_corpus(pairs: usize) -> ParallelCorpus {
    bijective_corpus(&SyntheticSpec {
        pairs,
        ..SyntheticSpec::default()
    })
    .0
}

/// A pair of overlapping directional alignments on an `n`x`n` grid.
pub fn directional_pair(n: usize) -> (AlignmentLinkSet, AlignmentLinkSet) {
    let fwd = AlignmentLinkSet::from_links(Direction::Forward, (0..n).map(|i| (i, (i * 3) % n)));
    let rev =
        AlignmentLinkSet::from_links(Direction::Reverse, (0..n).map(|i| (i, (i * 3 + i % 2) % n)));
    (fwd, rev)
}
