use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Reverse,
    Symmetrized,
}

/// Set of `(source index, target index)` links, kept in row-major order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentLinkSet {
    links: BTreeSet<(usize, usize)>,
    pub direction: Direction,
}

impl AlignmentLinkSet {
    pub fn new(direction: Direction) -> Self {
        AlignmentLinkSet {
            links: BTreeSet::new(),
            direction,
        }
    }

    pub fn from_links(
        direction: Direction,
        links: impl IntoIterator<Item = (usize, usize)>,
    ) -> Self {
        AlignmentLinkSet {
            links: links.into_iter().collect(),
            direction,
        }
    }

    pub fn insert(&mut self, src: usize, tgt: usize) -> bool {
        self.links.insert((src, tgt))
    }

    pub fn contains(&self, src: usize, tgt: usize) -> bool {
        self.links.contains(&(src, tgt))
    }

    /// Target indices linked to source index `src`, ascending.
    pub fn targets_of(&self, src: usize) -> impl Iterator<Item = usize> + '_ {
        self.links
            .range((src, 0)..=(src, usize::MAX))
            .map(|&(_, j)| j)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.links.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    /// Swaps source and target indices.
    pub fn transposed(&self) -> Self {
        AlignmentLinkSet {
            links: self.links.iter().map(|&(i, j)| (j, i)).collect(),
            direction: self.direction,
        }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        AlignmentLinkSet {
            links: self.links.intersection(&other.links).copied().collect(),
            direction: Direction::Symmetrized,
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        AlignmentLinkSet {
            links: self.links.union(&other.links).copied().collect(),
            direction: Direction::Symmetrized,
        }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.links.is_subset(&other.links)
    }

    /// Largest source and target index plus one, or `(0, 0)` when empty.
    pub fn extent(&self) -> (usize, usize) {
        self.links
            .iter()
            .fold((0, 0), |(s, t), &(i, j)| (s.max(i + 1), t.max(j + 1)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkScores {
    pub precision: f64,
    pub recall: f64,
    pub predicted: usize,
    pub gold: usize,
    pub correct: usize,
}

/// Micro-averaged precision and recall of predicted links against gold
/// links, sentence by sentence.
pub fn link_scores(predicted: &[AlignmentLinkSet], gold: &[AlignmentLinkSet]) -> LinkScores {
    let mut p = 0;
    let mut g = 0;
    let mut c = 0;
    for (pred, gold) in predicted.iter().zip(gold) {
        p += pred.len();
        g += gold.len();
        c += pred.links.intersection(&gold.links).count();
    }
    let ratio = |num: usize, den: usize| {
        if den == 0 {
            1.0
        } else {
            num as f64 / den as f64
        }
    };
    LinkScores {
        precision: ratio(c, p),
        recall: ratio(c, g),
        predicted: p,
        gold: g,
        correct: c,
    }
}
