use std::collections::BTreeSet;
use std::ops::Bound;

use super::{AlignError, AlignmentLinkSet, Direction};

const NEIGHBORS: [(isize, isize); 8] = [
    (-1, 0),
    (0, -1),
    (1, 0),
    (0, 1),
    (-1, -1),
    (-1, 1),
    (1, -1),
    (1, 1),
];

fn check_bounds(
    links: &AlignmentLinkSet,
    src_len: usize,
    tgt_len: usize,
) -> Result<(), AlignError> {
    match links.iter().find(|&(i, j)| i >= src_len || j >= tgt_len) {
        Some((src, tgt)) => Err(AlignError::DimensionMismatch {
            src,
            tgt,
            src_len,
            tgt_len,
        }),
        None => Ok(()),
    }
}

struct Grid {
    links: BTreeSet<(usize, usize)>,
    src_aligned: Vec<bool>,
    tgt_aligned: Vec<bool>,
}

impl Grid {
    fn add(&mut self, i: usize, j: usize) {
        self.links.insert((i, j));
        self.src_aligned[i] = true;
        self.tgt_aligned[j] = true;
    }
}

/// Grow-diag-final-and symmetrization of a forward and a reverse
/// alignment, both given in (source, target) orientation.
///
/// Starts from the intersection, repeatedly sweeps the current links in
/// row-major order adding union neighbors (diagonals included) that cover
/// a still unaligned source or target word, then adds union links whose
/// source and target are both unaligned, first from the forward set and
/// then from the reverse set. Links added during a sweep are themselves
/// visited later in the same sweep.
pub fn symmetrize_gdfa(
    forward: &AlignmentLinkSet,
    reverse: &AlignmentLinkSet,
    src_len: usize,
    tgt_len: usize,
) -> Result<AlignmentLinkSet, AlignError> {
    check_bounds(forward, src_len, tgt_len)?;
    check_bounds(reverse, src_len, tgt_len)?;
    let union = forward.union(reverse);
    let mut grid = Grid {
        links: BTreeSet::new(),
        src_aligned: vec![false; src_len],
        tgt_aligned: vec![false; tgt_len],
    };
    for (i, j) in forward.intersection(reverse).iter() {
        grid.add(i, j);
    }

    loop {
        let mut added = false;
        let mut cursor = None;
        loop {
            let lower = match cursor {
                None => Bound::Unbounded,
                Some(p) => Bound::Excluded(p),
            };
            let Some(&(i, j)) = grid.links.range((lower, Bound::Unbounded)).next() else {
                break;
            };
            cursor = Some((i, j));
            for (di, dj) in NEIGHBORS {
                let (Some(ni), Some(nj)) = (i.checked_add_signed(di), j.checked_add_signed(dj))
                else {
                    continue;
                };
                if ni >= src_len || nj >= tgt_len {
                    continue;
                }
                if (!grid.src_aligned[ni] || !grid.tgt_aligned[nj])
                    && union.contains(ni, nj)
                    && !grid.links.contains(&(ni, nj))
                {
                    grid.add(ni, nj);
                    added = true;
                }
            }
        }
        if !added {
            break;
        }
    }

    for side in [forward, reverse] {
        for (i, j) in side.iter() {
            if !grid.src_aligned[i] && !grid.tgt_aligned[j] {
                grid.add(i, j);
            }
        }
    }
    Ok(AlignmentLinkSet::from_links(
        Direction::Symmetrized,
        grid.links,
    ))
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn set(links: &[(usize, usize)]) -> AlignmentLinkSet {
        AlignmentLinkSet::from_links(Direction::Forward, links.iter().copied())
    }

    #[test]
    fn identical_inputs_are_fixed_points() {
        let a = set(&[(0, 0), (1, 2), (2, 1)]);
        let s = symmetrize_gdfa(&a, &a, 3, 3).unwrap();
        assert_eq!(s.iter().collect::<Vec<_>>(), a.iter().collect::<Vec<_>>());
        assert_eq!(s.direction, Direction::Symmetrized);
    }

    #[test]
    fn grows_along_diagonal() {
        let fwd = set(&[(0, 0), (1, 1), (2, 2)]);
        let rev = set(&[(0, 0)]);
        let s = symmetrize_gdfa(&fwd, &rev, 3, 3).unwrap();
        assert_eq!(s.iter().collect::<Vec<_>>(), [(0, 0), (1, 1), (2, 2)]);
    }

    #[test]
    fn disjoint_directions_meet_in_final_and() {
        let s = symmetrize_gdfa(&set(&[(0, 1)]), &set(&[(1, 0)]), 2, 2).unwrap();
        assert_eq!(s.iter().collect::<Vec<_>>(), [(0, 1), (1, 0)]);
        let s = symmetrize_gdfa(&set(&[(0, 0), (1, 1)]), &set(&[(0, 0)]), 2, 2).unwrap();
        assert_eq!(s.iter().collect::<Vec<_>>(), [(0, 0), (1, 1)]);
    }

    #[test]
    fn grow_only_touches_uncovered_words() {
        // (0,1) is a neighbor of (0,0) but both its words are already aligned
        let fwd = set(&[(0, 0), (1, 1), (0, 1)]);
        let rev = set(&[(0, 0), (1, 1)]);
        let s = symmetrize_gdfa(&fwd, &rev, 2, 2).unwrap();
        assert_eq!(s.iter().collect::<Vec<_>>(), [(0, 0), (1, 1)]);
    }

    #[test]
    fn final_and_needs_both_words_unaligned() {
        let fwd = set(&[(0, 0), (2, 2), (2, 0)]);
        let rev = set(&[(0, 0)]);
        let s = symmetrize_gdfa(&fwd, &rev, 3, 3).unwrap();
        // (2,0) shares target 0 with (0,0); (2,2) is isolated and fully unaligned
        assert_eq!(s.iter().collect::<Vec<_>>(), [(0, 0), (2, 2)]);
    }

    #[test]
    fn forward_final_runs_before_reverse() {
        let fwd = set(&[(0, 0)]);
        let rev = set(&[(0, 1), (1, 0)]);
        let s = symmetrize_gdfa(&fwd, &rev, 2, 2).unwrap();
        assert_eq!(s.iter().collect::<Vec<_>>(), [(0, 0)]);
    }

    #[test]
    fn rejects_out_of_range_links() {
        let bad = set(&[(3, 0)]);
        assert!(matches!(
            symmetrize_gdfa(&bad, &set(&[]), 2, 2),
            Err(AlignError::DimensionMismatch { src: 3, .. })
        ));
        assert!(symmetrize_gdfa(&set(&[]), &set(&[]), 0, 0)
            .unwrap()
            .is_empty());
    }

    type Links = Vec<(usize, usize)>;

    fn links_strategy() -> impl Strategy<Value = (usize, usize, Links, Links)> {
        (1usize..9, 1usize..9).prop_flat_map(|(n, m)| {
            let cell = (0..n, 0..m);
            (
                Just(n),
                Just(m),
                prop::collection::vec(cell.clone(), 0..16),
                prop::collection::vec(cell, 0..16),
            )
        })
    }

    proptest! {
        #[test]
        fn bounded_by_intersection_and_union((n, m, f, r) in links_strategy()) {
            let fwd = set(&f);
            let rev = set(&r);
            let s = symmetrize_gdfa(&fwd, &rev, n, m).unwrap();
            prop_assert!(fwd.intersection(&rev).is_subset(&s));
            prop_assert!(s.is_subset(&fwd.union(&rev)));
            let twice = symmetrize_gdfa(&s, &s, n, m).unwrap();
            prop_assert_eq!(twice.iter().collect::<Vec<_>>(), s.iter().collect::<Vec<_>>());
        }
    }
}
