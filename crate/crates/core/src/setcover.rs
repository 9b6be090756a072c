//! Unweighted set cover: greedy and exact branch-and-bound.

use std::cmp::Reverse;

use crate::bitset::Bitset;

/// Greedy cover: repeatedly take the set covering the most uncovered
/// elements, ties going to the lower index. Elements no set covers are
/// ignored. Returns indices in ascending order.
pub(crate) fn greedy(sets: &[Bitset], universe: usize) -> Vec<usize> {
    let mut uncovered = coverable(sets, universe);
    let mut chosen = Vec::new();
    while !uncovered.is_empty() {
        let (best, gain) = sets
            .iter()
            .enumerate()
            .map(|(i, s)| (i, s.intersection_count(&uncovered)))
            .fold(
                (usize::MAX, 0),
                |acc, (i, g)| if g > acc.1 { (i, g) } else { acc },
            );
        if gain == 0 {
            break;
        }
        chosen.push(best);
        uncovered.difference_with(&sets[best]);
    }
    chosen.sort_unstable();
    chosen
}

/// Minimum-cardinality cover by depth-first branch and bound, seeded with the
/// greedy solution. Branches on the uncovered element with the fewest
/// covering sets.
pub(crate) fn exact(sets: &[Bitset], universe: usize) -> Vec<usize> {
    let uncovered = coverable(sets, universe);
    let mut best = greedy(sets, universe);
    let mut covering = vec![Vec::new(); universe];
    for (i, s) in sets.iter().enumerate() {
        for e in s.ones() {
            covering[e].push(i);
        }
    }
    let mut chosen = Vec::new();
    search(sets, &covering, uncovered, &mut chosen, &mut best);
    best.sort_unstable();
    best
}

fn search(
    sets: &[Bitset],
    covering: &[Vec<usize>],
    uncovered: Bitset,
    chosen: &mut Vec<usize>,
    best: &mut Vec<usize>,
) {
    if uncovered.is_empty() {
        if chosen.len() < best.len() {
            *best = chosen.clone();
        }
        return;
    }
    let max_gain = sets
        .iter()
        .map(|s| s.intersection_count(&uncovered))
        .max()
        .unwrap_or(0);
    if max_gain == 0 {
        return;
    }
    let lower = uncovered.count().div_ceil(max_gain);
    if chosen.len() + lower >= best.len() {
        return;
    }
    let pivot = uncovered
        .ones()
        .min_by_key(|&e| (covering[e].len(), e))
        .expect("uncovered is non-empty");
    let mut options = covering[pivot].clone();
    options.sort_by_key(|&s| (Reverse(sets[s].intersection_count(&uncovered)), s));
    for s in options {
        chosen.push(s);
        let mut next = uncovered.clone();
        next.difference_with(&sets[s]);
        search(sets, covering, next, chosen, best);
        chosen.pop();
    }
}

fn coverable(sets: &[Bitset], universe: usize) -> Bitset {
    let mut all = Bitset::new(universe);
    for s in sets {
        all.union_with(s);
    }
    all
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sets(universe: usize, members: &[&[usize]]) -> Vec<Bitset> {
        members
            .iter()
            .map(|m| {
                let mut b = Bitset::new(universe);
                m.iter().for_each(|&e| b.set(e));
                b
            })
            .collect()
    }

    fn brute_min(sets: &[Bitset], universe: usize) -> usize {
        let target = coverable(sets, universe);
        (0u32..1 << sets.len())
            .filter(|mask| {
                let mut u = Bitset::new(universe);
                for (i, s) in sets.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        u.union_with(s);
                    }
                }
                target.is_subset(&u)
            })
            .map(|m| m.count_ones() as usize)
            .min()
            .unwrap()
    }

    #[test]
    fn greedy_is_suboptimal_on_classic_instance() {
        // Two halves beat the greedy choice of the large middle set.
        let s = sets(6, &[&[0, 1, 2], &[3, 4, 5], &[0, 1, 3, 4], &[2], &[5]]);
        assert_eq!(greedy(&s, 6).len(), 3);
        assert_eq!(exact(&s, 6), vec![0, 1]);
    }

    #[test]
    fn exact_matches_brute_force_on_small_instances() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let universe = rng.gen_range(1..12);
            let n = rng.gen_range(1..9);
            let s: Vec<Bitset> = (0..n)
                .map(|_| {
                    let mut b = Bitset::new(universe);
                    for e in 0..universe {
                        if rng.gen_bool(0.3) {
                            b.set(e);
                        }
                    }
                    b
                })
                .collect();
            let exact = exact(&s, universe);
            assert_eq!(exact.len(), brute_min(&s, universe));
            let mut u = Bitset::new(universe);
            exact.iter().for_each(|&i| u.union_with(&s[i]));
            assert!(coverable(&s, universe).is_subset(&u));
        }
    }

    #[test]
    fn empty_universe() {
        assert!(exact(&[], 0).is_empty());
        assert!(greedy(&sets(3, &[&[]]), 3).is_empty());
    }
}
