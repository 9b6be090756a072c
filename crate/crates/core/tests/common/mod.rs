//! Brute-force oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use lad_core::binarize::{BinaryView, CutPoint, Direction, LabeledSet};
use lad_core::cascade::{import_decision_tree, ImportOptions, ImportedTree};
use lad_core::{CascadeModel, Dataset, MiningConfig, RatingScale};
use rand::Rng;

pub fn fixture(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub const TABLES: [(&str, i32); 4] = [
    ("table3_2012.txt", 2012),
    ("table4_2013.txt", 2013),
    ("table5_2014.txt", 2014),
    ("table6_2015.txt", 2015),
];

pub fn import_lenient(name: &str, year: i32) -> ImportedTree {
    import_decision_tree(
        &fixture(name),
        &RatingScale::fitch(),
        year,
        &ImportOptions::lenient(),
    )
    .unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Every conjunction of at most `max_degree` literals over the view's
/// columns, no two sharing indicator and direction, that covers enough
/// positives and is homogeneous enough. Ordered by degree, then by the
/// literal ids `2 * column + (0 for >=, 1 for <=)`.
pub fn brute_force_patterns(view: &BinaryView, config: &MiningConfig, prune: bool) -> Vec<String> {
    let width = view.cutpoints.len() * 2;
    let positives = view.rows.iter().filter(|r| r.positive).count();
    let min_pos = ((config.min_prevalence * positives as f64 - 1e-9).ceil() as usize).max(1);
    let holds = |t: usize, row: usize| {
        let r = &view.rows[row];
        if t.is_multiple_of(2) {
            r.bits[t / 2]
        } else {
            r.at_most[t / 2]
        }
    };
    let qualifies = |terms: &[usize]| {
        let covered: Vec<usize> = (0..view.rows.len())
            .filter(|&i| terms.iter().all(|&t| holds(t, i)))
            .collect();
        let pos = covered.iter().filter(|&&i| view.rows[i].positive).count();
        pos >= min_pos && pos as f64 / covered.len() as f64 + 1e-12 >= config.min_homogeneity
    };
    let key = |t: usize| (view.cutpoints[t / 2].indicator.clone(), t % 2);

    let mut out = Vec::new();
    for degree in 1..=config.max_degree {
        for terms in combinations(width, degree) {
            let keys: Vec<_> = terms.iter().map(|&t| key(t)).collect();
            if (0..keys.len()).any(|i| keys[i + 1..].contains(&keys[i])) {
                continue;
            }
            if !qualifies(&terms) {
                continue;
            }
            if prune {
                let proper = (1..(1 << degree) - 1).any(|mask: usize| {
                    let sub: Vec<usize> = (0..degree)
                        .filter(|b| mask & (1 << b) != 0)
                        .map(|b| terms[b])
                        .collect();
                    qualifies(&sub)
                });
                if proper {
                    continue;
                }
            }
            let lits: Vec<String> = terms
                .iter()
                .map(|&t| {
                    let dir = if t % 2 == 0 {
                        Direction::AtLeast
                    } else {
                        Direction::AtMost
                    };
                    view.cutpoints[t / 2].literal(dir).to_string()
                })
                .collect();
            out.push(format!("({})", lits.join(", ")));
        }
    }
    out
}

/// Sorted `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

pub fn separates(cut: &CutPoint, p: Option<f64>, n: Option<f64>) -> bool {
    let t = cut.threshold;
    match (p, n) {
        (None, _) => false,
        (Some(_), None) => true,
        (Some(p), Some(n)) => (p >= t && n < t) || (p <= t && n > t),
    }
}

/// Size of the smallest subset of `candidates` separating every pair that
/// the full set separates, by trying all subsets in order of size.
pub fn smallest_separating_size(candidates: &[CutPoint], set: &LabeledSet) -> usize {
    let value = |c: &CutPoint, i: usize| set.column(c.indicator.as_str()).and_then(|col| col[i]);
    let pairs: Vec<(usize, usize)> = set
        .positives()
        .flat_map(|p| set.negatives().map(move |n| (p, n)))
        .filter(|&(p, n)| {
            candidates
                .iter()
                .any(|c| separates(c, value(c, p), value(c, n)))
        })
        .collect();
    for size in 0..=candidates.len() {
        for subset in combinations(candidates.len(), size) {
            let ok = pairs.iter().all(|&(p, n)| {
                subset.iter().any(|&j| {
                    separates(
                        &candidates[j],
                        value(&candidates[j], p),
                        value(&candidates[j], n),
                    )
                })
            });
            if ok {
                return size;
            }
        }
    }
    unreachable!("the full candidate set separates its own pairs")
}

/// Whether `cuts` separates every pair the full candidate set separates.
pub fn separates_all(candidates: &[CutPoint], cuts: &[CutPoint], set: &LabeledSet) -> bool {
    let value = |c: &CutPoint, i: usize| set.column(c.indicator.as_str()).and_then(|col| col[i]);
    set.positives().all(|p| {
        set.negatives().all(|n| {
            !candidates
                .iter()
                .any(|c| separates(c, value(c, p), value(c, n)))
                || cuts.iter().any(|c| separates(c, value(c, p), value(c, n)))
        })
    })
}

/// A random Boolean instance with `rows` records over `cols` columns.
pub fn random_bool_view(rng: &mut impl Rng, rows: usize, cols: usize) -> BinaryView {
    let mut data: Vec<(Vec<bool>, bool)> = (0..rows)
        .map(|_| {
            (
                (0..cols).map(|_| rng.gen_bool(0.5)).collect(),
                rng.gen_bool(0.5),
            )
        })
        .collect();
    data[0].1 = true;
    BinaryView::from_bits(&data)
}

/// Returns a description of the first negative training record accepted by
/// a stage, if any.
pub fn impurity(model: &CascadeModel, dataset: &Dataset) -> Option<String> {
    for i in dataset.training_indices() {
        let Some(rank) = dataset.rank_of(i).unwrap() else {
            continue;
        };
        let record = &dataset.records()[i];
        for stage in model.stages().iter().filter(|s| s.rank < rank) {
            if let Some(j) = stage.first_match(record) {
                return Some(format!(
                    "{} rated {} matches stage {} pattern {}",
                    record.country, rank, stage.rank, stage.patterns[j]
                ));
            }
        }
    }
    None
}
