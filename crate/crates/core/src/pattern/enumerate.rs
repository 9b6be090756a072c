use std::collections::{HashMap, HashSet};

use rayon::prelude::*;

use super::{CoverageStats, MiningConfig, Pattern};
use crate::binarize::{BinaryView, Direction};
use crate::bitset::Bitset;
use crate::error::{Error, Result};

/// Literal id `2 * column + direction`, with `>=` before `<=`.
type Term = u32;

pub(crate) struct Mined {
    pub terms: Vec<Term>,
    pub cover: Bitset,
}

pub(crate) struct LiteralTable {
    covers: Vec<Bitset>,
    /// (indicator id, direction) per term; equal keys may not share a pattern.
    keys: Vec<(usize, Direction)>,
    pub positive_mask: Bitset,
    pub total_positives: usize,
}

impl LiteralTable {
    pub fn new(view: &BinaryView) -> Self {
        let rows = view.rows.len();
        let mut ids: HashMap<&str, usize> = HashMap::new();
        let mut covers = Vec::with_capacity(view.width() * 2);
        let mut keys = Vec::with_capacity(view.width() * 2);
        for (j, cut) in view.cutpoints.iter().enumerate() {
            let next = ids.len();
            let id = *ids.entry(cut.indicator.as_str()).or_insert(next);
            for dir in [Direction::AtLeast, Direction::AtMost] {
                let mut cover = Bitset::new(rows);
                for (i, row) in view.rows.iter().enumerate() {
                    let holds = match dir {
                        Direction::AtLeast => row.bits[j],
                        Direction::AtMost => row.at_most[j],
                    };
                    if holds {
                        cover.set(i);
                    }
                }
                covers.push(cover);
                keys.push((id, dir));
            }
        }
        let mut positive_mask = Bitset::new(rows);
        for (i, row) in view.rows.iter().enumerate() {
            if row.positive {
                positive_mask.set(i);
            }
        }
        let total_positives = positive_mask.count();
        LiteralTable {
            covers,
            keys,
            positive_mask,
            total_positives,
        }
    }

    fn conflicts(&self, terms: &[Term], t: Term) -> bool {
        let key = self.keys[t as usize];
        terms.iter().any(|&u| self.keys[u as usize] == key)
    }

    pub fn stats(&self, cover: &Bitset) -> CoverageStats {
        let pos = cover.intersection_count(&self.positive_mask);
        CoverageStats::new(pos, cover.count() - pos, self.total_positives)
    }

    pub fn to_pattern(&self, view: &BinaryView, mined: &Mined) -> Pattern {
        let literals = mined
            .terms
            .iter()
            .map(|&t| {
                let dir = if t % 2 == 0 {
                    Direction::AtLeast
                } else {
                    Direction::AtMost
                };
                view.cutpoints[(t / 2) as usize].literal(dir)
            })
            .collect();
        Pattern {
            literals,
            stats: Some(self.stats(&mined.cover)),
        }
    }
}

fn floor_count(floor: f64, total: usize) -> usize {
    ((floor * total as f64 - 1e-9).ceil() as usize).max(1)
}

fn homogeneous(table: &LiteralTable, cover: &Bitset, min_homogeneity: f64) -> bool {
    let covered = cover.count();
    let pos = cover.intersection_count(&table.positive_mask);
    covered == 0 || pos as f64 / covered as f64 + 1e-12 >= min_homogeneity
}

/// Level-wise enumeration of conjunctions of at most `max_degree` literals
/// covering at least `floor` of the positives and meeting the homogeneity
/// floor. With pruning, a pattern is emitted only if none of its proper
/// sub-patterns qualifies. Output is ordered by degree, then by literal ids.
pub(crate) fn mine(
    view: &BinaryView,
    table: &LiteralTable,
    config: &MiningConfig,
    floor: f64,
) -> Vec<Mined> {
    let min_pos = floor_count(floor, table.total_positives);
    let qualifies = |cover: &Bitset| cover.intersection_count(&table.positive_mask) >= min_pos;

    let mut out = Vec::new();
    let mut open: Vec<Mined> = Vec::new();
    for t in 0..(view.width() * 2) as Term {
        let cover = table.covers[t as usize].clone();
        if !qualifies(&cover) {
            continue;
        }
        let accepted = homogeneous(table, &cover, config.min_homogeneity);
        let node = Mined {
            terms: vec![t],
            cover,
        };
        match (accepted, config.prune) {
            (true, true) => out.push(node),
            (true, false) => {
                out.push(Mined {
                    terms: node.terms.clone(),
                    cover: node.cover.clone(),
                });
                open.push(node);
            }
            (false, _) => open.push(node),
        }
    }

    let width = (view.width() * 2) as Term;
    for degree in 2..=config.max_degree {
        if open.is_empty() {
            break;
        }
        let open_set: HashSet<&[Term]> = open.iter().map(|m| m.terms.as_slice()).collect();
        let extend_further = degree < config.max_degree;
        let shards: Vec<(Vec<Mined>, Vec<Mined>)> = open
            .par_iter()
            .map(|node| {
                let mut accepted_here = Vec::new();
                let mut open_here = Vec::new();
                let last = *node.terms.last().expect("non-empty pattern");
                for t in last + 1..width {
                    if table.conflicts(&node.terms, t) {
                        continue;
                    }
                    let mut terms = node.terms.clone();
                    terms.push(t);
                    if config.prune && !all_subsets_open(&terms, &open_set) {
                        continue;
                    }
                    let cover = node.cover.and(&table.covers[t as usize]);
                    if !qualifies(&cover) {
                        continue;
                    }
                    let accepted = homogeneous(table, &cover, config.min_homogeneity);
                    if accepted {
                        accepted_here.push(Mined {
                            terms: terms.clone(),
                            cover: cover.clone(),
                        });
                    }
                    if extend_further && (!accepted || !config.prune) {
                        open_here.push(Mined { terms, cover });
                    }
                }
                (accepted_here, open_here)
            })
            .collect();
        let mut next = Vec::new();
        for (accepted, opened) in shards {
            out.extend(accepted);
            next.extend(opened);
        }
        open = next;
    }
    out
}

/// Every subset obtained by dropping one literal other than the last (the
/// prefix is open by construction).
fn all_subsets_open(terms: &[Term], open: &HashSet<&[Term]>) -> bool {
    let mut sub = Vec::with_capacity(terms.len() - 1);
    (0..terms.len() - 1).all(|skip| {
        sub.clear();
        sub.extend(
            terms
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &t)| t),
        );
        open.contains(sub.as_slice())
    })
}

/// All patterns of degree at most `max_degree` meeting the prevalence and
/// homogeneity floors of `config`, in deterministic order.
pub fn enumerate_patterns(view: &BinaryView, config: &MiningConfig) -> Result<Vec<Pattern>> {
    config.validate()?;
    let table = LiteralTable::new(view);
    if table.total_positives == 0 {
        return Err(Error::NoPositives);
    }
    Ok(mine(view, &table, config, config.initial_floor())
        .iter()
        .map(|m| table.to_pattern(view, m))
        .collect())
}
