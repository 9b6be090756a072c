use std::cmp::Ordering;

use serde::Serialize;

use super::enumerate::{mine, LiteralTable, Mined};
use super::{MiningConfig, Pattern, PrevalenceMode};
use crate::binarize::BinaryView;
use crate::bitset::Bitset;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DnfSelection {
    /// Patterns in the order they were selected.
    pub patterns: Vec<Pattern>,
    pub covered_positives: usize,
    pub total_positives: usize,
    /// Ids of positive rows no selected pattern covers.
    pub uncovered: Vec<String>,
    /// Relaxed prevalence floors that were tried, in order.
    pub relaxations: Vec<f64>,
    /// Whether the coverage target was reached.
    pub complete: bool,
}

struct Candidate {
    pattern: Pattern,
    cover: Bitset,
    homogeneity: f64,
}

/// Greedy set cover of the positive rows: each step takes the pattern adding
/// the most uncovered positives, ties going to higher homogeneity, then fewer
/// literals, then earlier position in the pool. When the coverage target is
/// missed the pool is re-mined at each relaxed prevalence floor in turn.
pub fn select_dnf(
    patterns: &[Pattern],
    view: &BinaryView,
    config: &MiningConfig,
) -> Result<DnfSelection> {
    config.validate()?;
    let table = LiteralTable::new(view);
    let pool: Vec<Candidate> = patterns
        .iter()
        .map(|p| candidate_from_pattern(p, view, &table))
        .collect();
    let mut selection = greedy(&pool, view, &table, config);
    if selection.complete || config.prevalence_mode == PrevalenceMode::PerDnf {
        return Ok(selection);
    }
    let mut tried = Vec::new();
    for &floor in &config.relaxation_schedule {
        tried.push(floor);
        let mined = mine(view, &table, config, floor);
        let pool: Vec<Candidate> = mined
            .iter()
            .map(|m| candidate_from_mined(m, view, &table))
            .collect();
        selection = greedy(&pool, view, &table, config);
        selection.relaxations = tried.clone();
        if selection.complete {
            break;
        }
    }
    selection.relaxations = tried;
    Ok(selection)
}

/// Mine at the configured floor and select, relaxing as needed.
pub(crate) fn mine_and_select(view: &BinaryView, config: &MiningConfig) -> Result<DnfSelection> {
    config.validate()?;
    let table = LiteralTable::new(view);
    let patterns: Vec<Pattern> = mine(view, &table, config, config.initial_floor())
        .iter()
        .map(|m| table.to_pattern(view, m))
        .collect();
    select_dnf(&patterns, view, config)
}

fn candidate_from_pattern(pattern: &Pattern, view: &BinaryView, table: &LiteralTable) -> Candidate {
    let mut cover = Bitset::full(view.rows.len());
    for lit in &pattern.literals {
        let mut lit_cover = Bitset::new(view.rows.len());
        for row in 0..view.rows.len() {
            if view.literal_holds(lit, row) {
                lit_cover.set(row);
            }
        }
        cover = cover.and(&lit_cover);
    }
    let stats = table.stats(&cover);
    Candidate {
        pattern: Pattern {
            literals: pattern.literals.clone(),
            stats: Some(stats),
        },
        cover,
        homogeneity: stats.homogeneity,
    }
}

fn candidate_from_mined(mined: &Mined, view: &BinaryView, table: &LiteralTable) -> Candidate {
    let pattern = table.to_pattern(view, mined);
    let homogeneity = pattern.stats.map_or(1.0, |s| s.homogeneity);
    Candidate {
        pattern,
        cover: mined.cover.clone(),
        homogeneity,
    }
}

fn greedy(
    pool: &[Candidate],
    view: &BinaryView,
    table: &LiteralTable,
    config: &MiningConfig,
) -> DnfSelection {
    let total = table.total_positives;
    let target = ((config.dnf_coverage_target * total as f64) - 1e-9)
        .ceil()
        .max(0.0) as usize;
    let mut uncovered = table.positive_mask.clone();
    let mut chosen: Vec<usize> = Vec::new();
    let mut covered = 0;
    while covered < target {
        let best = pool
            .iter()
            .enumerate()
            .map(|(i, c)| (i, c.cover.intersection_count(&uncovered)))
            .filter(|&(_, gain)| gain > 0)
            .max_by(|&(i, gi), &(j, gj)| {
                gi.cmp(&gj)
                    .then(
                        pool[i]
                            .homogeneity
                            .partial_cmp(&pool[j].homogeneity)
                            .unwrap_or(Ordering::Equal),
                    )
                    .then(pool[j].pattern.degree().cmp(&pool[i].pattern.degree()))
                    .then(j.cmp(&i))
            });
        let Some((i, gain)) = best else { break };
        chosen.push(i);
        covered += gain;
        uncovered.difference_with(&pool[i].cover);
    }
    DnfSelection {
        patterns: chosen.iter().map(|&i| pool[i].pattern.clone()).collect(),
        covered_positives: covered,
        total_positives: total,
        uncovered: uncovered.ones().map(|r| view.rows[r].id.clone()).collect(),
        relaxations: Vec::new(),
        complete: covered >= target,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binarize::Literal;

    /// Three positives (rows 0..3) and one negative; column j holds the
    /// coverage of the pattern `Xj+1 >= 0.5`.
    fn view_with_columns(cols: &[[bool; 4]]) -> BinaryView {
        let rows: Vec<(Vec<bool>, bool)> = (0..4)
            .map(|r| (cols.iter().map(|c| c[r]).collect(), r < 3))
            .collect();
        BinaryView::from_bits(&rows)
    }

    fn single(col: usize) -> Pattern {
        Pattern::new(vec![Literal::at_least(&format!("X{col}"), 0.5)])
    }

    fn no_relax() -> MiningConfig {
        MiningConfig {
            relaxation_schedule: vec![],
            ..MiningConfig::default()
        }
    }

    #[test]
    fn dominant_pattern_wins() {
        let view = view_with_columns(&[
            [true, true, false, false],
            [false, false, true, false],
            [true, true, true, false],
        ]);
        let sel = select_dnf(&[single(1), single(2), single(3)], &view, &no_relax()).unwrap();
        assert_eq!(sel.patterns.len(), 1);
        assert_eq!(sel.patterns[0].literals[0].indicator.as_str(), "X3");
        assert!(sel.complete);
    }

    #[test]
    fn overlapping_pair_needs_two() {
        let view = view_with_columns(&[[true, true, false, false], [false, true, true, false]]);
        let sel = select_dnf(&[single(1), single(2)], &view, &no_relax()).unwrap();
        let names: Vec<&str> = sel
            .patterns
            .iter()
            .map(|p| p.literals[0].indicator.as_str())
            .collect();
        assert_eq!(names, vec!["X1", "X2"]);
        assert!(sel.complete);
    }

    #[test]
    fn empty_pool_without_relaxation_leaves_region_uncovered() {
        let view = view_with_columns(&[[true, true, false, false]]);
        let sel = select_dnf(&[], &view, &no_relax()).unwrap();
        assert!(!sel.complete);
        assert!(sel.patterns.is_empty());
        assert_eq!(sel.uncovered, vec!["r0", "r1", "r2"]);
    }

    #[test]
    fn relaxation_recovers_full_cover() {
        // No single column covers 70% of positives; 1/3 each.
        let view = view_with_columns(&[
            [true, false, false, false],
            [false, true, false, false],
            [false, false, true, false],
        ]);
        let config = MiningConfig::default();
        let initial = enumerate_initial(&view, &config);
        assert!(initial.is_empty());
        let sel = select_dnf(&initial, &view, &config).unwrap();
        assert!(sel.complete);
        assert_eq!(sel.patterns.len(), 3);
        assert_eq!(sel.relaxations, vec![0.40, 0.20]);
    }

    fn enumerate_initial(view: &BinaryView, config: &MiningConfig) -> Vec<Pattern> {
        crate::pattern::enumerate_patterns(view, config).unwrap()
    }
}
