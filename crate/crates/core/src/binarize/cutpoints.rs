use std::collections::BTreeSet;

use rayon::prelude::*;

use super::literal::CutPoint;
use super::LabeledSet;
use crate::bitset::Bitset;
use crate::data::IndicatorRegistry;
use crate::error::{Error, Result};
use crate::setcover;

/// Class-boundary cut-points for one indicator: a midpoint between every
/// pair of adjacent distinct values whose classes differ. Values shared by
/// both classes count as mixed and are cut on both sides.
pub fn candidate_cutpoints(set: &LabeledSet, indicator: &str) -> Result<Vec<CutPoint>> {
    let column = set
        .column(indicator)
        .ok_or_else(|| Error::IndicatorAbsent(indicator.to_owned()))?;
    let mut observed: Vec<(f64, bool)> = column
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|v| (v, set.is_positive(i))))
        .collect();
    if observed.is_empty() {
        return Err(Error::IndicatorAbsent(indicator.to_owned()));
    }
    observed.sort_by(|a, b| a.0.total_cmp(&b.0));

    // Class mask per distinct value: bit 0 positive, bit 1 negative.
    let mut distinct: Vec<(f64, u8)> = Vec::new();
    for (v, positive) in observed {
        let bit = if positive { 1 } else { 2 };
        match distinct.last_mut() {
            Some(last) if last.0 == v => last.1 |= bit,
            _ => distinct.push((v, bit)),
        }
    }
    Ok(distinct
        .windows(2)
        .filter(|w| w[0].1 | w[1].1 == 3)
        .map(|w| CutPoint::new(indicator, w[0].0 + (w[1].0 - w[0].0) / 2.0))
        .collect())
}

/// Candidates for every indicator of `set` that has at least one value,
/// concatenated in indicator order.
pub fn all_candidate_cutpoints(set: &LabeledSet) -> Vec<CutPoint> {
    set.indicators()
        .par_iter()
        .map(|code| candidate_cutpoints(set, code.as_str()).unwrap_or_default())
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MinimizeStrategy {
    /// Exact when the pair/candidate matrix fits the cell limit, greedy beyond.
    #[default]
    Auto,
    Exact,
    Greedy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinimizeOptions {
    pub strategy: MinimizeStrategy,
    pub exact_cell_limit: usize,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions {
            strategy: MinimizeStrategy::Auto,
            exact_cell_limit: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CutSelection {
    pub cutpoints: Vec<CutPoint>,
    /// Whether the selection is a proven minimum.
    pub exact: bool,
    /// Positive/negative record index pairs that no candidate separates
    /// (possible only through missing values).
    pub undistinguished: Vec<(usize, usize)>,
}

/// Whether some literal on `cut` holds for the positive value and fails for
/// the negative one. A missing positive value never separates; a missing
/// negative value is separated by any cut the positive can satisfy.
fn separates(cut: &CutPoint, positive: Option<f64>, negative: Option<f64>) -> bool {
    match (positive, negative) {
        (None, _) => false,
        (Some(_), None) => true,
        (Some(p), Some(n)) => {
            (p >= cut.threshold && n < cut.threshold) || (p <= cut.threshold && n > cut.threshold)
        }
    }
}

/// Smallest subset of `candidates` that still separates every
/// positive/negative pair the full candidate set separates.
pub fn minimize_cutpoints(
    candidates: &[CutPoint],
    set: &LabeledSet,
    options: &MinimizeOptions,
) -> Result<CutSelection> {
    let cand_columns: Vec<Option<&[Option<f64>]>> = candidates
        .iter()
        .map(|c| set.column(c.indicator.as_str()))
        .collect();
    let negatives: Vec<usize> = set.negatives().collect();

    let mut rows: BTreeSet<Bitset> = BTreeSet::new();
    let mut undistinguished = Vec::new();
    for p in set.positives() {
        for &n in &negatives {
            if set.same_values(p, n) {
                return Err(Error::Contradiction {
                    stage: None,
                    positive: set.key(p).clone(),
                    negative: set.key(n).clone(),
                });
            }
            let mut row = Bitset::new(candidates.len());
            for (j, cut) in candidates.iter().enumerate() {
                let col = cand_columns[j];
                if separates(cut, col.and_then(|c| c[p]), col.and_then(|c| c[n])) {
                    row.set(j);
                }
            }
            if row.is_empty() {
                undistinguished.push((p, n));
            } else {
                rows.insert(row);
            }
        }
    }

    // Transpose: one set per candidate over the distinct pair rows.
    let universe = rows.len();
    let mut sets = vec![Bitset::new(universe); candidates.len()];
    for (e, row) in rows.iter().enumerate() {
        for j in row.ones() {
            sets[j].set(e);
        }
    }

    let exact = match options.strategy {
        MinimizeStrategy::Exact => true,
        MinimizeStrategy::Greedy => false,
        MinimizeStrategy::Auto => universe * candidates.len() <= options.exact_cell_limit,
    };
    let chosen = if exact {
        setcover::exact(&sets, universe)
    } else {
        setcover::greedy(&sets, universe)
    };
    Ok(CutSelection {
        cutpoints: chosen.into_iter().map(|j| candidates[j].clone()).collect(),
        exact,
        undistinguished,
    })
}

/// `indicator,threshold` lines sorted by indicator code then threshold.
pub fn write_cutpoints(cutpoints: &[CutPoint]) -> String {
    let mut sorted = cutpoints.to_vec();
    sorted.sort_by(|a, b| {
        a.indicator
            .cmp(&b.indicator)
            .then(a.threshold.total_cmp(&b.threshold))
    });
    sorted
        .iter()
        .map(|c| format!("{},{}\n", c.indicator, c.threshold))
        .collect()
}

pub fn parse_cutpoints(text: &str, registry: &IndicatorRegistry) -> Result<Vec<CutPoint>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |column: usize, message: String| Error::Parse {
            line: i + 1,
            column,
            message,
        };
        let (code, value) = line
            .split_once(',')
            .ok_or_else(|| err(1, "expected `indicator,threshold`".into()))?;
        let code = code.trim();
        let resolved = registry
            .get(code)
            .ok_or_else(|| err(1, format!("unknown indicator {code:?}")))?;
        let threshold: f64 = value
            .trim()
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| {
                err(
                    code.len() + 2,
                    format!("invalid threshold {:?}", value.trim()),
                )
            })?;
        out.push(CutPoint {
            indicator: resolved.code.clone(),
            threshold,
        });
    }
    Ok(out)
}
