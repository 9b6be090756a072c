//! Indicator frequency per stage and per rating band.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use serde::Serialize;

use super::CascadeModel;
use crate::data::{IndicatorCode, Rank};
use crate::pattern::ClassDnf;

/// Rating bands of the 16-class scale, by rank.
const BANDS: [RangeInclusive<usize>; 6] = [1..=1, 2..=4, 5..=7, 8..=10, 11..=13, 14..=16];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndicatorCount {
    pub code: IndicatorCode,
    /// Literals on this indicator, both directions.
    pub occurrences: usize,
    pub patterns_containing: usize,
    /// `patterns_containing / pattern_count`.
    pub share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageKeyVariables {
    pub rank: Rank,
    pub label: String,
    pub pattern_count: usize,
    pub indicators: Vec<IndicatorCount>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupKeyVariables {
    /// `"AAP-AAM"` style name of the band.
    pub name: String,
    pub ranks: Vec<Rank>,
    pub pattern_count: usize,
    pub indicators: Vec<IndicatorCount>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct KeyVariableReport {
    pub stages: Vec<StageKeyVariables>,
    /// Only filled for 16-class scales.
    pub groups: Vec<GroupKeyVariables>,
}

impl KeyVariableReport {
    pub fn is_empty(&self) -> bool {
        self.stages.is_empty() && self.groups.is_empty()
    }

    pub fn group(&self, name: &str) -> Option<&GroupKeyVariables> {
        self.groups.iter().find(|g| g.name == name)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut section = |title: &str, count: usize, indicators: &[IndicatorCount]| {
            out.push_str(&format!("{title} ({count} patterns):"));
            for ind in indicators {
                out.push_str(&format!(
                    " {} {}/{:.0}%",
                    ind.code,
                    ind.occurrences,
                    ind.share * 100.0
                ));
            }
            out.push('\n');
        };
        for s in &self.stages {
            section(&s.label, s.pattern_count, &s.indicators);
        }
        for g in &self.groups {
            section(&g.name, g.pattern_count, &g.indicators);
        }
        out
    }
}

/// Sorted by patterns containing, then occurrences (both descending), then code.
fn count<'a>(dnfs: impl IntoIterator<Item = &'a ClassDnf>) -> (usize, Vec<IndicatorCount>) {
    let mut tally: BTreeMap<&IndicatorCode, (usize, usize)> = BTreeMap::new();
    let mut patterns = 0;
    for pattern in dnfs.into_iter().flat_map(|d| &d.patterns) {
        patterns += 1;
        let mut seen: Vec<&IndicatorCode> = Vec::new();
        for lit in &pattern.literals {
            let entry = tally.entry(&lit.indicator).or_default();
            entry.0 += 1;
            if !seen.contains(&&lit.indicator) {
                seen.push(&lit.indicator);
                entry.1 += 1;
            }
        }
    }
    let mut counts: Vec<IndicatorCount> = tally
        .into_iter()
        .map(|(code, (occurrences, containing))| IndicatorCount {
            code: code.clone(),
            occurrences,
            patterns_containing: containing,
            share: containing as f64 / patterns as f64,
        })
        .collect();
    counts.sort_by(|a, b| {
        b.patterns_containing
            .cmp(&a.patterns_containing)
            .then(b.occurrences.cmp(&a.occurrences))
            .then(a.code.cmp(&b.code))
    });
    (patterns, counts)
}

/// Indicator usage of every non-empty stage, plus the six bands on a
/// 16-class scale. The residual last-class row counts towards the last band.
pub fn key_variables(model: &CascadeModel) -> KeyVariableReport {
    let scale = model.scale();
    let rows: Vec<&ClassDnf> = model
        .stages()
        .iter()
        .chain(model.residual())
        .filter(|d| !d.is_empty())
        .collect();
    let stages = rows
        .iter()
        .map(|d| {
            let (pattern_count, indicators) = count([*d]);
            StageKeyVariables {
                rank: d.rank,
                label: scale.label(d.rank).to_owned(),
                pattern_count,
                indicators,
            }
        })
        .collect();
    let mut groups = Vec::new();
    if scale.len() == 16 {
        for band in BANDS {
            let members: Vec<&ClassDnf> = rows
                .iter()
                .copied()
                .filter(|d| band.contains(&d.rank.0))
                .collect();
            if members.is_empty() {
                continue;
            }
            let (lo, hi) = (*band.start(), *band.end());
            let name = if lo == hi {
                scale.label(Rank(lo)).to_owned()
            } else {
                format!("{}-{}", scale.label(Rank(lo)), scale.label(Rank(hi)))
            };
            let (pattern_count, indicators) = count(members.iter().copied());
            groups.push(GroupKeyVariables {
                name,
                ranks: members.iter().map(|d| d.rank).collect(),
                pattern_count,
                indicators,
            });
        }
    }
    KeyVariableReport { stages, groups }
}
