//! Conjunctive patterns, per-class DNFs and the mining configuration.

mod enumerate;
pub(crate) mod select;

pub use enumerate::enumerate_patterns;
pub use select::{select_dnf, DnfSelection};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::binarize::Literal;
use crate::data::{CountryRecord, Rank};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageStats {
    pub covered_positives: usize,
    pub covered_negatives: usize,
    pub total_positives: usize,
    pub prevalence: f64,
    pub homogeneity: f64,
}

impl CoverageStats {
    pub fn new(covered_positives: usize, covered_negatives: usize, total_positives: usize) -> Self {
        let covered = covered_positives + covered_negatives;
        CoverageStats {
            covered_positives,
            covered_negatives,
            total_positives,
            prevalence: if total_positives == 0 {
                0.0
            } else {
                covered_positives as f64 / total_positives as f64
            },
            homogeneity: if covered == 0 {
                1.0
            } else {
                covered_positives as f64 / covered as f64
            },
        }
    }
}

/// A conjunction of literals. Statistics are absent for patterns that were
/// imported rather than mined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pattern {
    pub literals: Vec<Literal>,
    pub stats: Option<CoverageStats>,
}

impl Pattern {
    pub fn new(literals: Vec<Literal>) -> Self {
        Pattern {
            literals,
            stats: None,
        }
    }

    pub fn degree(&self) -> usize {
        self.literals.len()
    }

    pub fn matches(&self, record: &CountryRecord) -> bool {
        self.literals.iter().all(|l| l.holds(record))
    }

    /// Two literals on the same indicator with the same direction.
    pub fn has_redundant_literals(&self) -> bool {
        self.literals.iter().enumerate().any(|(i, a)| {
            self.literals[i + 1..]
                .iter()
                .any(|b| a.indicator == b.indicator && a.direction == b.direction)
        })
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, lit) in self.literals.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{lit}")?;
        }
        f.write_str(")")
    }
}

/// True iff every literal holds; a missing value involved fails the pattern.
pub fn pattern_matches(pattern: &Pattern, record: &CountryRecord) -> bool {
    pattern.matches(record)
}

/// The DNF describing the cumulative class of ranks `1..=rank`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassDnf {
    pub rank: Rank,
    pub patterns: Vec<Pattern>,
}

impl ClassDnf {
    pub fn empty(rank: Rank) -> Self {
        ClassDnf {
            rank,
            patterns: Vec::new(),
        }
    }

    pub fn matches(&self, record: &CountryRecord) -> bool {
        self.patterns.iter().any(|p| p.matches(record))
    }

    /// Index of the first pattern accepting `record`.
    pub fn first_match(&self, record: &CountryRecord) -> Option<usize> {
        self.patterns.iter().position(|p| p.matches(record))
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrevalenceMode {
    /// Every selected pattern must reach the prevalence floor.
    #[default]
    PerPattern,
    /// Only the assembled DNF must reach it; patterns need one positive.
    PerDnf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MiningConfig {
    pub max_degree: usize,
    pub min_prevalence: f64,
    pub min_homogeneity: f64,
    pub dnf_coverage_target: f64,
    /// Prevalence floors tried in order when the coverage target is missed.
    /// A floor of 0 still requires one covered positive.
    pub relaxation_schedule: Vec<f64>,
    pub prevalence_mode: PrevalenceMode,
    /// Omit patterns that have a proper sub-pattern meeting both thresholds.
    pub prune: bool,
}

impl Default for MiningConfig {
    fn default() -> Self {
        MiningConfig {
            max_degree: 3,
            min_prevalence: 0.70,
            min_homogeneity: 1.0,
            dnf_coverage_target: 1.0,
            relaxation_schedule: vec![0.40, 0.20, 0.0],
            prevalence_mode: PrevalenceMode::PerPattern,
            prune: true,
        }
    }
}

impl MiningConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_degree == 0 {
            return Err(Error::InvalidConfig("max degree must be at least 1".into()));
        }
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{name} {v} outside [0, 1]")))
            }
        };
        unit("min prevalence", self.min_prevalence)?;
        unit("min homogeneity", self.min_homogeneity)?;
        unit("coverage target", self.dnf_coverage_target)?;
        for &floor in &self.relaxation_schedule {
            unit("relaxation floor", floor)?;
        }
        Ok(())
    }

    /// Prevalence floor used for the first enumeration.
    pub fn initial_floor(&self) -> f64 {
        match self.prevalence_mode {
            PrevalenceMode::PerPattern => self.min_prevalence,
            PrevalenceMode::PerDnf => 0.0,
        }
    }
}
