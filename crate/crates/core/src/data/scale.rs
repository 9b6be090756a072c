use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 1-based position on a rating scale; rank 1 is the safest class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Rank(pub usize);

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// What happens to a record that no cascade stage accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FallbackPolicy {
    /// Assign the last (worst) class of the scale.
    #[default]
    FallbackToLast,
    /// Leave the record unclassified.
    Unclassified,
}

impl fmt::Display for FallbackPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FallbackPolicy::FallbackToLast => "fallback-to-last",
            FallbackPolicy::Unclassified => "unclassified",
        })
    }
}

/// Fitch long-term ratings in ASCII form: `P` stands for plus, `M` for minus.
pub const FITCH_LABELS: [&str; 16] = [
    "AAA", "AAP", "AA", "AAM", "AP", "A", "AM", "BBBP", "BBB", "BBBM", "BBP", "BB", "BBM", "BP",
    "B", "BM",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatingScale {
    classes: Vec<String>,
    fallback: FallbackPolicy,
}

impl RatingScale {
    pub fn new(classes: Vec<String>, fallback: FallbackPolicy) -> Result<Self> {
        if classes.len() < 2 {
            return Err(Error::InvalidScale("at least two classes required".into()));
        }
        let mut seen = HashSet::new();
        for label in &classes {
            if label.is_empty() || label.chars().any(char::is_whitespace) {
                return Err(Error::InvalidScale(format!("invalid label {label:?}")));
            }
            if !seen.insert(label.as_str()) {
                return Err(Error::InvalidScale(format!("duplicate label {label:?}")));
            }
        }
        Ok(RatingScale { classes, fallback })
    }

    /// The 16-class Fitch scale, AAA through BM, falling back to BM.
    pub fn fitch() -> Self {
        RatingScale {
            classes: FITCH_LABELS.iter().map(|s| s.to_string()).collect(),
            fallback: FallbackPolicy::FallbackToLast,
        }
    }

    pub fn with_fallback(mut self, fallback: FallbackPolicy) -> Self {
        self.fallback = fallback;
        self
    }

    pub fn fallback(&self) -> FallbackPolicy {
        self.fallback
    }

    pub fn rank(&self, label: &str) -> Option<Rank> {
        self.classes
            .iter()
            .position(|c| c == label)
            .map(|i| Rank(i + 1))
    }

    /// Panics if `rank` is outside the scale.
    pub fn label(&self, rank: Rank) -> &str {
        &self.classes[rank.0 - 1]
    }

    pub fn labels(&self) -> &[String] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn last(&self) -> Rank {
        Rank(self.classes.len())
    }

    pub fn ranks(&self) -> impl Iterator<Item = Rank> {
        (1..=self.classes.len()).map(Rank)
    }
}

impl Default for RatingScale {
    fn default() -> Self {
        Self::fitch()
    }
}
