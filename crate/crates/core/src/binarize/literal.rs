use std::fmt;

use serde::{Deserialize, Serialize};

use crate::data::{CountryRecord, IndicatorCode};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutPoint {
    pub indicator: IndicatorCode,
    pub threshold: f64,
}

impl CutPoint {
    pub fn new(indicator: &str, threshold: f64) -> Self {
        CutPoint {
            indicator: indicator.into(),
            threshold,
        }
    }

    pub fn literal(&self, direction: Direction) -> Literal {
        Literal {
            indicator: self.indicator.clone(),
            direction,
            threshold: self.threshold,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "<=")]
    AtMost,
}

impl Direction {
    pub fn symbol(self) -> &'static str {
        match self {
            Direction::AtLeast => ">=",
            Direction::AtMost => "<=",
        }
    }

    pub fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Direction::AtLeast => value >= threshold,
            Direction::AtMost => value <= threshold,
        }
    }
}

/// A directed comparison of one indicator against a threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Literal {
    pub indicator: IndicatorCode,
    pub direction: Direction,
    pub threshold: f64,
}

impl Literal {
    pub fn new(indicator: &str, direction: Direction, threshold: f64) -> Self {
        Literal {
            indicator: indicator.into(),
            direction,
            threshold,
        }
    }

    pub fn at_least(indicator: &str, threshold: f64) -> Self {
        Self::new(indicator, Direction::AtLeast, threshold)
    }

    pub fn at_most(indicator: &str, threshold: f64) -> Self {
        Self::new(indicator, Direction::AtMost, threshold)
    }

    /// `None` when the record has no value for the indicator.
    pub fn evaluate(&self, record: &CountryRecord) -> Option<bool> {
        record
            .value(self.indicator.as_str())
            .map(|v| self.direction.holds(v, self.threshold))
    }

    /// Two-valued evaluation: a missing value fails the literal.
    pub fn holds(&self, record: &CountryRecord) -> bool {
        self.evaluate(record).unwrap_or(false)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}{}",
            self.indicator,
            self.direction.symbol(),
            self.threshold
        )
    }
}
