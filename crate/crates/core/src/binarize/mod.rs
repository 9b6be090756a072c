//! Cut-points, literals and the Boolean view of a labeled record set.
//!
//! Each cut-point contributes one Boolean column meaning "value >= threshold".
//! A `<=` literal on the same threshold is evaluated directly on the value so
//! that missing values fail both directions.

mod cutpoints;
mod literal;

pub use cutpoints::{
    all_candidate_cutpoints, candidate_cutpoints, minimize_cutpoints, parse_cutpoints,
    write_cutpoints, CutSelection, MinimizeOptions, MinimizeStrategy,
};
pub use literal::{CutPoint, Direction, Literal};

use std::collections::HashMap;

use crate::data::{CountryRecord, Diagnostic, IndicatorCode};
use crate::error::RecordKey;

/// Records with a binary label and values laid out per indicator column.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSet {
    keys: Vec<RecordKey>,
    positive: Vec<bool>,
    indicators: Vec<IndicatorCode>,
    columns: Vec<Vec<Option<f64>>>,
}

impl LabeledSet {
    pub fn from_records<'a, I>(records: I, indicators: &[IndicatorCode]) -> Self
    where
        I: IntoIterator<Item = (&'a CountryRecord, bool)>,
    {
        let mut set = LabeledSet {
            keys: Vec::new(),
            positive: Vec::new(),
            indicators: indicators.to_vec(),
            columns: vec![Vec::new(); indicators.len()],
        };
        for (record, positive) in records {
            set.keys.push(record.key());
            set.positive.push(positive);
            for (col, code) in set.columns.iter_mut().zip(indicators) {
                col.push(record.value(code.as_str()));
            }
        }
        set
    }

    /// Single-indicator set, handy for small instances: `(value, positive)`.
    pub fn single(code: &str, values: &[(f64, bool)]) -> Self {
        let records: Vec<CountryRecord> = values
            .iter()
            .enumerate()
            .map(|(i, &(v, _))| CountryRecord::new(format!("r{i}"), 0).with_value(code, v))
            .collect();
        LabeledSet::from_records(
            records.iter().zip(values.iter().map(|&(_, p)| p)),
            &[code.into()],
        )
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn key(&self, record: usize) -> &RecordKey {
        &self.keys[record]
    }

    pub fn is_positive(&self, record: usize) -> bool {
        self.positive[record]
    }

    pub fn indicators(&self) -> &[IndicatorCode] {
        &self.indicators
    }

    pub fn column(&self, code: &str) -> Option<&[Option<f64>]> {
        self.indicators
            .iter()
            .position(|c| c.as_str() == code)
            .map(|i| self.columns[i].as_slice())
    }

    pub fn positives(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.positive[i])
    }

    pub fn negatives(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| !self.positive[i])
    }

    /// First positive/negative pair with identical values, if any.
    pub fn identical_conflict(&self) -> Option<(usize, usize)> {
        let negatives: Vec<usize> = self.negatives().collect();
        self.positives().find_map(|p| {
            negatives
                .iter()
                .find(|&&n| self.same_values(p, n))
                .map(|&n| (p, n))
        })
    }

    fn same_values(&self, a: usize, b: usize) -> bool {
        self.columns
            .iter()
            .all(|col| col[a].map(f64::to_bits) == col[b].map(f64::to_bits))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryRow {
    pub id: String,
    /// Column j: the record's value is known and `>=` cut-point j.
    pub bits: Vec<bool>,
    /// Column j: the record's value is known and `<=` cut-point j.
    pub at_most: Vec<bool>,
    pub positive: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinaryView {
    pub cutpoints: Vec<CutPoint>,
    pub rows: Vec<BinaryRow>,
}

impl BinaryView {
    /// A view over pure Boolean data. Columns become cut-points `X1 .. Xn` at
    /// threshold 0.5, so the `<=` literal is the negation of the column.
    pub fn from_bits(rows: &[(Vec<bool>, bool)]) -> Self {
        let width = rows.first().map_or(0, |r| r.0.len());
        let cutpoints = (0..width)
            .map(|j| CutPoint::new(&format!("X{}", j + 1), 0.5))
            .collect();
        let rows = rows
            .iter()
            .enumerate()
            .map(|(i, (bits, positive))| {
                assert_eq!(bits.len(), width, "ragged Boolean rows");
                BinaryRow {
                    id: format!("r{i}"),
                    bits: bits.clone(),
                    at_most: bits.iter().map(|b| !b).collect(),
                    positive: *positive,
                }
            })
            .collect();
        BinaryView { cutpoints, rows }
    }

    pub fn width(&self) -> usize {
        self.cutpoints.len()
    }

    pub fn positive_count(&self) -> usize {
        self.rows.iter().filter(|r| r.positive).count()
    }

    /// Whether `literal` holds for row `row`. Literals not backed by a column
    /// of this view never hold.
    pub fn literal_holds(&self, literal: &Literal, row: usize) -> bool {
        match self.column_of(literal) {
            Some(j) => match literal.direction {
                Direction::AtLeast => self.rows[row].bits[j],
                Direction::AtMost => self.rows[row].at_most[j],
            },
            None => false,
        }
    }

    pub fn column_of(&self, literal: &Literal) -> Option<usize> {
        self.cutpoints.iter().position(|c| {
            c.indicator == literal.indicator && c.threshold.to_bits() == literal.threshold.to_bits()
        })
    }

    /// Rows with identical Boolean encodings but opposite labels.
    pub fn contradictions(&self) -> Vec<Diagnostic> {
        let mut first_seen: HashMap<(&[bool], &[bool]), Vec<usize>> = HashMap::new();
        for (i, row) in self.rows.iter().enumerate() {
            first_seen
                .entry((row.bits.as_slice(), row.at_most.as_slice()))
                .or_default()
                .push(i);
        }
        let mut out = Vec::new();
        let mut groups: Vec<&Vec<usize>> = first_seen.values().collect();
        groups.sort();
        for members in groups {
            for &p in members.iter().filter(|&&i| self.rows[i].positive) {
                for &n in members.iter().filter(|&&i| !self.rows[i].positive) {
                    out.push(Diagnostic::Contradiction {
                        first: self.rows[p].id.clone(),
                        second: self.rows[n].id.clone(),
                        first_label: "positive".into(),
                        second_label: "negative".into(),
                    });
                }
            }
        }
        out
    }
}

/// Encodes every record of `set` against `cutpoints`.
pub fn binarize(set: &LabeledSet, cutpoints: &[CutPoint]) -> BinaryView {
    let columns: Vec<Option<&[Option<f64>]>> = cutpoints
        .iter()
        .map(|c| set.column(c.indicator.as_str()))
        .collect();
    let rows = (0..set.len())
        .map(|i| {
            let value = |j: usize| columns[j].and_then(|col| col[i]);
            BinaryRow {
                id: set.key(i).to_string(),
                bits: cutpoints
                    .iter()
                    .enumerate()
                    .map(|(j, c)| value(j).is_some_and(|v| v >= c.threshold))
                    .collect(),
                at_most: cutpoints
                    .iter()
                    .enumerate()
                    .map(|(j, c)| value(j).is_some_and(|v| v <= c.threshold))
                    .collect(),
                positive: set.is_positive(i),
            }
        })
        .collect();
    BinaryView {
        cutpoints: cutpoints.to_vec(),
        rows,
    }
}
