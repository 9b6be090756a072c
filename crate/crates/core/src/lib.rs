//! Logical Analysis of Data for ordinal rating prediction.
//!
//! Numeric indicators are binarized at cut-points, conjunctive patterns are
//! mined per cumulative class boundary, and the resulting DNFs are applied as
//! a first-match cascade from the best class to the worst.

pub mod binarize;
mod bitset;
pub mod cascade;
pub mod data;
pub mod error;
pub mod evaluation;
pub mod pattern;
mod setcover;
pub mod synthetic;

pub use binarize::{binarize, BinaryView, CutPoint, Direction, LabeledSet, Literal};
pub use cascade::{
    classify, export_decision_tree, import_decision_tree, key_variables, suggest_rating,
    train_cascade, CascadeModel, Outcome, TrainConfig,
};
pub use data::{CountryRecord, Dataset, FallbackPolicy, IndicatorCode, Rank, RatingScale};
pub use error::{Error, Result};
pub use evaluation::{evaluate, repeat_offenders, EvaluationReport};
pub use pattern::{enumerate_patterns, select_dnf, ClassDnf, MiningConfig, Pattern};
