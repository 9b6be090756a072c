//! Domain types, the rating scale, dataset ingestion and validation.

mod dataset;
mod indicator;
mod scale;

pub use dataset::{
    load_dataset, split_dataset, validate, write_dataset, CountryRecord, Dataset, Diagnostic,
    LoadOptions, LoadWarning, Loaded, Split,
};
pub use indicator::{Indicator, IndicatorCode, IndicatorRegistry};
pub use scale::{FallbackPolicy, Rank, RatingScale, FITCH_LABELS};
