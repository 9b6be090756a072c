use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A record reference used in error messages: `country/year`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordKey {
    pub country: String,
    pub year: i32,
}

impl std::fmt::Display for RecordKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.country, self.year)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("duplicate record for country {country:?} in year {year}")]
    DuplicateRecord { country: String, year: i32 },

    #[error("line {line}: unknown rating label {label:?}")]
    UnknownRating { line: usize, label: String },

    #[error("{}contradiction: {positive} and {negative} cannot be separated", stage_prefix(*.stage))]
    Contradiction {
        stage: Option<usize>,
        positive: RecordKey,
        negative: RecordKey,
    },

    #[error("indicator {0:?} has no values in any record")]
    IndicatorAbsent(String),

    #[error("no positive records to describe")]
    NoPositives,

    #[error("training data must contain at least two rating classes")]
    SingleClass,

    #[error("no labeled records")]
    NoLabeledRecords,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid indicator registry: {0}")]
    InvalidRegistry(String),

    #[error("invalid rating scale: {0}")]
    InvalidScale(String),

    #[error("record {0} already carries an observed rating")]
    AlreadyRated(RecordKey),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn stage_prefix(stage: Option<usize>) -> String {
    match stage {
        Some(k) => format!("stage {k}: "),
        None => String::new(),
    }
}
