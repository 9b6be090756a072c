//! The ordinal cascade: one DNF per cumulative class boundary, applied in
//! order, first match wins.

mod keyvars;
mod train;
mod tree_format;

pub use keyvars::{
    key_variables, GroupKeyVariables, IndicatorCount, KeyVariableReport, StageKeyVariables,
};
pub use train::{train_cascade, StageLog, TrainConfig, TrainedCascade, TrainingLog};
pub use tree_format::{
    export_decision_tree, import_decision_tree, ImportMode, ImportNote, ImportOptions,
    ImportedTree, NoteKind,
};

use serde::{Deserialize, Serialize};

use crate::data::{CountryRecord, FallbackPolicy, Rank, RatingScale};
use crate::error::{Error, Result};
use crate::pattern::{ClassDnf, MiningConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "rank")]
pub enum Outcome {
    Rated(Rank),
    Unclassified,
}

impl Outcome {
    pub fn rank(self) -> Option<Rank> {
        match self {
            Outcome::Rated(r) => Some(r),
            Outcome::Unclassified => None,
        }
    }
}

/// Where a model came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelSource {
    Trained {
        config: MiningConfig,
        dataset_fingerprint: String,
        training_records: usize,
    },
    /// Coverage statistics are unknown for imported trees.
    Imported { strict: bool, notes: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: ModelSource,
    pub tool_version: String,
}

impl Provenance {
    pub fn new(source: ModelSource) -> Self {
        Provenance {
            source,
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
        }
    }
}

/// Result of classifying one record, with the stage and pattern that fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Explanation {
    pub outcome: Outcome,
    /// `(stage rank, pattern index)` of the first accepting pattern.
    pub matched: Option<(Rank, usize)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CascadeModel {
    scale: RatingScale,
    year: i32,
    stages: Vec<ClassDnf>,
    residual: Option<ClassDnf>,
    provenance: Provenance,
}

impl CascadeModel {
    /// Assembles a model with one stage for every rank but the last. Ranks
    /// missing from `stages` get an empty DNF.
    pub fn new(
        scale: RatingScale,
        year: i32,
        stages: Vec<ClassDnf>,
        provenance: Provenance,
    ) -> Result<Self> {
        let mut slots: Vec<Option<ClassDnf>> = vec![None; scale.len() - 1];
        for dnf in stages {
            let k = dnf.rank.0;
            if k == 0 || k >= scale.len() {
                return Err(Error::InvalidConfig(format!(
                    "stage rank {k} outside 1..{}",
                    scale.len() - 1
                )));
            }
            if slots[k - 1].replace(dnf).is_some() {
                return Err(Error::InvalidConfig(format!(
                    "duplicate stage for rank {k}"
                )));
            }
        }
        let stages = slots
            .into_iter()
            .enumerate()
            .map(|(i, s)| s.unwrap_or_else(|| ClassDnf::empty(Rank(i + 1))))
            .collect();
        Ok(CascadeModel {
            scale,
            year,
            stages,
            residual: None,
            provenance,
        })
    }

    /// Keeps a published last-class row for export. It takes no part in
    /// classification: the last class is reached only through the fallback.
    pub fn with_residual(mut self, residual: Option<ClassDnf>) -> Self {
        self.residual = residual;
        self
    }

    pub fn scale(&self) -> &RatingScale {
        &self.scale
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    pub fn stages(&self) -> &[ClassDnf] {
        &self.stages
    }

    pub fn stage(&self, rank: Rank) -> Option<&ClassDnf> {
        self.stages.get(rank.0.checked_sub(1)?)
    }

    pub fn residual(&self) -> Option<&ClassDnf> {
        self.residual.as_ref()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn with_fallback(mut self, fallback: FallbackPolicy) -> Self {
        self.scale = self.scale.with_fallback(fallback);
        self
    }

    pub fn explain(&self, record: &CountryRecord) -> Explanation {
        for stage in &self.stages {
            if let Some(p) = stage.first_match(record) {
                return Explanation {
                    outcome: Outcome::Rated(stage.rank),
                    matched: Some((stage.rank, p)),
                };
            }
        }
        let outcome = match self.scale.fallback() {
            FallbackPolicy::FallbackToLast => Outcome::Rated(self.scale.last()),
            FallbackPolicy::Unclassified => Outcome::Unclassified,
        };
        Explanation {
            outcome,
            matched: None,
        }
    }

    pub fn label(&self, outcome: Outcome) -> &str {
        match outcome {
            Outcome::Rated(r) => self.scale.label(r),
            Outcome::Unclassified => "Unclassified",
        }
    }

    pub fn pattern_count(&self) -> usize {
        self.stages.iter().map(|s| s.patterns.len()).sum()
    }
}

/// The rating of the first stage whose DNF accepts `record`, or the fallback.
pub fn classify(model: &CascadeModel, record: &CountryRecord) -> Outcome {
    model.explain(record).outcome
}

/// A rating proposed for a record the agency has not rated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Suggestion {
    pub outcome: Outcome,
}

pub fn suggest_rating(model: &CascadeModel, record: &CountryRecord) -> Result<Suggestion> {
    if record.rating.is_some() {
        return Err(Error::AlreadyRated(record.key()));
    }
    Ok(Suggestion {
        outcome: classify(model, record),
    })
}
