use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::{CascadeModel, ModelSource, Provenance};
use crate::binarize::{
    all_candidate_cutpoints, binarize, minimize_cutpoints, CutPoint, LabeledSet, MinimizeOptions,
};
use crate::data::{write_dataset, CountryRecord, Dataset, Rank};
use crate::error::{Error, Result};
use crate::pattern::{select::mine_and_select, ClassDnf, MiningConfig};

#[derive(Debug, Clone, Default)]
pub struct TrainConfig {
    pub mining: MiningConfig,
    pub minimize: MinimizeOptions,
    /// Use these thresholds verbatim instead of learning cut-points.
    pub fixed_cutpoints: Option<Vec<CutPoint>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageLog {
    pub rank: Rank,
    pub label: String,
    pub positives: usize,
    pub negatives: usize,
    pub candidate_cutpoints: usize,
    pub cutpoints: usize,
    pub exact_minimization: bool,
    pub patterns: usize,
    pub relaxations: Vec<f64>,
    pub uncovered: Vec<String>,
    pub undistinguished_pairs: usize,
    pub note: Option<String>,
}

impl StageLog {
    pub fn is_partial(&self) -> bool {
        !self.uncovered.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainingLog {
    pub stages: Vec<StageLog>,
}

impl TrainingLog {
    pub fn fully_covered(&self) -> bool {
        self.stages.iter().all(|s| !s.is_partial())
    }

    pub fn relaxed(&self) -> bool {
        self.stages.iter().any(|s| !s.relaxations.is_empty())
    }
}

#[derive(Debug, Clone)]
pub struct TrainedCascade {
    pub model: CascadeModel,
    pub log: TrainingLog,
}

/// Trains one DNF per cumulative boundary `k = 1 .. n-1`: records rated
/// `1..=k` are positive, the rest negative. Stages whose class has no
/// training records, or that have no negatives, stay empty.
pub fn train_cascade(dataset: &Dataset, config: &TrainConfig) -> Result<TrainedCascade> {
    config.mining.validate()?;
    let scale = dataset.scale();
    let mut labeled: Vec<(&CountryRecord, Rank)> = Vec::new();
    for i in dataset.training_indices() {
        if let Some(rank) = dataset.rank_of(i)? {
            labeled.push((&dataset.records()[i], rank));
        }
    }
    if labeled.is_empty() {
        return Err(Error::NoLabeledRecords);
    }
    let first = labeled[0].1;
    if labeled.iter().all(|&(_, r)| r == first) {
        return Err(Error::SingleClass);
    }

    let results: Vec<Result<(ClassDnf, StageLog)>> = (1..scale.len())
        .into_par_iter()
        .map(|k| train_stage(dataset, &labeled, Rank(k), config))
        .collect();
    let mut stages = Vec::with_capacity(results.len());
    let mut logs = Vec::with_capacity(results.len());
    for r in results {
        let (dnf, log) = r?;
        stages.push(dnf);
        logs.push(log);
    }

    let provenance = Provenance::new(ModelSource::Trained {
        config: config.mining.clone(),
        dataset_fingerprint: fingerprint(dataset)?,
        training_records: labeled.len(),
    });
    let model = CascadeModel::new(scale.clone(), year_of(&labeled), stages, provenance)?;
    Ok(TrainedCascade {
        model,
        log: TrainingLog { stages: logs },
    })
}

fn year_of(labeled: &[(&CountryRecord, Rank)]) -> i32 {
    labeled
        .iter()
        .map(|(r, _)| r.year)
        .min()
        .unwrap_or_default()
}

fn train_stage(
    dataset: &Dataset,
    labeled: &[(&CountryRecord, Rank)],
    rank: Rank,
    config: &TrainConfig,
) -> Result<(ClassDnf, StageLog)> {
    let label = dataset.scale().label(rank).to_owned();
    let positives = labeled.iter().filter(|&&(_, r)| r <= rank).count();
    let negatives = labeled.len() - positives;
    let mut log = StageLog {
        rank,
        label: label.clone(),
        positives,
        negatives,
        candidate_cutpoints: 0,
        cutpoints: 0,
        exact_minimization: false,
        patterns: 0,
        relaxations: Vec::new(),
        uncovered: Vec::new(),
        undistinguished_pairs: 0,
        note: None,
    };
    if !labeled.iter().any(|&(_, r)| r == rank) {
        log.note = Some(format!("no training records rated {label}"));
        return Ok((ClassDnf::empty(rank), log));
    }
    if negatives == 0 {
        log.note = Some("no negative records".into());
        return Ok((ClassDnf::empty(rank), log));
    }

    let set = LabeledSet::from_records(
        labeled.iter().map(|&(rec, r)| (rec, r <= rank)),
        dataset.indicators(),
    );
    let contradiction = |(p, n): (usize, usize)| Error::Contradiction {
        stage: Some(rank.0),
        positive: set.key(p).clone(),
        negative: set.key(n).clone(),
    };
    let cutpoints = match &config.fixed_cutpoints {
        Some(fixed) => {
            if let Some(pair) = set.identical_conflict() {
                return Err(contradiction(pair));
            }
            log.candidate_cutpoints = fixed.len();
            fixed.clone()
        }
        None => {
            let candidates = all_candidate_cutpoints(&set);
            log.candidate_cutpoints = candidates.len();
            let selection =
                minimize_cutpoints(&candidates, &set, &config.minimize).map_err(|e| match e {
                    Error::Contradiction {
                        positive, negative, ..
                    } => Error::Contradiction {
                        stage: Some(rank.0),
                        positive,
                        negative,
                    },
                    other => other,
                })?;
            log.exact_minimization = selection.exact;
            log.undistinguished_pairs = selection.undistinguished.len();
            selection.cutpoints
        }
    };
    log.cutpoints = cutpoints.len();

    let view = binarize(&set, &cutpoints);
    let selection = mine_and_select(&view, &config.mining)?;
    log.patterns = selection.patterns.len();
    log.relaxations = selection.relaxations;
    log.uncovered = selection.uncovered;
    let dnf = ClassDnf {
        rank,
        patterns: selection.patterns,
    };
    debug_assert!(
        config.mining.min_homogeneity < 1.0
            || labeled
                .iter()
                .all(|&(rec, r)| r <= rank || !dnf.matches(rec)),
        "stage {rank:?} accepts a negative training record"
    );
    Ok((dnf, log))
}

/// SHA-256 over the canonical serialization of the dataset and its split.
pub(crate) fn fingerprint(dataset: &Dataset) -> Result<String> {
    let mut bytes = Vec::new();
    write_dataset(dataset, &mut bytes, b',')?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    if let Some(split) = dataset.split() {
        for i in &split.train {
            hasher.update(format!("t{i};").as_bytes());
        }
        for i in &split.test {
            hasher.update(format!("v{i};").as_bytes());
        }
    }
    Ok(hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect())
}
