//! Scoring a cascade against observed ratings.
//!
//! Distances are measured in class steps as `observed rank - model rank`. A
//! positive distance means the model rated the country better than the
//! agency did, i.e. the agency was the harsher of the two.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::cascade::{classify, CascadeModel, Outcome};
use crate::data::{Dataset, Rank, RatingScale};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MismatchDirection {
    ModelBetter,
    ModelWorse,
}

impl MismatchDirection {
    pub fn flipped(self) -> Self {
        match self {
            MismatchDirection::ModelBetter => MismatchDirection::ModelWorse,
            MismatchDirection::ModelWorse => MismatchDirection::ModelBetter,
        }
    }
}

/// Which part of a split a record belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitPart {
    Train,
    Test,
    Unsplit,
}

/// One labeled record's model outcome next to its observed rating.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prediction {
    pub country: String,
    pub year: i32,
    pub predicted: Outcome,
    pub observed: Rank,
    pub part: SplitPart,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mismatch {
    pub country: String,
    pub year: i32,
    /// `None` when the record was unclassified.
    pub model_rating: Option<String>,
    pub observed_rating: String,
    pub signed_distance: Option<i64>,
    pub direction: Option<MismatchDirection>,
    pub part: SplitPart,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BiasShare {
    pub model_better: usize,
    pub model_worse: usize,
    pub model_better_share: f64,
    pub model_worse_share: f64,
}

impl BiasShare {
    fn from_counts(model_better: usize, model_worse: usize) -> Self {
        let total = model_better + model_worse;
        let share = |n: usize| {
            if total == 0 {
                0.0
            } else {
                n as f64 / total as f64
            }
        };
        BiasShare {
            model_better,
            model_worse,
            model_better_share: share(model_better),
            model_worse_share: share(model_worse),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatchCount {
    pub matched: usize,
    pub total: usize,
    pub ratio: f64,
}

impl MatchCount {
    fn new(matched: usize, total: usize) -> Self {
        let ratio = if total == 0 {
            0.0
        } else {
            matched as f64 / total as f64
        };
        MatchCount {
            matched,
            total,
            ratio,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    /// Present only when the records carry a train/test split.
    pub train: Option<MatchCount>,
    pub test: Option<MatchCount>,
    pub overall: MatchCount,
    /// Sorted by absolute distance, largest first; unclassified rows last.
    pub mismatches: Vec<Mismatch>,
    /// Over directed mismatches only.
    pub bias: BiasShare,
    /// Mismatch count per country over all years present.
    pub repeat_offenders: BTreeMap<String, usize>,
    pub unclassified_count: usize,
}

impl EvaluationReport {
    pub fn match_ratio_overall(&self) -> f64 {
        self.overall.ratio
    }

    /// Table-style rendering: summary lines, then one mismatch per row.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let ratio = |m: &MatchCount| format!("{}/{} ({:.1}%)", m.matched, m.total, m.ratio * 100.0);
        if let Some(train) = &self.train {
            let _ = writeln!(out, "matched, training set: {}", ratio(train));
        }
        if let Some(test) = &self.test {
            let _ = writeln!(out, "matched, test set: {}", ratio(test));
        }
        let _ = writeln!(out, "matched, overall: {}", ratio(&self.overall));
        let _ = writeln!(out, "unclassified: {}", self.unclassified_count);
        let _ = writeln!(
            out,
            "model better: {} ({:.1}%), model worse: {} ({:.1}%)",
            self.bias.model_better,
            self.bias.model_better_share * 100.0,
            self.bias.model_worse,
            self.bias.model_worse_share * 100.0
        );
        let _ = writeln!(out);
        let _ = writeln!(out, "Country\tYear\tSet\tModel\tObserved\tDistance");
        for m in &self.mismatches {
            let part = match m.part {
                SplitPart::Train => "train",
                SplitPart::Test => "test",
                SplitPart::Unsplit => "-",
            };
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}",
                m.country,
                m.year,
                part,
                m.model_rating.as_deref().unwrap_or("unclassified"),
                m.observed_rating,
                m.signed_distance
                    .map_or_else(|| "-".to_owned(), |d| format!("{d:+}")),
            );
        }
        out
    }
}

/// Scores `predictions`; errors when there are none.
pub fn evaluate_predictions(
    scale: &RatingScale,
    predictions: &[Prediction],
) -> Result<EvaluationReport> {
    if predictions.is_empty() {
        return Err(Error::NoLabeledRecords);
    }
    let mut mismatches = Vec::new();
    let (mut train, mut test) = ((0, 0), (0, 0));
    let mut matched = 0;
    let mut unclassified_count = 0;
    let (mut better, mut worse) = (0, 0);
    let mut repeat_offenders: BTreeMap<String, usize> = BTreeMap::new();
    for p in predictions {
        let hit = p.predicted == Outcome::Rated(p.observed);
        let tally = match p.part {
            SplitPart::Train => Some(&mut train),
            SplitPart::Test => Some(&mut test),
            SplitPart::Unsplit => None,
        };
        if let Some((m, n)) = tally {
            *n += 1;
            *m += usize::from(hit);
        }
        if hit {
            matched += 1;
            continue;
        }
        *repeat_offenders.entry(p.country.clone()).or_default() += 1;
        let (model_rating, signed_distance, direction) = match p.predicted {
            Outcome::Rated(r) => {
                let d = p.observed.0 as i64 - r.0 as i64;
                let dir = if d > 0 {
                    better += 1;
                    MismatchDirection::ModelBetter
                } else {
                    worse += 1;
                    MismatchDirection::ModelWorse
                };
                (Some(scale.label(r).to_owned()), Some(d), Some(dir))
            }
            Outcome::Unclassified => {
                unclassified_count += 1;
                (None, None, None)
            }
        };
        mismatches.push(Mismatch {
            country: p.country.clone(),
            year: p.year,
            model_rating,
            observed_rating: scale.label(p.observed).to_owned(),
            signed_distance,
            direction,
            part: p.part,
        });
    }
    mismatches.sort_by_key(|m| std::cmp::Reverse(m.signed_distance.map(i64::abs)));
    let split = train.1 + test.1 > 0;
    Ok(EvaluationReport {
        train: split.then(|| MatchCount::new(train.0, train.1)),
        test: split.then(|| MatchCount::new(test.0, test.1)),
        overall: MatchCount::new(matched, predictions.len()),
        mismatches,
        bias: BiasShare::from_counts(better, worse),
        repeat_offenders,
        unclassified_count,
    })
}

/// Classifies every labeled record of `dataset` and scores the result.
pub fn evaluate(model: &CascadeModel, dataset: &Dataset) -> Result<EvaluationReport> {
    let mut part = vec![SplitPart::Unsplit; dataset.len()];
    if let Some(split) = dataset.split() {
        for &i in &split.train {
            part[i] = SplitPart::Train;
        }
        for &i in &split.test {
            part[i] = SplitPart::Test;
        }
    }
    let mut predictions = Vec::new();
    for i in dataset.labeled_indices() {
        let Some(observed) = dataset.rank_of(i)? else {
            continue;
        };
        let record = &dataset.records()[i];
        predictions.push(Prediction {
            country: record.country.clone(),
            year: record.year,
            predicted: classify(model, record),
            observed,
            part: part[i],
        });
    }
    evaluate_predictions(model.scale(), &predictions)
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct RepeatOffenders {
    /// Countries with exactly two mismatches, by name.
    pub twice: Vec<String>,
    /// Countries with three or more, with their counts.
    pub more_than_twice: Vec<(String, usize)>,
}

/// Countries mismatched at least twice over `reports`, typically one per year.
pub fn repeat_offenders(reports: &[EvaluationReport]) -> RepeatOffenders {
    let mut totals: BTreeMap<&str, usize> = BTreeMap::new();
    for report in reports {
        for (country, n) in &report.repeat_offenders {
            *totals.entry(country).or_default() += n;
        }
    }
    let mut summary = RepeatOffenders::default();
    for (country, n) in totals {
        match n {
            0 | 1 => {}
            2 => summary.twice.push(country.to_owned()),
            _ => summary.more_than_twice.push((country.to_owned(), n)),
        }
    }
    summary
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pred(country: &str, model: &str, observed: &str) -> Prediction {
        let scale = RatingScale::fitch();
        Prediction {
            country: country.to_owned(),
            year: 2012,
            predicted: Outcome::Rated(scale.rank(model).unwrap()),
            observed: scale.rank(observed).unwrap(),
            part: SplitPart::Test,
        }
    }

    #[test]
    fn perfect_predictions() {
        let r = evaluate_predictions(&RatingScale::fitch(), &[pred("X", "A", "A")]).unwrap();
        assert_eq!(r.overall.ratio, 1.0);
        assert!(r.mismatches.is_empty());
        assert_eq!(r.bias.model_better_share + r.bias.model_worse_share, 0.0);
    }

    #[test]
    fn empty_input_is_an_error() {
        let err = evaluate_predictions(&RatingScale::fitch(), &[]).unwrap_err();
        assert_eq!(err.to_string(), "no labeled records");
    }

    #[test]
    fn mismatches_sorted_by_distance() {
        let r = evaluate_predictions(
            &RatingScale::fitch(),
            &[
                pred("S", "BBBM", "BBM"),
                pred("U", "BBBM", "B"),
                pred("G", "BB", "BP"),
            ],
        )
        .unwrap();
        let d: Vec<_> = r
            .mismatches
            .iter()
            .map(|m| m.signed_distance.unwrap())
            .collect();
        assert_eq!(d, [5, 3, 2]);
        assert_eq!(r.bias.model_better_share, 1.0);
    }

    #[test]
    fn unclassified_has_no_direction() {
        let mut p = pred("X", "A", "AA");
        p.predicted = Outcome::Unclassified;
        let r = evaluate_predictions(&RatingScale::fitch(), &[p, pred("Y", "AA", "A")]).unwrap();
        assert_eq!(r.unclassified_count, 1);
        assert_eq!(r.mismatches.len(), 2);
        assert_eq!(r.mismatches[1].direction, None);
        assert_eq!(r.bias.model_better, 1);
        assert_eq!(r.bias.model_better_share, 1.0);
    }

    #[test]
    fn repeat_offender_buckets() {
        let scale = RatingScale::fitch();
        let year = |rows: &[Prediction]| evaluate_predictions(&scale, rows).unwrap();
        let reports = [
            year(&[
                pred("I", "A", "AA"),
                pred("P", "A", "AA"),
                pred("Q", "A", "AA"),
            ]),
            year(&[pred("I", "A", "AA"), pred("P", "A", "AA")]),
            year(&[pred("I", "A", "AA")]),
        ];
        let s = repeat_offenders(&reports);
        assert_eq!(s.twice, ["P"]);
        assert_eq!(s.more_than_twice, [("I".to_owned(), 3)]);
        assert_eq!(repeat_offenders(&reports[2..]), RepeatOffenders::default());
    }
}
