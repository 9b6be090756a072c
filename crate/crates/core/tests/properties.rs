mod common;

use std::collections::BTreeSet;

use common::*;
use lad_core::binarize::{
    all_candidate_cutpoints, binarize, minimize_cutpoints, LabeledSet, MinimizeOptions,
    MinimizeStrategy,
};
use lad_core::cascade::{ModelSource, Provenance};
use lad_core::data::{load_dataset, split_dataset, write_dataset, LoadOptions};
use lad_core::evaluation::{evaluate_predictions, MismatchDirection, Prediction, SplitPart};
use lad_core::synthetic::{generate, SyntheticConfig};
use lad_core::*;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CODES: [&str; 3] = ["G", "U", "I"];

fn record_strategy() -> impl Strategy<Value = CountryRecord> {
    (
        "[A-Z][a-z ,]{0,8}[a-z]",
        prop::collection::vec(prop::option::weighted(0.85, -1e6f64..1e6), 3),
        prop::option::of(0usize..16),
    )
        .prop_map(|(name, values, rating)| {
            let mut r = CountryRecord::new(name, 2012);
            for (code, v) in CODES.iter().zip(values) {
                if let Some(v) = v {
                    r = r.with_value(code, v);
                }
            }
            if let Some(k) = rating {
                r = r.with_rating(lad_core::data::FITCH_LABELS[k]);
            }
            r
        })
}

fn dataset_strategy() -> impl Strategy<Value = Dataset> {
    prop::collection::vec(record_strategy(), 1..30).prop_map(|records| {
        let mut seen = BTreeSet::new();
        let unique = records
            .into_iter()
            .filter(|r| seen.insert(r.country.clone()))
            .collect();
        Dataset::new(unique, RatingScale::fitch())
    })
}

/// Small labeled sets over integer-valued indicators, with some values missing.
fn labeled_strategy() -> impl Strategy<Value = LabeledSet> {
    prop::collection::vec(
        (
            prop::collection::vec(prop::option::weighted(0.9, 0u8..6), 2),
            any::<bool>(),
        ),
        2..12,
    )
    .prop_map(|rows| {
        let records: Vec<(CountryRecord, bool)> = rows
            .into_iter()
            .enumerate()
            .map(|(i, (values, label))| {
                let mut r = CountryRecord::new(format!("c{i}"), 2012);
                for (code, v) in CODES.iter().zip(values) {
                    if let Some(v) = v {
                        r = r.with_value(code, f64::from(v));
                    }
                }
                (r, label)
            })
            .collect();
        let codes: Vec<IndicatorCode> = CODES[..2].iter().map(|&c| c.into()).collect();
        LabeledSet::from_records(records.iter().map(|(r, l)| (r, *l)), &codes)
    })
}

fn bool_view_strategy() -> impl Strategy<Value = lad_core::BinaryView> {
    (1usize..=12, 1usize..=10, any::<u64>()).prop_map(|(rows, cols, seed)| {
        random_bool_view(&mut ChaCha8Rng::seed_from_u64(seed), rows, cols)
    })
}

fn mining_strategy() -> impl Strategy<Value = MiningConfig> {
    (
        1usize..=3,
        0.0f64..=1.0,
        prop::sample::select(vec![1.0, 0.8, 0.5]),
    )
        .prop_map(
            |(max_degree, min_prevalence, min_homogeneity)| MiningConfig {
                max_degree,
                min_prevalence,
                min_homogeneity,
                ..MiningConfig::default()
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dataset_csv_round_trip(data in dataset_strategy()) {
        let mut bytes = Vec::new();
        write_dataset(&data, &mut bytes, b',').unwrap();
        let loaded = load_dataset(bytes.as_slice(), &RatingScale::fitch(), &LoadOptions::default()).unwrap();
        prop_assert_eq!(loaded.dataset.records(), data.records());
    }

    #[test]
    fn split_partitions_labeled_records(data in dataset_strategy(), frac in 0.1f64..0.9, seed in any::<u64>()) {
        prop_assume!(data.labeled_indices().len() >= 2);
        let a = split_dataset(&data, frac, seed).unwrap();
        let b = split_dataset(&data, frac, seed).unwrap();
        let split = a.split().unwrap();
        prop_assert_eq!(split, b.split().unwrap());
        let mut all: Vec<usize> = split.train.iter().chain(&split.test).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, data.labeled_indices());
    }

    #[test]
    fn minimized_cutpoints_keep_separation(set in labeled_strategy()) {
        prop_assume!(set.positives().count() > 0 && set.negatives().count() > 0);
        prop_assume!(set.identical_conflict().is_none());
        let candidates = all_candidate_cutpoints(&set);
        for strategy in [MinimizeStrategy::Greedy, MinimizeStrategy::Exact] {
            let options = MinimizeOptions { strategy, ..MinimizeOptions::default() };
            let chosen = minimize_cutpoints(&candidates, &set, &options).unwrap();
            prop_assert!(separates_all(&candidates, &chosen.cutpoints, &set));
        }
    }

    #[test]
    fn greedy_within_log_bound_of_exact(set in labeled_strategy()) {
        prop_assume!(set.positives().count() > 0 && set.negatives().count() > 0);
        prop_assume!(set.identical_conflict().is_none());
        let candidates = all_candidate_cutpoints(&set);
        let run = |strategy| {
            let options = MinimizeOptions { strategy, ..MinimizeOptions::default() };
            minimize_cutpoints(&candidates, &set, &options).unwrap().cutpoints.len()
        };
        let (greedy, exact) = (run(MinimizeStrategy::Greedy), run(MinimizeStrategy::Exact));
        let pairs = (set.positives().count() * set.negatives().count()) as f64;
        prop_assert!(exact <= greedy);
        prop_assert!(greedy as f64 <= exact as f64 * (1.0 + pairs.ln()) + 1e-9);
    }

    #[test]
    fn encoding_is_monotone_in_threshold(set in labeled_strategy()) {
        let candidates = all_candidate_cutpoints(&set);
        let view = binarize(&set, &candidates);
        for (a, ca) in candidates.iter().enumerate() {
            for (b, cb) in candidates.iter().enumerate() {
                if ca.indicator != cb.indicator || ca.threshold >= cb.threshold {
                    continue;
                }
                for row in &view.rows {
                    prop_assert!(!row.bits[b] || row.bits[a]);
                    prop_assert!(!row.at_most[a] || row.at_most[b]);
                }
            }
        }
    }

    #[test]
    fn enumeration_matches_brute_force(view in bool_view_strategy(), config in mining_strategy(), prune in any::<bool>()) {
        let config = MiningConfig { prune, ..config };
        let got: Vec<String> = enumerate_patterns(&view, &config).unwrap().iter().map(|p| p.to_string()).collect();
        prop_assert_eq!(got, brute_force_patterns(&view, &config, prune));
    }

    #[test]
    fn lower_prevalence_only_adds_patterns(view in bool_view_strategy(), config in mining_strategy(), drop in 0.0f64..1.0) {
        let config = MiningConfig { prune: false, ..config };
        let looser = MiningConfig { min_prevalence: config.min_prevalence * drop, ..config.clone() };
        let strict: BTreeSet<String> = enumerate_patterns(&view, &config).unwrap().iter().map(|p| p.to_string()).collect();
        let loose: BTreeSet<String> = enumerate_patterns(&view, &looser).unwrap().iter().map(|p| p.to_string()).collect();
        prop_assert!(strict.is_subset(&loose));
    }

    #[test]
    fn enumeration_is_deterministic(view in bool_view_strategy(), config in mining_strategy()) {
        prop_assert_eq!(enumerate_patterns(&view, &config).unwrap(), enumerate_patterns(&view, &config).unwrap());
    }

    #[test]
    fn selected_dnf_is_pure_and_covers(view in bool_view_strategy(), config in mining_strategy()) {
        let config = MiningConfig { min_homogeneity: 1.0, ..config };
        let pool = enumerate_patterns(&view, &config).unwrap();
        let dnf = select_dnf(&pool, &view, &config).unwrap();
        for (i, row) in view.rows.iter().enumerate() {
            let hit = dnf.patterns.iter().any(|p| p.literals.iter().all(|l| view.literal_holds(l, i)));
            prop_assert!(row.positive || !hit);
        }
        prop_assert!(dnf.covered_positives <= dnf.total_positives);
    }

    #[test]
    fn pattern_order_within_stage_is_irrelevant(seed in any::<u64>()) {
        let model = import_lenient("table3_2012.txt", 2012).model;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let stages: Vec<ClassDnf> = model.stages().iter().map(|s| {
            let mut s = s.clone();
            s.patterns.shuffle(&mut rng);
            s
        }).collect();
        let source = ModelSource::Imported { strict: false, notes: Vec::new() };
        let shuffled = CascadeModel::new(RatingScale::fitch(), 2012, stages, Provenance::new(source)).unwrap();
        let data = generate(&SyntheticConfig { records: 1, ..SyntheticConfig::default() }, &RatingScale::fitch(), seed);
        let mut probe = data.records()[0].clone();
        for code in ["U", "G", "C", "GS", "UN", "CG", "PA", "EX", "PPP", "E", "M", "IV", "RE"] {
            probe = probe.with_value(code, rng.gen_range(-20.0..120.0) * if code == "G" { 700.0 } else { 1.0 });
        }
        prop_assert_eq!(classify(&model, &probe), classify(&shuffled, &probe));
    }

    #[test]
    fn evaluation_symmetry(pairs in prop::collection::vec((1usize..=16, 1usize..=16), 1..40)) {
        let scale = RatingScale::fitch();
        let build = |swap: bool| -> Vec<Prediction> {
            pairs.iter().enumerate().map(|(i, &(m, o))| {
                let (m, o) = if swap { (o, m) } else { (m, o) };
                Prediction { country: format!("c{i}"), year: 2012, predicted: Outcome::Rated(Rank(m)), observed: Rank(o), part: SplitPart::Unsplit }
            }).collect()
        };
        let a = evaluate_predictions(&scale, &build(false)).unwrap();
        let b = evaluate_predictions(&scale, &build(true)).unwrap();
        prop_assert_eq!(a.bias.model_better, b.bias.model_worse);
        prop_assert_eq!(a.bias.model_worse, b.bias.model_better);
        prop_assert_eq!(a.bias.model_better_share, b.bias.model_worse_share);
        for m in &a.mismatches {
            let twin = b.mismatches.iter().find(|x| x.country == m.country).unwrap();
            prop_assert_eq!(twin.direction, m.direction.map(MismatchDirection::flipped));
            prop_assert_eq!(twin.signed_distance, m.signed_distance.map(|d| -d));
        }
        let matched = (a.overall.ratio * a.overall.total as f64).round() as usize;
        prop_assert_eq!(matched, a.overall.matched);
        prop_assert_eq!(a.overall.total - a.overall.matched, a.mismatches.len());
        if !a.mismatches.is_empty() {
            prop_assert!((a.bias.model_better_share + a.bias.model_worse_share - 1.0).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn full_coverage_reproduces_training_labels(seed in any::<u64>(), records in 60usize..=120) {
        let config = SyntheticConfig { records, ..SyntheticConfig::default() };
        let data = generate(&config, &RatingScale::fitch(), seed);
        let trained = train_cascade(&data, &TrainConfig::default()).unwrap();
        prop_assert!(impurity(&trained.model, &data).is_none());
        let positives: Vec<usize> = trained.log.stages.iter().map(|s| s.positives).collect();
        prop_assert!(positives.windows(2).all(|w| w[0] <= w[1]));
        if trained.log.fully_covered() {
            for (i, r) in data.records().iter().enumerate() {
                prop_assert_eq!(classify(&trained.model, r), Outcome::Rated(data.rank_of(i).unwrap().unwrap()));
            }
        }
    }
}
