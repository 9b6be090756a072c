//! Seeded generator of rating datasets whose cascade stages are each
//! separable by a degree-2 pattern.
//!
//! Every record has a latent level `L = classes - rank`. Two informative
//! indicators each carry a score of at least `L`: `G` grows with its score and
//! `CG` shrinks with it. One of the two, chosen at random, is binding and
//! scores `L + u` with `u` in `[0.1, 0.9)`; the other scores higher by up to
//! `spread`. So "rank <= k" holds exactly when both scores reach `classes - k`,
//! which `(G>=a, CG<=b)` expresses. Noise indicators are uniform and unrelated
//! to the rating.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{CountryRecord, Dataset, RatingScale};

const NOISE_CODES: [&str; 4] = ["I", "UN", "E", "PG"];

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub records: usize,
    /// At most four.
    pub noise_indicators: usize,
    /// Extra score of the non-binding informative indicator.
    pub spread: f64,
    pub year: i32,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            records: 96,
            noise_indicators: 2,
            spread: 1.0,
            year: 2012,
        }
    }
}

fn g_value(score: f64) -> f64 {
    2000.0 + 3000.0 * score
}

fn cg_value(score: f64) -> f64 {
    150.0 - 8.0 * score
}

/// Records cycle through the ranks of `scale`, so every class appears once
/// `records >= scale.len()`.
pub fn generate(config: &SyntheticConfig, scale: &RatingScale, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let classes = scale.len();
    let records = (0..config.records)
        .map(|i| {
            let rank = i % classes + 1;
            let level = (classes - rank) as f64;
            let binding = level + rng.gen_range(0.1..0.9);
            let loose = level + rng.gen_range(0.1..0.9) + rng.gen_range(0.0..=config.spread);
            let (g, cg) = if rng.gen_bool(0.5) {
                (binding, loose)
            } else {
                (loose, binding)
            };
            let mut record = CountryRecord::new(format!("S{i:03}"), config.year)
                .with_rating(scale.label(crate::data::Rank(rank)))
                .with_value("G", round(g_value(g)))
                .with_value("CG", round(cg_value(cg)));
            for code in NOISE_CODES.iter().take(config.noise_indicators) {
                record = record.with_value(code, round(rng.gen_range(0.0..100.0)));
            }
            record
        })
        .collect();
    Dataset::new(records, scale.clone())
}

/// Two decimals, as in published indicator tables.
fn round(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}
