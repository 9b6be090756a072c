use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};
use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::indicator::{IndicatorCode, IndicatorRegistry};
use super::scale::{Rank, RatingScale};
use crate::error::{Error, RecordKey, Result};

/// One country-year observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountryRecord {
    pub country: String,
    pub year: i32,
    /// Indicator values; an absent key is a missing value.
    pub values: BTreeMap<IndicatorCode, f64>,
    pub rating: Option<String>,
}

impl CountryRecord {
    pub fn new(country: impl Into<String>, year: i32) -> Self {
        CountryRecord {
            country: country.into(),
            year,
            values: BTreeMap::new(),
            rating: None,
        }
    }

    pub fn with_value(mut self, code: &str, value: f64) -> Self {
        self.values.insert(code.into(), value);
        self
    }

    pub fn with_rating(mut self, label: &str) -> Self {
        self.rating = Some(label.to_owned());
        self
    }

    pub fn value(&self, code: &str) -> Option<f64> {
        self.values.get(code).copied()
    }

    pub fn key(&self) -> RecordKey {
        RecordKey {
            country: self.country.clone(),
            year: self.year,
        }
    }
}

/// Partition of labeled record indices into training and test sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    records: Vec<CountryRecord>,
    scale: RatingScale,
    indicators: Vec<IndicatorCode>,
    split: Option<Split>,
}

impl Dataset {
    /// Builds a dataset whose indicator columns are the sorted union of the
    /// codes present in `records`. No validation is performed; see [`validate`].
    pub fn new(records: Vec<CountryRecord>, scale: RatingScale) -> Self {
        let mut codes: Vec<IndicatorCode> = records
            .iter()
            .flat_map(|r| r.values.keys().cloned())
            .collect();
        codes.sort();
        codes.dedup();
        Dataset::with_indicators(records, scale, codes)
    }

    pub fn with_indicators(
        records: Vec<CountryRecord>,
        scale: RatingScale,
        indicators: Vec<IndicatorCode>,
    ) -> Self {
        Dataset {
            records,
            scale,
            indicators,
            split: None,
        }
    }

    pub fn with_split(mut self, split: Split) -> Self {
        self.split = Some(split);
        self
    }

    pub fn records(&self) -> &[CountryRecord] {
        &self.records
    }

    pub fn scale(&self) -> &RatingScale {
        &self.scale
    }

    pub fn indicators(&self) -> &[IndicatorCode] {
        &self.indicators
    }

    pub fn split(&self) -> Option<&Split> {
        self.split.as_ref()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Rank of a record's observed rating. `Ok(None)` for unrated records.
    pub fn rank_of(&self, index: usize) -> Result<Option<Rank>> {
        match &self.records[index].rating {
            None => Ok(None),
            Some(label) => self
                .scale
                .rank(label)
                .map(Some)
                .ok_or_else(|| Error::UnknownRating {
                    line: index + 2,
                    label: label.clone(),
                }),
        }
    }

    pub fn labeled_indices(&self) -> Vec<usize> {
        (0..self.records.len())
            .filter(|&i| self.records[i].rating.is_some())
            .collect()
    }

    /// Indices used for training: the train split when present, otherwise
    /// every labeled record.
    pub fn training_indices(&self) -> Vec<usize> {
        match &self.split {
            Some(split) => split.train.clone(),
            None => self.labeled_indices(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LoadOptions {
    pub delimiter: u8,
    pub registry: IndicatorRegistry,
    pub years: RangeInclusive<i32>,
    /// When set, a `population` column is required and records below the
    /// threshold are dropped.
    pub min_population: Option<f64>,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            delimiter: b',',
            registry: IndicatorRegistry::world_bank(),
            years: 1900..=2100,
            min_population: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LoadWarning {
    UnknownColumn { column: usize, name: String },
    BelowPopulation { line: usize, country: String },
}

impl std::fmt::Display for LoadWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LoadWarning::UnknownColumn { column, name } => {
                write!(f, "column {column}: ignoring unknown column {name:?}")
            }
            LoadWarning::BelowPopulation { line, country } => {
                write!(
                    f,
                    "line {line}: dropping {country} (population below threshold)"
                )
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Loaded {
    pub dataset: Dataset,
    pub warnings: Vec<LoadWarning>,
}

enum Column {
    Country,
    Year,
    Rating,
    Population,
    Indicator(IndicatorCode),
    Ignored,
}

/// Reads a delimiter-separated table with a header row naming `country`,
/// `year`, optionally `rating`, and indicator codes. Empty cells are missing
/// values.
pub fn load_dataset<R: Read>(
    source: R,
    scale: &RatingScale,
    options: &LoadOptions,
) -> Result<Loaded> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(source);

    let header = reader.headers()?.clone();
    if header.is_empty() || header.iter().all(str::is_empty) {
        return Err(parse_error(1, 1, "missing header row"));
    }

    let mut warnings = Vec::new();
    let mut columns = Vec::with_capacity(header.len());
    let mut indicators = Vec::new();
    for (i, name) in header.iter().enumerate() {
        let lower = name.to_ascii_lowercase();
        let col = match lower.as_str() {
            "country" | "countryid" | "country_id" => Column::Country,
            "year" => Column::Year,
            "rating" => Column::Rating,
            "population" if options.min_population.is_some() => Column::Population,
            _ => match options.registry.resolve(name) {
                Some(code) => {
                    if indicators.contains(code) {
                        return Err(parse_error(1, i + 1, &format!("duplicate column {name:?}")));
                    }
                    indicators.push(code.clone());
                    Column::Indicator(code.clone())
                }
                None => {
                    warnings.push(LoadWarning::UnknownColumn {
                        column: i + 1,
                        name: name.to_owned(),
                    });
                    Column::Ignored
                }
            },
        };
        columns.push(col);
    }
    let has = |pred: fn(&Column) -> bool| columns.iter().any(pred);
    if !has(|c| matches!(c, Column::Country)) {
        return Err(parse_error(1, 1, "header lacks a country column"));
    }
    if !has(|c| matches!(c, Column::Year)) {
        return Err(parse_error(1, 1, "header lacks a year column"));
    }
    if options.min_population.is_some() && !has(|c| matches!(c, Column::Population)) {
        return Err(Error::InvalidConfig(
            "population filtering requires a population column".into(),
        ));
    }

    let mut records = Vec::new();
    let mut seen: HashMap<(String, i32), usize> = HashMap::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map(|p| p.line() as usize).unwrap_or(0);
        let mut record = CountryRecord::new(String::new(), 0);
        let mut year = None;
        let mut population = None;
        for (i, (cell, col)) in row.iter().zip(&columns).enumerate() {
            match col {
                Column::Country => record.country = cell.to_owned(),
                Column::Year => {
                    let y: i32 = cell
                        .parse()
                        .map_err(|_| parse_error(line, i + 1, &format!("invalid year {cell:?}")))?;
                    if !options.years.contains(&y) {
                        return Err(parse_error(
                            line,
                            i + 1,
                            &format!("year {y} outside accepted range"),
                        ));
                    }
                    year = Some(y);
                }
                Column::Rating if !cell.is_empty() => {
                    if scale.rank(cell).is_none() {
                        return Err(Error::UnknownRating {
                            line,
                            label: cell.to_owned(),
                        });
                    }
                    record.rating = Some(cell.to_owned());
                }
                Column::Rating => {}
                Column::Population => population = parse_value(cell, line, i + 1)?,
                Column::Indicator(code) => {
                    if let Some(v) = parse_value(cell, line, i + 1)? {
                        record.values.insert(code.clone(), v);
                    }
                }
                Column::Ignored => {}
            }
        }
        if record.country.is_empty() {
            return Err(parse_error(line, 1, "empty country"));
        }
        record.year = year.ok_or_else(|| parse_error(line, 1, "missing year"))?;
        if let (Some(min), Some(pop)) = (options.min_population, population) {
            if pop < min {
                warnings.push(LoadWarning::BelowPopulation {
                    line,
                    country: record.country.clone(),
                });
                continue;
            }
        }
        let key = (record.country.clone(), record.year);
        if seen.insert(key, line).is_some() {
            return Err(Error::DuplicateRecord {
                country: record.country,
                year: record.year,
            });
        }
        records.push(record);
    }

    Ok(Loaded {
        dataset: Dataset::with_indicators(records, scale.clone(), indicators),
        warnings,
    })
}

fn parse_value(cell: &str, line: usize, column: usize) -> Result<Option<f64>> {
    if cell.is_empty() {
        return Ok(None);
    }
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        _ => Err(parse_error(
            line,
            column,
            &format!("invalid number {cell:?}"),
        )),
    }
}

fn parse_error(line: usize, column: usize, message: &str) -> Error {
    Error::Parse {
        line,
        column,
        message: message.to_owned(),
    }
}

/// Canonical serialization: `country,year,rating` followed by the dataset's
/// indicator columns in order.
pub fn write_dataset<W: Write>(dataset: &Dataset, sink: W, delimiter: u8) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .delimiter(delimiter)
        .from_writer(sink);
    let mut header = vec!["country".to_owned(), "year".to_owned(), "rating".to_owned()];
    header.extend(dataset.indicators.iter().map(|c| c.to_string()));
    writer.write_record(&header)?;
    for r in &dataset.records {
        let mut row = vec![
            r.country.clone(),
            r.year.to_string(),
            r.rating.clone().unwrap_or_default(),
        ];
        row.extend(
            dataset
                .indicators
                .iter()
                .map(|c| r.values.get(c).map(|v| v.to_string()).unwrap_or_default()),
        );
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

/// A data-quality finding. Diagnostics are reported, never auto-corrected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Diagnostic {
    DuplicateKey {
        country: String,
        year: i32,
    },
    UnknownRating {
        country: String,
        year: i32,
        label: String,
    },
    /// Two records that cannot be told apart but carry different labels.
    Contradiction {
        first: String,
        second: String,
        first_label: String,
        second_label: String,
    },
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Diagnostic::DuplicateKey { country, year } => {
                write!(f, "duplicate record {country}/{year}")
            }
            Diagnostic::UnknownRating {
                country,
                year,
                label,
            } => write!(f, "{country}/{year}: unknown rating {label:?}"),
            Diagnostic::Contradiction {
                first,
                second,
                first_label,
                second_label,
            } => write!(
                f,
                "contradiction: {first} ({first_label}) and {second} ({second_label}) are indistinguishable"
            ),
        }
    }
}

/// Checks duplicate keys, out-of-scale ratings, and records with identical
/// indicator values but different ratings.
pub fn validate(dataset: &Dataset) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut seen = HashMap::new();
    for r in &dataset.records {
        if seen.insert((r.country.as_str(), r.year), ()).is_some() {
            out.push(Diagnostic::DuplicateKey {
                country: r.country.clone(),
                year: r.year,
            });
        }
        if let Some(label) = &r.rating {
            if dataset.scale.rank(label).is_none() {
                out.push(Diagnostic::UnknownRating {
                    country: r.country.clone(),
                    year: r.year,
                    label: label.clone(),
                });
            }
        }
    }

    let mut groups: BTreeMap<Vec<(&str, u64)>, Vec<usize>> = BTreeMap::new();
    for (i, r) in dataset.records.iter().enumerate() {
        if r.rating.is_none() {
            continue;
        }
        let key = r
            .values
            .iter()
            .map(|(c, v)| (c.as_str(), v.to_bits()))
            .collect();
        groups.entry(key).or_default().push(i);
    }
    for members in groups.values() {
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                let (ri, rj) = (&dataset.records[i], &dataset.records[j]);
                if ri.rating != rj.rating {
                    out.push(Diagnostic::Contradiction {
                        first: ri.key().to_string(),
                        second: rj.key().to_string(),
                        first_label: ri.rating.clone().unwrap_or_default(),
                        second_label: rj.rating.clone().unwrap_or_default(),
                    });
                }
            }
        }
    }
    out
}

/// Stratified, seeded train/test split of the labeled records. Every class
/// with at least one member contributes at least one training record.
pub fn split_dataset(dataset: &Dataset, train_fraction: f64, seed: u64) -> Result<Dataset> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "train fraction {train_fraction} must lie in (0, 1)"
        )));
    }
    let labeled = dataset.labeled_indices();
    if labeled.len() < 2 {
        return Err(Error::InvalidConfig(
            "splitting needs at least two labeled records".into(),
        ));
    }
    let mut by_class: BTreeMap<(usize, &str), Vec<usize>> = BTreeMap::new();
    for &i in &labeled {
        let label = dataset.records[i].rating.as_deref().unwrap_or_default();
        let order = dataset.scale.rank(label).map_or(usize::MAX, |r| r.0);
        by_class.entry((order, label)).or_default().push(i);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for members in by_class.values_mut() {
        members.shuffle(&mut rng);
        let n = members.len();
        let take = ((train_fraction * n as f64).round() as usize).clamp(1, n);
        train.extend_from_slice(&members[..take]);
        test.extend_from_slice(&members[take..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(dataset.clone().with_split(Split { train, test }))
}
