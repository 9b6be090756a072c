use std::borrow::Borrow;
use std::collections::HashSet;
use std::fmt;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Short symbol identifying an economic indicator, e.g. `G` or `PPP`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IndicatorCode(String);

impl IndicatorCode {
    pub fn new(code: impl Into<String>) -> Self {
        IndicatorCode(code.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl Borrow<str> for IndicatorCode {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for IndicatorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for IndicatorCode {
    fn from(s: &str) -> Self {
        IndicatorCode(s.to_owned())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Indicator {
    pub code: IndicatorCode,
    pub description: String,
    pub unit: String,
    /// Threshold magnitudes outside this range are flagged as suspicious when
    /// importing published decision trees.
    pub plausible: Option<RangeInclusive<f64>>,
}

impl Indicator {
    pub fn new(code: &str, description: &str, unit: &str) -> Self {
        Indicator {
            code: code.into(),
            description: description.to_owned(),
            unit: unit.to_owned(),
            plausible: None,
        }
    }

    fn with_plausible(mut self, range: RangeInclusive<f64>) -> Self {
        self.plausible = Some(range);
        self
    }
}

/// An ordered set of indicators with unique codes.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorRegistry {
    indicators: Vec<Indicator>,
}

impl IndicatorRegistry {
    pub fn new(indicators: Vec<Indicator>) -> Result<Self> {
        let mut seen = HashSet::new();
        for ind in &indicators {
            if ind.code.as_str().is_empty() {
                return Err(Error::InvalidRegistry("empty indicator code".into()));
            }
            if !seen.insert(ind.code.clone()) {
                return Err(Error::InvalidRegistry(format!(
                    "duplicate indicator code {:?}",
                    ind.code.as_str()
                )));
            }
        }
        Ok(IndicatorRegistry { indicators })
    }

    /// The twenty World Bank indicators used for sovereign ratings.
    pub fn world_bank() -> Self {
        let pct_gdp = "% of GDP";
        let indicators = vec![
            Indicator::new("C", "Cash surplus/deficit", pct_gdp).with_plausible(-25.0..=25.0),
            Indicator::new("EX", "Exports of goods and services", pct_gdp),
            Indicator::new("G", "GDP per capita", "current US$"),
            Indicator::new("IM", "Imports of goods and services", pct_gdp),
            Indicator::new("RE", "Revenue, excluding grants", pct_gdp),
            Indicator::new("SD", "Short-term debt", "% of total reserves"),
            Indicator::new(
                "TD",
                "Total debt service",
                "% of exports of goods, services and primary income",
            ),
            Indicator::new("CG", "Central government debt, total", pct_gdp),
            Indicator::new("E", "Expense", pct_gdp),
            Indicator::new("GG", "GDP per capita growth", "annual %"),
            Indicator::new("GS", "Gross savings", pct_gdp),
            Indicator::new("IV", "Industry, value added", pct_gdp),
            Indicator::new("I", "Inflation, consumer prices", "annual %"),
            Indicator::new(
                "PPP",
                "PPP conversion factor, GDP",
                "LCU per international $",
            ),
            Indicator::new("R", "Total reserves (includes gold)", "current US$")
                .with_plausible(1.0e6..=1.0e14),
            Indicator::new("U", "Urban population", "% of total"),
            Indicator::new("PG", "Population growth", "annual %"),
            Indicator::new("PA", "Population ages 0-14", "% of total"),
            Indicator::new(
                "UN",
                "Unemployment, male (modelled ILO estimate)",
                "% of male labor force",
            ),
            Indicator::new("M", "Mobile cellular subscriptions", "per 100 people"),
        ];
        IndicatorRegistry { indicators }
    }

    pub fn get(&self, code: &str) -> Option<&Indicator> {
        self.indicators.iter().find(|i| i.code.as_str() == code)
    }

    /// Case-insensitive lookup returning the registered spelling.
    pub fn resolve(&self, code: &str) -> Option<&IndicatorCode> {
        self.indicators
            .iter()
            .find(|i| i.code.as_str().eq_ignore_ascii_case(code))
            .map(|i| &i.code)
    }

    pub fn contains(&self, code: &str) -> bool {
        self.get(code).is_some()
    }

    pub fn position(&self, code: &str) -> Option<usize> {
        self.indicators.iter().position(|i| i.code.as_str() == code)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Indicator> {
        self.indicators.iter()
    }

    pub fn len(&self) -> usize {
        self.indicators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indicators.is_empty()
    }
}

impl Default for IndicatorRegistry {
    fn default() -> Self {
        Self::world_bank()
    }
}
