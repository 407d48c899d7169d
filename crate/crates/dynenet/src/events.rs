//! Event-data feature construction: parse raw geolocated event rows and
//! aggregate them into 100 monthly index series per country (20 CAMEO
//! macro-categories × 5 weights).
//!
//! The five weights per category are `m` (sum of mentions), `e` (distinct
//! event count), `eg` (Goldstein-weighted), `eq` (quad-class-weighted) and
//! `egq` (Goldstein × quad-class), each summed per country-month.

use std::collections::{BTreeMap, HashSet};
use std::io::{BufRead, BufReader, Read};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::month::Month;
use crate::panel::{ContentClass, FeatureMeta, PanelDataset, SourceClass};

pub const N_CATEGORIES: usize = 20;
pub const N_WEIGHTS: usize = 5;
pub const WEIGHT_NAMES: [&str; N_WEIGHTS] = ["m", "e", "eg", "eq", "egq"];

/// One geolocated event row.
#[derive(Debug, Clone, PartialEq)]
pub struct EventRecord {
    pub global_event_id: u64,
    pub date: Month,
    pub day: u32,
    pub country: String,
    /// CAMEO 2-digit macro-category, 1..=20.
    pub root_code: u8,
    /// Goldstein conflict-cooperation score, in [-10, 10].
    pub goldstein: f64,
    /// 1=verbal coop, 2=material coop, 3=verbal conflict, 4=material conflict.
    pub quad_class: u8,
    pub num_mentions: u32,
    pub is_root_event: bool,
}

/// Column positions in the tab-separated export.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EventColumns {
    pub global_event_id: usize,
    /// YYYYMMDD integer date.
    pub date: usize,
    pub country: usize,
    pub root_code: usize,
    pub goldstein: usize,
    pub quad_class: usize,
    pub num_mentions: usize,
    pub is_root_event: usize,
}

impl EventColumns {
    /// Positions in the GDELT 1.0 daily event export.
    pub fn gdelt_v1() -> Self {
        EventColumns {
            global_event_id: 0,
            date: 1,
            is_root_event: 25,
            root_code: 28,
            quad_class: 29,
            goldstein: 30,
            num_mentions: 31,
            country: 51,
        }
    }

    /// Compact eight-column layout used by the fixture generator:
    /// `id date country root_code goldstein quad_class num_mentions is_root`.
    pub fn compact() -> Self {
        EventColumns {
            global_event_id: 0,
            date: 1,
            country: 2,
            root_code: 3,
            goldstein: 4,
            quad_class: 5,
            num_mentions: 6,
            is_root_event: 7,
        }
    }

    fn max_index(&self) -> usize {
        [
            self.global_event_id,
            self.date,
            self.country,
            self.root_code,
            self.goldstein,
            self.quad_class,
            self.num_mentions,
            self.is_root_event,
        ]
        .into_iter()
        .max()
        .unwrap()
    }
}

impl Default for EventColumns {
    fn default() -> Self {
        EventColumns::gdelt_v1()
    }
}

/// A rejected input row with the reason it was dropped.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RejectedRow {
    pub line: usize,
    pub reason: String,
}

/// Result of parsing an event stream: valid records plus an account of every
/// rejected row.
#[derive(Debug, Clone)]
pub struct ParsedEvents {
    pub records: Vec<EventRecord>,
    pub rejected: Vec<RejectedRow>,
}

fn parse_yyyymmdd(s: &str) -> Option<(Month, u32)> {
    if s.len() != 8 || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let year: i32 = s[0..4].parse().ok()?;
    let month: u32 = s[4..6].parse().ok()?;
    let day: u32 = s[6..8].parse().ok()?;
    if !(1..=31).contains(&day) {
        return None;
    }
    Month::new(year, month).ok().map(|m| (m, day))
}

/// Parses a tab-separated event export. Invalid rows are counted and
/// reported, never silently dropped.
pub fn parse_event_records<R: Read>(reader: R, columns: &EventColumns) -> Result<ParsedEvents> {
    let reader = BufReader::new(reader);
    let need = columns.max_index() + 1;
    let mut records = Vec::new();
    let mut rejected = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let mut reject = |reason: String| {
            rejected.push(RejectedRow {
                line: line_no,
                reason,
            });
        };
        if fields.len() < need {
            reject(format!("too few columns ({} < {})", fields.len(), need));
            continue;
        }
        let Ok(global_event_id) = fields[columns.global_event_id].parse::<u64>() else {
            reject(format!(
                "invalid event id '{}'",
                fields[columns.global_event_id]
            ));
            continue;
        };
        let Some((date, day)) = parse_yyyymmdd(fields[columns.date]) else {
            reject(format!("unparseable date '{}'", fields[columns.date]));
            continue;
        };
        let country = fields[columns.country].trim();
        if country.is_empty() {
            reject("empty country code".into());
            continue;
        }
        let Ok(root_code) = fields[columns.root_code].parse::<u8>() else {
            reject(format!(
                "invalid root code '{}'",
                fields[columns.root_code]
            ));
            continue;
        };
        if !(1..=N_CATEGORIES as u8).contains(&root_code) {
            reject(format!("root code {root_code} out of range 01..20"));
            continue;
        }
        let Ok(goldstein) = fields[columns.goldstein].parse::<f64>() else {
            reject(format!(
                "invalid goldstein '{}'",
                fields[columns.goldstein]
            ));
            continue;
        };
        if !goldstein.is_finite() || !(-10.0..=10.0).contains(&goldstein) {
            reject("goldstein out of range".into());
            continue;
        }
        let Ok(quad_class) = fields[columns.quad_class].parse::<u8>() else {
            reject(format!(
                "invalid quad class '{}'",
                fields[columns.quad_class]
            ));
            continue;
        };
        if !(1..=4).contains(&quad_class) {
            reject("quad_class out of range".into());
            continue;
        }
        let Ok(num_mentions) = fields[columns.num_mentions].parse::<u32>() else {
            reject(format!(
                "invalid mention count '{}'",
                fields[columns.num_mentions]
            ));
            continue;
        };
        if num_mentions == 0 {
            reject("num_mentions must be >= 1".into());
            continue;
        }
        let is_root_event = match fields[columns.is_root_event] {
            "1" => true,
            "0" => false,
            other => {
                reject(format!("invalid is_root flag '{other}'"));
                continue;
            }
        };
        records.push(EventRecord {
            global_event_id,
            date,
            day,
            country: country.to_string(),
            root_code,
            goldstein,
            quad_class,
            num_mentions,
            is_root_event,
        });
    }
    Ok(ParsedEvents { records, rejected })
}

/// Keeps only lead-paragraph (root) events, and of rows sharing a global
/// event id keeps the first in stream order.
pub fn filter_root_dedupe(records: Vec<EventRecord>) -> Vec<EventRecord> {
    let mut seen = HashSet::new();
    records
        .into_iter()
        .filter(|r| r.is_root_event && seen.insert(r.global_event_id))
        .collect()
}

/// How the quad-class weight enters the `eq`/`egq` indexes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadWeightScheme {
    /// Published weights 1..4 as-is.
    #[default]
    Paper,
    /// Weights 1 and 2 traded so the scale runs from material cooperation
    /// to material conflict.
    Swapped,
    /// Only conflict-related classes (3, 4) carry weight; cooperation
    /// events contribute zero to eq/egq.
    ConflictOnly,
}

impl QuadWeightScheme {
    fn weight(self, quad_class: u8) -> f64 {
        match self {
            QuadWeightScheme::Paper => quad_class as f64,
            QuadWeightScheme::Swapped => match quad_class {
                1 => 2.0,
                2 => 1.0,
                q => q as f64,
            },
            QuadWeightScheme::ConflictOnly => match quad_class {
                3 | 4 => quad_class as f64,
                _ => 0.0,
            },
        }
    }
}

/// The five index values for one (country, month, category) cell.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IndexCell {
    /// Sum of media mentions.
    pub m: f64,
    /// Count of distinct events.
    pub e: f64,
    /// Sum of Goldstein scores.
    pub eg: f64,
    /// Sum of quad-class weights.
    pub eq: f64,
    /// Sum of Goldstein × quad-class.
    pub egq: f64,
}

impl IndexCell {
    fn add_event(&mut self, r: &EventRecord, scheme: QuadWeightScheme) {
        let q = scheme.weight(r.quad_class);
        self.m += r.num_mentions as f64;
        self.e += 1.0;
        self.eg += r.goldstein;
        self.eq += q;
        self.egq += r.goldstein * q;
    }

    pub fn values(&self) -> [f64; N_WEIGHTS] {
        [self.m, self.e, self.eg, self.eq, self.egq]
    }
}

/// The 100 monthly series per country.
#[derive(Debug, Clone, Default)]
pub struct EventIndexSet {
    /// (country, month) -> 20 category cells.
    cells: BTreeMap<(String, Month), [IndexCell; N_CATEGORIES]>,
}

impl EventIndexSet {
    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn cell(&self, country: &str, month: Month, category: u8) -> IndexCell {
        self.cells
            .get(&(country.to_string(), month))
            .map(|cats| cats[category as usize - 1])
            .unwrap_or_default()
    }

    pub fn iter(
        &self,
    ) -> impl Iterator<Item = (&(String, Month), &[IndexCell; N_CATEGORIES])> {
        self.cells.iter()
    }

    pub fn countries(&self) -> Vec<String> {
        let mut cs: Vec<String> = self.cells.keys().map(|(c, _)| c.clone()).collect();
        cs.dedup();
        cs
    }

    /// Column name for (1-based category, weight index).
    pub fn column_name(category: usize, weight: usize) -> String {
        format!("gdelt_{:02}_{}", category, WEIGHT_NAMES[weight])
    }

    /// All 100 column names in category-major order.
    pub fn column_names() -> Vec<String> {
        let mut names = Vec::with_capacity(N_CATEGORIES * N_WEIGHTS);
        for cat in 1..=N_CATEGORIES {
            for w in 0..N_WEIGHTS {
                names.push(Self::column_name(cat, w));
            }
        }
        names
    }

    /// Serializes the indexes as CSV `country,month,gdelt_01_m,...`.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        write!(w, "country,month")?;
        for name in Self::column_names() {
            write!(w, ",{name}")?;
        }
        writeln!(w)?;
        for ((country, month), cats) in &self.cells {
            write!(w, "{country},{month}")?;
            for cell in cats {
                for v in cell.values() {
                    write!(w, ",{v}")?;
                }
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Aggregates already filtered and deduped records into monthly indexes.
pub fn build_monthly_indexes(
    records: &[EventRecord],
    scheme: QuadWeightScheme,
) -> EventIndexSet {
    let mut set = EventIndexSet::default();
    for r in records {
        let cats = set
            .cells
            .entry((r.country.clone(), r.date))
            .or_insert_with(|| [IndexCell::default(); N_CATEGORIES]);
        cats[r.root_code as usize - 1].add_event(r, scheme);
    }
    set
}

/// Merges the 100 index columns into a panel. Country-months with no events
/// get explicit zeros; categories 18-20 (assault, fight, unconventional
/// violence) are classed as violent events, the rest as nonviolent.
pub fn merge_into_panel(panel: &PanelDataset, indexes: &EventIndexSet) -> Result<PanelDataset> {
    let months = panel.months();
    let (first, last) = (months[0], *months.last().unwrap());
    for (country, month) in indexes.cells.keys() {
        if panel.country_index(country).is_none() {
            return Err(Error::Argument(format!(
                "event country '{country}' not present in panel"
            )));
        }
        if *month < first || *month > last {
            return Err(Error::Argument(format!(
                "event month {month} outside panel range {first}..{last}"
            )));
        }
    }

    let names = EventIndexSet::column_names();
    for name in &names {
        if panel.feature_index(name).is_some() {
            return Err(Error::Schema(format!(
                "panel already contains event column '{name}'"
            )));
        }
    }
    let metas: Vec<FeatureMeta> = (1..=N_CATEGORIES)
        .flat_map(|cat| {
            let content = if cat >= 18 {
                ContentClass::ViolentEvent
            } else {
                ContentClass::NonviolentEvent
            };
            std::iter::repeat_n(
                FeatureMeta {
                    source: SourceClass::Gdelt,
                    content,
                },
                N_WEIGHTS,
            )
        })
        .collect();

    let column_values: Vec<Array2<f64>> = panel
        .countries()
        .iter()
        .map(|country| {
            let mut block = Array2::zeros((months.len(), names.len()));
            for (mi, month) in months.iter().enumerate() {
                if let Some(cats) = indexes.cells.get(&(country.clone(), *month)) {
                    for (cat_idx, cell) in cats.iter().enumerate() {
                        for (w, v) in cell.values().into_iter().enumerate() {
                            block[[mi, cat_idx * N_WEIGHTS + w]] = v;
                        }
                    }
                }
            }
            block
        })
        .collect();

    Ok(panel.with_columns(names, metas, column_values))
}
