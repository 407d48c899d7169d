//! Country-month panel data: loading, validation, target construction, and
//! lead-k design matrices.
//!
//! The panel file is a CSV with header `country,month,fatalities,<features...>`
//! plus a sidecar metadata CSV `feature,source_class,content_class`. Missing
//! values are empty fields; internally they are stored as NaN (features) or
//! `None` (fatality counts) so that absence is never conflated with zero.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::month::Month;

/// Which upstream dataset a feature column came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SourceClass {
    Ged,
    Acled,
    Wdi,
    Vdem,
    Fvp,
    Reign,
    Icgcw,
    Gdelt,
}

impl SourceClass {
    pub const ALL: [SourceClass; 8] = [
        SourceClass::Ged,
        SourceClass::Acled,
        SourceClass::Wdi,
        SourceClass::Vdem,
        SourceClass::Fvp,
        SourceClass::Reign,
        SourceClass::Icgcw,
        SourceClass::Gdelt,
    ];
}

impl fmt::Display for SourceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SourceClass::Ged => "GED",
            SourceClass::Acled => "ACLED",
            SourceClass::Wdi => "WDI",
            SourceClass::Vdem => "VDEM",
            SourceClass::Fvp => "FVP",
            SourceClass::Reign => "REIGN",
            SourceClass::Icgcw => "ICGCW",
            SourceClass::Gdelt => "GDELT",
        };
        f.write_str(s)
    }
}

impl FromStr for SourceClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "GED" => Ok(SourceClass::Ged),
            "ACLED" => Ok(SourceClass::Acled),
            "WDI" => Ok(SourceClass::Wdi),
            "VDEM" => Ok(SourceClass::Vdem),
            "FVP" => Ok(SourceClass::Fvp),
            "REIGN" => Ok(SourceClass::Reign),
            "ICGCW" => Ok(SourceClass::Icgcw),
            "GDELT" => Ok(SourceClass::Gdelt),
            other => Err(Error::Schema(format!("unknown source class '{other}'"))),
        }
    }
}

/// What kind of signal a feature column carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContentClass {
    ViolentEvent,
    NonviolentEvent,
    Structural,
    Political,
}

impl fmt::Display for ContentClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ContentClass::ViolentEvent => "violent-event",
            ContentClass::NonviolentEvent => "nonviolent-event",
            ContentClass::Structural => "structural",
            ContentClass::Political => "political",
        };
        f.write_str(s)
    }
}

impl FromStr for ContentClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "violent-event" => Ok(ContentClass::ViolentEvent),
            "nonviolent-event" => Ok(ContentClass::NonviolentEvent),
            "structural" => Ok(ContentClass::Structural),
            "political" => Ok(ContentClass::Political),
            other => Err(Error::Schema(format!("unknown content class '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureMeta {
    pub source: SourceClass,
    pub content: ContentClass,
}

impl FeatureMeta {
    /// The "source-content" code used when aggregating predictors.
    pub fn code(&self) -> String {
        format!("{}-{}", self.source, self.content)
    }
}

/// Immutable country × month covariate panel with fatality counts.
///
/// Feature values are stored per country as a dense months × features matrix
/// with NaN marking missing cells. The month axis is the same contiguous
/// global timeline for every country; countries whose files cover a narrower
/// range simply have missing cells outside it.
#[derive(Debug, Clone)]
pub struct PanelDataset {
    countries: Vec<String>,
    months: Vec<Month>,
    feature_names: Vec<String>,
    feature_meta: Vec<FeatureMeta>,
    /// Per country: months.len() × feature_names.len(), NaN = missing.
    values: Vec<Array2<f64>>,
    /// Per country: one entry per month, None = missing.
    fatalities: Vec<Vec<Option<u32>>>,
}

/// Summary emitted by `load_panel`, serialized as the validation JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub rows: usize,
    pub countries: usize,
    pub months: usize,
    pub features: usize,
    pub first_month: Month,
    pub last_month: Month,
    pub missing_feature_cells: usize,
    pub missing_feature_fraction: f64,
    pub missing_fatality_cells: usize,
    pub features_by_source: BTreeMap<String, usize>,
    /// Metadata rows that matched no panel column (kept, but suspicious).
    pub unused_metadata: Vec<String>,
}

impl PanelDataset {
    pub fn countries(&self) -> &[String] {
        &self.countries
    }

    pub fn months(&self) -> &[Month] {
        &self.months
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn feature_meta(&self) -> &[FeatureMeta] {
        &self.feature_meta
    }

    pub fn country_index(&self, country: &str) -> Option<usize> {
        self.countries.iter().position(|c| c == country)
    }

    pub fn feature_index(&self, feature: &str) -> Option<usize> {
        self.feature_names.iter().position(|f| f == feature)
    }

    fn month_offset(&self, month: Month) -> Option<usize> {
        let delta = month.since(self.months[0]);
        if delta < 0 || delta as usize >= self.months.len() {
            None
        } else {
            Some(delta as usize)
        }
    }

    /// Feature value at (country index, month, feature index); NaN if missing
    /// or out of range.
    pub fn value(&self, country: usize, month: Month, feature: usize) -> f64 {
        match self.month_offset(month) {
            Some(m) => self.values[country][[m, feature]],
            None => f64::NAN,
        }
    }

    pub fn fatalities(&self, country: usize, month: Month) -> Option<u32> {
        self.month_offset(month)
            .and_then(|m| self.fatalities[country][m])
    }

    /// Months × features view for one country (NaN = missing).
    pub fn country_values(&self, country: usize) -> &Array2<f64> {
        &self.values[country]
    }

    /// Constructs a panel from in-memory parts; used by the fixture generator
    /// and by `merge_into_panel`. Validates the same invariants as loading.
    pub fn from_parts(
        mut rows: Vec<PanelRow>,
        feature_names: Vec<String>,
        metadata: &BTreeMap<String, FeatureMeta>,
    ) -> Result<(PanelDataset, ValidationReport)> {
        if rows.is_empty() {
            return Err(Error::Schema("panel has no data rows".into()));
        }
        let mut feature_meta = Vec::with_capacity(feature_names.len());
        for name in &feature_names {
            match metadata.get(name) {
                Some(meta) => feature_meta.push(*meta),
                None => {
                    return Err(Error::Schema(format!(
                        "feature column '{name}' has no metadata row"
                    )))
                }
            }
        }
        let unused_metadata: Vec<String> = metadata
            .keys()
            .filter(|k| !feature_names.contains(k))
            .cloned()
            .collect();

        rows.sort_by(|a, b| (&a.country, a.month).cmp(&(&b.country, b.month)));
        let mut countries: Vec<String> = rows.iter().map(|r| r.country.clone()).collect();
        countries.dedup();

        // Per-country months must be strictly increasing and gapless.
        let mut by_country: BTreeMap<&str, Vec<&PanelRow>> = BTreeMap::new();
        for row in &rows {
            by_country.entry(&row.country).or_default().push(row);
        }
        for (country, cr) in &by_country {
            for pair in cr.windows(2) {
                let step = pair[1].month.since(pair[0].month);
                if step == 0 {
                    return Err(Error::Schema(format!(
                        "country {country}: duplicate month {}",
                        pair[0].month
                    )));
                }
                if step > 1 {
                    return Err(Error::Schema(format!(
                        "country {country}: month gap between {} and {}",
                        pair[0].month, pair[1].month
                    )));
                }
            }
        }

        let first = rows.iter().map(|r| r.month).min().unwrap();
        let last = rows.iter().map(|r| r.month).max().unwrap();
        let n_months = (last.since(first) + 1) as usize;
        let months: Vec<Month> = (0..n_months).map(|i| first + i as i32).collect();

        let n_feat = feature_names.len();
        let mut values = vec![Array2::from_elem((n_months, n_feat), f64::NAN); countries.len()];
        let mut fatalities = vec![vec![None; n_months]; countries.len()];
        let mut missing_feature_cells = 0usize;
        let mut missing_fatality_cells = 0usize;
        let n_rows = rows.len();

        for row in rows {
            let ci = countries.binary_search(&row.country).unwrap();
            let mi = row.month.since(first) as usize;
            match row.fatalities {
                Some(f) => fatalities[ci][mi] = Some(f),
                None => missing_fatality_cells += 1,
            }
            for (fi, v) in row.features.into_iter().enumerate() {
                if v.is_nan() {
                    missing_feature_cells += 1;
                }
                values[ci][[mi, fi]] = v;
            }
        }

        let mut features_by_source = BTreeMap::new();
        for meta in &feature_meta {
            *features_by_source
                .entry(meta.source.to_string())
                .or_insert(0) += 1;
        }

        let report = ValidationReport {
            rows: n_rows,
            countries: countries.len(),
            months: n_months,
            features: n_feat,
            first_month: first,
            last_month: last,
            missing_feature_cells,
            missing_feature_fraction: missing_feature_cells as f64
                / (n_rows.max(1) * n_feat.max(1)) as f64,
            missing_fatality_cells,
            features_by_source,
            unused_metadata,
        };

        Ok((
            PanelDataset {
                countries,
                months,
                feature_names,
                feature_meta,
                values,
                fatalities,
            },
            report,
        ))
    }

    /// Serializes the panel back to the load CSV format. Every country gets a
    /// row for every global month; missing values are empty fields.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        write!(w, "country,month,fatalities")?;
        for name in &self.feature_names {
            write!(w, ",{name}")?;
        }
        writeln!(w)?;
        for (ci, country) in self.countries.iter().enumerate() {
            for (mi, month) in self.months.iter().enumerate() {
                write!(w, "{country},{month},")?;
                if let Some(f) = self.fatalities[ci][mi] {
                    write!(w, "{f}")?;
                }
                for fi in 0..self.feature_names.len() {
                    let v = self.values[ci][[mi, fi]];
                    if v.is_nan() {
                        write!(w, ",")?;
                    } else {
                        write!(w, ",{v}")?;
                    }
                }
                writeln!(w)?;
            }
        }
        Ok(())
    }

    /// Serializes the metadata sidecar.
    pub fn write_metadata_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "feature,source_class,content_class")?;
        for (name, meta) in self.feature_names.iter().zip(&self.feature_meta) {
            writeln!(w, "{name},{},{}", meta.source, meta.content)?;
        }
        Ok(())
    }

    /// Returns a copy extended with new feature columns. `columns` supplies
    /// (name, meta, per-country per-month values aligned to this panel).
    pub(crate) fn with_columns(
        &self,
        names: Vec<String>,
        metas: Vec<FeatureMeta>,
        column_values: Vec<Array2<f64>>,
    ) -> PanelDataset {
        let n_new = names.len();
        let n_old = self.feature_names.len();
        let mut feature_names = self.feature_names.clone();
        feature_names.extend(names);
        let mut feature_meta = self.feature_meta.clone();
        feature_meta.extend(metas);
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(ci, old)| {
                let mut merged = Array2::from_elem((self.months.len(), n_old + n_new), f64::NAN);
                merged.slice_mut(ndarray::s![.., ..n_old]).assign(old);
                merged
                    .slice_mut(ndarray::s![.., n_old..])
                    .assign(&column_values[ci]);
                merged
            })
            .collect();
        PanelDataset {
            countries: self.countries.clone(),
            months: self.months.clone(),
            feature_names,
            feature_meta,
            values,
            fatalities: self.fatalities.clone(),
        }
    }
}

/// One parsed data row of the panel CSV.
#[derive(Debug, Clone)]
pub struct PanelRow {
    pub country: String,
    pub month: Month,
    pub fatalities: Option<u32>,
    /// Aligned with the header's feature columns; NaN = missing.
    pub features: Vec<f64>,
}

/// Parses the metadata sidecar `feature,source_class,content_class`.
pub fn load_metadata<R: Read>(reader: R) -> Result<BTreeMap<String, FeatureMeta>> {
    let mut rdr = csv::ReaderBuilder::new().from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Schema(format!("metadata header: {e}")))?
        .clone();
    let expected = ["feature", "source_class", "content_class"];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(Error::Schema(format!(
            "metadata header must be 'feature,source_class,content_class', got '{}'",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut meta = BTreeMap::new();
    for (i, record) in rdr.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        if record.len() != 3 {
            return Err(Error::Parse {
                line,
                message: format!("expected 3 fields, got {}", record.len()),
            });
        }
        let feature = record[0].to_string();
        let source: SourceClass = record[1].parse()?;
        let content: ContentClass = record[2].parse()?;
        if meta
            .insert(feature.clone(), FeatureMeta { source, content })
            .is_some()
        {
            return Err(Error::Schema(format!(
                "duplicate metadata row for feature '{feature}'"
            )));
        }
    }
    Ok(meta)
}

/// Loads and validates a panel CSV plus its metadata sidecar.
pub fn load_panel(
    panel_path: &Path,
    metadata_path: &Path,
) -> Result<(PanelDataset, ValidationReport)> {
    let meta_file = std::fs::File::open(metadata_path)
        .map_err(|e| Error::io(metadata_path.display().to_string(), e))?;
    let metadata = load_metadata(meta_file)?;
    let panel_file = std::fs::File::open(panel_path)
        .map_err(|e| Error::io(panel_path.display().to_string(), e))?;
    load_panel_from(panel_file, &metadata)
}

/// Loads a panel from any reader, given already-parsed metadata.
pub fn load_panel_from<R: Read>(
    reader: R,
    metadata: &BTreeMap<String, FeatureMeta>,
) -> Result<(PanelDataset, ValidationReport)> {
    let mut rdr = csv::ReaderBuilder::new().from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Schema(format!("panel header: {e}")))?
        .clone();
    let cols: Vec<&str> = headers.iter().collect();
    if cols.len() < 4 || cols[0] != "country" || cols[1] != "month" || cols[2] != "fatalities" {
        return Err(Error::Schema(
            "panel header must start with 'country,month,fatalities' and have at least one \
             feature column"
                .into(),
        ));
    }
    let feature_names: Vec<String> = cols[3..].iter().map(|s| s.to_string()).collect();

    let mut rows = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        if record.len() != cols.len() {
            return Err(Error::Parse {
                line,
                message: format!("expected {} fields, got {}", cols.len(), record.len()),
            });
        }
        let country = record[0].to_string();
        if country.is_empty() {
            return Err(Error::Parse {
                line,
                message: "empty country field".into(),
            });
        }
        let month: Month = record[1].parse().map_err(|_| Error::Parse {
            line,
            message: format!("invalid month '{}'", &record[1]),
        })?;
        let fatalities = if record[2].is_empty() {
            None
        } else {
            let f: i64 = record[2].parse().map_err(|_| Error::Parse {
                line,
                message: format!("invalid fatality count '{}'", &record[2]),
            })?;
            if f < 0 {
                return Err(Error::Parse {
                    line,
                    message: format!("negative fatality count {f}"),
                });
            }
            Some(f as u32)
        };
        let mut features = Vec::with_capacity(feature_names.len());
        for (j, field) in record.iter().skip(3).enumerate() {
            if field.is_empty() {
                features.push(f64::NAN);
            } else {
                let v: f64 = field.parse().map_err(|_| Error::Parse {
                    line,
                    message: format!("invalid value '{}' in column '{}'", field, feature_names[j]),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        line,
                        message: format!("non-finite value in column '{}'", feature_names[j]),
                    });
                }
                features.push(v);
            }
        }
        rows.push(PanelRow {
            country,
            month,
            fatalities,
            features,
        });
    }

    PanelDataset::from_parts(rows, feature_names, metadata)
}

/// Per-country change in log fatalities over a fixed horizon.
#[derive(Debug, Clone)]
pub struct TargetSeries {
    pub country: String,
    pub step: u8,
    /// (month t, ln(1+F_{t+s}) − ln(1+F_t)) for every t where both counts
    /// are present.
    pub values: Vec<(Month, f64)>,
}

impl TargetSeries {
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value_at(&self, month: Month) -> Option<f64> {
        self.values
            .iter()
            .find(|(m, _)| *m == month)
            .map(|(_, v)| *v)
    }
}

pub const STEP_MIN: u8 = 2;
pub const STEP_MAX: u8 = 7;

fn check_step(s: u8) -> Result<()> {
    if !(STEP_MIN..=STEP_MAX).contains(&s) {
        return Err(Error::Argument(format!(
            "step {s} out of range {STEP_MIN}..={STEP_MAX}"
        )));
    }
    Ok(())
}

/// The s-month change in ln(1 + fatalities) for one country.
pub fn compute_target(panel: &PanelDataset, country: &str, s: u8) -> Result<TargetSeries> {
    check_step(s)?;
    let ci = panel
        .country_index(country)
        .ok_or_else(|| Error::Argument(format!("country '{country}' not in panel")))?;
    let mut values = Vec::new();
    for &t in panel.months() {
        let (Some(now), Some(later)) = (panel.fatalities(ci, t), panel.fatalities(ci, t + s as i32))
        else {
            continue;
        };
        let delta = if later == now {
            0.0
        } else {
            (1.0 + later as f64).ln() - (1.0 + now as f64).ln()
        };
        values.push((t, delta));
    }
    Ok(TargetSeries {
        country: country.to_string(),
        step: s,
        values,
    })
}

/// How missing covariate cells are handled when building a design matrix.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MissingPolicy {
    /// Columns missing more than this fraction of the training window are
    /// dropped.
    pub drop_threshold: f64,
    /// Minimum usable rows to attempt a fit; below this the country is
    /// routed to the fallback.
    pub min_months: usize,
}

impl Default for MissingPolicy {
    fn default() -> Self {
        MissingPolicy {
            drop_threshold: 0.2,
            min_months: 24,
        }
    }
}

/// A column removed while building a design matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DroppedColumn {
    pub name: String,
    pub missing_fraction: f64,
}

/// Covariates at month t paired with the target delta realized at t+k.
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    pub x: Array2<f64>,
    pub y: Array1<f64>,
    pub k: u8,
    pub row_months: Vec<Month>,
    /// Names of the surviving columns, aligned with `x`.
    pub columns: Vec<String>,
    /// Indexes of the surviving columns in the panel's feature list.
    pub column_indexes: Vec<usize>,
    pub dropped: Vec<DroppedColumn>,
    /// Imputed covariate row at `latest_month`, for prediction.
    pub latest_row: Vec<f64>,
    /// Last month with an observed fatality count (the forecast anchor).
    pub latest_month: Month,
}

/// Builds the lead-k design matrix for one country.
///
/// Rows are the months t where both F_t and F_{t+k} are observed, restricted
/// to `cutoff` if given (only pairs whose target is realized by `cutoff` are
/// kept — the expanding-window back-test uses this). Columns that are missing
/// more than `policy.drop_threshold` of the window are dropped; the rest are
/// forward-filled, with leading gaps back-filled from the first observation.
pub fn build_design(
    panel: &PanelDataset,
    country: &str,
    k: u8,
    policy: &MissingPolicy,
    cutoff: Option<Month>,
) -> Result<DesignMatrix> {
    check_step(k)?;
    let ci = panel
        .country_index(country)
        .ok_or_else(|| Error::Argument(format!("country '{country}' not in panel")))?;
    let target = compute_target(panel, country, k)?;
    let rows: Vec<(Month, f64)> = target
        .values
        .into_iter()
        .filter(|(t, _)| match cutoff {
            Some(c) => *t + k as i32 <= c,
            None => true,
        })
        .collect();
    if rows.len() < policy.min_months {
        return Err(Error::Degenerate(format!(
            "country {country}: {} usable rows at step {k}, need {}",
            rows.len(),
            policy.min_months
        )));
    }

    let anchor = match cutoff {
        Some(c) => c,
        None => *panel
            .months()
            .iter()
            .filter(|&&m| panel.fatalities(ci, m).is_some())
            .next_back()
            .ok_or_else(|| Error::Degenerate(format!("country {country}: no fatality data")))?,
    };
    if panel.fatalities(ci, anchor).is_none() {
        return Err(Error::Degenerate(format!(
            "country {country}: no fatality count at anchor month {anchor}"
        )));
    }

    let n = rows.len();
    let all = panel.country_values(ci);
    let months = panel.months();
    let month0 = months[0];
    let row_offsets: Vec<usize> = rows.iter().map(|(t, _)| t.since(month0) as usize).collect();
    let anchor_offset = anchor.since(month0) as usize;

    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for fi in 0..panel.feature_names().len() {
        let missing = row_offsets
            .iter()
            .filter(|&&mo| all[[mo, fi]].is_nan())
            .count();
        let fraction = missing as f64 / n as f64;
        if fraction > policy.drop_threshold {
            dropped.push(DroppedColumn {
                name: panel.feature_names()[fi].clone(),
                missing_fraction: fraction,
            });
        } else {
            kept.push(fi);
        }
    }
    if kept.is_empty() {
        return Err(Error::Degenerate(format!(
            "country {country}: no usable feature columns"
        )));
    }

    // Impute each kept column over the country's whole timeline: last
    // observation carried forward, then leading gaps take the first
    // observed value.
    let fill_limit = anchor_offset.max(*row_offsets.last().unwrap());
    let mut filled = Array2::zeros((fill_limit + 1, kept.len()));
    for (cj, &fi) in kept.iter().enumerate() {
        let mut last = f64::NAN;
        for mo in 0..=fill_limit {
            let v = all[[mo, fi]];
            if !v.is_nan() {
                last = v;
            }
            filled[[mo, cj]] = last;
        }
        if filled[[0, cj]].is_nan() {
            let first = (0..=fill_limit)
                .map(|mo| all[[mo, fi]])
                .find(|v| !v.is_nan());
            if let Some(first) = first {
                for mo in 0..=fill_limit {
                    if filled[[mo, cj]].is_nan() {
                        filled[[mo, cj]] = first;
                    } else {
                        break;
                    }
                }
            }
        }
    }

    let mut x = Array2::zeros((n, kept.len()));
    let mut y = Array1::zeros(n);
    for (ri, ((_, delta), &mo)) in rows.iter().zip(&row_offsets).enumerate() {
        y[ri] = *delta;
        for cj in 0..kept.len() {
            x[[ri, cj]] = filled[[mo, cj]];
        }
    }
    let latest_row: Vec<f64> = (0..kept.len())
        .map(|cj| filled[[anchor_offset, cj]])
        .collect();

    Ok(DesignMatrix {
        x,
        y,
        k,
        row_months: rows.iter().map(|(t, _)| *t).collect(),
        columns: kept
            .iter()
            .map(|&fi| panel.feature_names()[fi].clone())
            .collect(),
        column_indexes: kept,
        dropped,
        latest_row,
        latest_month: anchor,
    })
}
