//! Synthetic fixture generation: panels, event files, and a ground-truth
//! record of the planted generating model.
//!
//! Each healthy country's log fatality level integrates a sinusoidal growth
//! signal, so the s-month change is an exact linear function of the two
//! planted driver columns at month t:
//!
//! ```text
//! g(t)      = a · sin(ωt + ψ)
//! L(t)      = L₀ + Σ_{u<t} g(u)                      (bounded: |L−L₀| ≤ a / 2sin(ω/2))
//! Δ_s(t)    = a·K_s·[cos((s−1)ω/2)·u₁(t) + sin((s−1)ω/2)·u₂(t)]
//! ```
//!
//! with u₁(t) = sin(ωt+ψ), u₂(t) = cos(ωt+ψ) and K_s = sin(sω/2)/sin(ω/2).
//! The panel stores u₁ as the first driver and −u₂ as the second, so the
//! expected regression signs are (+, −) at every step. Observed levels add
//! N(0, σ²/2) noise before being exponentiated into integer counts, which
//! makes every realized delta carry irreducible variance σ² (plus a
//! negligible integer-rounding term).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::month::Month;
use crate::panel::{ContentClass, FeatureMeta, PanelDataset, PanelRow, SourceClass, ValidationReport};

/// Shape of a generated fixture.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixtureSpec {
    /// Countries with a fittable planted model.
    pub healthy_countries: usize,
    /// Countries with constant zero fatalities (routed to the fallback).
    pub degenerate_countries: usize,
    /// Countries with no fatality data at all (skipped entirely).
    pub skipped_countries: usize,
    pub months: usize,
    /// Number of panel feature columns (the event columns come separately
    /// through the event file).
    pub features: usize,
    /// Standard deviation of the irreducible noise on each target delta.
    pub noise_sigma: f64,
    /// Mean events per country-month in the event file.
    pub events_per_month: f64,
    pub seed: u64,
}

impl Default for FixtureSpec {
    fn default() -> Self {
        FixtureSpec {
            healthy_countries: 30,
            degenerate_countries: 0,
            skipped_countries: 0,
            months: 120,
            features: 653,
            noise_sigma: 0.1,
            events_per_month: 3.0,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountryKind {
    Healthy,
    Degenerate,
    Skipped,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlantedDriver {
    pub feature: String,
    /// Expected sign of the fitted coefficient at every step.
    pub expected_sign: i8,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CountryTruth {
    pub country: String,
    pub kind: CountryKind,
    pub drivers: Vec<PlantedDriver>,
    /// Growth amplitude `a` of the planted sinusoid (healthy only).
    pub amplitude: f64,
    pub phase: f64,
}

/// Everything a test needs to verify recovery of the planted model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroundTruth {
    pub seed: u64,
    pub noise_sigma: f64,
    /// Irreducible variance of every step's target delta; back-test MSE of a
    /// correct model converges to this.
    pub irreducible_variance: f64,
    /// Angular frequency of the planted growth cycle.
    pub omega: f64,
    pub countries: Vec<CountryTruth>,
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub panel: PanelDataset,
    pub report: ValidationReport,
    pub metadata: BTreeMap<String, FeatureMeta>,
    pub events_tsv: String,
    pub truth: GroundTruth,
}

const BASE_LEVEL: f64 = 6.0;
const CYCLE_MONTHS: f64 = 24.0;

/// Mirrors the source composition of the 653-variable panel release:
/// (source, weight, content). Counts scale proportionally when `features`
/// differs from 653.
const CLASS_TABLE: [(SourceClass, usize, ContentClass); 7] = [
    (SourceClass::Ged, 48, ContentClass::ViolentEvent),
    (SourceClass::Acled, 8, ContentClass::ViolentEvent),
    (SourceClass::Wdi, 363, ContentClass::Structural),
    (SourceClass::Vdem, 129, ContentClass::Political),
    (SourceClass::Fvp, 51, ContentClass::Structural),
    (SourceClass::Reign, 49, ContentClass::Political),
    (SourceClass::Icgcw, 5, ContentClass::ViolentEvent),
];

fn feature_layout(total: usize) -> Vec<(String, FeatureMeta)> {
    let table_total: usize = CLASS_TABLE.iter().map(|(_, n, _)| n).sum();
    let mut layout = Vec::with_capacity(total);
    for (source, weight, content) in CLASS_TABLE {
        let count = (total * weight).div_euclid(table_total).max(1);
        for i in 0..count {
            if layout.len() == total {
                break;
            }
            layout.push((
                format!("{}_v{:03}", source.to_string().to_lowercase(), i),
                FeatureMeta { source, content },
            ));
        }
    }
    // Proportional rounding can leave a shortfall; pad with extra WDI
    // columns so the requested width is exact.
    let mut extra = 0;
    while layout.len() < total {
        layout.push((
            format!("wdi_x{extra:03}"),
            FeatureMeta {
                source: SourceClass::Wdi,
                content: ContentClass::Structural,
            },
        ));
        extra += 1;
    }
    layout
}

fn country_code(i: usize) -> String {
    let a = (b'A' + (i / 26) as u8) as char;
    let b = (b'A' + (i % 26) as u8) as char;
    format!("{a}{b}")
}

/// Generates a deterministic fixture: same spec, same bytes.
pub fn generate(spec: &FixtureSpec) -> Result<Fixture> {
    if spec.healthy_countries + spec.degenerate_countries + spec.skipped_countries == 0 {
        return Err(Error::Argument("fixture needs at least one country".into()));
    }
    if spec.months < 12 {
        return Err(Error::Argument("fixture needs at least 12 months".into()));
    }
    if spec.features < 4 {
        return Err(Error::Argument("fixture needs at least 4 features".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let layout = feature_layout(spec.features);
    let metadata: BTreeMap<String, FeatureMeta> =
        layout.iter().map(|(n, m)| (n.clone(), *m)).collect();
    let first_month = Month::new(2010, 1).unwrap();
    let omega = 2.0 * std::f64::consts::PI / CYCLE_MONTHS;

    let total = spec.healthy_countries + spec.degenerate_countries + spec.skipped_countries;
    let kinds: Vec<CountryKind> = (0..total)
        .map(|i| {
            if i < spec.healthy_countries {
                CountryKind::Healthy
            } else if i < spec.healthy_countries + spec.degenerate_countries {
                CountryKind::Degenerate
            } else {
                CountryKind::Skipped
            }
        })
        .collect();

    // Choose planted drivers first so no driver column ever receives the
    // missing-cell treatment.
    let mut truths = Vec::with_capacity(total);
    let mut driver_columns: BTreeSet<usize> = BTreeSet::new();
    for (i, kind) in kinds.iter().enumerate() {
        let country = country_code(i);
        let (drivers, amplitude, phase, cols) = if *kind == CountryKind::Healthy {
            let d1 = rng.random_range(0..spec.features);
            let d2 = loop {
                let c = rng.random_range(0..spec.features);
                if c != d1 {
                    break c;
                }
            };
            let amplitude = rng.random_range(0.25..0.45);
            let phase = rng.random_range(0.0..2.0 * std::f64::consts::PI);
            (
                vec![
                    PlantedDriver {
                        feature: layout[d1].0.clone(),
                        expected_sign: 1,
                    },
                    PlantedDriver {
                        feature: layout[d2].0.clone(),
                        expected_sign: -1,
                    },
                ],
                amplitude,
                phase,
                vec![d1, d2],
            )
        } else {
            (Vec::new(), 0.0, 0.0, Vec::new())
        };
        driver_columns.extend(cols);
        truths.push(CountryTruth {
            country,
            kind: *kind,
            drivers,
            amplitude,
            phase,
        });
    }

    let noise = Normal::new(0.0, spec.noise_sigma / 2f64.sqrt()).unwrap();
    let mut rows: Vec<PanelRow> = Vec::with_capacity(total * spec.months);
    for truth in &truths {
        // Per-country feature matrix.
        let mut values = vec![vec![0.0f64; spec.months]; spec.features];
        for (fi, column) in values.iter_mut().enumerate() {
            let driver_slot = truth
                .drivers
                .iter()
                .position(|d| d.feature == layout[fi].0);
            match driver_slot {
                Some(0) => {
                    for (t, v) in column.iter_mut().enumerate() {
                        *v = (omega * t as f64 + truth.phase).sin();
                    }
                }
                Some(_) => {
                    for (t, v) in column.iter_mut().enumerate() {
                        *v = -(omega * t as f64 + truth.phase).cos();
                    }
                }
                None => {
                    // AR(1) noise, unit stationary variance.
                    let phi: f64 = 0.8;
                    let innov = (1.0 - phi * phi).sqrt();
                    let mut prev: f64 = rng.sample(rand_distr::StandardNormal);
                    for (t, v) in column.iter_mut().enumerate() {
                        if t > 0 {
                            let e: f64 = rng.sample(rand_distr::StandardNormal);
                            prev = phi * prev + innov * e;
                        }
                        *v = prev;
                    }
                }
            }
        }

        // Missing-cell texture on a deterministic subset of non-driver
        // columns: some lightly gappy, some so sparse the missing policy
        // must drop them.
        for fi in 0..spec.features {
            if driver_columns.contains(&fi) {
                continue;
            }
            let rate = if fi % 50 == 3 {
                0.3
            } else if fi % 13 == 7 {
                0.1
            } else {
                continue;
            };
            for t in 0..spec.months {
                if rng.random_bool(rate) {
                    values[fi][t] = f64::NAN;
                }
            }
        }

        // Fatalities.
        let fatalities: Vec<Option<u32>> = match truth.kind {
            CountryKind::Skipped => vec![None; spec.months],
            CountryKind::Degenerate => vec![Some(0); spec.months],
            CountryKind::Healthy => {
                let mut level = BASE_LEVEL;
                let mut out = Vec::with_capacity(spec.months);
                for t in 0..spec.months {
                    let observed: f64 = level + noise.sample(&mut rng);
                    let count = (observed.exp() - 1.0).round().max(0.0) as u32;
                    out.push(Some(count));
                    level += truth.amplitude * (omega * t as f64 + truth.phase).sin();
                }
                out
            }
        };

        for t in 0..spec.months {
            rows.push(PanelRow {
                country: truth.country.clone(),
                month: first_month + t as i32,
                fatalities: fatalities[t],
                features: (0..spec.features).map(|fi| values[fi][t]).collect(),
            });
        }
    }

    let feature_names: Vec<String> = layout.iter().map(|(n, _)| n.clone()).collect();
    let (panel, report) = PanelDataset::from_parts(rows, feature_names, &metadata)?;

    // Event file: pure noise relative to the fatality process.
    let mut events_tsv = String::new();
    let mut event_id: u64 = 1_000_000;
    let poisson = Poisson::new(spec.events_per_month.max(1e-9)).unwrap();
    for truth in &truths {
        for t in 0..spec.months {
            let month = first_month + t as i32;
            let n_events = poisson.sample(&mut rng) as usize;
            for _ in 0..n_events {
                let day = rng.random_range(1..=28);
                let root: u8 = rng.random_range(1..=20);
                let goldstein = (rng.random_range(-100..=100) as f64) / 10.0;
                let quad: u8 = rng.random_range(1..=4);
                let mentions: u32 = rng.random_range(1..=12);
                let is_root = if rng.random_bool(0.9) { 1 } else { 0 };
                let date = format!("{:04}{:02}{:02}", month.year(), month.month(), day);
                let line = format!(
                    "{event_id}\t{date}\t{}\t{root}\t{goldstein}\t{quad}\t{mentions}\t{is_root}\n",
                    truth.country
                );
                events_tsv.push_str(&line);
                // Occasional duplicate coverage of the same event.
                if rng.random_bool(0.05) {
                    events_tsv.push_str(&line);
                }
                event_id += 1;
            }
        }
    }

    Ok(Fixture {
        panel,
        report,
        metadata,
        events_tsv,
        truth: GroundTruth {
            seed: spec.seed,
            noise_sigma: spec.noise_sigma,
            irreducible_variance: spec.noise_sigma * spec.noise_sigma,
            omega,
            countries: truths,
        },
    })
}

impl Fixture {
    /// Writes panel.csv, metadata.csv, events.tsv and ground_truth.json.
    pub fn write_to_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
        let write = |name: &str, bytes: &[u8]| -> Result<()> {
            let path = dir.join(name);
            std::fs::write(&path, bytes).map_err(|e| Error::io(path.display().to_string(), e))
        };
        let mut panel_csv = Vec::new();
        self.panel
            .write_csv(&mut panel_csv)
            .map_err(|e| Error::io("panel.csv", e))?;
        write("panel.csv", &panel_csv)?;
        let mut meta_csv = Vec::new();
        self.panel
            .write_metadata_csv(&mut meta_csv)
            .map_err(|e| Error::io("metadata.csv", e))?;
        write("metadata.csv", &meta_csv)?;
        write("events.tsv", self.events_tsv.as_bytes())?;
        let truth = serde_json::to_string_pretty(&self.truth)
            .map_err(|e| Error::Schema(format!("ground truth serialization: {e}")))?;
        write("ground_truth.json", truth.as_bytes())?;
        Ok(())
    }

    /// The exact expected coefficient of each planted driver at step `s`
    /// (useful for sign checks and for reasoning about recovery).
    pub fn expected_driver_coefficients(&self, country: &str, s: u8) -> Option<(f64, f64)> {
        let truth = self
            .truth
            .countries
            .iter()
            .find(|c| c.country == country)?;
        if truth.kind != CountryKind::Healthy {
            return None;
        }
        let omega = self.truth.omega;
        let k_s = (s as f64 * omega / 2.0).sin() / (omega / 2.0).sin();
        let rot = (s as f64 - 1.0) * omega / 2.0;
        Some((
            truth.amplitude * k_s * rot.cos(),
            -(truth.amplitude * k_s * rot.sin()),
        ))
    }
}

/// Writes a small descriptive summary of a generated fixture.
pub fn describe(spec: &FixtureSpec) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "fixture: {} healthy + {} degenerate + {} skipped countries, {} months, {} features, \
         noise sigma {}, seed {}",
        spec.healthy_countries,
        spec.degenerate_countries,
        spec.skipped_countries,
        spec.months,
        spec.features,
        spec.noise_sigma,
        spec.seed
    );
    s
}
