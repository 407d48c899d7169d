//! Per-country, per-step model fitting over an expanding window, with a
//! running-mean fallback for series the solver cannot handle, and the
//! assembly of six-step forecast sets.

use ndarray::{Array1, Array2};
use rayon::prelude::*;
use serde::Serialize;

use crate::elasticnet::{cross_validate, ElasticNetProblem, FitResult, SolverSettings};
use crate::error::{Error, Result};
use crate::month::Month;
use crate::panel::{
    build_design, compute_target, DesignMatrix, MissingPolicy, PanelDataset, SourceClass,
    TargetSeries, STEP_MAX, STEP_MIN,
};

/// Everything a fit needs to know; the CLI builds this from its config file.
#[derive(Debug, Clone, Serialize)]
pub struct FitConfig {
    pub alpha: f64,
    pub solver: SolverSettings,
    pub deviance_floor: f64,
    pub cv_folds: usize,
    pub policy: MissingPolicy,
    /// Mask every GDELT-source column before fitting (the ablation variant).
    pub exclude_gdelt: bool,
    /// Targets with variance below this are routed to the fallback.
    pub variance_floor: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            alpha: 0.5,
            solver: SolverSettings::default(),
            deviance_floor: 0.5,
            cv_folds: 5,
            policy: MissingPolicy::default(),
            exclude_gdelt: false,
            variance_floor: 1e-10,
        }
    }
}

/// Why a country-step was routed to the running-mean fallback.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FallbackReason {
    TooFewRows,
    ZeroVariance,
    ScarceCovariates,
    NonConvergence,
}

#[derive(Debug, Clone, Serialize)]
pub struct FallbackInfo {
    pub reason: FallbackReason,
    /// Arithmetic mean of all past target deltas (0 when none exist).
    pub mean: f64,
}

/// Either a cross-validated fit or the fallback marker; never both.
#[derive(Debug, Clone, Serialize)]
pub enum FitOutcome {
    Fitted(FitResult),
    Fallback(FallbackInfo),
}

/// One country × step model.
#[derive(Debug, Clone, Serialize)]
pub struct CountryModel {
    pub country: String,
    pub step: u8,
    pub outcome: FitOutcome,
    /// Nonzero predictors (name, original-scale coefficient); empty for
    /// fallbacks and all-zero solutions.
    pub selected: Vec<(String, f64)>,
    /// Last month whose data informed the model; forecasts refer to
    /// `trained_through + s`.
    pub trained_through: Month,
}

impl CountryModel {
    pub fn is_fitted(&self) -> bool {
        matches!(self.outcome, FitOutcome::Fitted(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Dynenet,
    RunningMean,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Dynenet => f.write_str("dynenet"),
            Method::RunningMean => f.write_str("running_mean"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StepForecast {
    pub step: u8,
    /// The calendar month the delta refers to (trained_through + step).
    pub month: Month,
    /// Predicted change in ln(1 + fatalities), in log-fatality units.
    pub delta: f64,
    pub method: Method,
}

/// Six-step forecast for one country.
#[derive(Debug, Clone, Serialize)]
pub struct ForecastSet {
    pub country: String,
    pub steps: Vec<StepForecast>,
    pub cumulative_delta: f64,
}

/// Per-country result of the full pipeline: the six models plus the
/// forecast set (absent when the country was skipped for lack of data).
#[derive(Debug, Clone, Serialize)]
pub struct CountryOutcome {
    pub country: String,
    pub models: Vec<CountryModel>,
    pub forecast: Option<ForecastSet>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CountryStatus {
    Fitted,
    Fallback,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct CountryReport {
    pub country: String,
    pub status: CountryStatus,
    pub steps_fitted: usize,
    pub fallback_reasons: Vec<String>,
}

/// Run accounting mirroring the fitted / fallback / skipped partition.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub fitted: usize,
    pub fallback: usize,
    pub skipped: usize,
    pub countries: Vec<CountryReport>,
}

/// Mean of all past target deltas; the fallback prediction. Empty history
/// predicts no change.
pub fn fallback_running_mean(target: &TargetSeries) -> f64 {
    if target.values.is_empty() {
        return 0.0;
    }
    target.values.iter().map(|(_, v)| v).sum::<f64>() / target.values.len() as f64
}

fn population_variance(y: &Array1<f64>) -> f64 {
    let n = y.len() as f64;
    let mean = y.sum() / n;
    y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
}

/// Removes GDELT-source columns from a built design (the ablation mask).
fn mask_gdelt(panel: &PanelDataset, design: &mut DesignMatrix) {
    let keep: Vec<usize> = (0..design.columns.len())
        .filter(|&j| {
            panel.feature_meta()[design.column_indexes[j]].source != SourceClass::Gdelt
        })
        .collect();
    if keep.len() == design.columns.len() {
        return;
    }
    let mut x = Array2::zeros((design.x.nrows(), keep.len()));
    for (nj, &j) in keep.iter().enumerate() {
        for i in 0..design.x.nrows() {
            x[[i, nj]] = design.x[[i, j]];
        }
    }
    design.x = x;
    design.latest_row = keep.iter().map(|&j| design.latest_row[j]).collect();
    design.columns = keep.iter().map(|&j| design.columns[j].clone()).collect();
    design.column_indexes = keep.iter().map(|&j| design.column_indexes[j]).collect();
}

pub(crate) struct PreparedFit {
    pub model: CountryModel,
    /// Imputed covariates at the anchor month, aligned with the fit's
    /// surviving columns (fallbacks have none).
    pub latest_row: Vec<f64>,
}

fn fallback_model(
    panel: &PanelDataset,
    country: &str,
    k: u8,
    reason: FallbackReason,
    cutoff: Option<Month>,
) -> Result<PreparedFit> {
    let target = compute_target(panel, country, k)?;
    let values: Vec<(Month, f64)> = target
        .values
        .into_iter()
        .filter(|(t, _)| match cutoff {
            Some(c) => *t + k as i32 <= c,
            None => true,
        })
        .collect();
    let ci = panel.country_index(country).unwrap();
    let anchor = match cutoff {
        Some(c) => c,
        None => panel
            .months()
            .iter()
            .rev()
            .find(|&&m| panel.fatalities(ci, m).is_some())
            .copied()
            .unwrap_or(*panel.months().last().unwrap()),
    };
    let truncated = TargetSeries {
        country: country.to_string(),
        step: k,
        values,
    };
    Ok(PreparedFit {
        model: CountryModel {
            country: country.to_string(),
            step: k,
            outcome: FitOutcome::Fallback(FallbackInfo {
                reason,
                mean: fallback_running_mean(&truncated),
            }),
            selected: Vec::new(),
            trained_through: anchor,
        },
        latest_row: Vec::new(),
    })
}

pub(crate) fn fit_country_inner(
    panel: &PanelDataset,
    country: &str,
    k: u8,
    config: &FitConfig,
    cutoff: Option<Month>,
) -> Result<PreparedFit> {
    if panel.country_index(country).is_none() {
        return Err(Error::Argument(format!("country '{country}' not in panel")));
    }
    let mut design = match build_design(panel, country, k, &config.policy, cutoff) {
        Ok(d) => d,
        Err(Error::Degenerate(_)) => {
            return fallback_model(panel, country, k, FallbackReason::TooFewRows, cutoff)
        }
        Err(e) => return Err(e),
    };
    if config.exclude_gdelt {
        mask_gdelt(panel, &mut design);
    }
    if population_variance(&design.y) < config.variance_floor {
        return fallback_model(panel, country, k, FallbackReason::ZeroVariance, cutoff);
    }
    let problem = match ElasticNetProblem::with_settings(
        design.x.clone(),
        design.y.clone(),
        config.alpha,
        &config.solver,
    ) {
        Ok(p) => p,
        Err(Error::Degenerate(_)) => {
            return fallback_model(panel, country, k, FallbackReason::ScarceCovariates, cutoff)
        }
        Err(e) => return Err(e),
    };
    let fit = match cross_validate(&problem, config.deviance_floor, config.cv_folds) {
        Ok(f) => f,
        Err(Error::Degenerate(_)) => {
            return fallback_model(panel, country, k, FallbackReason::TooFewRows, cutoff)
        }
        Err(e) => return Err(e),
    };
    if !fit.any_converged {
        return fallback_model(panel, country, k, FallbackReason::NonConvergence, cutoff);
    }
    let selected: Vec<(String, f64)> = fit
        .coefficients
        .nonzero_set()
        .into_iter()
        .map(|j| (design.columns[j].clone(), fit.coefficients.beta[j]))
        .collect();
    Ok(PreparedFit {
        model: CountryModel {
            country: country.to_string(),
            step: k,
            outcome: FitOutcome::Fitted(fit),
            selected,
            trained_through: design.latest_month,
        },
        latest_row: design.latest_row,
    })
}

/// Fits one country at one lead; degenerate data becomes a fallback marker,
/// never an error.
pub fn fit_country(
    panel: &PanelDataset,
    country: &str,
    k: u8,
    config: &FitConfig,
) -> Result<CountryModel> {
    fit_country_inner(panel, country, k, config, None).map(|p| p.model)
}

/// Applies a prepared model to its anchor covariate row.
pub(crate) fn predict_prepared(prepared: &PreparedFit) -> (f64, Method) {
    match &prepared.model.outcome {
        FitOutcome::Fitted(fit) => (
            fit.coefficients.predict_row(&prepared.latest_row),
            Method::Dynenet,
        ),
        FitOutcome::Fallback(info) => (info.mean, Method::RunningMean),
    }
}

/// Fits all six steps for one country and applies each model to the last
/// observed covariate row. `forecast` is None when the country has no
/// usable target history at any step.
pub fn forecast_steps(
    panel: &PanelDataset,
    country: &str,
    config: &FitConfig,
) -> Result<CountryOutcome> {
    let mut models = Vec::with_capacity((STEP_MAX - STEP_MIN + 1) as usize);
    let mut steps = Vec::new();
    let mut any_history = false;
    for s in STEP_MIN..=STEP_MAX {
        if !compute_target(panel, country, s)?.is_empty() {
            any_history = true;
        }
        let prepared = fit_country_inner(panel, country, s, config, None)?;
        let (delta, method) = predict_prepared(&prepared);
        steps.push(StepForecast {
            step: s,
            month: prepared.model.trained_through + s as i32,
            delta,
            method,
        });
        models.push(prepared.model);
    }
    let forecast = if any_history {
        Some(ForecastSet {
            country: country.to_string(),
            cumulative_delta: steps.iter().map(|s| s.delta).sum(),
            steps,
        })
    } else {
        None
    };
    Ok(CountryOutcome {
        country: country.to_string(),
        models,
        forecast,
    })
}

/// Fits every country × step in parallel and reduces the run report in
/// country order.
pub fn fit_all(
    panel: &PanelDataset,
    config: &FitConfig,
) -> Result<(Vec<CountryOutcome>, RunReport)> {
    let outcomes: Vec<CountryOutcome> = panel
        .countries()
        .par_iter()
        .map(|country| forecast_steps(panel, country, config))
        .collect::<Result<_>>()?;
    let mut report = RunReport {
        fitted: 0,
        fallback: 0,
        skipped: 0,
        countries: Vec::with_capacity(outcomes.len()),
    };
    for outcome in &outcomes {
        let steps_fitted = outcome.models.iter().filter(|m| m.is_fitted()).count();
        let status = if outcome.forecast.is_none() {
            report.skipped += 1;
            CountryStatus::Skipped
        } else if steps_fitted > 0 {
            report.fitted += 1;
            CountryStatus::Fitted
        } else {
            report.fallback += 1;
            CountryStatus::Fallback
        };
        let mut reasons: Vec<String> = outcome
            .models
            .iter()
            .filter_map(|m| match &m.outcome {
                FitOutcome::Fallback(info) => Some(format!("{:?}", info.reason)),
                FitOutcome::Fitted(_) => None,
            })
            .collect();
        reasons.dedup();
        report.countries.push(CountryReport {
            country: outcome.country.clone(),
            status,
            steps_fitted,
            fallback_reasons: reasons,
        });
    }
    Ok((outcomes, report))
}

/// Forecast CSV: `country,month,step,delta,method`, ordered by country and
/// step. Skipped countries emit nothing.
pub fn write_forecasts_csv<W: std::io::Write>(
    outcomes: &[CountryOutcome],
    mut w: W,
) -> std::io::Result<()> {
    writeln!(w, "country,month,step,delta,method")?;
    for outcome in outcomes {
        if let Some(set) = &outcome.forecast {
            for step in &set.steps {
                writeln!(
                    w,
                    "{},{},{},{},{}",
                    set.country, step.month, step.step, step.delta, step.method
                )?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, CountryKind, FixtureSpec};
    use crate::panel::load_panel_from;
    use approx::assert_abs_diff_eq;
    use std::collections::BTreeMap;
    use std::str::FromStr;

    fn quick_config() -> FitConfig {
        FitConfig {
            solver: SolverSettings {
                n_lambda: 60,
                ..Default::default()
            },
            policy: MissingPolicy {
                min_months: 18,
                ..Default::default()
            },
            ..Default::default()
        }
    }

    fn meta_one(name: &str) -> BTreeMap<String, crate::panel::FeatureMeta> {
        [(
            name.to_string(),
            crate::panel::FeatureMeta {
                source: SourceClass::Wdi,
                content: crate::panel::ContentClass::Structural,
            },
        )]
        .into()
    }

    #[test]
    fn running_mean_hand_cases() {
        let mk = |vals: &[f64]| TargetSeries {
            country: "KE".into(),
            step: 2,
            values: vals
                .iter()
                .enumerate()
                .map(|(i, v)| (Month(i as i32), *v))
                .collect(),
        };
        assert_abs_diff_eq!(fallback_running_mean(&mk(&[3.5, 3.5, 3.5])), 3.5);
        assert_abs_diff_eq!(fallback_running_mean(&mk(&[1.0, 2.0, 3.0])), 2.0);
        assert_abs_diff_eq!(fallback_running_mean(&mk(&[])), 0.0);
    }

    #[test]
    fn constant_zero_fatalities_fall_back() {
        let mut csv = String::from("country,month,fatalities,f1\n");
        for m in 0..40 {
            let month = Month::from_str("2015-01").unwrap() + m;
            csv.push_str(&format!("KE,{month},0,{}\n", (m as f64 * 0.7).sin()));
        }
        let (panel, _) = load_panel_from(csv.as_bytes(), &meta_one("f1")).unwrap();
        let model = fit_country(&panel, "KE", 2, &quick_config()).unwrap();
        match model.outcome {
            FitOutcome::Fallback(info) => {
                assert_eq!(info.reason, FallbackReason::ZeroVariance);
                assert_eq!(info.mean, 0.0);
            }
            _ => panic!("expected fallback"),
        }
        assert!(model.selected.is_empty());
    }

    #[test]
    fn short_history_falls_back() {
        let mut csv = String::from("country,month,fatalities,f1\n");
        for m in 0..10 {
            let month = Month::from_str("2015-01").unwrap() + m;
            csv.push_str(&format!("KE,{month},{},{}\n", m * 2 + 1, m as f64));
        }
        let (panel, _) = load_panel_from(csv.as_bytes(), &meta_one("f1")).unwrap();
        let model = fit_country(&panel, "KE", 2, &FitConfig::default()).unwrap();
        match model.outcome {
            FitOutcome::Fallback(info) => assert_eq!(info.reason, FallbackReason::TooFewRows),
            _ => panic!("expected fallback"),
        }
    }

    #[test]
    fn planted_country_recovers_drivers() {
        let spec = FixtureSpec {
            healthy_countries: 1,
            degenerate_countries: 0,
            skipped_countries: 0,
            months: 100,
            features: 30,
            noise_sigma: 0.05,
            events_per_month: 0.0,
            seed: 21,
        };
        let fixture = fixtures::generate(&spec).unwrap();
        let truth = &fixture.truth.countries[0];
        let model = fit_country(&fixture.panel, &truth.country, 3, &quick_config()).unwrap();
        assert!(model.is_fitted());
        let names: Vec<&str> = model.selected.iter().map(|(n, _)| n.as_str()).collect();
        for driver in &truth.drivers {
            assert!(
                names.contains(&driver.feature.as_str()),
                "driver {} not selected in {names:?}",
                driver.feature
            );
            let coef = model
                .selected
                .iter()
                .find(|(n, _)| *n == driver.feature)
                .unwrap()
                .1;
            assert_eq!(coef.signum() as i8, driver.expected_sign);
        }
    }

    #[test]
    fn noiseless_identity_prediction_tracks_last_driver_value() {
        // One country per step, each built so that the step-s delta equals
        // the single feature exactly; the fitted model applied to the last
        // covariate row must reproduce it within 0.05.
        for s in [2u8, 4, 7] {
            let months = 90usize;
            let mut rng_state = 0.37f64;
            let mut x1 = vec![0.0f64; months];
            for v in x1.iter_mut() {
                rng_state = (rng_state * 997.0 + 0.618).fract();
                *v = (rng_state - 0.5) * 0.5;
            }
            // Chain the level so L(t+s) = L(t) + x1(t): residues mod s evolve
            // independently, which keeps every step-s delta exact.
            let mut level = vec![0.0f64; months];
            for t in 0..months {
                level[t] = if t < s as usize {
                    8.0 + 0.01 * t as f64
                } else {
                    level[t - s as usize] + x1[t - s as usize]
                };
            }
            let mut csv = String::from("country,month,fatalities,x1,n1,n2\n");
            for t in 0..months {
                let month = Month::from_str("2012-01").unwrap() + t as i32;
                let f = (level[t].exp() - 1.0).round().max(0.0) as u64;
                let n1 = ((t * 7 % 13) as f64) / 13.0 - 0.5;
                let n2 = ((t * 11 % 17) as f64) / 17.0 - 0.5;
                csv.push_str(&format!("CC,{month},{f},{},{n1},{n2}\n", x1[t]));
            }
            let meta: BTreeMap<String, crate::panel::FeatureMeta> = ["x1", "n1", "n2"]
                .into_iter()
                .map(|n| {
                    (
                        n.to_string(),
                        crate::panel::FeatureMeta {
                            source: SourceClass::Wdi,
                            content: crate::panel::ContentClass::Structural,
                        },
                    )
                })
                .collect();
            let (panel, _) = load_panel_from(csv.as_bytes(), &meta).unwrap();
            let outcome = forecast_steps(&panel, "CC", &quick_config()).unwrap();
            let set = outcome.forecast.unwrap();
            let fc = set.steps.iter().find(|st| st.step == s).unwrap();
            assert_eq!(fc.method, Method::Dynenet);
            let last_x1 = x1[months - 1];
            assert!(
                (fc.delta - last_x1).abs() < 0.05,
                "step {s}: prediction {} vs last x1 {last_x1}",
                fc.delta
            );
        }
    }

    #[test]
    fn flat_history_gives_six_equal_running_means() {
        let mut csv = String::from("country,month,fatalities,f1\n");
        for m in 0..50 {
            let month = Month::from_str("2015-01").unwrap() + m;
            csv.push_str(&format!("KE,{month},7,{}\n", (m as f64 * 0.3).cos()));
        }
        let (panel, _) = load_panel_from(csv.as_bytes(), &meta_one("f1")).unwrap();
        let outcome = forecast_steps(&panel, "KE", &quick_config()).unwrap();
        let set = outcome.forecast.unwrap();
        assert_eq!(set.steps.len(), 6);
        for st in &set.steps {
            assert_eq!(st.method, Method::RunningMean);
            assert_eq!(st.delta, 0.0);
        }
        assert_abs_diff_eq!(
            set.cumulative_delta,
            set.steps.iter().map(|s| s.delta).sum::<f64>(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn forecast_months_follow_trained_through() {
        let mut csv = String::from("country,month,fatalities,f1\n");
        for m in 0..40 {
            let month = Month::from_str("2015-01").unwrap() + m;
            csv.push_str(&format!("KE,{month},3,{}\n", m as f64 * 0.1));
        }
        let (panel, _) = load_panel_from(csv.as_bytes(), &meta_one("f1")).unwrap();
        let outcome = forecast_steps(&panel, "KE", &quick_config()).unwrap();
        let last: Month = Month::from_str("2018-04").unwrap(); // month index 39
        for (st, model) in outcome
            .forecast
            .as_ref()
            .unwrap()
            .steps
            .iter()
            .zip(&outcome.models)
        {
            assert_eq!(model.trained_through, last);
            assert_eq!(st.month, last + st.step as i32);
        }
    }

    #[test]
    fn no_leakage_in_training_rows() {
        let spec = FixtureSpec {
            healthy_countries: 1,
            degenerate_countries: 0,
            skipped_countries: 0,
            months: 80,
            features: 10,
            noise_sigma: 0.05,
            events_per_month: 0.0,
            seed: 8,
        };
        let fixture = fixtures::generate(&spec).unwrap();
        let country = &fixture.truth.countries[0].country;
        for k in STEP_MIN..=STEP_MAX {
            let d = build_design(&fixture.panel, country, k, &MissingPolicy::default(), None)
                .unwrap();
            for t in &d.row_months {
                assert!(*t + k as i32 <= d.latest_month);
            }
        }
    }

    #[test]
    fn fit_all_three_way_accounting() {
        let spec = FixtureSpec {
            healthy_countries: 3,
            degenerate_countries: 2,
            skipped_countries: 0,
            months: 80,
            features: 20,
            noise_sigma: 0.05,
            events_per_month: 0.0,
            seed: 33,
        };
        let fixture = fixtures::generate(&spec).unwrap();
        let (outcomes, report) = fit_all(&fixture.panel, &quick_config()).unwrap();
        assert_eq!(report.fitted, 3);
        assert_eq!(report.fallback, 2);
        assert_eq!(report.skipped, 0);
        assert_eq!(outcomes.len(), 5);
        for (outcome, truth) in outcomes.iter().zip(&fixture.truth.countries) {
            match truth.kind {
                CountryKind::Healthy => assert!(outcome.models.iter().any(|m| m.is_fitted())),
                _ => assert!(outcome.models.iter().all(|m| !m.is_fitted())),
            }
        }
    }

    #[test]
    fn skipped_country_emits_no_forecast() {
        let spec = FixtureSpec {
            healthy_countries: 1,
            degenerate_countries: 0,
            skipped_countries: 1,
            months: 60,
            features: 10,
            noise_sigma: 0.05,
            events_per_month: 0.0,
            seed: 4,
        };
        let fixture = fixtures::generate(&spec).unwrap();
        let (outcomes, report) = fit_all(&fixture.panel, &quick_config()).unwrap();
        assert_eq!(report.skipped, 1);
        let skipped = outcomes
            .iter()
            .find(|o| {
                fixture
                    .truth
                    .countries
                    .iter()
                    .any(|c| c.kind == CountryKind::Skipped && c.country == o.country)
            })
            .unwrap();
        assert!(skipped.forecast.is_none());
    }

    #[test]
    fn rerun_is_bit_identical() {
        let spec = FixtureSpec {
            healthy_countries: 2,
            degenerate_countries: 1,
            skipped_countries: 0,
            months: 70,
            features: 15,
            noise_sigma: 0.05,
            events_per_month: 0.0,
            seed: 12,
        };
        let fixture = fixtures::generate(&spec).unwrap();
        let (a, _) = fit_all(&fixture.panel, &quick_config()).unwrap();
        let (b, _) = fit_all(&fixture.panel, &quick_config()).unwrap();
        let mut csv_a = Vec::new();
        let mut csv_b = Vec::new();
        write_forecasts_csv(&a, &mut csv_a).unwrap();
        write_forecasts_csv(&b, &mut csv_b).unwrap();
        assert_eq!(csv_a, csv_b);
    }

    #[test]
    fn all_skipped_input_reports_zeros() {
        // A panel must have rows, so the empty-pipeline case is a single
        // skipped country: no forecasts, zero fitted/fallback counts.
        let spec = FixtureSpec {
            healthy_countries: 0,
            degenerate_countries: 0,
            skipped_countries: 1,
            months: 24,
            features: 5,
            noise_sigma: 0.05,
            events_per_month: 0.0,
            seed: 3,
        };
        let fixture = fixtures::generate(&spec).unwrap();
        let (outcomes, report) = fit_all(&fixture.panel, &quick_config()).unwrap();
        assert_eq!(report.fitted + report.fallback, 0);
        assert_eq!(report.skipped, 1);
        let mut csv = Vec::new();
        write_forecasts_csv(&outcomes, &mut csv).unwrap();
        assert_eq!(
            String::from_utf8(csv).unwrap(),
            "country,month,step,delta,method\n"
        );
    }
}
