//! Back-testing and forecast metrics: MSE, TADDA with two ε rules,
//! efficiency ratios against a LASSO benchmark, and the data-ablation loss
//! from removing event columns.

use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::forecaster::{fit_country_inner, predict_prepared, FitConfig, Method};
use crate::month::Month;
use crate::panel::{PanelDataset, SourceClass, STEP_MAX, STEP_MIN};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Mse,
    TaddaA,
    TaddaB,
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Metric::Mse => f.write_str("mse"),
            Metric::TaddaA => f.write_str("tadda_a"),
            Metric::TaddaB => f.write_str("tadda_b"),
        }
    }
}

/// Either one country or the cross-country average.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Scope {
    Country(String),
    Average,
}

impl std::fmt::Display for Scope {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scope::Country(c) => f.write_str(c),
            Scope::Average => f.write_str("AVERAGE"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricValue {
    pub metric: Metric,
    pub step: u8,
    pub scope: Scope,
    pub value: f64,
}

impl MetricValue {
    pub fn new(metric: Metric, step: u8, scope: Scope, value: f64) -> Self {
        MetricValue {
            metric,
            step,
            scope,
            value,
        }
    }
}

/// Mean squared error.
pub fn mse(y: &[f64], f: &[f64]) -> Result<f64> {
    if y.len() != f.len() {
        return Err(Error::Argument(format!(
            "length mismatch: {} vs {}",
            y.len(),
            f.len()
        )));
    }
    if y.is_empty() {
        return Err(Error::Argument("mse of empty vectors".into()));
    }
    Ok(y.iter()
        .zip(f)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / y.len() as f64)
}

/// How the direction indicator treats zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum SignConvention {
    /// sign(0) = +; mismatch iff (y ≥ 0) differs from (f ≥ 0).
    #[default]
    ZeroPositive,
    /// Three-way signum; zero matches only zero.
    ThreeWay,
}

fn signs_disagree(y: f64, f: f64, convention: SignConvention) -> bool {
    match convention {
        SignConvention::ZeroPositive => (y >= 0.0) != (f >= 0.0),
        SignConvention::ThreeWay => y.signum() != f.signum() && (y != 0.0 || f != 0.0),
    }
}

/// Targeted absolute distance with direction augmentation:
/// (1/N) Σ |y−f| + |f| · 1[sign mismatch] · 1[|y−f| > ε].
pub fn tadda(y: &[f64], f: &[f64], epsilon: f64) -> Result<f64> {
    tadda_with(y, f, epsilon, SignConvention::default())
}

pub fn tadda_with(
    y: &[f64],
    f: &[f64],
    epsilon: f64,
    convention: SignConvention,
) -> Result<f64> {
    if y.len() != f.len() {
        return Err(Error::Argument(format!(
            "length mismatch: {} vs {}",
            y.len(),
            f.len()
        )));
    }
    if y.is_empty() {
        return Err(Error::Argument("tadda of empty vectors".into()));
    }
    if epsilon < 0.0 {
        return Err(Error::Argument("epsilon must be >= 0".into()));
    }
    let total: f64 = y
        .iter()
        .zip(f)
        .map(|(&yi, &fi)| {
            let dist = (yi - fi).abs();
            let penalty = if signs_disagree(yi, fi, convention) && dist > epsilon {
                fi.abs()
            } else {
                0.0
            };
            dist + penalty
        })
        .sum();
    Ok(total / y.len() as f64)
}

/// TADDA-A tolerance: the sample standard deviation (n−1 denominator) of the
/// realized step-k differences pooled over the evaluation window.
pub fn tadda_epsilon_a(actuals: &[f64]) -> Result<f64> {
    if actuals.len() < 2 {
        return Err(Error::Argument(format!(
            "need at least 2 realized differences, got {}",
            actuals.len()
        )));
    }
    let n = actuals.len() as f64;
    let mean = actuals.iter().sum::<f64>() / n;
    let var = actuals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    Ok(var.sqrt())
}

/// TADDA-B tolerance: |z_α| · sd / √n with α defaulting to 0.995. The
/// magnitude of the quantile is used; a literal z_{1−α} at α = 0.995 would
/// be negative, which cannot serve as a distance tolerance.
pub fn tadda_epsilon_b(actuals: &[f64], alpha: f64) -> Result<f64> {
    if !(0.5..1.0).contains(&alpha) {
        return Err(Error::Argument(format!("alpha {alpha} outside [0.5, 1)")));
    }
    let sd = tadda_epsilon_a(actuals)?;
    let z = Normal::standard().inverse_cdf(alpha).abs();
    Ok(z * sd / (actuals.len() as f64).sqrt())
}

fn check_comparable(a: &MetricValue, b: &MetricValue) -> Result<()> {
    if a.metric != b.metric || a.step != b.step || a.scope != b.scope {
        return Err(Error::Argument(format!(
            "metric mismatch: {}/{}/{} vs {}/{}/{}",
            a.metric, a.step, a.scope, b.metric, b.step, b.scope
        )));
    }
    Ok(())
}

/// Error ratio of model a over model b on the same metric/step/scope; below
/// 1 means a outperforms b. Two zeros compare as 1; a positive error against
/// a perfect reference flags +infinity.
pub fn efficiency_ratio(a: &MetricValue, b: &MetricValue) -> Result<f64> {
    check_comparable(a, b)?;
    if b.value == 0.0 {
        return Ok(if a.value == 0.0 { 1.0 } else { f64::INFINITY });
    }
    Ok(a.value / b.value)
}

/// Full-model error minus ablated-model error; negative means the ablated
/// data were helping.
pub fn data_ablation_loss(full: &MetricValue, ablated: &MetricValue) -> Result<f64> {
    check_comparable(full, ablated)?;
    Ok(full.value - ablated.value)
}

/// One model configuration evaluated by the back-test.
#[derive(Debug, Clone, Serialize)]
pub struct VariantConfig {
    pub name: String,
    pub fit: FitConfig,
}

pub const VARIANT_FULL: &str = "dynenet_full";
pub const VARIANT_NO_GDELT: &str = "dynenet_no_gdelt";
pub const VARIANT_LASSO: &str = "lasso";

impl VariantConfig {
    pub fn dynenet_full(base: &FitConfig) -> Self {
        VariantConfig {
            name: VARIANT_FULL.into(),
            fit: base.clone(),
        }
    }

    pub fn dynenet_no_gdelt(base: &FitConfig) -> Self {
        let mut fit = base.clone();
        fit.exclude_gdelt = true;
        VariantConfig {
            name: VARIANT_NO_GDELT.into(),
            fit,
        }
    }

    pub fn lasso(base: &FitConfig) -> Self {
        let mut fit = base.clone();
        fit.alpha = 1.0;
        VariantConfig {
            name: VARIANT_LASSO.into(),
            fit,
        }
    }

    /// The three variants the evaluation tables compare.
    pub fn standard(base: &FitConfig) -> Vec<Self> {
        vec![
            Self::dynenet_full(base),
            Self::dynenet_no_gdelt(base),
            Self::lasso(base),
        ]
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct StepEpsilons {
    pub step: u8,
    pub epsilon_a: f64,
    pub epsilon_b: f64,
    pub pooled_n: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct DerivedRow {
    pub scope: Scope,
    pub step: u8,
    pub metric: Metric,
    /// full / lasso error ratio.
    pub efficiency_ratio: Option<f64>,
    /// full − no-gdelt error difference.
    pub dal: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExcludedCountry {
    pub country: String,
    pub reason: String,
}

/// All back-test outputs. Ratios and DALs in `derived` are recomputable from
/// `metrics` (asserted by tests).
#[derive(Debug, Clone, Serialize)]
pub struct EvaluationReport {
    pub window_start: Month,
    pub window_end: Month,
    pub steps: Vec<u8>,
    pub variants: Vec<String>,
    pub epsilons: Vec<StepEpsilons>,
    pub metrics: Vec<(String, MetricValue)>,
    pub derived: Vec<DerivedRow>,
    pub excluded: Vec<ExcludedCountry>,
    /// Scored (country, step, month) cells (per variant).
    pub cells: usize,
    /// Cells predicted by the running mean rather than a fitted model,
    /// summed over variants.
    pub fallback_cells: usize,
}

impl EvaluationReport {
    pub fn value(&self, variant: &str, scope: &Scope, step: u8, metric: Metric) -> Option<f64> {
        self.metrics
            .iter()
            .find(|(v, m)| {
                v == variant && m.scope == *scope && m.step == step && m.metric == metric
            })
            .map(|(_, m)| m.value)
    }

    /// Metrics CSV: `variant,country,step,metric,value`.
    pub fn write_metrics_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "variant,country,step,metric,value")?;
        for (variant, m) in &self.metrics {
            writeln!(w, "{variant},{},{},{},{}", m.scope, m.step, m.metric, m.value)?;
        }
        Ok(())
    }

    /// Derived CSV: `country,step,metric,efficiency_ratio,dal` (fields left
    /// empty where a variant pair was not evaluated).
    pub fn write_derived_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "country,step,metric,efficiency_ratio,dal")?;
        for row in &self.derived {
            let ratio = row
                .efficiency_ratio
                .map(|v| v.to_string())
                .unwrap_or_default();
            let dal = row.dal.map(|v| v.to_string()).unwrap_or_default();
            writeln!(w, "{},{},{},{ratio},{dal}", row.scope, row.step, row.metric)?;
        }
        Ok(())
    }
}

/// Scores of one (variant, country, step) series over the window.
struct CellSeries {
    variant: usize,
    country: usize,
    step: u8,
    actuals: Vec<f64>,
    preds: Vec<f64>,
    fallback_cells: usize,
}

/// Expanding-window back-test. For every month m in the window, country, and
/// step k, the model is trained on pairs whose target is realized by m−k
/// (the covariates feeding the forecast of m are the newest training
/// information), applied to the covariate row at m−k, and scored against the
/// realized delta ln(1+F_m) − ln(1+F_{m−k}). All variants share the splits.
pub fn backtest(
    panel: &PanelDataset,
    window: (Month, Month),
    steps: &[u8],
    variants: &[VariantConfig],
) -> Result<EvaluationReport> {
    let (start, end) = window;
    if start > end {
        return Err(Error::Argument(format!(
            "window start {start} after end {end}"
        )));
    }
    let months = panel.months();
    if start < months[0] || end > *months.last().unwrap() {
        return Err(Error::Argument(format!(
            "window {start}..{end} outside panel range {}..{}",
            months[0],
            months.last().unwrap()
        )));
    }
    if variants.is_empty() {
        return Err(Error::Argument("no variants requested".into()));
    }
    if steps.is_empty() || steps.iter().any(|s| !(STEP_MIN..=STEP_MAX).contains(s)) {
        return Err(Error::Argument(format!(
            "steps must be within {STEP_MIN}..={STEP_MAX}"
        )));
    }
    let eval_months: Vec<Month> = (0..=end.since(start)).map(|i| start + i).collect();

    let mut tasks = Vec::new();
    for vi in 0..variants.len() {
        for ci in 0..panel.countries().len() {
            for &s in steps {
                tasks.push((vi, ci, s));
            }
        }
    }
    let cell_results: Vec<CellSeries> = tasks
        .par_iter()
        .map(|&(vi, ci, s)| -> Result<CellSeries> {
            let country = &panel.countries()[ci];
            let mut actuals = Vec::new();
            let mut preds = Vec::new();
            let mut fallback_cells = 0;
            for &m in &eval_months {
                let anchor = m - s as i32;
                let (Some(f_anchor), Some(f_m)) =
                    (panel.fatalities(ci, anchor), panel.fatalities(ci, m))
                else {
                    continue;
                };
                let actual = (1.0 + f_m as f64).ln() - (1.0 + f_anchor as f64).ln();
                let prepared =
                    fit_country_inner(panel, country, s, &variants[vi].fit, Some(anchor))?;
                let (pred, method) = predict_prepared(&prepared);
                if method == Method::RunningMean {
                    fallback_cells += 1;
                }
                actuals.push(actual);
                preds.push(pred);
            }
            Ok(CellSeries {
                variant: vi,
                country: ci,
                step: s,
                actuals,
                preds,
                fallback_cells,
            })
        })
        .collect::<Result<_>>()?;

    // ε pooling: realized differences per step over all countries and window
    // months (identical across variants, so variant 0 suffices).
    let mut epsilons = Vec::new();
    for &s in steps {
        let pooled: Vec<f64> = cell_results
            .iter()
            .filter(|c| c.variant == 0 && c.step == s)
            .flat_map(|c| c.actuals.iter().copied())
            .collect();
        if pooled.len() >= 2 {
            epsilons.push(StepEpsilons {
                step: s,
                epsilon_a: tadda_epsilon_a(&pooled)?,
                epsilon_b: tadda_epsilon_b(&pooled, 0.995)?,
                pooled_n: pooled.len(),
            });
        }
    }

    let mut metrics: Vec<(String, MetricValue)> = Vec::new();
    let mut cells = 0usize;
    let mut fallback_cells = 0usize;
    for cell in &cell_results {
        if cell.actuals.is_empty() {
            continue;
        }
        if cell.variant == 0 {
            cells += cell.actuals.len();
        }
        fallback_cells += cell.fallback_cells;
        let variant = &variants[cell.variant].name;
        let scope = Scope::Country(panel.countries()[cell.country].clone());
        metrics.push((
            variant.clone(),
            MetricValue::new(Metric::Mse, cell.step, scope.clone(), mse(&cell.actuals, &cell.preds)?),
        ));
        if let Some(eps) = epsilons.iter().find(|e| e.step == cell.step) {
            metrics.push((
                variant.clone(),
                MetricValue::new(
                    Metric::TaddaA,
                    cell.step,
                    scope.clone(),
                    tadda(&cell.actuals, &cell.preds, eps.epsilon_a)?,
                ),
            ));
            metrics.push((
                variant.clone(),
                MetricValue::new(
                    Metric::TaddaB,
                    cell.step,
                    scope,
                    tadda(&cell.actuals, &cell.preds, eps.epsilon_b)?,
                ),
            ));
        }
    }

    // Cross-country averages per (variant, step, metric).
    let mut averages = Vec::new();
    for v in variants {
        for &s in steps {
            for metric in [Metric::Mse, Metric::TaddaA, Metric::TaddaB] {
                let values: Vec<f64> = metrics
                    .iter()
                    .filter(|(vn, m)| {
                        vn == &v.name
                            && m.step == s
                            && m.metric == metric
                            && matches!(m.scope, Scope::Country(_))
                    })
                    .map(|(_, m)| m.value)
                    .collect();
                if !values.is_empty() {
                    averages.push((
                        v.name.clone(),
                        MetricValue::new(
                            metric,
                            s,
                            Scope::Average,
                            values.iter().sum::<f64>() / values.len() as f64,
                        ),
                    ));
                }
            }
        }
    }
    metrics.extend(averages);

    // Derived comparisons wherever the canonical variant names are present.
    let mut derived = Vec::new();
    let mut scopes: Vec<Scope> = panel
        .countries()
        .iter()
        .map(|c| Scope::Country(c.clone()))
        .collect();
    scopes.push(Scope::Average);
    let lookup = |name: &str, scope: &Scope, step: u8, metric: Metric| -> Option<MetricValue> {
        metrics
            .iter()
            .find(|(v, m)| v == name && m.scope == *scope && m.step == step && m.metric == metric)
            .map(|(_, m)| m.clone())
    };
    for scope in &scopes {
        for &s in steps {
            for metric in [Metric::Mse, Metric::TaddaA, Metric::TaddaB] {
                let full = lookup(VARIANT_FULL, scope, s, metric);
                let lasso = lookup(VARIANT_LASSO, scope, s, metric);
                let no_gdelt = lookup(VARIANT_NO_GDELT, scope, s, metric);
                let ratio = match (&full, &lasso) {
                    (Some(f), Some(l)) => Some(efficiency_ratio(f, l)?),
                    _ => None,
                };
                let dal = match (&full, &no_gdelt) {
                    (Some(f), Some(a)) => Some(data_ablation_loss(f, a)?),
                    _ => None,
                };
                if ratio.is_some() || dal.is_some() {
                    derived.push(DerivedRow {
                        scope: scope.clone(),
                        step: s,
                        metric,
                        efficiency_ratio: ratio,
                        dal,
                    });
                }
            }
        }
    }

    let excluded = panel
        .countries()
        .iter()
        .enumerate()
        .filter(|(ci, _)| {
            !cell_results
                .iter()
                .any(|c| c.variant == 0 && c.country == *ci && !c.actuals.is_empty())
        })
        .map(|(_, c)| ExcludedCountry {
            country: c.clone(),
            reason: "no scoreable months in the evaluation window".into(),
        })
        .collect();

    Ok(EvaluationReport {
        window_start: start,
        window_end: end,
        steps: steps.to_vec(),
        variants: variants.iter().map(|v| v.name.clone()).collect(),
        epsilons,
        metrics,
        derived,
        excluded,
        cells,
        fallback_cells,
    })
}

/// Audit helper: indexes of GDELT-source columns (what the ablation masks).
pub fn gdelt_columns(panel: &PanelDataset) -> Vec<usize> {
    panel
        .feature_meta()
        .iter()
        .enumerate()
        .filter(|(_, m)| m.source == SourceClass::Gdelt)
        .map(|(i, _)| i)
        .collect()
}
