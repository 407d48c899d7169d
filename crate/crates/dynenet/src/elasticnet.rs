//! Penalized regression solved by cyclic coordinate descent over a λ grid,
//! with forward-chaining cross-validation subject to an explained-deviance
//! floor.
//!
//! The objective minimized is
//!
//! ```text
//! (1/N) Σ_i w_i (y_i − β₀ − βᵀx_i)²  +  (λ/2) [ (1−α) ‖β‖₂² + 2α ‖β‖₁ ]
//! ```
//!
//! with the intercept β₀ unpenalized. The coordinate update follows from the
//! subgradient stationarity condition of this exact parameterization:
//!
//! ```text
//! β_j ← soft( (2/N) ρ_j , λα ) / ( (2/N) S_j + λ(1−α) )
//! ```
//!
//! where ρ_j = Σ_i w_i (r_i + β_j x_ij) x_ij is the partial-residual
//! correlation and S_j = Σ_i w_i x_ij². At λ = 0 the update recovers
//! weighted least squares; with α = 1 it is the LASSO, with α = 0 Ridge.

use ndarray::{Array1, Array2};
use serde::Serialize;

use crate::error::{Error, Result};

/// Solver knobs shared by every fit.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SolverSettings {
    pub n_lambda: usize,
    /// λ_min / λ_max ratio of the log-spaced grid.
    pub lambda_ratio: f64,
    /// Convergence threshold on the max coefficient change per sweep.
    pub tolerance: f64,
    pub max_sweeps: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            n_lambda: 100,
            lambda_ratio: 1e-4,
            tolerance: 1e-7,
            max_sweeps: 10_000,
        }
    }
}

/// A fully specified penalized-regression problem.
#[derive(Debug, Clone)]
pub struct ElasticNetProblem {
    pub x: Array2<f64>,
    pub y: Array1<f64>,
    /// Per-observation nonnegative weights; the shipped pipeline leaves
    /// these at 1.
    pub weights: Array1<f64>,
    /// L1/L2 mix in [0, 1]: 1 = LASSO, 0 = Ridge.
    pub alpha: f64,
    /// Strictly decreasing positive λ values.
    pub lambda_grid: Vec<f64>,
    pub tolerance: f64,
    pub max_sweeps: usize,
}

impl ElasticNetProblem {
    pub fn new(x: Array2<f64>, y: Array1<f64>, alpha: f64) -> Result<Self> {
        Self::with_settings(x, y, alpha, &SolverSettings::default())
    }

    pub fn with_settings(
        x: Array2<f64>,
        y: Array1<f64>,
        alpha: f64,
        settings: &SolverSettings,
    ) -> Result<Self> {
        let n = x.nrows();
        let p = x.ncols();
        if n < 2 {
            return Err(Error::Argument(format!("need at least 2 rows, got {n}")));
        }
        if p < 1 {
            return Err(Error::Argument("need at least 1 feature column".into()));
        }
        if y.len() != n {
            return Err(Error::Argument(format!(
                "y has {} entries for {} rows",
                y.len(),
                n
            )));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Argument(format!("alpha {alpha} outside [0, 1]")));
        }
        if x.iter().any(|v| !v.is_finite()) || y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("non-finite values in X or y".into()));
        }
        let mut problem = ElasticNetProblem {
            weights: Array1::ones(n),
            x,
            y,
            alpha,
            lambda_grid: Vec::new(),
            tolerance: settings.tolerance,
            max_sweeps: settings.max_sweeps,
        };
        problem.lambda_grid = lambda_grid(&problem, settings.n_lambda, settings.lambda_ratio)?;
        Ok(problem)
    }

    pub fn with_weights(mut self, weights: Array1<f64>) -> Result<Self> {
        if weights.len() != self.n() {
            return Err(Error::Argument("weight length mismatch".into()));
        }
        if weights.iter().any(|&w| !w.is_finite() || w < 0.0) {
            return Err(Error::Argument("weights must be finite and >= 0".into()));
        }
        self.weights = weights;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }
}

/// A solved coefficient vector at one λ.
#[derive(Debug, Clone, Serialize)]
pub struct Coefficients {
    pub intercept: f64,
    pub beta: Vec<f64>,
    /// The λ this point was solved at.
    pub lambda: f64,
}

impl Coefficients {
    /// Indexes of features with exactly nonzero coefficients.
    pub fn nonzero_set(&self) -> Vec<usize> {
        self.beta
            .iter()
            .enumerate()
            .filter(|(_, b)| **b != 0.0)
            .map(|(j, _)| j)
            .collect()
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.intercept
            + self
                .beta
                .iter()
                .zip(row)
                .map(|(b, x)| b * x)
                .sum::<f64>()
    }

    pub fn predict(&self, x: &Array2<f64>) -> Array1<f64> {
        let mut out = Array1::zeros(x.nrows());
        for (i, row) in x.rows().into_iter().enumerate() {
            out[i] = self.predict_row(row.as_slice().unwrap());
        }
        out
    }
}

/// Convergence record of one solve.
#[derive(Debug, Clone, Serialize)]
pub struct SolveDiagnostics {
    pub converged: bool,
    pub sweeps: usize,
    /// Objective value after every sweep (only filled by the traced entry
    /// point).
    pub objectives: Vec<f64>,
}

/// Result of a cross-validated fit, with coefficients on the original scale.
#[derive(Debug, Clone, Serialize)]
pub struct FitResult {
    pub coefficients: Coefficients,
    pub lambda_star: f64,
    /// (λ, mean validation MSE) over the grid.
    pub cv_curve: Vec<(f64, f64)>,
    /// Explained deviance of the full-data refit at λ*.
    pub deviance: f64,
    pub converged: bool,
    pub sweeps_used: usize,
    /// False when no λ met the deviance floor and the deviance-maximizing λ
    /// was used instead.
    pub floor_met: bool,
    /// True when at least one λ on the full-data path converged.
    pub any_converged: bool,
}

/// Centers each column to mean 0 and scales to mean-square 1
/// ((1/N) Σ z² = 1). Returns (Z, means, scales).
pub fn standardize(x: &Array2<f64>) -> Result<(Array2<f64>, Vec<f64>, Vec<f64>)> {
    let n = x.nrows() as f64;
    let mut z = x.clone();
    let mut means = Vec::with_capacity(x.ncols());
    let mut scales = Vec::with_capacity(x.ncols());
    for j in 0..x.ncols() {
        let col = x.column(j);
        let mean = col.sum() / n;
        let msq = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        if msq <= 0.0 {
            return Err(Error::Numeric(format!(
                "column {j} is constant and cannot be standardized"
            )));
        }
        let scale = msq.sqrt();
        for i in 0..x.nrows() {
            z[[i, j]] = (x[[i, j]] - mean) / scale;
        }
        means.push(mean);
        scales.push(scale);
    }
    Ok((z, means, scales))
}

fn soft_threshold(z: f64, t: f64) -> f64 {
    // The cut is widened by a relative epsilon: when |z| and t agree to
    // rounding error (duplicated columns, the top of the grid) the exact
    // solution is zero and float dust must not survive the subtraction.
    let cut = t * (1.0 + 1e-13);
    if z > cut {
        z - t
    } else if z < -cut {
        z + t
    } else {
        0.0
    }
}

/// Smallest λ at which every penalized coefficient is zero: from the
/// subgradient condition, the coordinate update at the null model is zero
/// iff |(2/N) Σ w_i (y_i − ȳ_w) z_ij| ≤ λα for every column. Columns enter
/// on the standardized scale, matching the fitting pipeline (the
/// `coordinate_descent` contract expects standardized X).
fn lambda_max(x: &Array2<f64>, y: &Array1<f64>, w: &Array1<f64>, alpha: f64) -> f64 {
    // α below this floor uses the floor in the cap so that the Ridge limit
    // still yields a finite grid.
    let a = alpha.max(1e-3);
    let n = x.nrows() as f64;
    let sum_w: f64 = w.sum();
    let ybar = y
        .iter()
        .zip(w)
        .map(|(yi, wi)| yi * wi)
        .sum::<f64>()
        / sum_w;
    let mut best = 0.0f64;
    for j in 0..x.ncols() {
        let col = x.column(j);
        let mean = col.sum() / n;
        let msq = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        if msq <= 1e-24 {
            continue; // constant column carries no signal
        }
        let g: f64 = col
            .iter()
            .zip(y)
            .zip(w)
            .map(|((xij, yi), wi)| wi * (yi - ybar) * xij)
            .sum();
        best = best.max((2.0 / n * g / msq.sqrt()).abs());
    }
    // Floating-point headroom so that solving exactly at the top of the grid
    // thresholds the argmax coordinate to exactly zero.
    best / a * (1.0 + 1e-9)
}

/// Log-spaced grid of `n_lambda` values from λ_max down to λ_max · ratio.
pub fn lambda_grid(problem: &ElasticNetProblem, n_lambda: usize, ratio: f64) -> Result<Vec<f64>> {
    if n_lambda < 2 {
        return Err(Error::Argument("n_lambda must be at least 2".into()));
    }
    if !(0.0 < ratio && ratio < 1.0) {
        return Err(Error::Argument(format!("ratio {ratio} outside (0, 1)")));
    }
    let top = lambda_max(&problem.x, &problem.y, &problem.weights, problem.alpha);
    if !top.is_finite() || top <= 0.0 {
        return Err(Error::Degenerate(
            "response is constant or uncorrelated with every feature; no usable \
             regularization path"
                .into(),
        ));
    }
    let m = (n_lambda - 1) as f64;
    Ok((0..n_lambda)
        .map(|i| top * ratio.powf(i as f64 / m))
        .collect())
}

/// Shared coordinate-descent core. Operates on column-major data, updating
/// `beta`/`b0` in place (warm starts are whatever they hold on entry).
#[allow(clippy::too_many_arguments)]
fn cd_core(
    cols: &[Vec<f64>],
    y: &[f64],
    w: &[f64],
    alpha: f64,
    lambda: f64,
    tol: f64,
    max_sweeps: usize,
    beta: &mut [f64],
    b0: &mut f64,
    mut trace: Option<&mut Vec<f64>>,
) -> (bool, usize) {
    let n = y.len();
    let nf = n as f64;
    let sum_w: f64 = w.iter().sum();
    let p = cols.len();
    let s: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().zip(w).map(|(x, wi)| wi * x * x).sum())
        .collect();
    let thr = lambda * alpha;
    let l2 = lambda * (1.0 - alpha);

    let mut r: Vec<f64> = (0..n)
        .map(|i| {
            let mut ri = y[i] - *b0;
            for j in 0..p {
                if beta[j] != 0.0 {
                    ri -= beta[j] * cols[j][i];
                }
            }
            ri
        })
        .collect();

    let sweep = |set: &[usize], r: &mut [f64], beta: &mut [f64], b0: &mut f64| -> f64 {
        let mut max_delta = 0.0f64;
        if sum_w > 0.0 {
            let rho0: f64 = r.iter().zip(w).map(|(ri, wi)| wi * ri).sum();
            let d0 = rho0 / sum_w;
            if d0 != 0.0 {
                *b0 += d0;
                for ri in r.iter_mut() {
                    *ri -= d0;
                }
                max_delta = d0.abs();
            }
        }
        for &j in set {
            if s[j] == 0.0 {
                continue;
            }
            let col = &cols[j];
            let dot: f64 = r.iter().zip(col).zip(w).map(|((ri, x), wi)| wi * ri * x).sum();
            let rho = dot + beta[j] * s[j];
            let denom = (2.0 / nf) * s[j] + l2;
            let new = soft_threshold((2.0 / nf) * rho, thr) / denom;
            let d = new - beta[j];
            if d != 0.0 {
                for (ri, x) in r.iter_mut().zip(col) {
                    *ri -= d * x;
                }
                beta[j] = new;
                max_delta = max_delta.max(d.abs());
            }
        }
        max_delta
    };

    let all: Vec<usize> = (0..p).collect();
    let mut sweeps = 0usize;
    let mut converged = false;
    let record = |r: &[f64], beta: &[f64], trace: &mut Option<&mut Vec<f64>>| {
        if let Some(t) = trace.as_deref_mut() {
            let rss: f64 = r.iter().zip(w).map(|(ri, wi)| wi * ri * ri).sum();
            let l2n: f64 = beta.iter().map(|b| b * b).sum();
            let l1n: f64 = beta.iter().map(|b| b.abs()).sum();
            t.push(rss / nf + lambda / 2.0 * ((1.0 - alpha) * l2n + 2.0 * alpha * l1n));
        }
    };

    while sweeps < max_sweeps {
        let delta = sweep(&all, &mut r, beta, b0);
        sweeps += 1;
        record(&r, beta, &mut trace);
        if delta < tol {
            converged = true;
            break;
        }
        // Iterate the active set to convergence before the next full pass.
        let active: Vec<usize> = (0..p).filter(|&j| beta[j] != 0.0).collect();
        if active.len() == p {
            continue;
        }
        while sweeps < max_sweeps {
            let d = sweep(&active, &mut r, beta, b0);
            sweeps += 1;
            record(&r, beta, &mut trace);
            if d < tol {
                break;
            }
        }
    }
    (converged, sweeps)
}

fn columns_of(x: &Array2<f64>) -> Vec<Vec<f64>> {
    (0..x.ncols()).map(|j| x.column(j).to_vec()).collect()
}

/// Minimizes the objective at a single λ on the problem's X as given (the
/// usual pipeline standardizes first). λ = 0 reduces to weighted least
/// squares.
pub fn coordinate_descent(
    problem: &ElasticNetProblem,
    lambda: f64,
    warm_start: Option<&Coefficients>,
) -> Result<Coefficients> {
    coordinate_descent_traced(problem, lambda, warm_start).map(|(c, _)| c)
}

/// As `coordinate_descent`, also returning per-sweep objective values.
pub fn coordinate_descent_traced(
    problem: &ElasticNetProblem,
    lambda: f64,
    warm_start: Option<&Coefficients>,
) -> Result<(Coefficients, SolveDiagnostics)> {
    if lambda < 0.0 || !lambda.is_finite() {
        return Err(Error::Argument(format!("lambda {lambda} must be >= 0")));
    }
    let cols = columns_of(&problem.x);
    let mut beta = match warm_start {
        Some(c) if c.beta.len() == problem.p() => c.beta.clone(),
        Some(_) => return Err(Error::Argument("warm start width mismatch".into())),
        None => vec![0.0; problem.p()],
    };
    let mut b0 = warm_start.map(|c| c.intercept).unwrap_or(0.0);
    let mut objectives = Vec::new();
    let (converged, sweeps) = cd_core(
        &cols,
        problem.y.as_slice().unwrap(),
        problem.weights.as_slice().unwrap(),
        problem.alpha,
        lambda,
        problem.tolerance,
        problem.max_sweeps,
        &mut beta,
        &mut b0,
        Some(&mut objectives),
    );
    Ok((
        Coefficients {
            intercept: b0,
            beta,
            lambda,
        },
        SolveDiagnostics {
            converged,
            sweeps,
            objectives,
        },
    ))
}

/// The penalized objective at a coefficient point; used by oracle tests.
pub fn objective(problem: &ElasticNetProblem, coef: &Coefficients, lambda: f64) -> f64 {
    let n = problem.n() as f64;
    let mut rss = 0.0;
    for i in 0..problem.n() {
        let row = problem.x.row(i);
        let pred = coef.intercept
            + coef
                .beta
                .iter()
                .zip(row)
                .map(|(b, x)| b * x)
                .sum::<f64>();
        let r = problem.y[i] - pred;
        rss += problem.weights[i] * r * r;
    }
    let l2: f64 = coef.beta.iter().map(|b| b * b).sum();
    let l1: f64 = coef.beta.iter().map(|b| b.abs()).sum();
    rss / n + lambda / 2.0 * ((1.0 - problem.alpha) * l2 + 2.0 * problem.alpha * l1)
}

/// Explained deviance 1 − RSS/TSS with weighted sums of squares.
pub fn explained_deviance(problem: &ElasticNetProblem, coef: &Coefficients) -> Result<f64> {
    let sum_w: f64 = problem.weights.sum();
    let ybar = problem
        .y
        .iter()
        .zip(&problem.weights)
        .map(|(y, w)| w * y)
        .sum::<f64>()
        / sum_w;
    let mut rss = 0.0;
    let mut tss = 0.0;
    for i in 0..problem.n() {
        let w = problem.weights[i];
        let pred = coef.predict_row(problem.x.row(i).as_slice().unwrap());
        rss += w * (problem.y[i] - pred) * (problem.y[i] - pred);
        tss += w * (problem.y[i] - ybar) * (problem.y[i] - ybar);
    }
    if tss == 0.0 {
        return Err(Error::Degenerate(
            "constant response: total sum of squares is zero".into(),
        ));
    }
    Ok(1.0 - rss / tss)
}

/// One solved point of a regularization path, on the original data scale.
#[derive(Debug, Clone)]
pub(crate) struct PathPoint {
    pub lambda: f64,
    pub intercept: f64,
    pub beta: Vec<f64>,
    pub deviance: f64,
    pub converged: bool,
    pub sweeps: usize,
}

impl PathPoint {
    fn predict_rows(&self, x: &Array2<f64>, rows: std::ops::Range<usize>) -> Vec<f64> {
        rows.map(|i| {
            self.intercept
                + self
                    .beta
                    .iter()
                    .zip(x.row(i))
                    .map(|(b, v)| b * v)
                    .sum::<f64>()
        })
        .collect()
    }
}

/// Solves the whole grid with warm starts on rows [0, rows) of the problem
/// data. Constant columns within the window are excluded and reported back
/// with zero coefficients; the rest are standardized internally and results
/// are mapped back to the original scale.
pub(crate) fn solve_path(
    x: &Array2<f64>,
    y: &Array1<f64>,
    w: &Array1<f64>,
    alpha: f64,
    grid: &[f64],
    tol: f64,
    max_sweeps: usize,
    rows: usize,
) -> Result<Vec<PathPoint>> {
    let n = rows;
    let nf = n as f64;
    let p = x.ncols();
    let sum_w: f64 = w.iter().take(n).sum();
    let ybar = (0..n).map(|i| w[i] * y[i]).sum::<f64>() / sum_w;
    let tss: f64 = (0..n).map(|i| w[i] * (y[i] - ybar) * (y[i] - ybar)).sum();

    // Exclude columns constant over the window.
    let mut kept = Vec::new();
    let mut means = Vec::new();
    let mut scales = Vec::new();
    let mut cols: Vec<Vec<f64>> = Vec::new();
    for j in 0..p {
        let col = x.column(j);
        let mean = col.iter().take(n).sum::<f64>() / nf;
        let msq = col
            .iter()
            .take(n)
            .map(|v| (v - mean) * (v - mean))
            .sum::<f64>()
            / nf;
        if msq > 1e-24 {
            let scale = msq.sqrt();
            kept.push(j);
            means.push(mean);
            scales.push(scale);
            cols.push(col.iter().take(n).map(|v| (v - mean) / scale).collect());
        }
    }

    let yv: Vec<f64> = y.iter().take(n).copied().collect();
    let wv: Vec<f64> = w.iter().take(n).copied().collect();
    let mut beta = vec![0.0; kept.len()];
    let mut b0 = 0.0;
    let mut path = Vec::with_capacity(grid.len());
    for &lambda in grid {
        let (converged, sweeps) = cd_core(
            &cols, &yv, &wv, alpha, lambda, tol, max_sweeps, &mut beta, &mut b0, None,
        );
        // Back-transform to the original scale.
        let mut full = vec![0.0; p];
        let mut intercept = b0;
        for (idx, &j) in kept.iter().enumerate() {
            if beta[idx] != 0.0 {
                full[j] = beta[idx] / scales[idx];
                intercept -= beta[idx] * means[idx] / scales[idx];
            }
        }
        let rss: f64 = (0..n)
            .map(|i| {
                let mut pred = b0;
                for (idx, c) in cols.iter().enumerate() {
                    if beta[idx] != 0.0 {
                        pred += beta[idx] * c[i];
                    }
                }
                wv[i] * (yv[i] - pred) * (yv[i] - pred)
            })
            .sum();
        let deviance = if tss > 0.0 { 1.0 - rss / tss } else { 0.0 };
        path.push(PathPoint {
            lambda,
            intercept,
            beta: full,
            deviance,
            converged,
            sweeps,
        });
    }
    Ok(path)
}

/// Forward-chaining cross-validation over the problem's λ grid.
///
/// Rows must be in temporal order. Each fold trains on an initial segment
/// and validates on the following contiguous block, so no future observation
/// ever informs a past prediction. λ* minimizes the mean validation MSE
/// among the λ whose full-data refit reaches `deviance_floor`; when none
/// does, the deviance-maximizing λ is used and `floor_met` is false.
pub fn cross_validate(
    problem: &ElasticNetProblem,
    deviance_floor: f64,
    n_folds: usize,
) -> Result<FitResult> {
    if n_folds < 1 {
        return Err(Error::Argument("need at least one fold".into()));
    }
    let n = problem.n();
    if n < n_folds + 1 {
        return Err(Error::Degenerate(format!(
            "{n} rows cannot form {} forward-chaining blocks",
            n_folds + 1
        )));
    }
    let grid = &problem.lambda_grid;
    let bounds: Vec<usize> = (0..=n_folds + 1)
        .map(|i| i * n / (n_folds + 1))
        .collect();

    let mut sq_err = vec![0.0f64; grid.len()];
    let mut fold_counts = vec![0usize; grid.len()];
    let mut used_folds = 0usize;
    for f in 1..=n_folds {
        let train = bounds[f];
        let val = bounds[f]..bounds[f + 1];
        if train < 2 || val.is_empty() {
            continue;
        }
        let path = match solve_path(
            &problem.x,
            &problem.y,
            &problem.weights,
            problem.alpha,
            grid,
            problem.tolerance,
            problem.max_sweeps,
            train,
        ) {
            Ok(p) => p,
            Err(Error::Degenerate(_)) => continue,
            Err(e) => return Err(e),
        };
        used_folds += 1;
        for (l, point) in path.iter().enumerate() {
            let preds = point.predict_rows(&problem.x, val.clone());
            let mse: f64 = preds
                .iter()
                .zip(val.clone())
                .map(|(p, i)| (problem.y[i] - p) * (problem.y[i] - p))
                .sum::<f64>()
                / val.len() as f64;
            sq_err[l] += mse;
            fold_counts[l] += 1;
        }
    }
    if used_folds == 0 {
        return Err(Error::Degenerate(
            "no usable forward-chaining fold".into(),
        ));
    }
    let cv_curve: Vec<(f64, f64)> = grid
        .iter()
        .zip(&sq_err)
        .zip(&fold_counts)
        .map(|((l, s), c)| (*l, s / (*c).max(1) as f64))
        .collect();

    let path = solve_path(
        &problem.x,
        &problem.y,
        &problem.weights,
        problem.alpha,
        grid,
        problem.tolerance,
        problem.max_sweeps,
        n,
    )?;
    let any_converged = path.iter().any(|p| p.converged);

    let mut star: Option<usize> = None;
    for (l, point) in path.iter().enumerate() {
        if point.deviance >= deviance_floor
            && star.is_none_or(|s| cv_curve[l].1 < cv_curve[s].1)
        {
            star = Some(l);
        }
    }
    let (star, floor_met) = match star {
        Some(s) => (s, true),
        None => {
            let best = path
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.deviance.total_cmp(&b.1.deviance))
                .map(|(l, _)| l)
                .unwrap();
            (best, false)
        }
    };
    let point = &path[star];
    Ok(FitResult {
        coefficients: Coefficients {
            intercept: point.intercept,
            beta: point.beta.clone(),
            lambda: point.lambda,
        },
        lambda_star: point.lambda,
        cv_curve,
        deviance: point.deviance,
        converged: point.converged,
        sweeps_used: point.sweeps,
        floor_met,
        any_converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_problem(
        rng: &mut ChaCha8Rng,
        n: usize,
        p: usize,
        alpha: f64,
    ) -> ElasticNetProblem {
        let x = Array2::from_shape_fn((n, p), |_| rng.random_range(-1.0..1.0));
        let y = Array1::from_shape_fn(n, |i| {
            x[[i, 0]] * 1.5 - x[[i, p.min(2) - 1]] + rng.random_range(-0.3..0.3)
        });
        ElasticNetProblem::new(x, y, alpha).unwrap()
    }

    /// Ordinary least squares with intercept by Gaussian elimination; the
    /// independent oracle for the λ = 0 limit.
    fn ols_oracle(x: &Array2<f64>, y: &Array1<f64>) -> Vec<f64> {
        let n = x.nrows();
        let p = x.ncols() + 1;
        let mut a = vec![vec![0.0f64; p + 1]; p];
        let xe = |i: usize, j: usize| if j == 0 { 1.0 } else { x[[i, j - 1]] };
        for r in 0..p {
            for c in 0..p {
                a[r][c] = (0..n).map(|i| xe(i, r) * xe(i, c)).sum();
            }
            a[r][p] = (0..n).map(|i| xe(i, r) * y[i]).sum();
        }
        for col in 0..p {
            let pivot = (col..p)
                .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
                .unwrap();
            a.swap(col, pivot);
            let d = a[col][col];
            for c in col..=p {
                a[col][c] /= d;
            }
            for r in 0..p {
                if r != col && a[r][col] != 0.0 {
                    let f = a[r][col];
                    for c in col..=p {
                        a[r][c] -= f * a[col][c];
                    }
                }
            }
        }
        (0..p).map(|r| a[r][p]).collect()
    }

    #[test]
    fn standardize_hand_case() {
        let x = Array2::from_shape_vec((3, 1), vec![1.0, 2.0, 3.0]).unwrap();
        let (z, means, scales) = standardize(&x).unwrap();
        assert_abs_diff_eq!(means[0], 2.0);
        assert_abs_diff_eq!(scales[0], (2.0f64 / 3.0).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(z[[0, 0]], -(1.5f64.sqrt()), epsilon = 1e-12);
        assert_abs_diff_eq!(z[[1, 0]], 0.0);
        assert_abs_diff_eq!(z[[2, 0]], 1.5f64.sqrt(), epsilon = 1e-12);
        let msq = z.column(0).iter().map(|v| v * v).sum::<f64>() / 3.0;
        assert_abs_diff_eq!(msq, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn standardize_is_idempotent() {
        let x = Array2::from_shape_vec((4, 1), vec![-1.2, 0.3, 0.5, 0.4]).unwrap();
        let (z, _, _) = standardize(&x).unwrap();
        let (z2, means, scales) = standardize(&z).unwrap();
        assert_abs_diff_eq!(means[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(scales[0], 1.0, epsilon = 1e-12);
        for (a, b) in z.iter().zip(z2.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn standardize_rejects_constant_column() {
        let x = Array2::from_shape_vec((3, 1), vec![5.0, 5.0, 5.0]).unwrap();
        let err = standardize(&x).unwrap_err();
        assert!(err.to_string().contains("column 0"));
    }

    #[test]
    fn grid_shape_and_span() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let problem = random_problem(&mut rng, 30, 4, 0.5);
        let grid = lambda_grid(&problem, 100, 1e-4).unwrap();
        assert_eq!(grid.len(), 100);
        assert!(grid.windows(2).all(|w| w[0] > w[1]));
        assert_abs_diff_eq!(grid[0] / grid[99], 1e4, epsilon = 1e-6);
    }

    #[test]
    fn grid_top_gives_all_zero_and_next_step_activates() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..5 {
            let raw = random_problem(&mut rng, 20, 5, 0.5);
            // λ_max is defined on the standardized scale, which is also the
            // documented precondition of the single-λ solver.
            let (z, _, _) = standardize(&raw.x).unwrap();
            let problem = ElasticNetProblem::new(z, raw.y.clone(), 0.5).unwrap();
            let grid = &problem.lambda_grid;
            let top = coordinate_descent(&problem, grid[0], None).unwrap();
            assert!(top.nonzero_set().is_empty(), "expected all zeros at λ_max");
            let below = coordinate_descent(&problem, grid[1], None).unwrap();
            assert!(!below.nonzero_set().is_empty());
        }
    }

    #[test]
    fn lambda_zero_matches_ols() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let mut problem = random_problem(&mut rng, 30, 5, 0.5);
            problem.tolerance = 1e-12;
            problem.max_sweeps = 200_000;
            let fit = coordinate_descent(&problem, 0.0, None).unwrap();
            let oracle = ols_oracle(&problem.x, &problem.y);
            assert_abs_diff_eq!(fit.intercept, oracle[0], epsilon = 1e-8);
            for j in 0..5 {
                assert_abs_diff_eq!(fit.beta[j], oracle[j + 1], epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn lasso_single_predictor_matches_grid_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 30;
        let raw = Array2::from_shape_fn((n, 1), |_| rng.random_range(-2.0..2.0));
        let (z, _, _) = standardize(&raw).unwrap();
        let y = Array1::from_shape_fn(n, |i| 0.8 * z[[i, 0]] + rng.random_range(-0.5..0.5));
        let problem = ElasticNetProblem::new(z, y, 1.0).unwrap();
        let lambda = problem.lambda_grid[problem.lambda_grid.len() / 2];
        let fit = coordinate_descent(&problem, lambda, None).unwrap();

        // Brute-force 1-D minimization of the printed objective over a fine
        // (β₀, β) grid around zero.
        let mut best = f64::INFINITY;
        let mut best_beta = 0.0;
        let mut best_b0 = 0.0;
        let mut b = -2.0;
        while b <= 2.0 {
            let mut b0 = -1.0;
            while b0 <= 1.0 {
                let c = Coefficients {
                    intercept: b0,
                    beta: vec![b],
                    lambda,
                };
                let o = objective(&problem, &c, lambda);
                if o < best {
                    best = o;
                    best_beta = b;
                    best_b0 = b0;
                }
                b0 += 0.0005;
            }
            b += 0.0005;
        }
        assert_abs_diff_eq!(fit.beta[0], best_beta, epsilon = 1e-3);
        assert_abs_diff_eq!(fit.intercept, best_b0, epsilon = 1e-3);
        let o_fit = objective(
            &problem,
            &Coefficients {
                intercept: fit.intercept,
                beta: fit.beta.clone(),
                lambda,
            },
            lambda,
        );
        assert!(o_fit <= best + 1e-5);
    }

    #[test]
    fn random_search_never_beats_solver() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let problem = random_problem(&mut rng, 40, 6, 0.5);
        let lambda = problem.lambda_grid[problem.lambda_grid.len() / 2];
        let fit = coordinate_descent(&problem, lambda, None).unwrap();
        let base = objective(&problem, &fit, lambda);
        for _ in 0..2000 {
            let scale = 10f64.powf(rng.random_range(-6.0..0.0));
            let cand = Coefficients {
                intercept: fit.intercept + rng.random_range(-1.0..1.0) * scale,
                beta: fit
                    .beta
                    .iter()
                    .map(|b| b + rng.random_range(-1.0..1.0) * scale)
                    .collect(),
                lambda,
            };
            assert!(objective(&problem, &cand, lambda) + 1e-6 >= base);
        }
    }

    #[test]
    fn objective_never_increases_across_sweeps() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for alpha in [0.0, 0.5, 1.0] {
            let problem = random_problem(&mut rng, 25, 6, alpha);
            for li in [0, 10, 50, 99] {
                let lambda = problem.lambda_grid[li];
                let (_, diag) = coordinate_descent_traced(&problem, lambda, None).unwrap();
                for w in diag.objectives.windows(2) {
                    assert!(
                        w[1] <= w[0] + 1e-12,
                        "objective rose from {} to {}",
                        w[0],
                        w[1]
                    );
                }
            }
        }
    }

    #[test]
    fn never_worse_than_null_model() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let problem = random_problem(&mut rng, 20, 4, 0.5);
            let ybar = problem.y.sum() / problem.n() as f64;
            for li in [0, 30, 70] {
                let lambda = problem.lambda_grid[li];
                let fit = coordinate_descent(&problem, lambda, None).unwrap();
                let null = Coefficients {
                    intercept: ybar,
                    beta: vec![0.0; problem.p()],
                    lambda,
                };
                assert!(
                    objective(&problem, &fit, lambda)
                        <= objective(&problem, &null, lambda) + 1e-9
                );
            }
        }
    }

    #[test]
    fn warm_start_matches_cold_start() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let problem = random_problem(&mut rng, 35, 5, 0.5);
        let mut warm: Option<Coefficients> = None;
        for (i, &lambda) in problem.lambda_grid.iter().enumerate() {
            if i % 10 != 0 {
                // keep the warm chain moving but only compare a subsample
                warm = Some(coordinate_descent(&problem, lambda, warm.as_ref()).unwrap());
                continue;
            }
            let w = coordinate_descent(&problem, lambda, warm.as_ref()).unwrap();
            let c = coordinate_descent(&problem, lambda, None).unwrap();
            let ow = objective(&problem, &w, lambda);
            let oc = objective(&problem, &c, lambda);
            assert_abs_diff_eq!(ow, oc, epsilon = 1e-6);
            warm = Some(w);
        }
    }

    #[test]
    fn duplicated_columns_share_weight_at_half_alpha() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 40;
        let base = Array2::from_shape_fn((n, 1), |_| rng.random_range(-1.0..1.0));
        let (z, _, _) = standardize(&base).unwrap();
        let mut x = Array2::zeros((n, 3));
        for i in 0..n {
            x[[i, 0]] = z[[i, 0]];
            x[[i, 1]] = z[[i, 0]];
            x[[i, 2]] = rng.random_range(-1.0..1.0);
        }
        let y = Array1::from_shape_fn(n, |i| 2.0 * z[[i, 0]] + rng.random_range(-0.2..0.2));

        let mut ridge_mix = ElasticNetProblem::new(x.clone(), y.clone(), 0.5).unwrap();
        // The duplicated coefficients approach equality at a rate set by the
        // stopping tolerance; tighten it well below the asserted 1e-6.
        ridge_mix.tolerance = 1e-10;
        ridge_mix.max_sweeps = 200_000;
        let lambda = ridge_mix.lambda_grid[40];
        let fit = coordinate_descent(&ridge_mix, lambda, None).unwrap();
        assert!(fit.beta[0] != 0.0);
        assert_abs_diff_eq!(fit.beta[0], fit.beta[1], epsilon = 1e-6);

        let lasso = ElasticNetProblem::new(x, y, 1.0).unwrap();
        let lambda = lasso.lambda_grid[40];
        let fit = coordinate_descent(&lasso, lambda, None).unwrap();
        let both = [fit.beta[0], fit.beta[1]];
        assert!(both.iter().filter(|b| **b != 0.0).count() <= 1);
    }

    #[test]
    fn deviance_hand_cases() {
        // perfect fit -> 1, null model -> 0, and the worked 0.75 case
        // (y = (0,1,2), predictions (0.5, 1, 1.5): 1 - 0.5/2).
        let x = Array2::from_shape_vec((3, 1), vec![0.0, 1.0, 2.0]).unwrap();
        let y = Array1::from_vec(vec![0.0, 1.0, 2.0]);
        let problem = ElasticNetProblem::new(x, y, 0.5).unwrap();
        let perfect = Coefficients {
            intercept: 0.0,
            beta: vec![1.0],
            lambda: 0.0,
        };
        assert_abs_diff_eq!(explained_deviance(&problem, &perfect).unwrap(), 1.0);
        let null = Coefficients {
            intercept: 1.0,
            beta: vec![0.0],
            lambda: 0.0,
        };
        assert_abs_diff_eq!(explained_deviance(&problem, &null).unwrap(), 0.0);
        let half = Coefficients {
            intercept: 0.5,
            beta: vec![0.5],
            lambda: 0.0,
        };
        assert_abs_diff_eq!(explained_deviance(&problem, &half).unwrap(), 0.75);

        let xc = Array2::from_shape_vec((3, 1), vec![0.0, 1.0, 2.0]).unwrap();
        let yc = Array1::from_vec(vec![1.0, 1.0, 1.0]);
        let cp = ElasticNetProblem::new(xc, yc, 0.5);
        // constant y: the problem itself is degenerate (no usable grid)
        assert!(cp.is_err() || explained_deviance(&cp.unwrap(), &null).is_err());
    }

    #[test]
    fn prediction_invariant_under_standardization() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let n = 30;
        let x = Array2::from_shape_fn((n, 4), |_| rng.random_range(5.0..15.0));
        let y = Array1::from_shape_fn(n, |i| x[[i, 0]] - 0.5 * x[[i, 2]] + rng.random_range(-0.1..0.1));
        let grid = ElasticNetProblem::new(x.clone(), y.clone(), 0.5)
            .unwrap()
            .lambda_grid
            .clone();
        let path = solve_path(
            &x,
            &y,
            &Array1::ones(n),
            0.5,
            &grid,
            1e-9,
            100_000,
            n,
        )
        .unwrap();
        // Recompute the mid-path point in standardized space and compare
        // predictions row by row.
        let (z, means, scales) = standardize(&x).unwrap();
        let zp = ElasticNetProblem::new(z.clone(), y.clone(), 0.5).unwrap();
        let mid = grid.len() / 2;
        let mut warm = None;
        let mut zfit = None;
        for &l in grid.iter().take(mid + 1) {
            let mut problem = zp.clone();
            problem.tolerance = 1e-9;
            problem.max_sweeps = 100_000;
            let f = coordinate_descent(&problem, l, warm.as_ref()).unwrap();
            zfit = Some(f.clone());
            warm = Some(f);
        }
        let zfit = zfit.unwrap();
        for i in 0..n {
            let orig = path[mid].intercept
                + path[mid]
                    .beta
                    .iter()
                    .zip(x.row(i))
                    .map(|(b, v)| b * v)
                    .sum::<f64>();
            let zrow: Vec<f64> = (0..4).map(|j| (x[[i, j]] - means[j]) / scales[j]).collect();
            let std = zfit.predict_row(&zrow);
            assert_abs_diff_eq!(orig, std, epsilon = 1e-10);
        }
    }

    #[test]
    fn cross_validate_recovers_planted_signal() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 120;
        let p = 52;
        let x = Array2::from_shape_fn((n, p), |_| rng.random_range(-1.0..1.0));
        let y = Array1::from_shape_fn(n, |i| {
            2.0 * x[[i, 0]] - x[[i, 1]] + 0.1 * rng.random_range(-1.0..1.0)
        });
        let problem = ElasticNetProblem::new(x, y, 0.5).unwrap();
        let fit = cross_validate(&problem, 0.5, 5).unwrap();
        let nz = fit.coefficients.nonzero_set();
        assert!(nz.contains(&0), "x1 not selected: {nz:?}");
        assert!(nz.contains(&1), "x2 not selected: {nz:?}");
        assert!(fit.coefficients.beta[0] > 0.0);
        assert!(fit.coefficients.beta[1] < 0.0);
        assert!(fit.deviance >= 0.5);
        assert!(fit.floor_met);
        assert!(problem.lambda_grid.contains(&fit.lambda_star));
    }

    #[test]
    fn pure_noise_prefers_sparse_models() {
        let mut wins = 0;
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
            let n = 60;
            let x = Array2::from_shape_fn((n, 20), |_| rng.random_range(-1.0..1.0));
            let y = Array1::from_shape_fn(n, |_| rng.random_range(-1.0..1.0));
            let problem = ElasticNetProblem::new(x, y, 0.5).unwrap();
            let fit = cross_validate(&problem, 0.0, 5).unwrap();
            if fit.coefficients.nonzero_set().len() <= 2 {
                wins += 1;
            }
        }
        assert!(wins > 10, "sparse null model in only {wins}/20 runs");
    }

    #[test]
    fn deviance_floor_is_enforced() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let n = 100;
        let x = Array2::from_shape_fn((n, 10), |_| rng.random_range(-1.0..1.0));
        let y = Array1::from_shape_fn(n, |i| {
            2.0 * x[[i, 0]] - x[[i, 1]] + 0.1 * rng.random_range(-1.0..1.0)
        });
        let problem = ElasticNetProblem::new(x, y, 0.5).unwrap();
        let fit = cross_validate(&problem, 0.5, 5).unwrap();
        assert!(fit.deviance >= 0.5);
        assert!(fit.floor_met);
    }

    #[test]
    fn too_few_rows_for_folds_is_degenerate() {
        let x = Array2::from_shape_vec((4, 1), vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let y = Array1::from_vec(vec![1.0, 2.0, 3.0, 4.0]);
        let problem = ElasticNetProblem::new(x, y, 0.5).unwrap();
        let err = cross_validate(&problem, 0.5, 5).unwrap_err();
        assert!(err.is_degenerate());
    }

    #[test]
    fn rejects_non_finite_input() {
        let x = Array2::from_shape_vec((2, 1), vec![1.0, f64::NAN]).unwrap();
        let y = Array1::from_vec(vec![1.0, 2.0]);
        match ElasticNetProblem::new(x, y, 0.5) {
            Err(Error::Numeric(_)) => {}
            other => panic!("expected numeric error, got {other:?}"),
        }
    }

    #[test]
    fn alpha_zero_ridge_keeps_finite_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let problem = random_problem(&mut rng, 30, 4, 0.0);
        assert!(problem.lambda_grid.iter().all(|l| l.is_finite() && *l > 0.0));
        let fit = coordinate_descent(&problem, problem.lambda_grid[50], None).unwrap();
        // Ridge never thresholds to exact zero on correlated data.
        assert!(!fit.beta.iter().all(|b| *b == 0.0));
    }
}
