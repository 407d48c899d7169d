//! Per-country forecasting of changes in conflict fatalities with a dynamic
//! elastic net.
//!
//! The pipeline turns a country-month covariate panel plus raw event data
//! into lead-k forecasts of the change in ln(1 + fatalities), then evaluates
//! and interprets them:
//!
//! - [`panel`] loads and validates the covariate panel and builds lead-k
//!   design matrices.
//! - [`events`] parses event exports and aggregates them into 100 monthly
//!   index series per country.
//! - [`elasticnet`] solves the penalized regression by coordinate descent
//!   with cross-validated λ.
//! - [`forecaster`] orchestrates per-country, per-step fits with a
//!   running-mean fallback for degenerate series.
//! - [`evaluation`] back-tests forecasts (MSE, TADDA, efficiency ratios,
//!   data-ablation losses).
//! - [`interpret`] derives variable-importance heatmaps, overall importance
//!   scores, and country clusters from the selected predictors.
//! - [`cli`] exposes everything as subcommands with a TOML config.

pub mod cli;
pub mod config;
pub mod elasticnet;
pub mod error;
pub mod evaluation;
pub mod events;
pub mod fixtures;
pub mod forecaster;
pub mod interpret;
pub mod month;
pub mod panel;
pub mod render;

pub use error::{Error, Result};
pub use month::Month;
