//! Research-productivity indicators for professors across countries.
//!
//! The pipeline loads seven CSV tables, assigns each professor to a subject
//! category (SC), computes output (O), fractional output (FO), average
//! citations (AC), average impact factor (AIF) and fractional scientific
//! strength (FSS) per euro of research cost, normalizes them within each SC
//! and produces the cross-country comparison tables.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the scalar to `f64`, which is what the CLI uses.

pub mod analytics;
pub mod baselines;
pub mod cohort;
pub mod config;
pub mod credit;
mod error;
pub mod indicators;
pub mod ingest;
pub mod numfmt;
pub mod pipeline;
pub mod scalar;
pub mod synth;
pub mod validate;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Weights = credit::CreditWeights<f64>;
pub type Indicators = indicators::IndicatorVector<f64>;
pub type Baselines = baselines::BaselineTable<f64>;
pub type Scores = analytics::NormalizedScores<f64>;
pub type Report = analytics::ReportBundle<f64>;
pub type Output = pipeline::ComputeOutput<f64>;
