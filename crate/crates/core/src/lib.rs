//! Forecasting toolkit for monthly incidence series.
//!
//! The crate provides three forecasters over a shared data model:
//! Box-Jenkins ARIMA, ARIMA with exogenous covariates (ARIMAX), and a
//! semi-functional partial linear regression (SFPLR) that treats each year
//! of the series as a curve and predicts a characteristic of the next year.
//! The [`eval`] module adds the common evaluation protocol: a fixed
//! train/test split, NSE and RMSE skill scores, a synthetic data generator
//! and a side-by-side comparison report.

pub mod arima;
pub mod calendar;
pub mod correlation;
pub mod eval;
pub mod poly;
pub mod series;
pub mod sfplr;
pub mod stationarity;
pub mod transform;

mod linalg;
