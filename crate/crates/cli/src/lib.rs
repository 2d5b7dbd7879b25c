//! Command-line front end: dataset manifests, run configuration, CSV
//! ingestion, model comparison, report files and SVG charts. The `epicast`
//! binary is a thin argument parser over [`commands`].

pub mod commands;
pub mod config;
pub mod csv;
pub mod ingest;
pub mod manifest;
pub mod plot;
