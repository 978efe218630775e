//! Std companion to `spectra-core`: matrix dumps, CSV and JSON artifacts,
//! training-record directories, run manifests, parallel ensembles and the
//! `spectra` command-line driver.

pub mod cli;
pub mod csvio;
pub mod dump;
pub mod ensemble;
pub mod error;
pub mod manifest;
pub mod record;
pub mod schema;

pub use error::{Error, Result};
pub use spectra_core as core;
