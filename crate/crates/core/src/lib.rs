//! Weak-identification-robust GMM inference for linearized investment Euler
//! equations.
//!
//! The crate is organised along the estimation pipeline:
//!
//! * [`data`] ingests quarterly series (CSV or FRED) and builds the panel,
//! * [`model`] turns the panel into a [`model::MomentSystem`] for the IAC, CAC
//!   or semi-structural equation,
//! * [`inference`] computes S, qLL-S and split-sample S statistics with
//!   Bartlett HAC covariances,
//! * [`confidence`] inverts those tests over parameter grids,
//! * [`misspec`] is the small triangular-system laboratory contrasting system
//!   and single-equation identification,
//! * [`cli`] wires everything to a config file for the `euler-gmm` binary.

pub mod cli;
pub mod confidence;
pub mod data;
pub mod error;
pub mod inference;
pub mod linalg;
pub mod misspec;
pub mod model;
pub mod sim;

pub use error::{Error, Result};
