//! Parameter sweeps, transients and thermodynamic audits of the V model,
//! written as CSV tables.
//!
//! Each subcommand of the `vheat` binary is a function here returning a
//! [`output::Table`], so the same code backs the CLI and the test suites.
//! Sweep points are evaluated in parallel and emitted in grid order.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod evaluate;
pub mod output;
pub mod thermo;

pub use config::{Engine, Grid, SweepConfig};
pub use error::{ExpError, Result};
pub use output::{ResultRow, Table};
