//! Experiment runner for the bilinear-variation library: configuration,
//! random inputs, suites of checks and their reports.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ceilings;
pub mod config;
pub mod continuum;
pub mod report;
pub mod suites;
pub mod sweep;

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/harness.md")]
mod book_harness {}
