//! Experiment runner and acceptance suite for `lorentz-metrics`.

pub mod config;
pub mod output;
pub mod runner;
pub mod svg;
pub mod validate;
