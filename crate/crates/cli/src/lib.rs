//! Command-line front end for the `zeroclass` library.

pub mod app;
pub mod artifact;
pub mod commands;
pub mod report;

pub use app::run;
