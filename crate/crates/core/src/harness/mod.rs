//! Figure sweeps, CSV output and the validation runner behind the CLI.

pub mod cli;
pub mod output;
pub mod run;
pub mod spec;
pub mod validate;
