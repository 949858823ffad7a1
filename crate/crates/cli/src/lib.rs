//! Library surface of the command-line front end: configuration parsing and
//! run dispatch, reused by the `simulate` binary and by the acceptance suite.

pub mod config;
pub mod run;
