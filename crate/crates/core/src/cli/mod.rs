//! Command-line front end: expression parsing, evaluation, reports and the
//! command runners.

pub mod commands;
pub mod eval;
pub mod parse;
pub mod report;
