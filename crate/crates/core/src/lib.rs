//! Exact discrete valuations on formal power series fields.

pub mod cli;
pub mod error;
pub mod field;
pub mod lattice;
mod linalg;
pub mod monoval;
pub mod rank1;
pub mod rank2;
pub mod series;

pub use error::{Error, Result};
