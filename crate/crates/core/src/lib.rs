pub mod cli;
pub mod config;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod factorization;
mod fsutil;
pub mod linalg;
pub mod regression;
pub mod simplex;
pub mod trainer;

pub use error::{Error, Result};
