pub mod cli;
pub mod data;
pub mod error;
pub mod experiments;
pub mod forest;
pub mod importance;
pub mod inference;
pub mod rng;
pub mod stats;
pub mod tree;

pub use error::{Error, Result};
