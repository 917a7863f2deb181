//! Scenario generators and batch runners.

mod bias;
mod generators;
mod migration;
mod runners;

pub use bias::*;
pub use generators::*;
pub use migration::*;
pub use runners::*;
