//! Distributed lossy source coding with abelian group codes: achievable
//! rate-distortion regions, the classical baselines they are compared with,
//! and Monte Carlo checks of the underlying coding lemmas.

pub mod cli;
pub mod embedding;
pub mod error;
pub mod group;
pub mod prob;
pub mod rate;
pub mod sim;

pub use error::{Error, Result};
