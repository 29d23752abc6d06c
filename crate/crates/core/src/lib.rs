//! Fitts' law model comparison for parabolic-teleport target selection in VR.
//!
//! The crate reads or simulates per-trial logs, aggregates them per target
//! condition, fits the four model variants by least squares, ranks them by
//! AIC/BIC and computes effective throughput.

pub mod cli;
pub mod comparison;
pub mod error;
pub mod log_io;
pub mod models;
pub mod regression;
pub mod sim;
pub mod special;
pub mod throughput;
pub mod trial;

pub use error::{Error, Result};
