//! qslkit: counterdiabatic Landau-Zener driving, s-parameterized quantum
//! speed limits, and the optimal speed-cost trade-off.

pub mod dynamics;
pub mod error;
pub mod generators;
pub mod linalg;
pub mod lz;
pub mod metrics;
pub mod phasespace;
pub mod prep;
pub mod states;
pub mod tomography;

pub use error::{Error, Result};
