//! Three-mode anti-PT cavity magnonics: linear spectrum, Kerr steady
//! states, stability, time-domain integration and sensitivity analysis.

pub mod error;
pub mod params;
pub mod roots;
pub mod spectrum;
pub mod stability;
pub mod steady;
pub mod dynamics;
pub mod sensing;

pub use error::{ModelError, Result};
pub use params::{AptConfig, DriveSpec, Mode, SystemParams};
