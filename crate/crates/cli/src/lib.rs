//! Sweep engine and figure tables for the anti-PT magnonic sensor model.

pub mod config;
pub mod eval;
pub mod figures;
pub mod point;
pub mod sweep;
pub mod table;

pub use config::{parse_config, parse_config_onto, ConfigError, SweepSpec};
pub use figures::Figure;
pub use table::{Format, Table};
