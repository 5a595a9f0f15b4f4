//! Configuration, file formats and experiment orchestration around
//! [`tvbarrier_core`].

// NaN must fail every validity check, so comparisons are written negated on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod experiment;
pub mod plotdata;
pub mod report;
pub mod trace;

pub use config::{ConfigError, RunConfig};
