//! Adaptive barrier-Lyapunov control of Euler-Lagrange systems whose tracking
//! errors must stay inside exponentially shrinking, per-joint envelopes.
//!
//! The crate is `no_std` and only needs `alloc` for simulation traces. It holds
//! the whole algorithmic pipeline:
//!
//! - [`linalg`]: fixed-size vectors and matrices, Cholesky solves.
//! - [`plant`]: the Euler-Lagrange interface and a two-link planar arm with
//!   friction, a sinusoidal disturbance and a point-mass payload.
//! - [`constraint`]: the time-varying envelope and the barrier-transformed
//!   error signals (sliding variable, regressor).
//! - [`controller`]: the adaptive barrier law and two baseline controllers.
//! - [`scenario`]: quintic reference profiles and the pick-and-place schedule.
//! - [`sim`]: fixed-step RK4 closed-loop simulation with event handling.
//! - [`metrics`]: RMS/peak statistics and envelope-violation scans.
//!
//! File formats and the command-line runner live in the `tvbarrier` crate.

#![no_std]
#![warn(missing_debug_implementations)]
// NaN must fail every validity check, so comparisons are written negated on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod constraint;
pub mod controller;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod plant;
pub mod scenario;
pub mod sim;

pub use error::{Error, Result};
pub use linalg::{Matrix, Vector};

/// Degrees to radians.
#[inline]
pub fn deg(x: f64) -> f64 {
    x * core::f64::consts::PI / 180.0
}

/// Radians to degrees.
#[inline]
pub fn to_deg(x: f64) -> f64 {
    x * 180.0 / core::f64::consts::PI
}
