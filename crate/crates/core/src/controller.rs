//! Adaptive barrier controller and the two comparison baselines.
//!
//! Proposed law:
//!
//! ```text
//! τ    = −Λ s − (Σ_j K̂_j χ_j) · sat(s, ε)
//! K̂̇_j = ‖s‖ χ_j − η_j K̂_j
//! ```
//!
//! `sat(s, ε)` is `s/‖s‖` outside a boundary layer of width `ε` and `s/ε`
//! inside it, which removes the singularity at `s = 0`.

use core::fmt;
use core::str::FromStr;

use crate::constraint::REGRESSOR_LEN;
use crate::linalg::{is_spd, Matrix, Vector};
use crate::{Error, Result};

pub type Regressor = [f64; REGRESSOR_LEN];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ControllerKind {
    /// Adaptive barrier law with the state-dependent regressor.
    Proposed,
    /// Adaptive sliding mode on the raw error, unaware of the envelope.
    Asmc,
    /// Barrier law whose adaptation only covers a constant uncertainty bound.
    Ablf,
}

impl ControllerKind {
    pub const ALL: [ControllerKind; 3] = [ControllerKind::Proposed, ControllerKind::Asmc, ControllerKind::Ablf];

    pub fn name(self) -> &'static str {
        match self {
            ControllerKind::Proposed => "proposed",
            ControllerKind::Asmc => "asmc",
            ControllerKind::Ablf => "ablf",
        }
    }

    /// Whether the control law itself needs the barrier transform.
    pub fn uses_barrier(self) -> bool {
        !matches!(self, ControllerKind::Asmc)
    }
}

impl fmt::Display for ControllerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ControllerKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "proposed" => Ok(ControllerKind::Proposed),
            "asmc" => Ok(ControllerKind::Asmc),
            "ablf" => Ok(ControllerKind::Ablf),
            _ => Err(Error::InvalidParameter { name: "controller", reason: "expected proposed, asmc or ablf" }),
        }
    }
}

/// Adaptive estimates `K̂_j` and their leak rates `η_j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdaptiveGains {
    pub k_hat: Regressor,
    pub eta: Regressor,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ControllerConfig<const N: usize> {
    pub lambda: Matrix<N>,
    pub phi: Matrix<N>,
    /// Boundary-layer width of the saturation.
    pub epsilon: f64,
    pub k_hat_init: Regressor,
    pub eta: Regressor,
}

impl<const N: usize> ControllerConfig<N> {
    pub fn validate(&self) -> Result<()> {
        let pd = |m: &Matrix<N>, name| match is_spd(m) {
            Ok(true) => Ok(()),
            Ok(false) => Err(Error::InvalidParameter { name, reason: "must be positive definite" }),
            Err(_) => Err(Error::InvalidParameter { name, reason: "must be symmetric" }),
        };
        pd(&self.lambda, "lambda")?;
        pd(&self.phi, "phi")?;
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::InvalidParameter { name: "epsilon", reason: "must be finite and > 0" });
        }
        if self.k_hat_init.iter().any(|k| !(*k >= 0.0) || !k.is_finite()) {
            return Err(Error::InvalidParameter { name: "k_hat_init", reason: "must be finite and >= 0" });
        }
        if self.eta.iter().any(|k| !(*k > 0.0) || !k.is_finite()) {
            return Err(Error::InvalidParameter { name: "eta", reason: "must be finite and > 0" });
        }
        Ok(())
    }

    pub fn initial_gains(&self) -> AdaptiveGains {
        AdaptiveGains { k_hat: self.k_hat_init, eta: self.eta }
    }
}

impl Default for ControllerConfig<2> {
    fn default() -> Self {
        Self {
            lambda: Matrix::from_diagonal(&Vector::new([4.0, 4.0])),
            phi: Matrix::from_diagonal(&Vector::new([1.2, 1.2])),
            // Wide layer: the stiff barrier gain makes a thin layer chatter numerically.
            epsilon: 1.0,
            k_hat_init: [0.1; REGRESSOR_LEN],
            eta: [1.0; REGRESSOR_LEN],
        }
    }
}

/// Continuous replacement for `s/‖s‖`.
pub fn saturate<const N: usize>(s: &Vector<N>, epsilon: f64) -> Vector<N> {
    let n = s.norm();
    if n >= epsilon {
        *s * (1.0 / n)
    } else {
        *s * (1.0 / epsilon)
    }
}

pub fn control_torque<const N: usize>(
    s: &Vector<N>,
    chi: &Regressor,
    gains: &AdaptiveGains,
    cfg: &ControllerConfig<N>,
) -> Vector<N> {
    let robust: f64 = gains.k_hat.iter().zip(chi.iter()).map(|(k, c)| k * c).sum();
    robust_law(s, robust, cfg)
}

fn robust_law<const N: usize>(s: &Vector<N>, robust: f64, cfg: &ControllerConfig<N>) -> Vector<N> {
    -(cfg.lambda * *s) - saturate(s, cfg.epsilon) * robust
}

/// `K̂̇_j = ‖s‖ χ_j − η_j K̂_j`.
pub fn gain_derivative<const N: usize>(s: &Vector<N>, chi: &Regressor, gains: &AdaptiveGains) -> Regressor {
    let ns = s.norm();
    core::array::from_fn(|j| ns * chi[j] - gains.eta[j] * gains.k_hat[j])
}

/// Linear sliding surface `ė + Φ e` used by the envelope-unaware baseline.
pub fn asmc_surface<const N: usize>(e: &Vector<N>, edot: &Vector<N>, phi: &Matrix<N>) -> Vector<N> {
    *edot + *phi * *e
}

/// Adaptive sliding-mode baseline with one scalar gain.
pub fn asmc_torque<const N: usize>(
    e: &Vector<N>,
    edot: &Vector<N>,
    k_hat: f64,
    cfg: &ControllerConfig<N>,
) -> Vector<N> {
    robust_law(&asmc_surface(e, edot, &cfg.phi), k_hat, cfg)
}

/// `K̂̇ = ‖s‖ − η K̂` for the scalar baselines.
pub fn scalar_gain_derivative<const N: usize>(s: &Vector<N>, k_hat: f64, eta: f64) -> f64 {
    s.norm() - eta * k_hat
}

/// Barrier baseline whose robust term is the constant-bound estimate alone.
pub fn ablf_torque<const N: usize>(s: &Vector<N>, k_hat0: f64, cfg: &ControllerConfig<N>) -> Vector<N> {
    robust_law(s, k_hat0, cfg)
}
