//! Time-varying error envelopes and the barrier transform.
//!
//! Each joint's error must satisfy `|e_i| < b_i(t)` with
//! `b_i(t) = (ρ0_i − ρss_i)·exp(−ω_i (t − t_anchor)) + ρss_i`.
//! Inside the envelope the error is mapped through
//! `ζ_i = 1 / (b_i² − e_i²)`, `ψ = ζ e` and `s = ė + Φ ψ`.

use crate::linalg::{diag_norm, two_norm, Matrix, Vector};
use crate::{Error, Result};

/// Number of regressor terms `χ_0 … χ_4`.
pub const REGRESSOR_LEN: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BarrierEnvelope<const N: usize> {
    pub rho0: Vector<N>,
    pub rho_ss: Vector<N>,
    pub omega: Vector<N>,
    pub t_anchor: f64,
}

impl<const N: usize> BarrierEnvelope<N> {
    pub fn new(rho0: Vector<N>, rho_ss: Vector<N>, omega: Vector<N>) -> Result<Self> {
        let env = Self { rho0, rho_ss, omega, t_anchor: 0.0 };
        env.validate()?;
        Ok(env)
    }

    pub fn validate(&self) -> Result<()> {
        for i in 0..N {
            if !(self.rho_ss[i] > 0.0) || !self.rho_ss[i].is_finite() {
                return Err(Error::InvalidParameter { name: "rho_ss", reason: "must be finite and > 0" });
            }
            if !(self.rho0[i] >= self.rho_ss[i]) || !self.rho0[i].is_finite() {
                return Err(Error::InvalidParameter { name: "rho0", reason: "must be finite and >= rho_ss" });
            }
            if !(self.omega[i] > 0.0) || !self.omega[i].is_finite() {
                return Err(Error::InvalidParameter { name: "omega", reason: "must be finite and > 0" });
            }
        }
        if !self.t_anchor.is_finite() {
            return Err(Error::InvalidParameter { name: "t_anchor", reason: "must be finite" });
        }
        Ok(())
    }

    /// Bound `b(t)` and its rate `ḃ(t)`.
    pub fn at(&self, t: f64) -> Result<(Vector<N>, Vector<N>)> {
        if t < self.t_anchor {
            return Err(Error::BeforeAnchor { t, anchor: self.t_anchor });
        }
        let elapsed = t - self.t_anchor;
        let mut b = Vector::zeros();
        let mut bdot = Vector::zeros();
        for i in 0..N {
            let span = self.rho0[i] - self.rho_ss[i];
            let decay = libm::exp(-self.omega[i] * elapsed);
            b[i] = span * decay + self.rho_ss[i];
            bdot[i] = -self.omega[i] * span * decay;
        }
        Ok((b, bdot))
    }

    /// Re-opens the envelope to `ρ0` at time `t`.
    pub fn reset_anchor(&self, t: f64, e_now: &Vector<N>) -> Result<Self> {
        for i in 0..N {
            if !(e_now[i].abs() < self.rho0[i]) {
                return Err(Error::InfeasiblePhaseStart { joint: i, error: e_now[i], rho0: self.rho0[i] });
            }
        }
        Ok(Self { t_anchor: t, ..*self })
    }
}

/// Free-function form of [`BarrierEnvelope::at`].
pub fn envelope_at<const N: usize>(env: &BarrierEnvelope<N>, t: f64) -> Result<(Vector<N>, Vector<N>)> {
    env.at(t)
}

/// Barrier-transformed error signals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BarrierTransform<const N: usize> {
    pub psi: Vector<N>,
    /// Diagonal of `ζ`.
    pub zeta: Vector<N>,
    pub s: Vector<N>,
}

pub fn barrier_transform<const N: usize>(
    e: &Vector<N>,
    edot: &Vector<N>,
    b: &Vector<N>,
    phi: &Matrix<N>,
) -> Result<BarrierTransform<N>> {
    let mut zeta = Vector::zeros();
    for i in 0..N {
        let gap = b[i] * b[i] - e[i] * e[i];
        // NaN errors are treated as breaches too.
        if !(e[i].abs() < b[i]) || !(gap > 0.0) {
            return Err(Error::EnvelopeBreach { joint: i, error: e[i], bound: b[i] });
        }
        zeta[i] = 1.0 / gap;
    }
    let psi = zeta.zip_map(e, |z, x| z * x);
    let s = *edot + *phi * psi;
    Ok(BarrierTransform { psi, zeta, s })
}

/// Regressor `χ = [1, ‖ξ‖, ‖ζ‖‖ξ‖, ‖ζ‖²‖ξ‖, ‖ζ‖²‖ξ‖³]` with `ξ = [e; ė]`.
pub fn regressor<const N: usize>(e: &Vector<N>, edot: &Vector<N>, zeta: &Vector<N>) -> [f64; REGRESSOR_LEN] {
    let xi = stacked_norm(e, edot);
    let z = diag_norm(zeta);
    let z2 = z * z;
    [1.0, xi, z * xi, z2 * xi, z2 * xi * xi * xi]
}

fn stacked_norm<const N: usize>(a: &Vector<N>, b: &Vector<N>) -> f64 {
    let (na, nb) = (two_norm(a), two_norm(b));
    let scale = na.max(nb);
    if scale == 0.0 {
        return 0.0;
    }
    scale * libm::sqrt((na / scale) * (na / scale) + (nb / scale) * (nb / scale))
}

/// `ζ̇_i = −(2 b_i ḃ_i − 2 e_i ė_i) / (b_i² − e_i²)²`.
pub fn zeta_rate<const N: usize>(e: &Vector<N>, edot: &Vector<N>, b: &Vector<N>, bdot: &Vector<N>) -> Vector<N> {
    let mut out = Vector::zeros();
    for i in 0..N {
        let gap = b[i] * b[i] - e[i] * e[i];
        out[i] = -(2.0 * b[i] * bdot[i] - 2.0 * e[i] * edot[i]) / (gap * gap);
    }
    out
}

/// The same rate written as `ζ² (r1 + r2)` with `r1 = −2 b ḃ`, `r2 = 2 e ė`.
pub fn zeta_rate_split<const N: usize>(
    zeta: &Vector<N>,
    e: &Vector<N>,
    edot: &Vector<N>,
    b: &Vector<N>,
    bdot: &Vector<N>,
) -> Vector<N> {
    let mut out = Vector::zeros();
    for i in 0..N {
        let r1 = -2.0 * b[i] * bdot[i];
        let r2 = 2.0 * e[i] * edot[i];
        out[i] = zeta[i] * zeta[i] * (r1 + r2);
    }
    out
}

/// Everything the barrier controller needs at one instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BarrierState<const N: usize> {
    pub b: Vector<N>,
    pub bdot: Vector<N>,
    pub zeta: Vector<N>,
    pub psi: Vector<N>,
    pub s: Vector<N>,
    pub chi: [f64; REGRESSOR_LEN],
}

impl<const N: usize> BarrierState<N> {
    pub fn evaluate(
        env: &BarrierEnvelope<N>,
        t: f64,
        e: &Vector<N>,
        edot: &Vector<N>,
        phi: &Matrix<N>,
    ) -> Result<Self> {
        let (b, bdot) = env.at(t)?;
        let tr = barrier_transform(e, edot, &b, phi)?;
        let chi = regressor(e, edot, &tr.zeta);
        Ok(Self { b, bdot, zeta: tr.zeta, psi: tr.psi, s: tr.s, chi })
    }
}
