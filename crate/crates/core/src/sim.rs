//! Fixed-step RK4 closed-loop simulation of the two-link arm.
//!
//! The integrated state is `[q, q̇, K̂]`; plant and adaptive gains advance in
//! one RK4 step. Events snap to the nearest step boundary and are applied
//! before the step that starts there.
//!
//! Each step of `dt` may be split into `substeps` equal RK4 steps. Near the
//! steady-state envelope the barrier gain scales like `1/b²` and the closed
//! loop becomes too stiff for a single RK4 step of 1 ms; the substeps keep the
//! event and logging grid at `dt` while resolving the fast dynamics.

use alloc::vec::Vec;

use crate::constraint::{barrier_transform, regressor, BarrierEnvelope, REGRESSOR_LEN};
use crate::controller::{
    asmc_surface, control_torque, gain_derivative, AdaptiveGains, ControllerConfig, ControllerKind, Regressor,
};
use crate::linalg::Vector;
use crate::plant::{EulerLagrange, JointState, PlantParams};
use crate::scenario::{Event, EventKind, Reference, ReferenceGenerator, Scenario};
use crate::{Error, Result};

pub const DOF: usize = 2;
/// Default RK4 steps per 1 ms grid step (internal step 20 µs).
pub const DEFAULT_SUBSTEPS: usize = 50;
/// Length of the flattened augmented state `[q, q̇, K̂]`.
pub const STATE_LEN: usize = 2 * DOF + REGRESSOR_LEN;

/// When the controller output is recomputed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum HoldMode {
    /// Recomputed at every RK4 stage.
    #[default]
    Continuous,
    /// Computed once per step and held.
    Zoh,
}

/// Whether a setpoint change re-opens the envelope.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum EnvelopeReset {
    /// One envelope anchored at `t = 0` for the whole run.
    #[default]
    Never,
    /// Re-anchor at every setpoint event.
    PerSetpoint,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimConfig {
    pub dt: f64,
    /// RK4 steps per `dt`.
    pub substeps: usize,
    /// Log every `decimation` steps.
    pub decimation: usize,
    pub hold: HoldMode,
    pub envelope_reset: EnvelopeReset,
    /// Stop and return the prefix instead of failing when the envelope is breached.
    pub tolerate_breach: bool,
    pub qd_init: Vector<DOF>,
    pub controller: ControllerConfig<DOF>,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            substeps: DEFAULT_SUBSTEPS,
            decimation: 10,
            hold: HoldMode::Continuous,
            envelope_reset: EnvelopeReset::Never,
            tolerate_breach: false,
            qd_init: Vector::zeros(),
            controller: ControllerConfig::default(),
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidParameter { name: "dt", reason: "must be finite and > 0" });
        }
        if self.substeps == 0 {
            return Err(Error::InvalidParameter { name: "substeps", reason: "must be >= 1" });
        }
        if self.decimation == 0 {
            return Err(Error::InvalidParameter { name: "decimation", reason: "must be >= 1" });
        }
        if !self.qd_init.is_finite() {
            return Err(Error::InvalidParameter { name: "qd_init", reason: "must be finite" });
        }
        self.controller.validate()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AugmentedState {
    pub q: Vector<DOF>,
    pub qd: Vector<DOF>,
    pub k_hat: Regressor,
    pub t: f64,
}

impl AugmentedState {
    pub fn to_array(&self) -> [f64; STATE_LEN] {
        let mut x = [0.0; STATE_LEN];
        x[..DOF].copy_from_slice(&self.q.0);
        x[DOF..2 * DOF].copy_from_slice(&self.qd.0);
        x[2 * DOF..].copy_from_slice(&self.k_hat);
        x
    }

    pub fn from_array(x: &[f64; STATE_LEN], t: f64) -> Self {
        let mut s = Self { q: Vector::zeros(), qd: Vector::zeros(), k_hat: [0.0; REGRESSOR_LEN], t };
        s.q.0.copy_from_slice(&x[..DOF]);
        s.qd.0.copy_from_slice(&x[DOF..2 * DOF]);
        s.k_hat.copy_from_slice(&x[2 * DOF..]);
        s
    }
}

/// One classical Runge-Kutta step of `ẋ = f(t, x)`.
pub fn rk4_step<const M: usize, F>(mut f: F, t: f64, x: &[f64; M], dt: f64) -> Result<[f64; M]>
where
    F: FnMut(f64, &[f64; M]) -> Result<[f64; M]>,
{
    let mut stage = |tt: f64, xx: &[f64; M]| -> Result<[f64; M]> {
        let k = f(tt, xx)?;
        if k.iter().all(|v| v.is_finite()) {
            Ok(k)
        } else {
            Err(Error::SimDiverged { t: tt })
        }
    };
    let offset = |k: &[f64; M], h: f64| -> [f64; M] { core::array::from_fn(|i| x[i] + h * k[i]) };
    let k1 = stage(t, x)?;
    let k2 = stage(t + 0.5 * dt, &offset(&k1, 0.5 * dt))?;
    let k3 = stage(t + 0.5 * dt, &offset(&k2, 0.5 * dt))?;
    let k4 = stage(t + dt, &offset(&k3, dt))?;
    let next: [f64; M] = core::array::from_fn(|i| x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
    if next.iter().all(|v| v.is_finite()) {
        Ok(next)
    } else {
        Err(Error::SimDiverged { t: t + dt })
    }
}

/// One logged sample. Angles in radians.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub q: [f64; DOF],
    pub qd: [f64; DOF],
    pub q_des: [f64; DOF],
    pub qd_des: [f64; DOF],
    pub e: [f64; DOF],
    pub edot: [f64; DOF],
    pub b: [f64; DOF],
    pub s: [f64; DOF],
    pub chi: Regressor,
    pub k_hat: Regressor,
    pub tau: [f64; DOF],
    pub payload_mass: f64,
}

impl TraceRow {
    pub fn s_norm(&self) -> f64 {
        Vector::new(self.s).norm()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Termination {
    Completed,
    /// Run stopped early because the error left the envelope.
    Breach {
        t: f64,
        joint: usize,
        error: f64,
        bound: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimTrace {
    pub controller: ControllerKind,
    pub rows: Vec<TraceRow>,
    pub termination: Termination,
    pub dt: f64,
    pub substeps: usize,
    pub decimation: usize,
    /// `false` when the reference contained step changes.
    pub smooth_reference: bool,
}

impl SimTrace {
    pub fn t_span(&self) -> Option<(f64, f64)> {
        Some((self.rows.first()?.t, self.rows.last()?.t))
    }
}

/// Mutable run context that events act on.
#[derive(Clone, Debug)]
pub struct RunContext {
    pub plant: PlantParams,
    pub reference: ReferenceGenerator<DOF>,
    pub envelope: BarrierEnvelope<DOF>,
    pub envelope_reset: EnvelopeReset,
}

/// Applies one scheduled event at time `t` with the arm at `q`.
pub fn apply_event(ctx: &mut RunContext, q: &Vector<DOF>, event: &Event<DOF>, t: f64) -> Result<()> {
    match event.kind {
        EventKind::Payload { mass } => ctx.plant = ctx.plant.attach_payload(mass)?,
        EventKind::PayloadRelease => ctx.plant = ctx.plant.attach_payload(0.0)?,
        EventKind::Setpoint { target, profile } => {
            let from = ctx.reference.at(t).q;
            ctx.reference = ReferenceGenerator { q_from: from, q_to: target, t_start: t, profile };
            if ctx.envelope_reset == EnvelopeReset::PerSetpoint {
                let e_now = *q - ctx.reference.at(t).q;
                ctx.envelope = ctx.envelope.reset_anchor(t, &e_now)?;
            }
        }
    }
    Ok(())
}

/// Closed-loop quantities at one instant.
#[derive(Clone, Copy, Debug)]
struct Evaluation {
    reference: Reference<DOF>,
    e: Vector<DOF>,
    edot: Vector<DOF>,
    b: Vector<DOF>,
    s: Vector<DOF>,
    chi: Regressor,
    tau: Vector<DOF>,
    qdd: Vector<DOF>,
    k_hat_dot: Regressor,
}

struct ClosedLoop<'a> {
    kind: ControllerKind,
    cfg: &'a ControllerConfig<DOF>,
    ctx: &'a RunContext,
}

impl ClosedLoop<'_> {
    fn evaluate(&self, t: f64, x: &AugmentedState, held_tau: Option<Vector<DOF>>) -> Result<Evaluation> {
        let reference = self.ctx.reference.at(t);
        let e = x.q - reference.q;
        let edot = x.qd - reference.qd;
        let (b, _) = self.ctx.envelope.at(t)?;
        let gains = AdaptiveGains { k_hat: x.k_hat, eta: self.cfg.eta };

        let (s, chi, tau, k_hat_dot) = match self.kind {
            ControllerKind::Proposed => {
                let tr = barrier_transform(&e, &edot, &b, &self.cfg.phi)?;
                let chi = regressor(&e, &edot, &tr.zeta);
                let tau = control_torque(&tr.s, &chi, &gains, self.cfg);
                (tr.s, chi, tau, gain_derivative(&tr.s, &chi, &gains))
            }
            ControllerKind::Ablf => {
                let tr = barrier_transform(&e, &edot, &b, &self.cfg.phi)?;
                let chi = regressor(&e, &edot, &tr.zeta);
                (tr.s, chi, crate::controller::ablf_torque(&tr.s, x.k_hat[0], self.cfg), scalar_rates(&tr.s, &gains))
            }
            ControllerKind::Asmc => {
                let s = asmc_surface(&e, &edot, &self.cfg.phi);
                let tau = crate::controller::asmc_torque(&e, &edot, x.k_hat[0], self.cfg);
                (s, [1.0, 0.0, 0.0, 0.0, 0.0], tau, scalar_rates(&s, &gains))
            }
        };
        let tau = held_tau.unwrap_or(tau);
        let qdd = self.ctx.plant.forward_dynamics(&JointState::new(x.q, x.qd, t), &tau)?;
        Ok(Evaluation { reference, e, edot, b, s, chi, tau, qdd, k_hat_dot })
    }

    fn derivative(&self, t: f64, x: &[f64; STATE_LEN], held_tau: Option<Vector<DOF>>) -> Result<[f64; STATE_LEN]> {
        let state = AugmentedState::from_array(x, t);
        let ev = self.evaluate(t, &state, held_tau)?;
        let mut dx = [0.0; STATE_LEN];
        dx[..DOF].copy_from_slice(&state.qd.0);
        dx[DOF..2 * DOF].copy_from_slice(&ev.qdd.0);
        dx[2 * DOF..].copy_from_slice(&ev.k_hat_dot);
        Ok(dx)
    }
}

/// Only `K̂_0` adapts for the scalar-gain baselines.
fn scalar_rates(s: &Vector<DOF>, gains: &AdaptiveGains) -> Regressor {
    let mut rates = [0.0; REGRESSOR_LEN];
    rates[0] = crate::controller::scalar_gain_derivative(s, gains.k_hat[0], gains.eta[0]);
    rates
}

/// Initial adaptive estimates for a controller; unused slots start at zero.
pub fn initial_gains(kind: ControllerKind, cfg: &ControllerConfig<DOF>) -> Regressor {
    match kind {
        ControllerKind::Proposed => cfg.k_hat_init,
        ControllerKind::Asmc | ControllerKind::Ablf => {
            let mut k = [0.0; REGRESSOR_LEN];
            k[0] = cfg.k_hat_init[0];
            k
        }
    }
}

fn stamp(err: Error, t: f64) -> Error {
    match err {
        Error::EnvelopeBreach { joint, error, bound } => Error::BreachDuringRun { t, joint, error, bound },
        other => other,
    }
}

/// Runs `controller` over `scenario` from rest at the scenario's initial pose.
pub fn run(
    scenario: &Scenario<DOF>,
    plant: &PlantParams,
    controller: ControllerKind,
    cfg: &SimConfig,
) -> Result<SimTrace> {
    cfg.validate()?;
    plant.validate()?;
    scenario.validate()?;

    let dt = cfg.dt;
    let n_steps = libm::round(scenario.t_end / dt) as usize;
    let event_steps: Vec<usize> = scenario.events.iter().map(|ev| libm::round(ev.time / dt) as usize).collect();

    let mut ctx = RunContext {
        plant: *plant,
        reference: ReferenceGenerator::hold(scenario.q_init),
        envelope: scenario.envelope,
        envelope_reset: cfg.envelope_reset,
    };
    let mut x = AugmentedState {
        q: scenario.q_init,
        qd: cfg.qd_init,
        k_hat: initial_gains(controller, &cfg.controller),
        t: 0.0,
    }
    .to_array();

    let mut trace = SimTrace {
        controller,
        rows: Vec::with_capacity(n_steps / cfg.decimation + 2),
        termination: Termination::Completed,
        dt,
        substeps: cfg.substeps,
        decimation: cfg.decimation,
        smooth_reference: scenario.is_smooth(),
    };
    let mut next_event = 0;

    for n in 0..=n_steps {
        let t = n as f64 * dt;
        while next_event < scenario.events.len() && event_steps[next_event] <= n {
            let q = AugmentedState::from_array(&x, t).q;
            apply_event(&mut ctx, &q, &scenario.events[next_event], t)?;
            next_event += 1;
        }

        let log = n % cfg.decimation == 0;
        let needs_eval = log || cfg.hold == HoldMode::Zoh;
        let looped = ClosedLoop { kind: controller, cfg: &cfg.controller, ctx: &ctx };

        let outcome = (|| -> Result<Option<[f64; STATE_LEN]>> {
            let mut held = None;
            if needs_eval {
                let state = AugmentedState::from_array(&x, t);
                let ev = looped.evaluate(t, &state, None)?;
                if log {
                    trace.rows.push(row(&state, &ev, ctx.plant.payload_mass));
                }
                if cfg.hold == HoldMode::Zoh {
                    held = Some(ev.tau);
                }
            }
            if n == n_steps {
                return Ok(None);
            }
            let h = dt / cfg.substeps as f64;
            let mut xs = x;
            for k in 0..cfg.substeps {
                xs = rk4_step(|ts, xx| looped.derivative(ts, xx, held), t + k as f64 * h, &xs, h)?;
            }
            Ok(Some(xs))
        })();

        match outcome {
            Ok(Some(next)) => x = next,
            Ok(None) => break,
            Err(err) => match stamp(err, t) {
                Error::BreachDuringRun { t, joint, error, bound } if cfg.tolerate_breach => {
                    trace.termination = Termination::Breach { t, joint, error, bound };
                    break;
                }
                other => return Err(other),
            },
        }
    }
    Ok(trace)
}

fn row(x: &AugmentedState, ev: &Evaluation, payload_mass: f64) -> TraceRow {
    TraceRow {
        t: x.t,
        q: x.q.0,
        qd: x.qd.0,
        q_des: ev.reference.q.0,
        qd_des: ev.reference.qd.0,
        e: ev.e.0,
        edot: ev.edot.0,
        b: ev.b.0,
        s: ev.s.0,
        chi: ev.chi,
        k_hat: x.k_hat,
        tau: ev.tau.0,
        payload_mass,
    }
}
