//! Reference trajectories and the pick-and-place event schedule.

use alloc::vec::Vec;

use crate::constraint::BarrierEnvelope;
use crate::linalg::Vector;
use crate::{deg, Error, Result};

/// Shape of a setpoint transition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Profile {
    /// Quintic blend with zero velocity and acceleration at both ends.
    Quintic { duration: f64 },
    /// Instantaneous jump. Not smooth; only meant for stress tests.
    Step,
}

impl Profile {
    pub fn is_smooth(&self) -> bool {
        matches!(self, Profile::Quintic { .. })
    }
}

/// Desired position, velocity and acceleration.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Reference<const N: usize> {
    pub q: Vector<N>,
    pub qd: Vector<N>,
    pub qdd: Vector<N>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReferenceGenerator<const N: usize> {
    pub q_from: Vector<N>,
    pub q_to: Vector<N>,
    pub t_start: f64,
    pub profile: Profile,
}

impl<const N: usize> ReferenceGenerator<N> {
    /// A generator that holds `q` forever.
    pub fn hold(q: Vector<N>) -> Self {
        Self { q_from: q, q_to: q, t_start: 0.0, profile: Profile::Step }
    }

    pub fn quintic(q_from: Vector<N>, q_to: Vector<N>, t_start: f64, duration: f64) -> Result<Self> {
        if !(duration > 0.0) || !duration.is_finite() {
            return Err(Error::InvalidParameter { name: "transition", reason: "must be finite and > 0" });
        }
        Ok(Self { q_from, q_to, t_start, profile: Profile::Quintic { duration } })
    }

    pub fn at(&self, t: f64) -> Reference<N> {
        reference_at(self, t)
    }
}

pub fn reference_at<const N: usize>(gen: &ReferenceGenerator<N>, t: f64) -> Reference<N> {
    let hold = |q| Reference { q, qd: Vector::zeros(), qdd: Vector::zeros() };
    if t < gen.t_start {
        return hold(gen.q_from);
    }
    let duration = match gen.profile {
        Profile::Step => return hold(gen.q_to),
        Profile::Quintic { duration } => duration,
    };
    if t >= gen.t_start + duration {
        return hold(gen.q_to);
    }
    let tau = (t - gen.t_start) / duration;
    let (t2, t3) = (tau * tau, tau * tau * tau);
    let pos = t3 * (10.0 - 15.0 * tau + 6.0 * t2);
    let vel = 30.0 * t2 * (1.0 - 2.0 * tau + t2) / duration;
    let acc = 60.0 * tau * (1.0 - 3.0 * tau + 2.0 * t2) / (duration * duration);
    let delta = gen.q_to - gen.q_from;
    Reference { q: gen.q_from + delta * pos, qd: delta * vel, qdd: delta * acc }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EventKind<const N: usize> {
    Setpoint { target: Vector<N>, profile: Profile },
    Payload { mass: f64 },
    PayloadRelease,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Event<const N: usize> {
    pub time: f64,
    pub kind: EventKind<N>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario<const N: usize> {
    /// Initial configuration, also the reference until the first setpoint.
    pub q_init: Vector<N>,
    pub events: Vec<Event<N>>,
    pub t_end: f64,
    pub envelope: BarrierEnvelope<N>,
}

impl<const N: usize> Scenario<N> {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(Error::InvalidParameter { name: "t_end", reason: "must be finite and > 0" });
        }
        self.envelope.validate()?;
        let mut last = f64::NEG_INFINITY;
        let mut loaded = false;
        for ev in &self.events {
            if !(ev.time >= 0.0 && ev.time <= self.t_end) {
                return Err(Error::InvalidParameter { name: "event time", reason: "outside [0, t_end]" });
            }
            if !(ev.time > last) {
                return Err(Error::InvalidParameter {
                    name: "event time",
                    reason: "events must be strictly increasing",
                });
            }
            last = ev.time;
            match ev.kind {
                EventKind::Payload { mass } => {
                    if loaded {
                        return Err(Error::InvalidParameter {
                            name: "payload",
                            reason: "attached before previous release",
                        });
                    }
                    if !(mass >= 0.0) {
                        return Err(Error::InvalidParameter { name: "payload", reason: "mass must be >= 0" });
                    }
                    loaded = true;
                }
                EventKind::PayloadRelease => {
                    if !loaded {
                        return Err(Error::InvalidParameter { name: "payload", reason: "release without payload" });
                    }
                    loaded = false;
                }
                EventKind::Setpoint { profile: Profile::Quintic { duration }, .. } if !(duration > 0.0) => {
                    return Err(Error::InvalidParameter { name: "transition", reason: "must be > 0" });
                }
                EventKind::Setpoint { .. } => {}
            }
        }
        Ok(())
    }

    /// `false` when any setpoint jumps instantaneously.
    pub fn is_smooth(&self) -> bool {
        self.events.iter().all(|ev| match ev.kind {
            EventKind::Setpoint { profile, .. } => profile.is_smooth(),
            _ => true,
        })
    }

    pub fn setpoints(&self) -> impl Iterator<Item = (f64, Vector<N>)> + '_ {
        self.events.iter().filter_map(|ev| match ev.kind {
            EventKind::Setpoint { target, .. } => Some((ev.time, target)),
            _ => None,
        })
    }

    /// Reference the schedule produces at `t`, ignoring the plant.
    pub fn reference_at(&self, t: f64) -> Reference<N> {
        let mut gen = ReferenceGenerator::hold(self.q_init);
        for ev in &self.events {
            if ev.time > t {
                break;
            }
            if let EventKind::Setpoint { target, profile } = ev.kind {
                let from = gen.at(ev.time).q;
                gen = ReferenceGenerator { q_from: from, q_to: target, t_start: ev.time, profile };
            }
        }
        gen.at(t)
    }
}

/// Options for [`build_pick_place`]. Angles in degrees, times in seconds.
#[derive(Clone, Debug, PartialEq)]
pub struct PickPlaceOptions {
    pub initial_deg: [f64; 2],
    pub region_a_deg: [f64; 2],
    pub region_b_deg: [f64; 2],
    pub region_c_deg: [f64; 2],
    /// Time of the move from the initial pose to region A.
    pub first_move: f64,
    pub payload_times: Vec<f64>,
    pub payload_masses: Vec<f64>,
    /// Delay from a payload attach to the first leg of its cycle.
    pub leg_offset: f64,
    /// Start-to-start spacing of the A→B→C→B→A legs.
    pub leg_spacing: f64,
    pub profile: Profile,
    pub t_end: f64,
    pub envelope: BarrierEnvelope<2>,
}

impl Default for PickPlaceOptions {
    fn default() -> Self {
        Self {
            initial_deg: [90.0, -180.0],
            region_a_deg: [45.0, -135.0],
            region_b_deg: [90.0, -90.0],
            region_c_deg: [45.0, -135.0],
            first_move: 10.0,
            payload_times: alloc::vec![30.0, 70.0, 110.0],
            payload_masses: alloc::vec![0.5, 1.0, 1.5],
            leg_offset: 5.0,
            leg_spacing: 10.0,
            profile: Profile::Quintic { duration: 2.0 },
            t_end: 150.0,
            envelope: default_envelope(),
        }
    }
}

/// Envelope of the reference experiment: ρ0 = (120°, 185°), ρss = 3°, ω = 0.1.
pub fn default_envelope() -> BarrierEnvelope<2> {
    BarrierEnvelope {
        rho0: Vector::new([deg(120.0), deg(185.0)]),
        rho_ss: Vector::new([deg(3.0), deg(3.0)]),
        omega: Vector::new([0.1, 0.1]),
        t_anchor: 0.0,
    }
}

fn rad(a: [f64; 2]) -> Vector<2> {
    Vector::new([deg(a[0]), deg(a[1])])
}

/// Pick-and-place schedule: settle, move to A, then one A→B→C→B→A cycle per payload.
///
/// Each cycle attaches its payload at A, runs four legs `leg_spacing` apart
/// starting `leg_offset` after the attach, and releases the payload halfway
/// through the dwell at C. Events after `t_end` are dropped, so a shorter
/// horizon gives a prefix of the full schedule.
pub fn build_pick_place(opts: &PickPlaceOptions) -> Result<Scenario<2>> {
    if opts.payload_times.len() != opts.payload_masses.len() {
        return Err(Error::InvalidParameter { name: "payload_masses", reason: "one mass per payload time" });
    }
    let transition = match opts.profile {
        Profile::Quintic { duration } => duration,
        Profile::Step => 0.0,
    };
    let (a, b, c) = (rad(opts.region_a_deg), rad(opts.region_b_deg), rad(opts.region_c_deg));
    let setpoint = |time, target| Event { time, kind: EventKind::Setpoint { target, profile: opts.profile } };

    let mut events = alloc::vec![setpoint(opts.first_move, a)];
    for (&t0, &mass) in opts.payload_times.iter().zip(&opts.payload_masses) {
        let leg = |k: f64| t0 + opts.leg_offset + k * opts.leg_spacing;
        let c_arrival = leg(1.0) + transition;
        events.push(Event { time: t0, kind: EventKind::Payload { mass } });
        events.push(setpoint(leg(0.0), b));
        events.push(setpoint(leg(1.0), c));
        events.push(Event { time: 0.5 * (c_arrival + leg(2.0)), kind: EventKind::PayloadRelease });
        events.push(setpoint(leg(2.0), b));
        events.push(setpoint(leg(3.0), a));
    }
    events.retain(|ev| ev.time <= opts.t_end);
    let scenario = Scenario { q_init: rad(opts.initial_deg), events, t_end: opts.t_end, envelope: opts.envelope };
    scenario.validate()?;
    Ok(scenario)
}
