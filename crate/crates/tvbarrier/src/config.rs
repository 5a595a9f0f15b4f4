//! TOML run configuration.
//!
//! Every section and key is optional; omitted keys take the reference
//! experiment's values. Angles are in degrees, times in seconds.
//!
//! ```toml
//! [plant]        # m1 m2 l1 l2 r1 r2 link_radius gamma1 gamma2 g
//!                # disturbance_amp disturbance_freq inertia = "unscaled" | "cylinder12"
//! [controller]   # lambda phi (2x2 arrays) eta k_hat_init (5 entries) epsilon
//! [envelope]     # rho0_1 rho0_2 rho_ss1 rho_ss2 omega1 omega2
//!                # reset = "never" | "per_setpoint"
//! [integrator]   # dt substeps decimation t_end hold = "continuous" | "zoh"
//! [scenario]     # initial_deg region_a_deg region_b_deg region_c_deg first_move
//!                # payload_times payload_masses leg_offset leg_spacing
//!                # reference = "quintic" | "step", transition
//! [run]          # controllers out seed
//! [metrics]      # window ablf_window ([lo, hi] pairs)
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;
use tvbarrier_core::constraint::BarrierEnvelope;
use tvbarrier_core::controller::{ControllerConfig, ControllerKind};
use tvbarrier_core::deg;
use tvbarrier_core::linalg::{Matrix, Vector};
use tvbarrier_core::metrics::Window;
use tvbarrier_core::plant::{InertiaConvention, PlantParams};
use tvbarrier_core::scenario::{build_pick_place, PickPlaceOptions, Profile, Scenario};
use tvbarrier_core::sim::{EnvelopeReset, HoldMode, SimConfig, DEFAULT_SUBSTEPS};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{key}: {message}")]
    Parse { key: String, message: String },
    #[error("{key}: {reason}")]
    Invalid { key: String, reason: String },
}

fn invalid(key: impl Into<String>, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { key: key.into(), reason: reason.into() }
}

/// Maps a core validation error onto a key inside `section`.
fn from_core(section: &str, err: tvbarrier_core::Error) -> ConfigError {
    match err {
        tvbarrier_core::Error::InvalidParameter { name, reason } => invalid(format!("{section}.{name}"), reason),
        other => invalid(section, other.to_string()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inertia {
    Unscaled,
    Cylinder12,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reset {
    Never,
    PerSetpoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hold {
    Continuous,
    Zoh,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceShape {
    Quintic,
    Step,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlantSection {
    pub m1: f64,
    pub m2: f64,
    pub l1: f64,
    pub l2: f64,
    pub r1: f64,
    pub r2: f64,
    pub link_radius: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub g: f64,
    pub disturbance_amp: f64,
    pub disturbance_freq: f64,
    pub inertia: Inertia,
}

impl Default for PlantSection {
    fn default() -> Self {
        let p = PlantParams::default();
        Self {
            m1: p.m1,
            m2: p.m2,
            l1: p.l1,
            l2: p.l2,
            r1: p.r1,
            r2: p.r2,
            link_radius: p.link_radius,
            gamma1: p.gamma1,
            gamma2: p.gamma2,
            g: p.g,
            disturbance_amp: p.disturbance_amp,
            disturbance_freq: p.disturbance_freq,
            inertia: Inertia::Unscaled,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControllerSection {
    pub lambda: [[f64; 2]; 2],
    pub phi: [[f64; 2]; 2],
    pub eta: [f64; 5],
    pub epsilon: f64,
    pub k_hat_init: [f64; 5],
}

impl Default for ControllerSection {
    fn default() -> Self {
        let c = ControllerConfig::<2>::default();
        Self { lambda: c.lambda.0, phi: c.phi.0, eta: c.eta, epsilon: c.epsilon, k_hat_init: c.k_hat_init }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvelopeSection {
    pub rho0_1: f64,
    pub rho0_2: f64,
    pub rho_ss1: f64,
    pub rho_ss2: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub reset: Reset,
}

impl Default for EnvelopeSection {
    fn default() -> Self {
        Self { rho0_1: 120.0, rho0_2: 185.0, rho_ss1: 3.0, rho_ss2: 3.0, omega1: 0.1, omega2: 0.1, reset: Reset::Never }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorSection {
    pub dt: f64,
    pub substeps: usize,
    pub decimation: usize,
    pub t_end: f64,
    pub hold: Hold,
}

impl Default for IntegratorSection {
    fn default() -> Self {
        Self { dt: 1e-3, substeps: DEFAULT_SUBSTEPS, decimation: 10, t_end: 150.0, hold: Hold::Continuous }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSection {
    pub initial_deg: [f64; 2],
    pub region_a_deg: [f64; 2],
    pub region_b_deg: [f64; 2],
    pub region_c_deg: [f64; 2],
    pub first_move: f64,
    pub payload_times: Vec<f64>,
    pub payload_masses: Vec<f64>,
    pub leg_offset: f64,
    pub leg_spacing: f64,
    pub reference: ReferenceShape,
    /// Duration of each quintic leg.
    pub transition: f64,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        let o = PickPlaceOptions::default();
        let transition = match o.profile {
            Profile::Quintic { duration } => duration,
            Profile::Step => 0.0,
        };
        Self {
            initial_deg: o.initial_deg,
            region_a_deg: o.region_a_deg,
            region_b_deg: o.region_b_deg,
            region_c_deg: o.region_c_deg,
            first_move: o.first_move,
            payload_times: o.payload_times,
            payload_masses: o.payload_masses,
            leg_offset: o.leg_offset,
            leg_spacing: o.leg_spacing,
            reference: ReferenceShape::Quintic,
            transition,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    #[serde(deserialize_with = "de_controllers")]
    pub controllers: Vec<ControllerKind>,
    pub out: PathBuf,
    /// Reserved; the pipeline is deterministic.
    pub seed: u64,
}

impl Default for RunSection {
    fn default() -> Self {
        Self { controllers: ControllerKind::ALL.to_vec(), out: PathBuf::from("out"), seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsSection {
    pub window: [f64; 2],
    pub ablf_window: [f64; 2],
}

impl Default for MetricsSection {
    fn default() -> Self {
        Self { window: [20.0, 150.0], ablf_window: [20.0, 69.0] }
    }
}

/// Parsed run configuration.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub plant: PlantSection,
    pub controller: ControllerSection,
    pub envelope: EnvelopeSection,
    pub integrator: IntegratorSection,
    pub scenario: ScenarioSection,
    pub run: RunSection,
    pub metrics: MetricsSection,
}

fn de_controllers<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Vec<ControllerKind>, D::Error> {
    Vec::<String>::deserialize(d)?.iter().map(|n| n.parse().map_err(serde::de::Error::custom)).collect()
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let de = toml::Deserializer::new(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let key = e.path().to_string();
            let message = e.inner().message().trim().to_string();
            ConfigError::Parse { key: if key == "." { "<root>".into() } else { key }, message }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.plant().validate().map_err(|e| from_core("plant", e))?;
        self.controller_config().validate().map_err(|e| from_core("controller", e))?;
        self.validate_envelope()?;
        self.sim_config().validate().map_err(|e| from_core("integrator", e))?;
        if !(self.integrator.t_end > 0.0) || !self.integrator.t_end.is_finite() {
            return Err(invalid("integrator.t_end", "must be finite and > 0"));
        }
        if self.run.controllers.is_empty() {
            return Err(invalid("run.controllers", "select at least one controller"));
        }
        for (key, w) in [("metrics.window", self.metrics.window), ("metrics.ablf_window", self.metrics.ablf_window)] {
            if !(w[0] < w[1]) || !w[0].is_finite() || !w[1].is_finite() {
                return Err(invalid(key, "expected [lo, hi] with lo < hi"));
            }
        }
        self.scenario().map(|_| ()).map_err(|e| from_core("scenario", e))
    }

    fn validate_envelope(&self) -> Result<(), ConfigError> {
        let e = &self.envelope;
        let joints = [(1, e.rho0_1, e.rho_ss1, e.omega1), (2, e.rho0_2, e.rho_ss2, e.omega2)];
        for (j, rho0, rho_ss, omega) in joints {
            if !(rho_ss > 0.0) || !rho_ss.is_finite() {
                return Err(invalid(format!("envelope.rho_ss{j}"), "must be finite and > 0"));
            }
            if !(rho_ss <= rho0) || !rho0.is_finite() {
                return Err(invalid(
                    format!("envelope.rho_ss{j}"),
                    format!("steady-state bound {rho_ss} exceeds initial bound rho0_{j} = {rho0}"),
                ));
            }
            if !(omega > 0.0) || !omega.is_finite() {
                return Err(invalid(format!("envelope.omega{j}"), "must be finite and > 0"));
            }
        }
        Ok(())
    }

    pub fn plant(&self) -> PlantParams {
        let p = &self.plant;
        PlantParams {
            m1: p.m1,
            m2: p.m2,
            l1: p.l1,
            l2: p.l2,
            r1: p.r1,
            r2: p.r2,
            link_radius: p.link_radius,
            gamma1: p.gamma1,
            gamma2: p.gamma2,
            g: p.g,
            payload_mass: 0.0,
            disturbance_amp: p.disturbance_amp,
            disturbance_freq: p.disturbance_freq,
            inertia_convention: match p.inertia {
                Inertia::Unscaled => InertiaConvention::Unscaled,
                Inertia::Cylinder12 => InertiaConvention::Cylinder12,
            },
        }
    }

    pub fn controller_config(&self) -> ControllerConfig<2> {
        let c = &self.controller;
        ControllerConfig {
            lambda: Matrix(c.lambda),
            phi: Matrix(c.phi),
            epsilon: c.epsilon,
            k_hat_init: c.k_hat_init,
            eta: c.eta,
        }
    }

    pub fn envelope(&self) -> BarrierEnvelope<2> {
        let e = &self.envelope;
        BarrierEnvelope {
            rho0: Vector::new([deg(e.rho0_1), deg(e.rho0_2)]),
            rho_ss: Vector::new([deg(e.rho_ss1), deg(e.rho_ss2)]),
            omega: Vector::new([e.omega1, e.omega2]),
            t_anchor: 0.0,
        }
    }

    /// Simulation settings; `tolerate_breach` is chosen per controller by the runner.
    pub fn sim_config(&self) -> SimConfig {
        let i = &self.integrator;
        SimConfig {
            dt: i.dt,
            substeps: i.substeps,
            decimation: i.decimation,
            hold: match i.hold {
                Hold::Continuous => HoldMode::Continuous,
                Hold::Zoh => HoldMode::Zoh,
            },
            envelope_reset: match self.envelope.reset {
                Reset::Never => EnvelopeReset::Never,
                Reset::PerSetpoint => EnvelopeReset::PerSetpoint,
            },
            tolerate_breach: false,
            qd_init: Vector::zeros(),
            controller: self.controller_config(),
        }
    }

    pub fn pick_place_options(&self) -> PickPlaceOptions {
        let s = &self.scenario;
        PickPlaceOptions {
            initial_deg: s.initial_deg,
            region_a_deg: s.region_a_deg,
            region_b_deg: s.region_b_deg,
            region_c_deg: s.region_c_deg,
            first_move: s.first_move,
            payload_times: s.payload_times.clone(),
            payload_masses: s.payload_masses.clone(),
            leg_offset: s.leg_offset,
            leg_spacing: s.leg_spacing,
            profile: match s.reference {
                ReferenceShape::Quintic => Profile::Quintic { duration: s.transition },
                ReferenceShape::Step => Profile::Step,
            },
            t_end: self.integrator.t_end,
            envelope: self.envelope(),
        }
    }

    pub fn scenario(&self) -> tvbarrier_core::Result<Scenario<2>> {
        build_pick_place(&self.pick_place_options())
    }

    pub fn window_for(&self, kind: ControllerKind) -> Window {
        let w = if kind == ControllerKind::Ablf { self.metrics.ablf_window } else { self.metrics.window };
        Window::new(w[0], w[1])
    }
}
