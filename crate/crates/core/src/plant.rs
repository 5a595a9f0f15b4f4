//! Euler-Lagrange plant interface and the two-link planar manipulator.
//!
//! Joint angles are measured from the horizontal; gravity acts along −y.

use crate::linalg::{spd_solve, Matrix, Vector};
use crate::{Error, Result};

/// Rigid-body dynamics `M(q)q̈ + C(q,q̇)q̇ + G(q) + F(q̇) + d(t) = τ`.
pub trait EulerLagrange<const N: usize> {
    fn mass_matrix(&self, q: &Vector<N>) -> Matrix<N>;
    fn coriolis_matrix(&self, q: &Vector<N>, qd: &Vector<N>) -> Matrix<N>;
    fn gravity_vector(&self, q: &Vector<N>) -> Vector<N>;
    /// Combined viscous friction and external disturbance `F(q̇) + d(t)`.
    fn friction_disturbance(&self, qd: &Vector<N>, t: f64) -> Vector<N>;

    /// Joint accelerations under torque `tau`.
    fn forward_dynamics(&self, state: &JointState<N>, tau: &Vector<N>) -> Result<Vector<N>> {
        let m = self.mass_matrix(&state.q);
        let c = self.coriolis_matrix(&state.q, &state.qd);
        let rhs = *tau - c * state.qd - self.gravity_vector(&state.q) - self.friction_disturbance(&state.qd, state.t);
        spd_solve(&m, &rhs)
    }

    /// Left-hand side of the equations of motion minus `tau`.
    fn residual(&self, state: &JointState<N>, qdd: &Vector<N>, tau: &Vector<N>) -> Vector<N> {
        self.mass_matrix(&state.q) * *qdd
            + self.coriolis_matrix(&state.q, &state.qd) * state.qd
            + self.gravity_vector(&state.q)
            + self.friction_disturbance(&state.qd, state.t)
            - *tau
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JointState<const N: usize> {
    pub q: Vector<N>,
    pub qd: Vector<N>,
    pub t: f64,
}

impl<const N: usize> JointState<N> {
    pub fn new(q: Vector<N>, qd: Vector<N>, t: f64) -> Self {
        Self { q, qd, t }
    }
}

/// How link inertia about the centre of mass is computed from the link geometry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum InertiaConvention {
    /// `I = m (3 r² + l²)` with no 1/12 factor, used by the reference experiment.
    #[default]
    Unscaled,
    /// Solid cylinder about a transverse axis, `I = m (3 r² + l²) / 12`.
    Cylinder12,
}

/// Physical parameters of the two-link arm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlantParams {
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
    /// Point mass rigidly held at the end of link 2.
    pub payload_mass: f64,
    pub disturbance_amp: f64,
    pub disturbance_freq: f64,
    pub inertia_convention: InertiaConvention,
}

impl Default for PlantParams {
    fn default() -> Self {
        Self {
            m1: 1.0,
            m2: 1.0,
            l1: 1.0,
            l2: 1.0,
            r1: 0.5,
            r2: 0.5,
            link_radius: 0.05,
            gamma1: 0.1,
            gamma2: 0.1,
            g: 9.81,
            payload_mass: 0.0,
            disturbance_amp: 2.0,
            disturbance_freq: 0.1,
            inertia_convention: InertiaConvention::Unscaled,
        }
    }
}

/// Link 2 lumped with the payload.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Link2Composite {
    /// `m2 + m_p`
    pub mass: f64,
    /// First mass moment about joint 2, `m2 r2 + m_p l2`.
    pub moment: f64,
    /// Composite centre-of-mass distance from joint 2.
    pub com: f64,
    /// Second mass moment about joint 2 plus the bare link's own inertia.
    pub inertia_at_joint: f64,
}

impl PlantParams {
    pub fn validate(&self) -> Result<()> {
        let nonneg = [
            ("m1", self.m1),
            ("m2", self.m2),
            ("l1", self.l1),
            ("l2", self.l2),
            ("r1", self.r1),
            ("r2", self.r2),
            ("link_radius", self.link_radius),
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("payload_mass", self.payload_mass),
        ];
        for (name, v) in nonneg {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter { name, reason: "must be finite and >= 0" });
            }
        }
        if self.r1 > self.l1 {
            return Err(Error::InvalidParameter { name: "r1", reason: "must not exceed l1" });
        }
        if self.r2 > self.l2 {
            return Err(Error::InvalidParameter { name: "r2", reason: "must not exceed l2" });
        }
        for (name, v) in
            [("g", self.g), ("disturbance_amp", self.disturbance_amp), ("disturbance_freq", self.disturbance_freq)]
        {
            if !v.is_finite() {
                return Err(Error::InvalidParameter { name, reason: "must be finite" });
            }
        }
        Ok(())
    }

    /// Same arm carrying a point payload of `mass` kg at the tip of link 2.
    pub fn attach_payload(&self, mass: f64) -> Result<Self> {
        if !(mass >= 0.0) || !mass.is_finite() {
            return Err(Error::InvalidParameter { name: "payload_mass", reason: "must be finite and >= 0" });
        }
        Ok(Self { payload_mass: mass, ..*self })
    }

    /// Inertias of the bare links about their centres of mass.
    pub fn link_inertias(&self) -> (f64, f64) {
        let rr = 3.0 * self.link_radius * self.link_radius;
        let i1 = self.m1 * (rr + self.l1 * self.l1);
        let i2 = self.m2 * (rr + self.l2 * self.l2);
        match self.inertia_convention {
            InertiaConvention::Unscaled => (i1, i2),
            InertiaConvention::Cylinder12 => (i1 / 12.0, i2 / 12.0),
        }
    }

    pub fn link2(&self) -> Link2Composite {
        let mp = self.payload_mass;
        let mass = self.m2 + mp;
        let moment = self.m2 * self.r2 + mp * self.l2;
        let com = if mass > 0.0 { moment / mass } else { 0.0 };
        let (_, i2) = self.link_inertias();
        let inertia_at_joint = self.m2 * self.r2 * self.r2 + mp * self.l2 * self.l2 + i2;
        Link2Composite { mass, moment, com, inertia_at_joint }
    }

    /// Empirical Coriolis bound constant `c̄ = 2 l1 (m2 r2)_eff`.
    pub fn coriolis_bound(&self) -> f64 {
        2.0 * self.l1 * self.link2().moment
    }

    /// Potential energy consistent with [`EulerLagrange::gravity_vector`].
    pub fn potential_energy(&self, q: &Vector<2>) -> f64 {
        let link2 = self.link2();
        let (s1, s12) = (libm::sin(q[0]), libm::sin(q[0] + q[1]));
        self.g * (self.m1 * s1 + link2.mass * self.l1 * s1 + link2.moment * s12)
    }

    pub fn kinetic_energy(&self, q: &Vector<2>, qd: &Vector<2>) -> f64 {
        0.5 * self.mass_matrix(q).quadratic(qd)
    }

    pub fn mechanical_energy(&self, q: &Vector<2>, qd: &Vector<2>) -> f64 {
        self.kinetic_energy(q, qd) + self.potential_energy(q)
    }

    /// Disturbance torque `d(t)` alone.
    pub fn disturbance(&self, t: f64) -> Vector<2> {
        let w = self.disturbance_freq * t;
        Vector::new([self.disturbance_amp * libm::sin(w), self.disturbance_amp * libm::cos(w)])
    }
}

impl EulerLagrange<2> for PlantParams {
    fn mass_matrix(&self, q: &Vector<2>) -> Matrix<2> {
        let (i1, _) = self.link_inertias();
        let link2 = self.link2();
        let c2 = libm::cos(q[1]);
        let coupling = self.l1 * link2.moment * c2;
        let m22 = link2.inertia_at_joint;
        let m12 = coupling + m22;
        let m11 = self.m1 * self.r1 * self.r1 + link2.mass * self.l1 * self.l1 + 2.0 * coupling + i1 + m22;
        // m21 mirrors m12 exactly.
        Matrix::new([[m11, m12], [m12, m22]])
    }

    fn coriolis_matrix(&self, q: &Vector<2>, qd: &Vector<2>) -> Matrix<2> {
        let h = -self.l1 * self.link2().moment * libm::sin(q[1]);
        Matrix::new([[h * qd[1], h * (qd[0] + qd[1])], [-h * qd[0], 0.0]])
    }

    fn gravity_vector(&self, q: &Vector<2>) -> Vector<2> {
        let link2 = self.link2();
        let (c1, c12) = (libm::cos(q[0]), libm::cos(q[0] + q[1]));
        let g2 = self.g * link2.moment * c12;
        let g1 = self.m1 * self.g * c1 + self.g * link2.mass * self.l1 * c1 + g2;
        Vector::new([g1, g2])
    }

    fn friction_disturbance(&self, qd: &Vector<2>, t: f64) -> Vector<2> {
        Vector::new([self.gamma1 * qd[0], self.gamma2 * qd[1]]) + self.disturbance(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deg;
    use crate::linalg::is_spd;

    fn p() -> PlantParams {
        PlantParams::default()
    }

    #[test]
    fn mass_matrix_cos_term_vanishes_at_right_angle() {
        let m = p().mass_matrix(&Vector::new([0.3, deg(90.0)]));
        let (_, i2) = p().link_inertias();
        assert!((m[(0, 1)] - (1.0 * 0.25 + i2)).abs() < 1e-15);
    }

    #[test]
    fn mass_matrix_golden_at_zero() {
        // Frozen from an independent evaluation of the closed-form entries.
        let m = p().mass_matrix(&Vector::new([0.0, 0.0]));
        let expected = [[4.515, 1.7575], [1.7575, 1.2575]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((m[(i, j)] - expected[i][j]).abs() < 1e-12, "{m:?}");
            }
        }
        assert_eq!(m, m.transpose());
        assert_eq!(is_spd(&m), Ok(true));
    }

    #[test]
    fn coriolis_examples() {
        let z = p().coriolis_matrix(&Vector::new([0.4, 0.0]), &Vector::new([3.0, -2.0]));
        assert_eq!(z, Matrix::zeros());
        let z = p().coriolis_matrix(&Vector::new([0.4, 1.1]), &Vector::zeros());
        assert!(z.0.iter().flatten().all(|x| *x == 0.0));
        let c = p().coriolis_matrix(&Vector::new([0.0, deg(90.0)]), &Vector::new([1.0, 1.0]));
        let h = -(1.0 * 0.5);
        assert!((c[(0, 0)] - h).abs() < 1e-15);
        assert!((c[(0, 1)] - 2.0 * h).abs() < 1e-15);
        assert!((c[(1, 0)] + h).abs() < 1e-15);
        assert_eq!(c[(1, 1)], 0.0);
    }

    #[test]
    fn gravity_examples() {
        let gv = p().gravity_vector(&Vector::new([deg(90.0), 0.0]));
        assert!(gv[0].abs() < 1e-12 && gv[1].abs() < 1e-12);
        let gv = p().gravity_vector(&Vector::new([0.0, 0.0]));
        assert!((gv[0] - 9.81 * (1.0 + 1.0 * (1.0 + 0.5))).abs() < 1e-12);
        assert!((gv[1] - 9.81 * 0.5).abs() < 1e-12);
        let loaded = p().attach_payload(0.5).unwrap().gravity_vector(&Vector::new([0.0, 0.0]));
        assert!(loaded[0] > gv[0] && loaded[1] > gv[1]);
    }

    #[test]
    fn friction_disturbance_examples() {
        let f = p().friction_disturbance(&Vector::zeros(), 0.0);
        assert_eq!(f, Vector::new([0.0, 2.0]));
        let f = p().friction_disturbance(&Vector::new([1.0, 1.0]), 0.0);
        assert!((f - Vector::new([0.1, 2.1])).norm() < 1e-15);
        for k in 0..2000 {
            let t = k as f64 * 0.37;
            assert!(p().disturbance(t).norm() <= 2.0 * core::f64::consts::SQRT_2 + 1e-12);
        }
    }

    #[test]
    fn feedforward_cancels_acceleration() {
        let plant = p().attach_payload(1.0).unwrap();
        let s = JointState::new(Vector::new([0.3, -1.2]), Vector::new([0.7, -0.4]), 2.5);
        let tau = plant.coriolis_matrix(&s.q, &s.qd) * s.qd
            + plant.gravity_vector(&s.q)
            + plant.friction_disturbance(&s.qd, s.t);
        let qdd = plant.forward_dynamics(&s, &tau).unwrap();
        assert!(qdd.norm() < 1e-12);
    }

    #[test]
    fn statics_under_zero_torque() {
        let plant = p();
        // d2 = 2 cos(0.1 t) vanishes at t = 5π.
        let t = 5.0 * core::f64::consts::PI;
        let s = JointState::new(Vector::new([0.2, 0.5]), Vector::zeros(), t);
        let qdd = plant.forward_dynamics(&s, &Vector::zeros()).unwrap();
        let m = plant.mass_matrix(&s.q);
        let expected = spd_solve(&m, &(-plant.gravity_vector(&s.q) - plant.disturbance(t))).unwrap();
        assert!((qdd - expected).norm() < 1e-12);
        assert!(plant.disturbance(t)[1].abs() < 1e-12);
    }

    #[test]
    fn payload_adds_point_mass_inertia() {
        let q = Vector::new([0.1, 0.9]);
        let base = p().mass_matrix(&q);
        let loaded = p().attach_payload(0.5).unwrap().mass_matrix(&q);
        assert!((loaded[(1, 1)] - base[(1, 1)] - 0.5 * 1.0).abs() < 1e-12);
        assert_eq!(p().attach_payload(0.0).unwrap().mass_matrix(&q), base);
        assert!(p().attach_payload(-0.1).is_err());
    }

    #[test]
    fn composite_matches_explicit_point_mass() {
        // Tip point mass contributes m_p |v_tip|² / 2 of kinetic energy.
        let mp = 1.5;
        let plant = p().attach_payload(mp).unwrap();
        let q = Vector::new([0.7, -2.1]);
        let qd = Vector::new([0.9, 1.3]);
        let bare = p().kinetic_energy(&q, &qd);
        let (l1, l2) = (1.0, 1.0);
        let vx = -l1 * libm::sin(q[0]) * qd[0] - l2 * libm::sin(q[0] + q[1]) * (qd[0] + qd[1]);
        let vy = l1 * libm::cos(q[0]) * qd[0] + l2 * libm::cos(q[0] + q[1]) * (qd[0] + qd[1]);
        let tip = 0.5 * mp * (vx * vx + vy * vy);
        assert!((plant.kinetic_energy(&q, &qd) - (bare + tip)).abs() < 1e-12);
    }

    #[test]
    fn cylinder_convention_divides_by_twelve() {
        let c = PlantParams { inertia_convention: InertiaConvention::Cylinder12, ..p() };
        let (a, b) = p().link_inertias();
        let (c1, c2) = c.link_inertias();
        assert!((a / 12.0 - c1).abs() < 1e-15 && (b / 12.0 - c2).abs() < 1e-15);
    }

    #[test]
    fn validate_rejects_bad_geometry() {
        assert!(p().validate().is_ok());
        assert!(PlantParams { r1: 1.5, ..p() }.validate().is_err());
        assert!(PlantParams { m2: -1.0, ..p() }.validate().is_err());
    }
}
