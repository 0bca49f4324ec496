//! Lumped model of the cylindrical head: corrected Stokes drag on the
//! body, and the gravitational righting torque produced by a center of
//! mass sitting below the geometric center.
//!
//! The head is treated as neutrally buoyant overall, so gravity enters
//! only through the restoring torque. Drag uses sphere/cylinder Stokes
//! laws scaled by empirical shape coefficients, which is adequate at
//! the creeping-flow Reynolds numbers this model targets.

use nalgebra::{Point3, Vector3};

use crate::error::{ModelError, ModelResult};
use crate::rss::Wrench;

/// Physical description of the head body and its drag closure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeadParams {
    /// Cylinder radius (m).
    pub radius: f64,
    /// Cylinder height (m).
    pub height: f64,
    /// Head mass (kg).
    pub mass: f64,
    /// Distance from the geometric center down to the center of mass (m).
    pub com_shift: f64,
    /// Dimensionless multiplier on the `6 pi mu r` translational Stokes drag.
    pub translational_coefficient: f64,
    /// Dimensionless multiplier on the `8 pi mu h^3` rotational drag.
    pub rotational_coefficient: f64,
    /// Gravitational acceleration (m/s^2).
    pub gravity: f64,
}

impl HeadParams {
    pub fn validate(&self) -> ModelResult<()> {
        for (name, value) in [
            ("head radius", self.radius),
            ("head height", self.height),
            ("head mass", self.mass),
            (
                "translational drag coefficient",
                self.translational_coefficient,
            ),
            ("rotational drag coefficient", self.rotational_coefficient),
        ] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(ModelError::NonPositiveParameter { name, value });
            }
        }
        if !self.com_shift.is_finite() || self.com_shift < 0.0 {
            return Err(ModelError::NonPositiveParameter {
                name: "center-of-mass shift",
                value: self.com_shift,
            });
        }
        if !self.gravity.is_finite() || self.gravity < 0.0 {
            return Err(ModelError::NonPositiveParameter {
                name: "gravity",
                value: self.gravity,
            });
        }
        Ok(())
    }

    /// Linear drag coefficient: force = -coefficient * velocity.
    pub fn translational_drag(&self, viscosity: f64) -> f64 {
        self.translational_coefficient * 6.0 * std::f64::consts::PI * viscosity * self.radius
    }

    /// Angular drag coefficient: torque = -coefficient * angular velocity.
    pub fn rotational_drag(&self, viscosity: f64) -> f64 {
        self.rotational_coefficient * 8.0 * std::f64::consts::PI * viscosity * self.height.powi(3)
    }

    pub fn drag_force(&self, viscosity: f64, velocity: &Vector3<f64>) -> Vector3<f64> {
        -self.translational_drag(viscosity) * velocity
    }

    pub fn drag_torque(&self, viscosity: f64, angular_velocity: &Vector3<f64>) -> Vector3<f64> {
        -self.rotational_drag(viscosity) * angular_velocity
    }

    /// Maximum magnitude of the gravitational righting torque, `m g r_m`.
    pub fn restoring_moment(&self) -> f64 {
        self.mass * self.gravity * self.com_shift
    }

    /// Righting torque in the body frame given the inertial up direction
    /// expressed in body coordinates. Zero when the body z axis points up;
    /// otherwise it rotates the body z axis back toward up.
    pub fn righting_torque_body(&self, up_in_body: &Vector3<f64>) -> Vector3<f64> {
        self.restoring_moment() * Vector3::z().cross(up_in_body)
    }

    /// Righting torque about the pitch axis for a body tilted by `beta`
    /// radians from vertical: `-m g r_m sin(beta)`.
    pub fn pitch_righting_torque(&self, beta: f64) -> f64 {
        -self.restoring_moment() * beta.sin()
    }

    /// Principal moments of inertia about the geometric center, modeling
    /// the head as a uniform solid cylinder with its axis along z:
    /// `Ix = Iy = m (3 r^2 + h^2) / 12`, `Iz = m r^2 / 2`.
    pub fn principal_inertia(&self) -> Vector3<f64> {
        let transverse =
            self.mass * (3.0 * self.radius * self.radius + self.height * self.height) / 12.0;
        let axial = self.mass * self.radius * self.radius / 2.0;
        Vector3::new(transverse, transverse, axial)
    }
}

/// Total wrench the tails exert on the head about `reference`, with the
/// distributed filament loads lumped into point reactions at the
/// attachment sites. `reactions[i]` is the already-negated resultant on
/// the head from tail `i` (see [`crate::rss::resultant_wrench`]).
pub fn tail_wrench_about(
    reactions: &[(Point3<f64>, Vector3<f64>)],
    reference: &Point3<f64>,
) -> Wrench {
    let mut total = Wrench::zero();
    for (attachment, force) in reactions {
        total.force += force;
        total.torque += (attachment - reference).cross(force);
    }
    total
}
