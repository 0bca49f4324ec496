//! Rigid-body dynamics of the two-tailed swimmer.
//!
//! Two drive regimes are supported: a pinned mode in which the head
//! rotates about a fixed pivot with a single pitch degree of freedom,
//! and a free mode with all six rigid degrees of freedom. The tails are
//! treated as massless; they act on the head purely through their
//! hydrodynamic reactions, lumped at the attachment points.
//!
//! All tail hydrodynamics are evaluated in the body frame. Because
//! Stokes flow is frame-equivariant and the fluid has no background
//! motion, solving with body-frame node positions and body-frame
//! velocities (rigid motion plus spin) yields the body-frame reaction
//! forces directly; orientation enters only through gravity.

use nalgebra::{Point3, Quaternion, UnitQuaternion, Vector3};

use crate::error::{ModelError, ModelResult};
use crate::geometry::{DiscreteFlagellum, RobotGeometry};
use crate::head::HeadParams;
use crate::rss::{regularization_radius, resultant_wrench, MobilitySystem, Wrench};

/// How the tails load the head at each step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailForcing {
    /// Solve the segment hydrodynamics for the spinning tails.
    Hydrodynamic,
    /// Apply fixed body-frame reaction forces at the attachment points
    /// (they co-rotate with the body).
    Prescribed { forces: [Vector3<f64>; 2] },
    /// No tail loads at all; the head moves as a damped rigid body.
    Inactive,
}

/// Reactions the tails exert on the head, in the body frame.
#[derive(Debug, Clone, Copy)]
pub struct TailLoads {
    /// Lumped reaction force from each tail at its attachment.
    pub forces: [Vector3<f64>; 2],
    /// Total torque of both lumped reactions about the body origin.
    pub torque: Vector3<f64>,
}

impl TailLoads {
    fn zero() -> Self {
        Self {
            forces: [Vector3::zeros(); 2],
            torque: Vector3::zeros(),
        }
    }
}

/// State of the pinned-pivot experiment: the body pitches by `beta`
/// about the lateral (y) axis through the pivot at the body origin.
#[derive(Debug, Clone, Copy)]
pub struct PivotState {
    pub time: f64,
    /// Pitch angle from vertical (rad).
    pub beta: f64,
    /// Pitch rate (rad/s).
    pub beta_dot: f64,
    /// Spin phase of each tail (rad).
    pub phases: [f64; 2],
}

impl PivotState {
    pub fn at_rest() -> Self {
        Self {
            time: 0.0,
            beta: 0.0,
            beta_dot: 0.0,
            phases: [0.0; 2],
        }
    }

    pub fn tilted(beta: f64) -> Self {
        Self {
            beta,
            ..Self::at_rest()
        }
    }
}

/// One recorded instant of a pivot run (state at the start of the step
/// together with the tail loads evaluated there).
#[derive(Debug, Clone, Copy)]
pub struct PivotSample {
    pub time: f64,
    pub beta: f64,
    pub beta_dot: f64,
    /// Pitch component of the lumped tail torque about the pivot.
    pub tail_torque_y: f64,
    /// Axial (body z) reaction force of each tail.
    pub tail_force_z: [f64; 2],
}

/// State of the free swimmer. `orientation` maps body to world
/// coordinates; `omega_body` is the angular velocity in body axes.
#[derive(Debug, Clone)]
pub struct FreeState {
    pub time: f64,
    /// World position of the head center.
    pub position: Point3<f64>,
    /// World linear velocity.
    pub velocity: Vector3<f64>,
    pub orientation: UnitQuaternion<f64>,
    pub omega_body: Vector3<f64>,
    pub phases: [f64; 2],
}

impl FreeState {
    pub fn at_rest() -> Self {
        Self {
            time: 0.0,
            position: Point3::origin(),
            velocity: Vector3::zeros(),
            orientation: UnitQuaternion::identity(),
            omega_body: Vector3::zeros(),
            phases: [0.0; 2],
        }
    }

    /// Angle between the body z axis and world up (rad).
    pub fn tilt(&self) -> f64 {
        let up = self.orientation * Vector3::z();
        up.z.clamp(-1.0, 1.0).acos()
    }
}

/// One recorded instant of a free run.
#[derive(Debug, Clone)]
pub struct FreeSample {
    pub time: f64,
    pub position: Point3<f64>,
    pub velocity: Vector3<f64>,
    pub orientation: UnitQuaternion<f64>,
    pub omega_body: Vector3<f64>,
    /// Axial (body z) reaction force of each tail.
    pub tail_force_z: [f64; 2],
    /// Lumped tail torque about the body origin, body frame.
    pub tail_torque: Vector3<f64>,
}

/// The assembled swimmer: head parameters, mounted tails, drive rates
/// and the forcing regime. Construction discretizes the tails once;
/// spinning them later is an exact rigid rotation of that mesh.
#[derive(Debug, Clone)]
pub struct Swimmer {
    head: HeadParams,
    viscosity: f64,
    tails: [DiscreteFlagellum; 2],
    attachments: [Point3<f64>; 2],
    rates: [f64; 2],
    forcing: TailForcing,
    inertia: Vector3<f64>,
    regularization: f64,
}

impl Swimmer {
    /// Build a swimmer from its geometry. `dl` is the target segment
    /// length for the tail discretization and `rates` the signed spin
    /// speeds (rad/s, positive = right-hand rotation about the
    /// downward tail axis). The regularization radius follows the tail
    /// cross-section.
    pub fn new(
        geometry: &RobotGeometry,
        head: HeadParams,
        viscosity: f64,
        dl: f64,
        rates: [f64; 2],
        forcing: TailForcing,
    ) -> ModelResult<Self> {
        head.validate()?;
        if !(viscosity > 0.0) {
            return Err(ModelError::NonPositiveParameter {
                name: "viscosity",
                value: viscosity,
            });
        }
        let tails = geometry.build_tails(dl)?;
        let regularization = regularization_radius(tails[0].cross_section_radius());
        Ok(Self {
            head,
            viscosity,
            attachments: geometry.attachments(),
            tails,
            rates,
            forcing,
            inertia: head.principal_inertia(),
            regularization,
        })
    }

    /// Replace the default solid-cylinder inertia with explicit
    /// principal moments (body axes, about the body origin).
    pub fn with_inertia(mut self, inertia: Vector3<f64>) -> Self {
        self.inertia = inertia;
        self
    }

    pub fn head(&self) -> &HeadParams {
        &self.head
    }

    pub fn viscosity(&self) -> f64 {
        self.viscosity
    }

    pub fn rates(&self) -> [f64; 2] {
        self.rates
    }

    pub fn set_rates(&mut self, rates: [f64; 2]) {
        self.rates = rates;
    }

    pub fn set_forcing(&mut self, forcing: TailForcing) {
        self.forcing = forcing;
    }

    pub fn pitch_inertia(&self) -> f64 {
        self.inertia.y
    }

    pub fn tails(&self) -> &[DiscreteFlagellum; 2] {
        &self.tails
    }

    /// Spin resolution guard: each tail revolution must span at least
    /// ten steps, i.e. `dt <= 0.1 * 2 pi / max |rate|`.
    pub fn check_time_step(&self, dt: f64) -> ModelResult<()> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(ModelError::NonPositiveParameter {
                name: "time step",
                value: dt,
            });
        }
        let omega = self.rates[0].abs().max(self.rates[1].abs());
        if omega > 0.0 {
            let max_dt = 0.1 * std::f64::consts::TAU / omega;
            if dt > max_dt {
                return Err(ModelError::TimeStepTooCoarse { dt, omega, max_dt });
            }
        }
        Ok(())
    }

    /// Tail reactions for a body moving rigidly with the given linear
    /// and angular velocity (body frame, about the body origin) while
    /// the tails spin at their drive rates.
    pub fn tail_loads(
        &self,
        phases: [f64; 2],
        linear: &Vector3<f64>,
        angular: &Vector3<f64>,
    ) -> ModelResult<TailLoads> {
        match self.forcing {
            TailForcing::Inactive => Ok(TailLoads::zero()),
            TailForcing::Prescribed { forces } => {
                let torque = self.attachments[0].coords.cross(&forces[0])
                    + self.attachments[1].coords.cross(&forces[1]);
                Ok(TailLoads { forces, torque })
            }
            TailForcing::Hydrodynamic => self.hydrodynamic_loads(phases, linear, angular),
        }
    }

    fn hydrodynamic_loads(
        &self,
        phases: [f64; 2],
        linear: &Vector3<f64>,
        angular: &Vector3<f64>,
    ) -> ModelResult<TailLoads> {
        let chains = [
            self.tails[0].nodes_at_phase(phases[0]),
            self.tails[1].nodes_at_phase(phases[1]),
        ];

        let mut velocities = Vec::with_capacity(chains[0].len() + chains[1].len());
        for (i, chain) in chains.iter().enumerate() {
            let spin = self.tails[i].axis_dir().into_inner() * self.rates[i];
            let axis_point = self.tails[i].axis_point();
            for x in chain {
                velocities.push(linear + angular.cross(&x.coords) + spin.cross(&(x - axis_point)));
            }
        }

        let system = MobilitySystem::assemble(&chains, self.viscosity, self.regularization)?;
        let forces = system.solve(&velocities)?;

        let origin = Point3::origin();
        let mut total = Wrench::zero();
        let mut lumped = [Vector3::zeros(); 2];
        for i in 0..2 {
            let w = resultant_wrench(
                forces.flagellum(i),
                &chains[i],
                &self.attachments[i],
                &origin,
            );
            lumped[i] = w.force;
            total.torque += w.torque;
        }
        Ok(TailLoads {
            forces: lumped,
            torque: total.torque,
        })
    }

    /// Advance the pivot state by one step of length `dt`.
    ///
    /// Pitch obeys `I_y beta_dd = tau_tail_y - c_r beta_dot - m g r_m sin(beta)`;
    /// the linear head drag is treated implicitly, everything else
    /// explicitly (semi-implicit Euler). Returns the sample at the
    /// start of the step.
    pub fn step_pivot(&self, state: &mut PivotState, dt: f64) -> ModelResult<PivotSample> {
        self.check_time_step(dt)?;
        let loads = self.tail_loads(
            state.phases,
            &Vector3::zeros(),
            &(Vector3::y() * state.beta_dot),
        )?;

        let sample = PivotSample {
            time: state.time,
            beta: state.beta,
            beta_dot: state.beta_dot,
            tail_torque_y: loads.torque.y,
            tail_force_z: [loads.forces[0].z, loads.forces[1].z],
        };

        let iy = self.inertia.y;
        let damping = self.head.rotational_drag(self.viscosity);
        let drive = loads.torque.y + self.head.pitch_righting_torque(state.beta);
        let beta_dot = (state.beta_dot + dt / iy * drive) / (1.0 + dt * damping / iy);
        state.beta += dt * beta_dot;
        state.beta_dot = beta_dot;
        for (phase, rate) in state.phases.iter_mut().zip(self.rates) {
            *phase += rate * dt;
        }
        state.time += dt;
        Ok(sample)
    }

    /// Run `steps` pivot steps, returning one sample per step (the
    /// trajectory starting at the initial state). The final state is
    /// left in `state`.
    pub fn run_pivot(
        &self,
        state: &mut PivotState,
        dt: f64,
        steps: usize,
    ) -> ModelResult<Vec<PivotSample>> {
        let mut samples = Vec::with_capacity(steps);
        for _ in 0..steps {
            samples.push(self.step_pivot(state, dt)?);
        }
        Ok(samples)
    }

    /// Time derivatives of the free state at the given instant.
    fn free_derivatives(&self, state: &FreeState) -> ModelResult<FreeDerivatives> {
        let q = &state.orientation;
        let linear_body = q.inverse_transform_vector(&state.velocity);
        let loads = self.tail_loads(state.phases, &linear_body, &state.omega_body)?;

        let tail_force_body = loads.forces[0] + loads.forces[1];
        let force_world = q.transform_vector(&tail_force_body)
            + self.head.drag_force(self.viscosity, &state.velocity);

        let up_body = q.inverse_transform_vector(&Vector3::z());
        let torque_body = loads.torque
            + self.head.righting_torque_body(&up_body)
            + self.head.drag_torque(self.viscosity, &state.omega_body);

        let j = self.inertia;
        let jw = Vector3::new(
            j.x * state.omega_body.x,
            j.y * state.omega_body.y,
            j.z * state.omega_body.z,
        );
        let rhs = torque_body - state.omega_body.cross(&jw);
        let omega_dot = Vector3::new(rhs.x / j.x, rhs.y / j.y, rhs.z / j.z);

        let q_dot = q.into_inner() * Quaternion::from_parts(0.0, state.omega_body) * 0.5;

        Ok(FreeDerivatives {
            velocity: state.velocity,
            acceleration: force_world / self.head.mass,
            q_dot,
            omega_dot,
            loads,
        })
    }

    /// Advance the free state by one explicit midpoint (second-order
    /// Runge-Kutta) step. The orientation quaternion is renormalized
    /// after the update. Returns the sample at the start of the step.
    pub fn step_free(&self, state: &mut FreeState, dt: f64) -> ModelResult<FreeSample> {
        self.check_time_step(dt)?;
        let k1 = self.free_derivatives(state)?;

        let sample = FreeSample {
            time: state.time,
            position: state.position,
            velocity: state.velocity,
            orientation: state.orientation,
            omega_body: state.omega_body,
            tail_force_z: [k1.loads.forces[0].z, k1.loads.forces[1].z],
            tail_torque: k1.loads.torque,
        };

        let half = 0.5 * dt;
        let mid = FreeState {
            time: state.time + half,
            position: state.position + state.velocity * half,
            velocity: state.velocity + k1.acceleration * half,
            orientation: UnitQuaternion::from_quaternion(
                state.orientation.into_inner() + k1.q_dot * half,
            ),
            omega_body: state.omega_body + k1.omega_dot * half,
            phases: [
                state.phases[0] + self.rates[0] * half,
                state.phases[1] + self.rates[1] * half,
            ],
        };
        let k2 = self.free_derivatives(&mid)?;

        state.position += k2.velocity * dt;
        state.velocity += k2.acceleration * dt;
        state.orientation =
            UnitQuaternion::from_quaternion(state.orientation.into_inner() + k2.q_dot * dt);
        state.omega_body += k2.omega_dot * dt;
        for (phase, rate) in state.phases.iter_mut().zip(self.rates) {
            *phase += rate * dt;
        }
        state.time += dt;
        Ok(sample)
    }

    /// Run `steps` free steps; see [`Swimmer::run_pivot`] for the
    /// sampling convention.
    pub fn run_free(
        &self,
        state: &mut FreeState,
        dt: f64,
        steps: usize,
    ) -> ModelResult<Vec<FreeSample>> {
        let mut samples = Vec::with_capacity(steps);
        for _ in 0..steps {
            samples.push(self.step_free(state, dt)?);
        }
        Ok(samples)
    }
}

struct FreeDerivatives {
    velocity: Vector3<f64>,
    acceleration: Vector3<f64>,
    q_dot: Quaternion<f64>,
    omega_dot: Vector3<f64>,
    loads: TailLoads,
}
