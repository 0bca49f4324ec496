//! Pitch planning for the pivoted swimmer.
//!
//! Around the upright equilibrium the pivot dynamics are linear in the
//! state `[pitch, pitch rate]` with the two tail down-thrusts as
//! inputs. This module builds that plant, calibrates the thrust each
//! tail produces per unit spin speed, and inverts the chain to find
//! the drive speeds that hold a commanded pitch, with actuator limits
//! enforced.
//!
//! Sign conventions: "down-thrust" is the downward (-z) lumped
//! reaction a tail applies to the head, positive when pushing the head
//! down. The reported gains follow a mirrored-actuation convention:
//! `k1 > 0` maps tail 1's spin to its down-thrust directly, while `k2`
//! is the negated slope of tail 2, so a symmetric pair calibrates to
//! `k1 = -k2` and opposite-sign drive speeds hold a steady pitch.

use nalgebra::{Matrix2, Vector2};

use crate::error::{ModelError, ModelResult};
use crate::geometry::{mount_pair, mount_single, RobotGeometry};
use crate::head::HeadParams;
use crate::sweep::steady_spin_average;

/// Linearized pivot dynamics
/// `I_y beta_dd = -m g r_m beta - c_r beta_dot + (d/2)(u1 - u2)`
/// for state `x = [beta, beta_dot]` and inputs `u = [down-thrust 1,
/// down-thrust 2]`.
#[derive(Debug, Clone, Copy)]
pub struct LinearPlant {
    /// Gravitational stiffness `m g r_m` (N m per radian, linearized).
    pub restoring_moment: f64,
    /// Rotational drag coefficient `c_r` (N m s).
    pub pitch_damping: f64,
    /// Pitch moment of inertia `I_y` (kg m^2).
    pub pitch_inertia: f64,
    /// Lateral attachment spacing `d` (m).
    pub spacing: f64,
}

impl LinearPlant {
    pub fn new(
        restoring_moment: f64,
        pitch_damping: f64,
        pitch_inertia: f64,
        spacing: f64,
    ) -> ModelResult<Self> {
        if !(restoring_moment > 0.0) || !restoring_moment.is_finite() {
            return Err(ModelError::NoRestoringArm);
        }
        for (name, value) in [
            ("pitch_damping", pitch_damping),
            ("pitch_inertia", pitch_inertia),
            ("spacing", spacing),
        ] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(ModelError::NonPositiveParameter { name, value });
            }
        }
        Ok(Self {
            restoring_moment,
            pitch_damping,
            pitch_inertia,
            spacing,
        })
    }

    /// Assemble the plant from the head model it linearizes.
    pub fn for_head(head: &HeadParams, viscosity: f64, spacing: f64) -> ModelResult<Self> {
        Self::new(
            head.restoring_moment(),
            head.rotational_drag(viscosity),
            head.principal_inertia().y,
            spacing,
        )
    }

    /// State matrix `A`.
    pub fn state_matrix(&self) -> Matrix2<f64> {
        Matrix2::new(
            0.0,
            1.0,
            -self.restoring_moment / self.pitch_inertia,
            -self.pitch_damping / self.pitch_inertia,
        )
    }

    /// Input matrix `B` (columns: down-thrust 1, down-thrust 2).
    pub fn input_matrix(&self) -> Matrix2<f64> {
        let gain = 0.5 * self.spacing / self.pitch_inertia;
        Matrix2::new(0.0, 0.0, gain, -gain)
    }

    /// Steady state `-A^{-1} B u` computed through the matrices.
    pub fn steady_state(&self, thrusts: [f64; 2]) -> Vector2<f64> {
        let u = Vector2::new(thrusts[0], thrusts[1]);
        let rhs = -(self.input_matrix() * u);
        self.state_matrix()
            .lu()
            .solve(&rhs)
            .expect("plant state matrix is invertible for positive parameters")
    }

    /// Closed-form steady pitch `(u1 - u2) d / (2 m g r_m)`.
    pub fn steady_pitch(&self, thrusts: [f64; 2]) -> f64 {
        (thrusts[0] - thrusts[1]) * self.spacing / (2.0 * self.restoring_moment)
    }

    /// Hurwitz check of the 2x2 plant: negative trace, positive
    /// determinant.
    pub fn is_stable(&self) -> bool {
        let a = self.state_matrix();
        a.trace() < 0.0 && a.determinant() > 0.0
    }
}

/// Thrust-per-speed gains under the mirrored-actuation convention.
#[derive(Debug, Clone, Copy)]
pub struct ActuatorGains {
    /// Down-thrust of tail 1 per unit spin speed (N s/rad), positive.
    pub k1: f64,
    /// Negated down-thrust slope of tail 2 (N s/rad), negative.
    pub k2: f64,
}

impl ActuatorGains {
    fn validate(&self) -> ModelResult<()> {
        if !(self.k1 > 0.0) || !self.k1.is_finite() {
            return Err(ModelError::NonPositiveParameter {
                name: "gain k1",
                value: self.k1,
            });
        }
        if !(self.k2 < 0.0) || !self.k2.is_finite() {
            return Err(ModelError::NonPositiveParameter {
                name: "gain -k2",
                value: -self.k2,
            });
        }
        Ok(())
    }
}

/// Straight-line fit through the origin, `y = slope * x`.
#[derive(Debug, Clone, Copy)]
pub struct LineFit {
    pub slope: f64,
    /// Coefficient of determination, `1 - sum((y - kx)^2) / sum(y^2)`.
    pub r_squared: f64,
}

/// Least-squares slope through the origin for `(x, y)` samples.
pub fn fit_through_origin(points: &[(f64, f64)]) -> ModelResult<LineFit> {
    let sxx: f64 = points.iter().map(|(x, _)| x * x).sum();
    if sxx == 0.0 {
        return Err(ModelError::ZeroDriveSpeed);
    }
    let sxy: f64 = points.iter().map(|(x, y)| x * y).sum();
    let slope = sxy / sxx;
    let syy: f64 = points.iter().map(|(_, y)| y * y).sum();
    let residual: f64 = points.iter().map(|(x, y)| (y - slope * x).powi(2)).sum();
    let r_squared = if syy > 0.0 { 1.0 - residual / syy } else { 1.0 };
    Ok(LineFit { slope, r_squared })
}

/// Whether calibration spins one tail in still fluid or both tails
/// counter-rotating as mounted, so the measured gain includes the
/// pair's hydrodynamic coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CalibrationMode {
    Isolated,
    InPair,
}

/// One calibration measurement: both tails' mean down-thrusts at a
/// drive speed.
#[derive(Debug, Clone, Copy)]
pub struct CalibrationPoint {
    pub rate: f64,
    pub down_thrusts: [f64; 2],
}

/// Result of a calibration run.
#[derive(Debug, Clone)]
pub struct Calibration {
    pub gains: ActuatorGains,
    pub points: Vec<CalibrationPoint>,
    pub mode: CalibrationMode,
    /// Fit quality of the two thrust-vs-speed lines.
    pub fits: [LineFit; 2],
}

/// Measure the mean down-thrust of each tail over one revolution at
/// several drive speeds and fit thrust-per-speed gains through the
/// origin.
///
/// In [`CalibrationMode::InPair`] each tail is measured spinning
/// forward while the other counter-rotates, matching how the pair is
/// actually driven to hold a pitch.
pub fn calibrate(
    geometry: &RobotGeometry,
    viscosity: f64,
    dl: f64,
    rates: &[f64],
    mode: CalibrationMode,
    phase_samples: usize,
) -> ModelResult<Calibration> {
    if rates.len() < 3 {
        return Err(ModelError::TooFewSpeeds { got: rates.len() });
    }
    if rates.iter().any(|r| *r == 0.0 || !r.is_finite()) {
        return Err(ModelError::ZeroDriveSpeed);
    }
    geometry.validate()?;
    let attachments = geometry.attachments();

    let mut points = Vec::with_capacity(rates.len());
    match mode {
        CalibrationMode::Isolated => {
            let tails = [
                mount_single(&geometry.tails[0], &attachments[0], dl)?,
                mount_single(&geometry.tails[1], &attachments[1], dl)?,
            ];
            for &rate in rates {
                let mut thrusts = [0.0; 2];
                for i in 0..2 {
                    let avg = steady_spin_average(
                        std::slice::from_ref(&tails[i]),
                        &attachments[i..=i],
                        &[rate],
                        viscosity,
                        phase_samples,
                    )?;
                    thrusts[i] = -avg.mean_forces[0].z;
                }
                points.push(CalibrationPoint {
                    rate,
                    down_thrusts: thrusts,
                });
            }
        }
        CalibrationMode::InPair => {
            let pair = mount_pair(&geometry.tails, geometry.spacing, dl)?;
            for &rate in rates {
                let mut thrusts = [0.0; 2];
                for i in 0..2 {
                    // Tail i forward, the other one countering.
                    let mut pair_rates = [-rate, -rate];
                    pair_rates[i] = rate;
                    let avg = steady_spin_average(
                        &pair,
                        &attachments,
                        &pair_rates,
                        viscosity,
                        phase_samples,
                    )?;
                    thrusts[i] = -avg.mean_forces[i].z;
                }
                points.push(CalibrationPoint {
                    rate,
                    down_thrusts: thrusts,
                });
            }
        }
    }

    let fit = |idx: usize| {
        let data: Vec<(f64, f64)> = points
            .iter()
            .map(|p| (p.rate, p.down_thrusts[idx]))
            .collect();
        fit_through_origin(&data)
    };
    let fits = [fit(0)?, fit(1)?];
    let gains = ActuatorGains {
        k1: fits[0].slope,
        k2: -fits[1].slope,
    };
    gains.validate()?;
    Ok(Calibration {
        gains,
        points,
        mode,
        fits,
    })
}

/// Actuator envelope for speed planning.
#[derive(Debug, Clone, Copy)]
pub struct DriveLimits {
    /// Largest down-thrust magnitude either tail may be asked for (N).
    pub max_thrust: f64,
    /// Largest spin speed magnitude (rad/s).
    pub max_rate: f64,
}

/// Drive speeds realizing a commanded pitch, with the thrusts they
/// rest on and the plant's steady-state prediction.
#[derive(Debug, Clone, Copy)]
pub struct SpeedPlan {
    /// Spin speed per tail (rad/s).
    pub rates: [f64; 2],
    /// Down-thrust per tail (N).
    pub thrusts: [f64; 2],
    /// Steady pitch the linear plant predicts for these thrusts (rad).
    pub predicted_pitch: f64,
}

/// Invert plant and gains for the drive speeds that hold `beta_ref`
/// radians of pitch, splitting the couple antisymmetrically between
/// the tails.
pub fn solve_speeds(
    plant: &LinearPlant,
    gains: &ActuatorGains,
    beta_ref: f64,
    limits: &DriveLimits,
) -> ModelResult<SpeedPlan> {
    gains.validate()?;
    if !beta_ref.is_finite() {
        return Err(ModelError::NonPositiveParameter {
            name: "beta_ref",
            value: beta_ref,
        });
    }

    // Couple needed: (u1 - u2) d/2 = m g r_m beta_ref, split as u2 = -u1.
    let thrust = plant.restoring_moment * beta_ref / plant.spacing;
    let thrusts = [thrust, -thrust];
    let rates = [thrust / gains.k1, thrust / gains.k2];

    let max_feasible = limits
        .max_thrust
        .min(gains.k1.abs() * limits.max_rate)
        .min(gains.k2.abs() * limits.max_rate);
    if thrust.abs() > max_feasible {
        let max_beta = plant.spacing * max_feasible / plant.restoring_moment;
        return Err(ModelError::InfeasibleReference {
            requested_deg: beta_ref.to_degrees(),
            max_deg: max_beta.to_degrees(),
        });
    }

    Ok(SpeedPlan {
        rates,
        thrusts,
        predicted_pitch: plant.steady_pitch(thrusts),
    })
}
