//! Simulation library for bacteria-inspired bi-flagellated swimmers in
//! creeping flow.
//!
//! The library couples three layers:
//! - [`rss`]: slender-filament hydrodynamics via regularized Stokeslet
//!   segments, solved as a dense mobility system;
//! - [`geometry`] + [`dynamics`] + [`head`]: rigid helical tails driven
//!   about their own axes, attached to a cylindrical head with drag,
//!   buoyancy-righting and lumped tail reactions, integrated either as
//!   a single-axis pivot or as a free rigid body;
//! - [`control`] + [`sweep`]: a linear state-space model of the pivot
//!   mode for speed planning, and dimensionless design-space sweeps.

// Guards of the form `!(x > 0.0)` are deliberate: unlike `x <= 0.0`
// they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod control;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod head;
pub mod rss;
pub mod sweep;

pub use config::{Mode, RunConfig, SweepKind};
pub use control::{
    calibrate, solve_speeds, ActuatorGains, Calibration, CalibrationMode, DriveLimits, LinearPlant,
    SpeedPlan,
};
pub use dynamics::{FreeSample, FreeState, PivotSample, PivotState, Swimmer, TailForcing};
pub use error::{ConfigError, ModelError};
pub use geometry::{DiscreteFlagellum, Handedness, HelixSpec, RobotGeometry};
pub use head::HeadParams;
pub use rss::{MobilitySystem, NodalForces, Wrench};
pub use sweep::{
    classify_mode, design_point, design_sweep, lin_spaced, log_spaced, spacing_sweep, DesignPoint,
    LocomotionMode, SpacingPoint, SweepSettings,
};
