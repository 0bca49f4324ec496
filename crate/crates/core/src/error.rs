//! Error types shared across the simulation library.

use thiserror::Error;

/// Errors raised while building geometry or evaluating the physical model.
#[derive(Debug, Clone, Error)]
pub enum ModelError {
    #[error("parameter `{name}` must be positive, got {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },

    #[error(
        "filament cross-section radius {cross_section} m must be smaller than the helix radius {helix_radius} m"
    )]
    CrossSectionTooLarge {
        cross_section: f64,
        helix_radius: f64,
    },

    #[error(
        "target segment length {segment} m must be smaller than the helix contour span {contour} m"
    )]
    SegmentTooLong { segment: f64, contour: f64 },

    #[error("segment {index} is degenerate (length {length} m below {min} m)")]
    DegenerateSegment { index: usize, length: f64, min: f64 },

    #[error("nodes {first} and {second} coincide (separation {distance} m)")]
    CoincidentNodes {
        first: usize,
        second: usize,
        distance: f64,
    },

    #[error("mobility matrix is ill-conditioned (condition estimate {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("velocity vector has {got} entries, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("normalization requires a nonzero drive speed")]
    ZeroDriveSpeed,

    #[error("no finite steady state: restoring arm is zero")]
    NoRestoringArm,

    #[error(
        "reference pitch {requested_deg:.2} deg exceeds the actuator-feasible range (max {max_deg:.2} deg at the force limit)"
    )]
    InfeasibleReference { requested_deg: f64, max_deg: f64 },

    #[error("calibration needs at least 3 drive speeds, got {got}")]
    TooFewSpeeds { got: usize },

    #[error("time step {dt} s is too coarse for drive speed {omega} rad/s (max {max_dt} s)")]
    TimeStepTooCoarse { dt: f64, omega: f64, max_dt: f64 },
}

pub type ModelResult<T> = Result<T, ModelError>;

/// Errors raised while reading or validating a run configuration.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown key `{key}` on line {line}")]
    UnknownKey { key: String, line: usize },

    #[error("missing required key `{key}`")]
    MissingKey { key: &'static str },

    #[error("invalid configuration:\n{}", .violations.join("\n"))]
    Invalid { violations: Vec<String> },
}

pub type ConfigResult<T> = Result<T, ConfigError>;
