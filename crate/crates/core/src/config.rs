//! Run configuration: a small line-based `key = value` format with
//! physical defaults, explicit unit suffixes and aggregate validation.
//!
//! Format rules: one assignment per line, `#` starts a comment, blank
//! lines are skipped, later assignments override earlier ones. Values
//! are SI (meters, seconds, rad/s) unless a unit suffix is given:
//! spin-speed keys accept `rpm` (e.g. `omega1 = 280 rpm`) and
//! `beta_ref` accepts `deg`. Unknown keys are rejected so typos cannot
//! silently fall back to defaults, and invariant violations are
//! reported all at once.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use nalgebra::{Point3, Vector3};

use crate::control::CalibrationMode;
use crate::error::{ConfigError, ConfigResult};
use crate::geometry::{Handedness, HelixSpec, RobotGeometry};
use crate::head::HeadParams;
use crate::sweep::SweepSettings;

/// What a run does.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Pitch dynamics about a fixed pivot.
    Pivot,
    /// Free six-degree-of-freedom swimming.
    Free,
    /// Dimensionless design-space sweep.
    Sweep,
    /// Calibrate gains, plan speeds for `beta_ref`, simulate the plan.
    Control,
    /// Thrust-gain calibration only.
    Calibrate,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Pivot => "pivot",
            Mode::Free => "free",
            Mode::Sweep => "sweep",
            Mode::Control => "control",
            Mode::Calibrate => "calibrate",
        }
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "pivot" => Ok(Mode::Pivot),
            "free" => Ok(Mode::Free),
            "sweep" => Ok(Mode::Sweep),
            "control" => Ok(Mode::Control),
            "calibrate" => Ok(Mode::Calibrate),
            other => Err(format!(
                "unknown mode `{other}` (expected pivot, free, sweep, control or calibrate)"
            )),
        }
    }
}

/// Which sweep the `sweep` mode runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    /// Shape-ratio grid (wavelength/length x radius/wavelength).
    Grid,
    /// Attachment-spacing sweep at fixed tail shape.
    Spacing,
}

impl SweepKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepKind::Grid => "grid",
            SweepKind::Spacing => "spacing",
        }
    }
}

/// Fully resolved run configuration. Field defaults describe the
/// reference robot; see the bundled example configs for the few keys
/// that change between experiments.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Option<Mode>,

    // Material and fluid constants. The elastic modulus and material
    // density describe the molded tails; the rigid-filament model
    // carries them for reporting only.
    pub elastic_modulus: f64,
    pub density: f64,
    pub viscosity: f64,

    // Tail geometry.
    pub filament_radius: f64,
    pub helix_radius: f64,
    pub helix_pitch: f64,
    pub filament_length: f64,
    pub spacing: f64,

    // Head geometry and mass properties.
    pub head_radius: f64,
    pub head_height: f64,
    pub com_shift: f64,
    pub head_mass: f64,
    pub gravity: f64,
    /// Optional override of the transverse (pitch) moment of inertia;
    /// the axial moment keeps its solid-cylinder value.
    pub pitch_inertia: Option<f64>,

    // Drag closure.
    pub drag_translation: f64,
    pub drag_rotation: f64,

    // Discretization and integration.
    pub segment_length: f64,
    pub time_step: f64,
    pub t_end: f64,

    // Actuation.
    pub omega1: f64,
    pub omega2: f64,
    pub beta_ref: f64,
    pub omega_max: f64,
    /// Optional down-thrust bound; when unset, planning uses the
    /// calibrated gain times `omega_max`.
    pub f_max: Option<f64>,

    // Calibration.
    pub calibration_rates: Vec<f64>,
    pub calibration_mode: CalibrationMode,
    pub phase_samples: usize,

    // Sweep layout.
    pub sweep_kind: SweepKind,
    pub grid_wl_min: f64,
    pub grid_wl_max: f64,
    pub grid_wl_count: usize,
    pub grid_rw_min: f64,
    pub grid_rw_max: f64,
    pub grid_rw_count: usize,
    pub d_over_r: f64,
    pub spacing_ratio_min: f64,
    pub spacing_ratio_max: f64,
    pub spacing_ratio_count: usize,
    pub sweep_omega: f64,
    pub max_nodes: usize,

    // Artifacts.
    pub out_dir: String,
    /// Reserved for future stochastic features; deterministic runs
    /// ignore it but echo it for provenance.
    pub seed: u64,
}

const RPM_TO_RAD: f64 = std::f64::consts::TAU / 60.0;

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: None,
            elastic_modulus: 4.107e9,
            density: 1260.0,
            viscosity: 1.0,
            filament_radius: 1.58e-3,
            helix_radius: 6.36e-3,
            helix_pitch: 31.8e-3,
            filament_length: 95.4e-3,
            spacing: 22e-3,
            head_radius: 25e-3,
            head_height: 43e-3,
            com_shift: 2e-3,
            head_mass: 0.1,
            gravity: 9.8,
            pitch_inertia: None,
            drag_translation: 4.0,
            drag_rotation: 2.3,
            segment_length: 5e-3,
            time_step: 0.01,
            t_end: 10.0,
            omega1: 280.0 * RPM_TO_RAD,
            omega2: -280.0 * RPM_TO_RAD,
            beta_ref: 5.0f64.to_radians(),
            omega_max: 30.0,
            f_max: None,
            calibration_rates: [60.0, 100.0, 140.0, 200.0]
                .iter()
                .map(|r| r * RPM_TO_RAD)
                .collect(),
            calibration_mode: CalibrationMode::InPair,
            phase_samples: 36,
            sweep_kind: SweepKind::Grid,
            grid_wl_min: 0.1,
            grid_wl_max: 1.0,
            grid_wl_count: 24,
            grid_rw_min: 0.02,
            grid_rw_max: 0.5,
            grid_rw_count: 24,
            d_over_r: 3.0,
            spacing_ratio_min: 2.0,
            spacing_ratio_max: 8.0,
            spacing_ratio_count: 13,
            sweep_omega: 200.0 * RPM_TO_RAD,
            max_nodes: 150,
            out_dir: "out".to_string(),
            seed: 0,
        }
    }
}

impl RunConfig {
    /// Parse a config file, apply `key=value` overrides on top, force
    /// the mode if the caller supplies one, then validate.
    pub fn load(path: &Path, overrides: &[String], mode_hint: Option<Mode>) -> ConfigResult<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_sources(Some(&text), overrides, mode_hint)
    }

    /// Same as [`RunConfig::load`] but with the file text optional and
    /// in memory. Overrides are reported as line 0 in errors.
    pub fn from_sources(
        file_text: Option<&str>,
        overrides: &[String],
        mode_hint: Option<Mode>,
    ) -> ConfigResult<Self> {
        let mut cfg = Self::default();
        if let Some(text) = file_text {
            cfg.apply_text(text)?;
        }
        for item in overrides {
            let (key, value) = item.split_once('=').ok_or_else(|| ConfigError::Parse {
                line: 0,
                message: format!("override `{item}` must look like key=value"),
            })?;
            cfg.apply(key.trim(), value.trim(), 0)?;
        }
        if let Some(mode) = mode_hint {
            cfg.mode = Some(mode);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply_text(&mut self, text: &str) -> ConfigResult<()> {
        for (idx, raw_line) in text.lines().enumerate() {
            let line = idx + 1;
            let content = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            };
            let content = content.trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Parse {
                line,
                message: format!("expected `key = value`, got `{content}`"),
            })?;
            self.apply(key.trim(), value.trim(), line)?;
        }
        Ok(())
    }

    fn apply(&mut self, key: &str, value: &str, line: usize) -> ConfigResult<()> {
        if value.is_empty() {
            return Err(ConfigError::Parse {
                line,
                message: format!("key `{key}` has an empty value"),
            });
        }
        match key {
            "mode" => {
                self.mode = Some(
                    Mode::from_str(value)
                        .map_err(|message| ConfigError::Parse { line, message })?,
                );
            }
            "sweep_kind" => {
                self.sweep_kind = match value {
                    "grid" => SweepKind::Grid,
                    "spacing" => SweepKind::Spacing,
                    other => {
                        return Err(ConfigError::Parse {
                            line,
                            message: format!(
                                "unknown sweep_kind `{other}` (expected grid or spacing)"
                            ),
                        })
                    }
                };
            }
            "calibration_mode" => {
                self.calibration_mode = match value {
                    "in_pair" => CalibrationMode::InPair,
                    "isolated" => CalibrationMode::Isolated,
                    other => {
                        return Err(ConfigError::Parse {
                            line,
                            message: format!(
                                "unknown calibration_mode `{other}` (expected in_pair or isolated)"
                            ),
                        })
                    }
                };
            }
            "calibration_rates" => {
                let mut rates = Vec::new();
                for part in value.split(',') {
                    rates.push(parse_number(key, part.trim(), line)?);
                }
                self.calibration_rates = rates;
            }
            "out_dir" => self.out_dir = value.to_string(),
            "seed" => self.seed = parse_integer(key, value, line)?,
            "phase_samples" => self.phase_samples = parse_integer(key, value, line)? as usize,
            "max_nodes" => self.max_nodes = parse_integer(key, value, line)? as usize,
            "grid_wl_count" => self.grid_wl_count = parse_integer(key, value, line)? as usize,
            "grid_rw_count" => self.grid_rw_count = parse_integer(key, value, line)? as usize,
            "spacing_ratio_count" => {
                self.spacing_ratio_count = parse_integer(key, value, line)? as usize
            }
            "pitch_inertia" => self.pitch_inertia = Some(parse_number(key, value, line)?),
            "f_max" => self.f_max = Some(parse_number(key, value, line)?),
            _ => {
                let slot = match key {
                    "elastic_modulus" => &mut self.elastic_modulus,
                    "density" => &mut self.density,
                    "viscosity" => &mut self.viscosity,
                    "filament_radius" => &mut self.filament_radius,
                    "helix_radius" => &mut self.helix_radius,
                    "helix_pitch" => &mut self.helix_pitch,
                    "filament_length" => &mut self.filament_length,
                    "spacing" => &mut self.spacing,
                    "head_radius" => &mut self.head_radius,
                    "head_height" => &mut self.head_height,
                    "com_shift" => &mut self.com_shift,
                    "head_mass" => &mut self.head_mass,
                    "gravity" => &mut self.gravity,
                    "drag_translation" => &mut self.drag_translation,
                    "drag_rotation" => &mut self.drag_rotation,
                    "segment_length" => &mut self.segment_length,
                    "time_step" => &mut self.time_step,
                    "t_end" => &mut self.t_end,
                    "omega1" => &mut self.omega1,
                    "omega2" => &mut self.omega2,
                    "beta_ref" => &mut self.beta_ref,
                    "omega_max" => &mut self.omega_max,
                    "grid_wl_min" => &mut self.grid_wl_min,
                    "grid_wl_max" => &mut self.grid_wl_max,
                    "grid_rw_min" => &mut self.grid_rw_min,
                    "grid_rw_max" => &mut self.grid_rw_max,
                    "d_over_r" => &mut self.d_over_r,
                    "spacing_ratio_min" => &mut self.spacing_ratio_min,
                    "spacing_ratio_max" => &mut self.spacing_ratio_max,
                    "sweep_omega" => &mut self.sweep_omega,
                    _ => {
                        return Err(ConfigError::UnknownKey {
                            key: key.to_string(),
                            line,
                        })
                    }
                };
                *slot = parse_number(key, value, line)?;
            }
        }
        Ok(())
    }

    /// Check every invariant, reporting all violations together.
    pub fn validate(&self) -> ConfigResult<()> {
        let mode = self.mode.ok_or(ConfigError::MissingKey { key: "mode" })?;

        let mut violations = Vec::new();
        let positives = [
            ("elastic_modulus", "E", self.elastic_modulus),
            ("density", "rho", self.density),
            ("viscosity", "mu", self.viscosity),
            ("filament_radius", "r0", self.filament_radius),
            ("helix_radius", "R", self.helix_radius),
            ("helix_pitch", "lambda", self.helix_pitch),
            ("filament_length", "l", self.filament_length),
            ("spacing", "d", self.spacing),
            ("head_radius", "r_h", self.head_radius),
            ("head_height", "h", self.head_height),
            ("head_mass", "m_h", self.head_mass),
            ("drag_translation", "C_t", self.drag_translation),
            ("drag_rotation", "C_r", self.drag_rotation),
            ("segment_length", "dl", self.segment_length),
            ("time_step", "dt", self.time_step),
            ("t_end", "T_end", self.t_end),
            ("omega_max", "omega_max", self.omega_max),
            ("d_over_r", "d/R", self.d_over_r),
        ];
        for (key, symbol, value) in positives {
            if !(value > 0.0) || !value.is_finite() {
                violations.push(format!("{key} ({symbol}) must be positive, got {value}"));
            }
        }
        for (key, symbol, value) in [
            ("com_shift", "r_m", self.com_shift),
            ("gravity", "g", self.gravity),
        ] {
            if !(value >= 0.0) || !value.is_finite() {
                violations.push(format!(
                    "{key} ({symbol}) must be non-negative, got {value}"
                ));
            }
        }
        if let Some(iy) = self.pitch_inertia {
            if !(iy > 0.0) || !iy.is_finite() {
                violations.push(format!("pitch_inertia must be positive, got {iy}"));
            }
        }
        if let Some(f) = self.f_max {
            if !(f > 0.0) || !f.is_finite() {
                violations.push(format!("f_max must be positive, got {f}"));
            }
        }
        if self.filament_radius >= self.helix_radius {
            violations.push(format!(
                "filament_radius (r0 = {}) must be smaller than helix_radius (R = {})",
                self.filament_radius, self.helix_radius
            ));
        }
        if self.segment_length >= self.filament_length {
            violations.push(format!(
                "segment_length (dl = {}) must be smaller than filament_length (l = {})",
                self.segment_length, self.filament_length
            ));
        }
        if !self.beta_ref.is_finite() || self.beta_ref.abs() >= std::f64::consts::FRAC_PI_2 {
            violations.push(format!(
                "beta_ref must lie strictly inside +-90 deg, got {} deg",
                self.beta_ref.to_degrees()
            ));
        }

        // Spin resolution: a revolution of the fastest relevant drive
        // must span at least ten steps, dt <= 0.1 * 2 pi / max|omega|.
        let fastest = match mode {
            Mode::Pivot | Mode::Free => self.omega1.abs().max(self.omega2.abs()),
            Mode::Control => self.omega_max,
            Mode::Sweep | Mode::Calibrate => 0.0,
        };
        if fastest > 0.0 && self.time_step > 0.0 {
            let max_dt = 0.1 * std::f64::consts::TAU / fastest;
            if self.time_step > max_dt {
                violations.push(format!(
                    "time_step (dt = {}) too coarse for drive speed {} rad/s (max {max_dt})",
                    self.time_step, fastest
                ));
            }
        }

        if self.phase_samples == 0 {
            violations.push("phase_samples must be at least 1".to_string());
        }
        if self.max_nodes < 10 {
            violations.push(format!(
                "max_nodes must be at least 10, got {}",
                self.max_nodes
            ));
        }
        for (what, min, max, count) in [
            (
                "grid_wl",
                self.grid_wl_min,
                self.grid_wl_max,
                self.grid_wl_count,
            ),
            (
                "grid_rw",
                self.grid_rw_min,
                self.grid_rw_max,
                self.grid_rw_count,
            ),
            (
                "spacing_ratio",
                self.spacing_ratio_min,
                self.spacing_ratio_max,
                self.spacing_ratio_count,
            ),
        ] {
            if !(min > 0.0 && max >= min) {
                violations.push(format!(
                    "{what} range must satisfy 0 < min <= max, got [{min}, {max}]"
                ));
            } else if count >= 2 && max == min {
                violations.push(format!(
                    "{what} range is a single value; use {what}_count = 1 or widen it"
                ));
            }
            if count == 0 {
                violations.push(format!("{what}_count must be at least 1"));
            }
        }
        if self.sweep_omega == 0.0 || !self.sweep_omega.is_finite() {
            violations.push(format!(
                "sweep_omega must be nonzero, got {}",
                self.sweep_omega
            ));
        }
        if self.calibration_rates.len() < 3 {
            violations.push(format!(
                "calibration_rates needs at least 3 speeds, got {}",
                self.calibration_rates.len()
            ));
        }
        if self
            .calibration_rates
            .iter()
            .any(|r| *r == 0.0 || !r.is_finite())
        {
            violations.push("calibration_rates must all be nonzero".to_string());
        }

        if violations.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid { violations })
        }
    }

    /// Canonical text form: parsing it back yields an equal config.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        if let Some(mode) = self.mode {
            let _ = writeln!(s, "mode = {}", mode.as_str());
        }
        let floats: [(&str, f64); 30] = [
            ("beta_ref", self.beta_ref),
            ("com_shift", self.com_shift),
            ("d_over_r", self.d_over_r),
            ("density", self.density),
            ("drag_rotation", self.drag_rotation),
            ("drag_translation", self.drag_translation),
            ("elastic_modulus", self.elastic_modulus),
            ("filament_length", self.filament_length),
            ("filament_radius", self.filament_radius),
            ("gravity", self.gravity),
            ("grid_rw_max", self.grid_rw_max),
            ("grid_rw_min", self.grid_rw_min),
            ("grid_wl_max", self.grid_wl_max),
            ("grid_wl_min", self.grid_wl_min),
            ("head_height", self.head_height),
            ("head_mass", self.head_mass),
            ("head_radius", self.head_radius),
            ("helix_pitch", self.helix_pitch),
            ("helix_radius", self.helix_radius),
            ("omega1", self.omega1),
            ("omega2", self.omega2),
            ("omega_max", self.omega_max),
            ("segment_length", self.segment_length),
            ("spacing", self.spacing),
            ("spacing_ratio_max", self.spacing_ratio_max),
            ("spacing_ratio_min", self.spacing_ratio_min),
            ("sweep_omega", self.sweep_omega),
            ("t_end", self.t_end),
            ("time_step", self.time_step),
            ("viscosity", self.viscosity),
        ];
        for (key, value) in floats {
            let _ = writeln!(s, "{key} = {value:?}");
        }
        if let Some(iy) = self.pitch_inertia {
            let _ = writeln!(s, "pitch_inertia = {iy:?}");
        }
        if let Some(f) = self.f_max {
            let _ = writeln!(s, "f_max = {f:?}");
        }
        let rates: Vec<String> = self
            .calibration_rates
            .iter()
            .map(|r| format!("{r:?}"))
            .collect();
        let _ = writeln!(s, "calibration_rates = {}", rates.join(", "));
        let _ = writeln!(
            s,
            "calibration_mode = {}",
            match self.calibration_mode {
                CalibrationMode::InPair => "in_pair",
                CalibrationMode::Isolated => "isolated",
            }
        );
        let _ = writeln!(s, "sweep_kind = {}", self.sweep_kind.as_str());
        for (key, value) in [
            ("grid_rw_count", self.grid_rw_count),
            ("grid_wl_count", self.grid_wl_count),
            ("max_nodes", self.max_nodes),
            ("phase_samples", self.phase_samples),
            ("spacing_ratio_count", self.spacing_ratio_count),
        ] {
            let _ = writeln!(s, "{key} = {value}");
        }
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "out_dir = {}", self.out_dir);
        s
    }

    /// Tail template implied by the geometry keys.
    pub fn helix_spec(&self) -> HelixSpec {
        HelixSpec {
            helix_radius: self.helix_radius,
            pitch: self.helix_pitch,
            length: self.filament_length,
            cross_section_radius: self.filament_radius,
            handedness: Handedness::Right,
            axis_origin: Point3::origin(),
            angular_speed: self.omega1,
        }
    }

    pub fn geometry(&self) -> RobotGeometry {
        let tail = self.helix_spec();
        RobotGeometry {
            head_radius: self.head_radius,
            head_height: self.head_height,
            spacing: self.spacing,
            com_shift: self.com_shift,
            head_mass: self.head_mass,
            tails: [tail, tail],
        }
    }

    pub fn head(&self) -> HeadParams {
        HeadParams {
            radius: self.head_radius,
            height: self.head_height,
            mass: self.head_mass,
            com_shift: self.com_shift,
            translational_coefficient: self.drag_translation,
            rotational_coefficient: self.drag_rotation,
            gravity: self.gravity,
        }
    }

    /// Principal inertia with the optional pitch override applied to
    /// both transverse axes.
    pub fn inertia(&self) -> Vector3<f64> {
        let base = self.head().principal_inertia();
        match self.pitch_inertia {
            Some(iy) => Vector3::new(iy, iy, base.z),
            None => base,
        }
    }

    pub fn sweep_settings(&self) -> SweepSettings {
        SweepSettings {
            helix_radius: self.helix_radius,
            cross_section_radius: self.filament_radius,
            viscosity: self.viscosity,
            rate: self.sweep_omega,
            segment_length: self.segment_length,
            max_nodes: self.max_nodes,
            phase_samples: self.phase_samples,
            spacing_over_radius: self.d_over_r,
        }
    }

    /// Number of whole steps covering `t_end`.
    pub fn step_count(&self) -> usize {
        (self.t_end / self.time_step).round().max(1.0) as usize
    }
}

/// Parse a float, honoring the unit suffixes each key admits.
fn parse_number(key: &str, raw: &str, line: usize) -> ConfigResult<f64> {
    let mut parts = raw.split_whitespace();
    let number = parts.next().unwrap_or("");
    let suffix = parts.next();
    if parts.next().is_some() {
        return Err(ConfigError::Parse {
            line,
            message: format!("too many tokens in value `{raw}` for key `{key}`"),
        });
    }
    let value: f64 = number.parse().map_err(|_| ConfigError::Parse {
        line,
        message: format!("cannot parse `{number}` as a number for key `{key}`"),
    })?;
    match suffix {
        None => Ok(value),
        Some("rpm") => {
            let spins = matches!(
                key,
                "omega1" | "omega2" | "omega_max" | "sweep_omega" | "calibration_rates"
            );
            if spins {
                Ok(value * RPM_TO_RAD)
            } else {
                Err(ConfigError::Parse {
                    line,
                    message: format!("unit `rpm` is not valid for key `{key}`"),
                })
            }
        }
        Some("deg") if key == "beta_ref" => Ok(value.to_radians()),
        Some(other) => Err(ConfigError::Parse {
            line,
            message: format!("unknown unit `{other}` for key `{key}`"),
        }),
    }
}

fn parse_integer(key: &str, raw: &str, line: usize) -> ConfigResult<u64> {
    raw.parse().map_err(|_| ConfigError::Parse {
        line,
        message: format!("cannot parse `{raw}` as an integer for key `{key}`"),
    })
}
