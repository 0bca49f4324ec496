//! Dimensionless characterization of tail designs.
//!
//! A tail spinning at a steady rate with the head clamped produces a
//! periodic load; averaging it over one revolution gives the mean
//! axial thrust of a single filament and the mean pitch couple of a
//! counter-rotating pair. Scaled by `mu |omega| R l` (forces) and
//! `mu |omega| R^2 l` (torques) these collapse to two dimensionless
//! numbers that depend only on the tail's shape ratios: wavelength /
//! length and radius / wavelength. This module evaluates those numbers
//! over grids of shape ratios and attachment spacings, and classifies
//! the locomotion mode implied by a pair of drive speeds.

use nalgebra::{Point3, Vector3};
use rayon::prelude::*;

use crate::error::{ModelError, ModelResult};
use crate::geometry::{mount_pair, mount_single, DiscreteFlagellum, Handedness, HelixSpec};
use crate::rss::{regularization_radius, resultant_wrench, MobilitySystem};

/// Revolution-averaged lumped reactions of clamped, steadily spinning
/// tails (body frame, torque about the body origin).
#[derive(Debug, Clone)]
pub struct SpinAverage {
    /// Mean reaction force per flagellum.
    pub mean_forces: Vec<Vector3<f64>>,
    /// Mean total torque of the lumped reactions about the origin.
    pub mean_torque: Vector3<f64>,
}

impl SpinAverage {
    /// Sum of the per-flagellum mean reactions.
    pub fn net_force(&self) -> Vector3<f64> {
        self.mean_forces.iter().sum()
    }
}

/// Average the lumped tail reactions over one revolution of steady
/// spinning, sampling `phase_samples` uniformly spaced instants of the
/// period of the fastest drive. For equal-magnitude rates (the cases
/// used throughout) every tail completes exactly one turn, so this is
/// an exact period average of an exactly periodic signal.
pub fn steady_spin_average(
    tails: &[DiscreteFlagellum],
    attachments: &[Point3<f64>],
    rates: &[f64],
    viscosity: f64,
    phase_samples: usize,
) -> ModelResult<SpinAverage> {
    if tails.is_empty() || tails.len() != attachments.len() || tails.len() != rates.len() {
        return Err(ModelError::DimensionMismatch {
            expected: tails.len(),
            got: attachments.len().min(rates.len()),
        });
    }
    if phase_samples == 0 {
        return Err(ModelError::NonPositiveParameter {
            name: "phase_samples",
            value: phase_samples as f64,
        });
    }
    let fastest = rates.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    if fastest == 0.0 {
        return Err(ModelError::ZeroDriveSpeed);
    }

    let c = regularization_radius(tails[0].cross_section_radius());
    let period = std::f64::consts::TAU / fastest;
    let origin = Point3::origin();

    let mut mean_forces = vec![Vector3::zeros(); tails.len()];
    let mut mean_torque = Vector3::zeros();
    for k in 0..phase_samples {
        // Quarter-bin offset: a uniform grid averages a periodic
        // integrand equally well at any offset, and this one never
        // lands on phase pi, where touching tails (spacing = 2R) would
        // put a node of each tail on the same midplane point.
        let t = (k as f64 + 0.25) * period / phase_samples as f64;
        let chains: Vec<Vec<Point3<f64>>> = tails
            .iter()
            .zip(rates)
            .map(|(tail, rate)| tail.nodes_at_phase(rate * t))
            .collect();

        let mut velocities = Vec::with_capacity(chains.iter().map(Vec::len).sum());
        for ((tail, rate), chain) in tails.iter().zip(rates).zip(&chains) {
            let spin = tail.axis_dir().into_inner() * *rate;
            let axis_point = tail.axis_point();
            velocities.extend(chain.iter().map(|x| spin.cross(&(x - axis_point))));
        }

        let system = MobilitySystem::assemble(&chains, viscosity, c)?;
        let forces = system.solve(&velocities)?;
        for (i, attachment) in attachments.iter().enumerate() {
            let w = resultant_wrench(forces.flagellum(i), &chains[i], attachment, &origin);
            mean_forces[i] += w.force;
            mean_torque += w.torque;
        }
    }
    let inv = 1.0 / phase_samples as f64;
    for f in &mut mean_forces {
        *f *= inv;
    }
    Ok(SpinAverage {
        mean_forces,
        mean_torque: mean_torque * inv,
    })
}

/// Evaluation settings shared by all sweep kinds.
#[derive(Debug, Clone, Copy)]
pub struct SweepSettings {
    /// Helix radius held fixed while shape ratios vary (m).
    pub helix_radius: f64,
    /// Filament cross-section radius (m).
    pub cross_section_radius: f64,
    /// Fluid viscosity (Pa s).
    pub viscosity: f64,
    /// Spin speed used for the evaluation (rad/s).
    pub rate: f64,
    /// Target segment length for discretization (m).
    pub segment_length: f64,
    /// Cap on nodes per tail; long filaments coarsen their segments to
    /// stay under it, keeping extreme grid corners tractable.
    pub max_nodes: usize,
    /// Phase samples per revolution for the period average.
    pub phase_samples: usize,
    /// Attachment spacing of the evaluation pair, in helix radii.
    pub spacing_over_radius: f64,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self {
            helix_radius: 6.36e-3,
            cross_section_radius: 1.58e-3,
            viscosity: 1.0,
            rate: 20.94,
            segment_length: 5e-3,
            max_nodes: 150,
            phase_samples: 36,
            spacing_over_radius: 3.0,
        }
    }
}

impl SweepSettings {
    fn validate(&self) -> ModelResult<()> {
        for (name, value) in [
            ("helix_radius", self.helix_radius),
            ("cross_section_radius", self.cross_section_radius),
            ("viscosity", self.viscosity),
            ("segment_length", self.segment_length),
            ("spacing_over_radius", self.spacing_over_radius),
        ] {
            if !(value > 0.0) {
                return Err(ModelError::NonPositiveParameter { name, value });
            }
        }
        if self.rate == 0.0 {
            return Err(ModelError::ZeroDriveSpeed);
        }
        if self.max_nodes < 10 {
            return Err(ModelError::NonPositiveParameter {
                name: "max_nodes",
                value: self.max_nodes as f64,
            });
        }
        if self.phase_samples == 0 {
            return Err(ModelError::NonPositiveParameter {
                name: "phase_samples",
                value: 0.0,
            });
        }
        Ok(())
    }

    /// Effective segment length for a filament of the given contour
    /// length: the configured target, coarsened if needed to respect
    /// `max_nodes` and always short enough to discretize at all.
    pub fn effective_segment_length(&self, contour: f64) -> f64 {
        let mut dl = self.segment_length.max(contour / self.max_nodes as f64);
        if dl >= contour {
            dl = contour / 8.0;
        }
        dl
    }
}

/// Dimensionless loads at one point of the shape-ratio plane.
#[derive(Debug, Clone, Copy)]
pub struct DesignPoint {
    pub wavelength_over_length: f64,
    pub radius_over_wavelength: f64,
    /// |mean axial thrust| of one filament / (mu |omega| R l).
    pub thrust_number: f64,
    /// |mean pitch couple| of a counter-rotating pair / (mu |omega| R^2 l).
    pub torque_number: f64,
}

/// Right-handed helix with the given shape ratios and the sweep's
/// fixed radius.
pub fn spec_for_ratios(
    wavelength_over_length: f64,
    radius_over_wavelength: f64,
    settings: &SweepSettings,
) -> ModelResult<HelixSpec> {
    for (name, value) in [
        ("wavelength_over_length", wavelength_over_length),
        ("radius_over_wavelength", radius_over_wavelength),
    ] {
        if !(value > 0.0) || !value.is_finite() {
            return Err(ModelError::NonPositiveParameter { name, value });
        }
    }
    let wavelength = settings.helix_radius / radius_over_wavelength;
    let length = wavelength / wavelength_over_length;
    Ok(HelixSpec {
        helix_radius: settings.helix_radius,
        pitch: wavelength,
        length,
        cross_section_radius: settings.cross_section_radius,
        handedness: Handedness::Right,
        axis_origin: Point3::origin(),
        angular_speed: settings.rate,
    })
}

/// Evaluate the two dimensionless numbers at one shape-ratio point.
pub fn design_point(
    wavelength_over_length: f64,
    radius_over_wavelength: f64,
    settings: &SweepSettings,
) -> ModelResult<DesignPoint> {
    settings.validate()?;
    let spec = spec_for_ratios(wavelength_over_length, radius_over_wavelength, settings)?;
    let dl = settings.effective_segment_length(spec.length);
    let rate = settings.rate;
    let force_scale = settings.viscosity * rate.abs() * spec.helix_radius * spec.length;
    let torque_scale = force_scale * spec.helix_radius;

    // Single filament: mean axial thrust.
    let single = mount_single(&spec, &Point3::origin(), dl)?;
    let single_avg = steady_spin_average(
        std::slice::from_ref(&single),
        &[Point3::origin()],
        &[rate],
        settings.viscosity,
        settings.phase_samples,
    )?;

    // Counter-rotating pair: mean pitch couple.
    let spacing = settings.spacing_over_radius * spec.helix_radius;
    let pair = mount_pair(&[spec, spec], spacing, dl)?;
    let attachments = [
        Point3::new(0.5 * spacing, 0.0, 0.0),
        Point3::new(-0.5 * spacing, 0.0, 0.0),
    ];
    let pair_avg = steady_spin_average(
        &pair,
        &attachments,
        &[rate, -rate],
        settings.viscosity,
        settings.phase_samples,
    )?;

    Ok(DesignPoint {
        wavelength_over_length,
        radius_over_wavelength,
        thrust_number: single_avg.mean_forces[0].z.abs() / force_scale,
        torque_number: pair_avg.mean_torque.y.abs() / torque_scale,
    })
}

/// `n` evenly spaced values from `lo` to `hi` inclusive. A
/// single-point axis (`n == 1`) collapses to `lo`.
pub fn lin_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(hi >= lo && n >= 1, "lin_spaced needs lo <= hi and n >= 1");
    if n == 1 {
        return vec![lo];
    }
    assert!(hi > lo, "lin_spaced with n >= 2 needs hi > lo");
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// `n` logarithmically spaced values from `lo` to `hi` inclusive. A
/// single-point axis (`n == 1`) collapses to `lo`.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(
        lo > 0.0 && hi >= lo && n >= 1,
        "log_spaced needs 0 < lo <= hi and n >= 1"
    );
    if n == 1 {
        return vec![lo];
    }
    assert!(hi > lo, "log_spaced with n >= 2 needs hi > lo");
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Evaluate the full shape-ratio grid, row-major with
/// `wavelength_over_length` as the outer axis. Points are computed in
/// parallel but returned in deterministic grid order.
pub fn design_sweep(
    wavelength_over_length: &[f64],
    radius_over_wavelength: &[f64],
    settings: &SweepSettings,
) -> ModelResult<Vec<DesignPoint>> {
    let pairs: Vec<(f64, f64)> = wavelength_over_length
        .iter()
        .flat_map(|wl| radius_over_wavelength.iter().map(move |rw| (*wl, *rw)))
        .collect();
    pairs
        .par_iter()
        .map(|(wl, rw)| design_point(*wl, *rw, settings))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// Pair interaction at one attachment spacing.
#[derive(Debug, Clone, Copy)]
pub struct SpacingPoint {
    pub spacing_over_radius: f64,
    /// Per-flagellum dimensionless axial thrust, counter-rotating pair.
    pub counter_thrust_number: f64,
    /// Per-flagellum dimensionless axial thrust, co-rotating pair.
    pub co_thrust_number: f64,
    /// Dimensionless pitch couple of the counter-rotating pair.
    pub torque_number: f64,
}

/// Sweep the attachment spacing of a pair of identical tails,
/// comparing counter- and co-rotating drive.
pub fn spacing_sweep(
    spec: &HelixSpec,
    spacing_over_radius: &[f64],
    settings: &SweepSettings,
) -> ModelResult<Vec<SpacingPoint>> {
    settings.validate()?;
    spec.validate()?;
    let dl = settings.effective_segment_length(spec.length);
    let rate = settings.rate;
    let force_scale = settings.viscosity * rate.abs() * spec.helix_radius * spec.length;
    let torque_scale = force_scale * spec.helix_radius;

    spacing_over_radius
        .par_iter()
        .map(|ratio| {
            let spacing = ratio * spec.helix_radius;
            let pair = mount_pair(&[*spec, *spec], spacing, dl)?;
            let attachments = [
                Point3::new(0.5 * spacing, 0.0, 0.0),
                Point3::new(-0.5 * spacing, 0.0, 0.0),
            ];

            let counter = steady_spin_average(
                &pair,
                &attachments,
                &[rate, -rate],
                settings.viscosity,
                settings.phase_samples,
            )?;
            let co = steady_spin_average(
                &pair,
                &attachments,
                &[rate, rate],
                settings.viscosity,
                settings.phase_samples,
            )?;

            Ok(SpacingPoint {
                spacing_over_radius: *ratio,
                counter_thrust_number: counter.mean_forces[0].z.abs() / force_scale,
                co_thrust_number: co.mean_forces[0].z.abs() / force_scale,
                torque_number: counter.mean_torque.y.abs() / torque_scale,
            })
        })
        .collect::<Vec<ModelResult<SpacingPoint>>>()
        .into_iter()
        .collect()
}

/// Locomotion regimes reachable by choosing the two drive speeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocomotionMode {
    /// Both tails thrust downward; the body translates down its axis.
    TranslateDown,
    /// Both tails thrust upward; the body translates up its axis.
    TranslateUp,
    /// Positive pitch couple (tail 1 down, tail 2 up).
    TurnLeft,
    /// Negative pitch couple.
    TurnRight,
    /// Loads too small to call, or no drive at all.
    Unclassified,
}

impl LocomotionMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            LocomotionMode::TranslateDown => "translate_down",
            LocomotionMode::TranslateUp => "translate_up",
            LocomotionMode::TurnLeft => "turn_left",
            LocomotionMode::TurnRight => "turn_right",
            LocomotionMode::Unclassified => "unclassified",
        }
    }
}

/// Dominance threshold below which dimensionless mean loads are
/// treated as zero by [`classify_mode`].
pub const MODE_THRESHOLD: f64 = 1e-3;

/// Classify the locomotion mode from the revolution-averaged net axial
/// force and pitch couple. The loads are made dimensionless with the
/// same scales as the sweeps; whichever dominates names the mode.
pub fn classify_mode(
    rates: [f64; 2],
    mean_force_z: f64,
    mean_torque_y: f64,
    viscosity: f64,
    helix_radius: f64,
    length: f64,
) -> LocomotionMode {
    let omega = rates[0].abs().max(rates[1].abs());
    if omega == 0.0 {
        return LocomotionMode::Unclassified;
    }
    let force_scale = viscosity * omega * helix_radius * length;
    let f = mean_force_z / force_scale;
    let t = mean_torque_y / (force_scale * helix_radius);
    if f.abs() < MODE_THRESHOLD && t.abs() < MODE_THRESHOLD {
        return LocomotionMode::Unclassified;
    }
    if t.abs() >= f.abs() {
        if t > 0.0 {
            LocomotionMode::TurnLeft
        } else {
            LocomotionMode::TurnRight
        }
    } else if f < 0.0 {
        LocomotionMode::TranslateDown
    } else {
        LocomotionMode::TranslateUp
    }
}

/// A named organism (or robot) located on the shape-ratio plane.
#[derive(Debug, Clone, Copy)]
pub struct OrganismPoint {
    pub name: &'static str,
    pub wavelength_over_length: f64,
    pub radius_over_wavelength: f64,
}

/// Flagellated swimmers commonly used as reference points, plus the
/// macroscopic robot this model is scaled to.
pub const ORGANISM_POINTS: [OrganismPoint; 6] = [
    OrganismPoint {
        name: "caulobacter_crescentus",
        wavelength_over_length: 0.1667,
        radius_over_wavelength: 0.1205,
    },
    OrganismPoint {
        name: "escherichia_coli",
        wavelength_over_length: 0.3571,
        radius_over_wavelength: 0.0909,
    },
    OrganismPoint {
        name: "rhizobium_lupini",
        wavelength_over_length: 0.25,
        radius_over_wavelength: 0.1852,
    },
    OrganismPoint {
        name: "salmonella_typhimurium",
        wavelength_over_length: 0.25,
        radius_over_wavelength: 0.0909,
    },
    OrganismPoint {
        name: "vibrio_alginolyticus",
        wavelength_over_length: 0.3243,
        radius_over_wavelength: 0.1167,
    },
    OrganismPoint {
        name: "robot",
        wavelength_over_length: 0.33,
        radius_over_wavelength: 0.2,
    },
];
