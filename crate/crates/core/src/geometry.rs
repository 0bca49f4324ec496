//! Helical flagellum geometry and its rigid-body kinematics.
//!
//! A flagellum is a rigid helical filament discretized into straight
//! segments. The first two nodes sit on the rotation axis and model the
//! short straight shaft that couples the filament to the head; the
//! remaining nodes sample the helical centerline uniformly in arc
//! parameter. All motion is rigid: spinning a flagellum is an exact
//! rotation about its own axis, never an Euler update of the velocity
//! field, so inter-node distances are preserved for any step count.

use nalgebra::{Isometry3, Point3, Rotation3, Translation3, Unit, UnitQuaternion, Vector3};

use crate::error::{ModelError, ModelResult};

/// Chirality of the helical centerline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Handedness {
    Right,
    Left,
}

impl Handedness {
    /// Sign applied to the lateral (y) term of the centerline; +1 for a
    /// right-handed helix, -1 for its mirror image.
    pub fn sign(self) -> f64 {
        match self {
            Handedness::Right => 1.0,
            Handedness::Left => -1.0,
        }
    }
}

/// Continuous description of one helical filament.
///
/// The center line in the filament's own frame is
/// `[R cos(2 pi s / L), sign * R sin(2 pi s / L), pitch * s / L]` for
/// `s` in `[0, length]`, where `L` is the contour length of one full
/// turn. The axis is the +z line through `axis_origin`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelixSpec {
    /// Helix radius R (m).
    pub helix_radius: f64,
    /// Axial rise per full turn (m).
    pub pitch: f64,
    /// Arc-parameter span of the sampled centerline (m).
    pub length: f64,
    /// Radius of the filament cross-section (m).
    pub cross_section_radius: f64,
    pub handedness: Handedness,
    /// Point the rotation axis passes through; the helix starts in the
    /// axial plane of this point.
    pub axis_origin: Point3<f64>,
    /// Nominal spin rate (rad/s); positive spins the filament about its
    /// outward (head-to-tip) axis by the right-hand rule.
    pub angular_speed: f64,
}

impl HelixSpec {
    /// Contour length of one full helical turn.
    pub fn turn_length(&self) -> f64 {
        let circumference = 2.0 * std::f64::consts::PI * self.helix_radius;
        circumference.hypot(self.pitch)
    }

    /// Number of full turns spanned by the sampled centerline.
    pub fn turns(&self) -> f64 {
        self.length / self.turn_length()
    }

    /// Centerline point at arc parameter `s` with the filament rotated
    /// by `phase` about its axis.
    pub fn point_at(&self, s: f64, phase: f64) -> Point3<f64> {
        let sign = self.handedness.sign();
        let angle = 2.0 * std::f64::consts::PI * s / self.turn_length() + sign * phase;
        self.axis_origin
            + Vector3::new(
                self.helix_radius * angle.cos(),
                sign * self.helix_radius * angle.sin(),
                self.pitch * s / self.turn_length(),
            )
    }

    pub fn validate(&self) -> ModelResult<()> {
        for (name, value) in [
            ("helix_radius", self.helix_radius),
            ("pitch", self.pitch),
            ("length", self.length),
            ("cross_section_radius", self.cross_section_radius),
        ] {
            if !(value > 0.0) {
                return Err(ModelError::NonPositiveParameter { name, value });
            }
        }
        if self.cross_section_radius >= self.helix_radius {
            return Err(ModelError::CrossSectionTooLarge {
                cross_section: self.cross_section_radius,
                helix_radius: self.helix_radius,
            });
        }
        Ok(())
    }

    /// Number of helical (analytic-region) sample nodes for a target
    /// segment length: `max(8, round(length / dl))` counts the last
    /// helical node index, so the flagellum carries that many plus one
    /// nodes in total (two of them on the axis).
    pub fn sample_index_count(&self, dl: f64) -> ModelResult<usize> {
        if !(dl > 0.0) {
            return Err(ModelError::NonPositiveParameter {
                name: "segment_length",
                value: dl,
            });
        }
        if dl >= self.length {
            return Err(ModelError::SegmentTooLong {
                segment: dl,
                contour: self.length,
            });
        }
        Ok(((self.length / dl).round() as usize).max(8))
    }
}

/// A rigid, segment-discretized flagellum.
///
/// Nodes 0 and 1 lie on the rotation axis (node 0 is the head
/// attachment); nodes `2..=n` sample the helix. The node set is stored
/// twice: a phase-zero reference and the currently rotated positions.
/// Spinning regenerates the current nodes by a single rotation of the
/// reference set, so numerical error does not accumulate over steps.
#[derive(Debug, Clone)]
pub struct DiscreteFlagellum {
    cross_section_radius: f64,
    base_nodes: Vec<Point3<f64>>,
    axis_point: Point3<f64>,
    axis_dir: Unit<Vector3<f64>>,
    phase: f64,
    nodes: Vec<Point3<f64>>,
}

impl DiscreteFlagellum {
    /// Discretize `spec` with target segment length `dl`.
    pub fn discretize(spec: &HelixSpec, dl: f64) -> ModelResult<Self> {
        spec.validate()?;
        let last_index = spec.sample_index_count(dl)?;
        let axis = Unit::new_unchecked(Vector3::z());
        let shaft = spec.axis_origin - Vector3::new(0.0, 0.0, dl);

        let mut base_nodes = Vec::with_capacity(last_index + 1);
        base_nodes.push(shaft);
        base_nodes.push(spec.axis_origin);
        // Helical nodes i = 2..=last sample s uniformly over [0, length].
        let ds = spec.length / (last_index - 2) as f64;
        for i in 2..=last_index {
            base_nodes.push(spec.point_at((i - 2) as f64 * ds, 0.0));
        }

        let nodes = base_nodes.clone();
        Ok(Self {
            cross_section_radius: spec.cross_section_radius,
            base_nodes,
            axis_point: spec.axis_origin,
            axis_dir: axis,
            phase: 0.0,
            nodes,
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn segment_count(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn nodes(&self) -> &[Point3<f64>] {
        &self.nodes
    }

    /// Edge vectors between consecutive nodes.
    pub fn edges(&self) -> Vec<Vector3<f64>> {
        self.nodes.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn cross_section_radius(&self) -> f64 {
        self.cross_section_radius
    }

    /// A point on the spin axis (the head attachment for mounted tails).
    pub fn axis_point(&self) -> Point3<f64> {
        self.axis_point
    }

    /// Spin axis direction; for a mounted tail it points from the head
    /// toward the filament tip.
    pub fn axis_dir(&self) -> Unit<Vector3<f64>> {
        self.axis_dir
    }

    /// Head attachment node.
    pub fn attachment(&self) -> Point3<f64> {
        self.nodes[0]
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    /// Node positions with the filament rotated to spin angle `phase`,
    /// regenerated from the reference set in a single exact rotation.
    pub fn nodes_at_phase(&self, phase: f64) -> Vec<Point3<f64>> {
        let rot = Rotation3::from_axis_angle(&self.axis_dir, phase);
        self.base_nodes
            .iter()
            .map(|p| self.axis_point + rot * (p - self.axis_point))
            .collect()
    }

    /// Advance the spin by `rate * dt` (exact rotation, rigid).
    pub fn advance(&mut self, rate: f64, dt: f64) {
        self.set_phase(self.phase + rate * dt);
    }

    pub fn set_phase(&mut self, phase: f64) {
        self.phase = phase;
        self.nodes = self.nodes_at_phase(phase);
    }

    /// Nodal velocities of a rigid rotation `omega` about `pivot`.
    pub fn rotation_velocities(
        &self,
        omega: &Vector3<f64>,
        pivot: &Point3<f64>,
    ) -> Vec<Vector3<f64>> {
        self.nodes
            .iter()
            .map(|x| omega.cross(&(x - pivot)))
            .collect()
    }

    /// Nodal velocities of spinning about the filament's own axis.
    pub fn spin_velocities(&self, rate: f64) -> Vec<Vector3<f64>> {
        self.rotation_velocities(&(self.axis_dir.into_inner() * rate), &self.axis_point)
    }

    /// Apply a rigid transform to the whole filament (mounting).
    pub fn transformed(&self, iso: &Isometry3<f64>) -> Self {
        Self {
            cross_section_radius: self.cross_section_radius,
            base_nodes: self.base_nodes.iter().map(|p| iso * p).collect(),
            axis_point: iso * self.axis_point,
            axis_dir: Unit::new_normalize(iso * self.axis_dir.into_inner()),
            phase: self.phase,
            nodes: self.nodes.iter().map(|p| iso * p).collect(),
        }
    }
}

/// Head-plus-tails assembly of the swimmer, in the body frame.
///
/// The head node sits at the origin with +z up at rest; the two tails
/// hang downward from attachment points at `±spacing/2` on the lateral
/// x-axis. Tail 1 is on +x. Positive spin for either tail is a
/// right-hand rotation about the downward tail axis (which appears
/// clockwise when viewed from above).
#[derive(Debug, Clone)]
pub struct RobotGeometry {
    /// Head cylinder radius (m).
    pub head_radius: f64,
    /// Head cylinder height (m).
    pub head_height: f64,
    /// Lateral distance between the two tail attachments (m).
    pub spacing: f64,
    /// Distance from the head's geometric center down to its center of
    /// mass (m); the restoring arm of the righting moment.
    pub com_shift: f64,
    /// Head mass (kg).
    pub head_mass: f64,
    /// Tail templates in their own build frames.
    pub tails: [HelixSpec; 2],
}

impl RobotGeometry {
    pub fn validate(&self) -> ModelResult<()> {
        for (name, value) in [
            ("head_radius", self.head_radius),
            ("head_height", self.head_height),
            ("spacing", self.spacing),
            ("head_mass", self.head_mass),
        ] {
            if !(value > 0.0) {
                return Err(ModelError::NonPositiveParameter { name, value });
            }
        }
        if self.com_shift < 0.0 {
            return Err(ModelError::NonPositiveParameter {
                name: "com_shift",
                value: self.com_shift,
            });
        }
        self.tails[0].validate()?;
        self.tails[1].validate()
    }

    /// Tail attachment points on the head underside axis, in the body
    /// frame. Tail 1 at +spacing/2, tail 2 at -spacing/2.
    pub fn attachments(&self) -> [Point3<f64>; 2] {
        let half = 0.5 * self.spacing;
        [Point3::new(half, 0.0, 0.0), Point3::new(-half, 0.0, 0.0)]
    }

    /// Build the two discretized tails mounted in the body frame.
    ///
    /// Each tail template is built in its own frame (axis +z, helix
    /// ascending) and flipped to hang downward. Tail 2 is the image of
    /// tail 1 under a half-turn about the central vertical axis, so
    /// swapping the two drive speeds maps the assembly onto its own
    /// half-turn image exactly.
    pub fn build_tails(&self, dl: f64) -> ModelResult<[DiscreteFlagellum; 2]> {
        self.validate()?;
        mount_pair(&self.tails, self.spacing, dl)
    }
}

/// Discretize `spec` and mount it hanging downward with its head
/// attachment at `attachment` (flip about the lateral x-axis, then
/// translate).
pub fn mount_single(
    spec: &HelixSpec,
    attachment: &Point3<f64>,
    dl: f64,
) -> ModelResult<DiscreteFlagellum> {
    let template = DiscreteFlagellum::discretize(spec, dl)?;
    let flip = Rotation3::from_axis_angle(&Vector3::x_axis(), std::f64::consts::PI);
    let mount = Isometry3::from_parts(
        Translation3::from(attachment.coords - flip * template.attachment().coords),
        UnitQuaternion::from_rotation_matrix(&flip),
    );
    Ok(template.transformed(&mount))
}

/// Mount two downward-hanging tails at `±spacing/2` on the x-axis.
/// Tail 2 is constructed as the exact half-turn image of a tail
/// mounted at `+spacing/2`, so identical specs give an assembly with
/// exact half-turn symmetry.
pub fn mount_pair(
    specs: &[HelixSpec; 2],
    spacing: f64,
    dl: f64,
) -> ModelResult<[DiscreteFlagellum; 2]> {
    if !(spacing > 0.0) {
        return Err(ModelError::NonPositiveParameter {
            name: "spacing",
            value: spacing,
        });
    }
    let a1 = Point3::new(0.5 * spacing, 0.0, 0.0);
    let half_turn = Isometry3::from_parts(
        Translation3::identity(),
        UnitQuaternion::from_axis_angle(&Vector3::z_axis(), std::f64::consts::PI),
    );
    let tail1 = mount_single(&specs[0], &a1, dl)?;
    let tail2 = mount_single(&specs[1], &a1, dl)?.transformed(&half_turn);
    Ok([tail1, tail2])
}
