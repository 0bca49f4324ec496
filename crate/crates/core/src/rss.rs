//! Hydrodynamics of slender filaments via regularized Stokeslet segments.
//!
//! Each straight segment carries a force density that varies linearly
//! between its endpoint nodes. The induced velocity of the regularized
//! Stokeslet kernel integrates in closed form along the segment, giving
//! a pair of 3x3 influence blocks per (measurement node, segment). The
//! blocks assemble into a dense mobility matrix `A` with `U = A F`,
//! where `U` stacks nodal velocities and `F` the nodal forces exerted on
//! the fluid. Systems stay small (a few hundred unknowns), so forces
//! come from a direct LU solve.

use nalgebra::{DMatrix, DVector, Matrix3, Point3, Vector3};
use std::ops::Range;

use crate::error::{ModelError, ModelResult};

/// Regularization radius as a multiple of the filament cross-section
/// radius, calibrated for slender-body accuracy.
pub const REGULARIZATION_FACTOR: f64 = 1.031;

/// Segments shorter than this are treated as degenerate.
pub const MIN_SEGMENT_LENGTH: f64 = 1e-12;

/// Distinct nodes closer than this are treated as coincident.
pub const COINCIDENT_TOL: f64 = 1e-9;

/// Relative residual accepted from the direct solve.
pub const SOLVE_RESIDUAL_TOL: f64 = 1e-9;

/// Condition estimate beyond which the mobility system is rejected.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Regularization radius for a filament of cross-section radius `r`.
pub fn regularization_radius(r: f64) -> f64 {
    REGULARIZATION_FACTOR * r
}

/// The six line integrals `int_0^1 alpha^m R(alpha)^-p d alpha` that the
/// closed-form segment blocks are built from, where
/// `R(alpha) = sqrt(|x_m - (start + alpha*(end-start))|^2 + c^2)`.
///
/// Field `tM_mP` holds the integral with moment `m = M` and power
/// `p = P`. All six are positive for any configuration.
#[derive(Debug, Clone, Copy)]
pub struct SegmentKernelIntegrals {
    pub t0_m1: f64,
    pub t0_m3: f64,
    pub t1_m1: f64,
    pub t1_m3: f64,
    pub t2_m3: f64,
    pub t3_m3: f64,
}

/// Closed-form evaluation of the six segment integrals.
///
/// `start`/`end` bound the segment, `measure` is the velocity
/// measurement point and `c` the regularization radius. Uses
/// rationalized logarithm arguments and difference-free square-root
/// combinations so the far field stays accurate.
pub fn segment_integrals(
    start: &Point3<f64>,
    end: &Point3<f64>,
    measure: &Point3<f64>,
    c: f64,
) -> ModelResult<SegmentKernelIntegrals> {
    let s = end - start;
    let a = s.norm_squared();
    let len = a.sqrt();
    if len < MIN_SEGMENT_LENGTH {
        return Err(ModelError::DegenerateSegment {
            index: 0,
            length: len,
            min: MIN_SEGMENT_LENGTH,
        });
    }

    let r_start = measure - start;
    let r_end = measure - end;
    let b = r_start.dot(&s);
    let c2 = c * c;
    let r0 = (r_start.norm_squared() + c2).sqrt();
    let r1 = (r_end.norm_squared() + c2).sqrt();

    // delta = a*e - b^2 = a*(c^2 + |r_perp|^2), computed from the
    // perpendicular component to avoid cancellation.
    let r_perp = r_start - s * (b / a);
    let delta = a * (c2 + r_perp.norm_squared());

    // Stable R1 - R0 = (a - 2b) / (R1 + R0).
    let dr = (a - 2.0 * b) / (r1 + r0);

    // t0_m1 = ln(n1/n0)/len with n(alpha) = len*R(alpha) + (a*alpha - b);
    // rationalize whichever endpoint suffers cancellation.
    let n1 = if a - b >= 0.0 {
        len * r1 + (a - b)
    } else {
        delta / (len * r1 - (a - b))
    };
    let n0 = if b <= 0.0 {
        len * r0 - b
    } else {
        delta / (len * r0 + b)
    };
    let t0_m1 = (n1 / n0).ln() / len;

    // t0_m3 = [(a-b)/R1 + b/R0] / delta = (a*R0 + b*(R1-R0)) / (R0*R1*delta).
    let t0_m3 = (a * r0 + b * dr) / (r0 * r1 * delta);

    let t1_m1 = (dr + b * t0_m1) / a;
    let t1_m3 = (dr / (r0 * r1) + b * t0_m3) / a;
    let t2_m3 = (-1.0 / r1 + t0_m1 + b * t1_m3) / a;
    let t3_m3 = (-1.0 / r1 + 2.0 * t1_m1 + b * t2_m3) / a;

    Ok(SegmentKernelIntegrals {
        t0_m1,
        t0_m3,
        t1_m1,
        t1_m3,
        t2_m3,
        t3_m3,
    })
}

/// Influence blocks `(B_start, B_end)` of one segment on a measurement
/// point: the induced velocity is
/// `u = (B_start * f_start + B_end * f_end) / (8 pi mu)`
/// for nodal forces at the segment endpoints.
pub fn segment_blocks(
    start: &Point3<f64>,
    end: &Point3<f64>,
    measure: &Point3<f64>,
    c: f64,
) -> ModelResult<(Matrix3<f64>, Matrix3<f64>)> {
    let t = segment_integrals(start, end, measure, c)?;
    let s = end - start;
    let len = s.norm();
    let r = measure - start;
    let c2 = c * c;

    let eye = Matrix3::identity();
    let rr = r * r.transpose();
    let rs = r * s.transpose() + s * r.transpose();
    let ss = s * s.transpose();

    // Weight-alpha moment of the kernel along the segment.
    let b_end = ((t.t1_m1 + c2 * t.t1_m3) * eye + t.t1_m3 * rr - t.t2_m3 * rs + t.t3_m3 * ss) * len;
    // Full (weight-one) moment; the start block is the remainder.
    let b_total =
        ((t.t0_m1 + c2 * t.t0_m3) * eye + t.t0_m3 * rr - t.t1_m3 * rs + t.t2_m3 * ss) * len;

    Ok((b_total - b_end, b_end))
}

/// Nodal values of the force density (N/m) each flagellum exerts on
/// the fluid, grouped by flagellum; the density varies linearly
/// between nodes. Integrate with [`integrated_force`] or
/// [`resultant_wrench`] to get forces in newtons.
#[derive(Debug, Clone)]
pub struct NodalForces {
    forces: Vec<Vector3<f64>>,
    ranges: Vec<Range<usize>>,
}

impl NodalForces {
    pub fn all(&self) -> &[Vector3<f64>] {
        &self.forces
    }

    pub fn flagellum(&self, i: usize) -> &[Vector3<f64>] {
        &self.forces[self.ranges[i].clone()]
    }

    pub fn flagellum_count(&self) -> usize {
        self.ranges.len()
    }
}

/// Force and torque acting on the swimmer, in the assembly frame.
#[derive(Debug, Clone, Copy)]
pub struct Wrench {
    pub force: Vector3<f64>,
    pub torque: Vector3<f64>,
}

impl Wrench {
    pub fn zero() -> Self {
        Self {
            force: Vector3::zeros(),
            torque: Vector3::zeros(),
        }
    }
}

/// Total force a chain exerts on the fluid: the piecewise-linear
/// nodal force density integrated along the chain (trapezoid rule,
/// exact for linear densities on straight segments).
pub fn integrated_force(forces: &[Vector3<f64>], nodes: &[Point3<f64>]) -> Vector3<f64> {
    nodes
        .windows(2)
        .zip(forces.windows(2))
        .map(|(x, f)| (x[1] - x[0]).norm() * 0.5 * (f[0] + f[1]))
        .sum()
}

/// Hydrodynamic reaction of one flagellum, lumped at its attachment.
///
/// `forces` are the nodal force densities the flagellum exerts on the
/// fluid along `nodes`; the reaction on the swimmer is the negated
/// integral of that density, applied at the attachment point, with the
/// torque taken about `reference`.
pub fn resultant_wrench(
    forces: &[Vector3<f64>],
    nodes: &[Point3<f64>],
    attachment: &Point3<f64>,
    reference: &Point3<f64>,
) -> Wrench {
    let reaction = -integrated_force(forces, nodes);
    Wrench {
        force: reaction,
        torque: (attachment - reference).cross(&reaction),
    }
}

/// Torque about `reference` of the distributed reaction along the
/// chain; diagnostic companion to the lumped [`resultant_wrench`].
/// Integrates `(x - ref) x density` segment by segment, exactly for
/// the linear interpolation.
pub fn distributed_reaction_torque(
    forces: &[Vector3<f64>],
    nodes: &[Point3<f64>],
    reference: &Point3<f64>,
) -> Vector3<f64> {
    let mut torque = Vector3::zeros();
    for k in 0..nodes.len().saturating_sub(1) {
        let s = nodes[k + 1] - nodes[k];
        let len = s.norm();
        let base = nodes[k] - reference;
        let mean = 0.5 * (forces[k] + forces[k + 1]);
        let first_moment = forces[k] / 6.0 + forces[k + 1] / 3.0;
        torque -= len * (base.cross(&mean) + s.cross(&first_moment));
    }
    torque
}

/// Dense mobility system `U = A F` for a set of flagella.
#[derive(Debug, Clone)]
pub struct MobilitySystem {
    matrix: DMatrix<f64>,
    ranges: Vec<Range<usize>>,
    node_total: usize,
}

impl MobilitySystem {
    /// Assemble the mobility matrix for `flagella` (each a node chain),
    /// fluid viscosity `viscosity` and regularization radius
    /// `regularization`. The `1/(8 pi mu)` prefactor is folded in, so
    /// the solve works directly in physical units.
    pub fn assemble(
        flagella: &[Vec<Point3<f64>>],
        viscosity: f64,
        regularization: f64,
    ) -> ModelResult<Self> {
        if !(viscosity > 0.0) {
            return Err(ModelError::NonPositiveParameter {
                name: "viscosity",
                value: viscosity,
            });
        }
        if !(regularization > 0.0) {
            return Err(ModelError::NonPositiveParameter {
                name: "regularization",
                value: regularization,
            });
        }

        let mut ranges = Vec::with_capacity(flagella.len());
        let mut nodes: Vec<Point3<f64>> = Vec::new();
        for chain in flagella {
            let start = nodes.len();
            nodes.extend_from_slice(chain);
            ranges.push(start..nodes.len());
        }
        let n = nodes.len();

        for i in 0..n {
            for j in (i + 1)..n {
                let dist = (nodes[i] - nodes[j]).norm();
                if dist < COINCIDENT_TOL {
                    return Err(ModelError::CoincidentNodes {
                        first: i,
                        second: j,
                        distance: dist,
                    });
                }
            }
        }

        let scale = 1.0 / (8.0 * std::f64::consts::PI * viscosity);
        let mut matrix = DMatrix::<f64>::zeros(3 * n, 3 * n);
        for (range, chain) in ranges.iter().zip(flagella) {
            for k in 0..chain.len() - 1 {
                let gk = range.start + k;
                for (m, node) in nodes.iter().enumerate() {
                    let (b_start, b_end) =
                        segment_blocks(&chain[k], &chain[k + 1], node, regularization).map_err(
                            |e| match e {
                                ModelError::DegenerateSegment { length, min, .. } => {
                                    ModelError::DegenerateSegment {
                                        index: gk,
                                        length,
                                        min,
                                    }
                                }
                                other => other,
                            },
                        )?;
                    let mut lhs = matrix.view_mut((3 * m, 3 * gk), (3, 3));
                    lhs += b_start * scale;
                    let mut rhs = matrix.view_mut((3 * m, 3 * (gk + 1)), (3, 3));
                    rhs += b_end * scale;
                }
            }
        }

        Ok(Self {
            matrix,
            ranges,
            node_total: n,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_total
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// 2-norm condition number (exact, via singular values).
    pub fn condition_estimate(&self) -> f64 {
        let sv = self.matrix.clone().svd(false, false).singular_values;
        let max = sv.max();
        let min = sv.min();
        if min <= 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }

    /// Solve for the nodal force densities that realize the given
    /// nodal velocities. Rejects ill-conditioned systems instead of
    /// returning an inaccurate solution.
    pub fn solve(&self, velocities: &[Vector3<f64>]) -> ModelResult<NodalForces> {
        if velocities.len() != self.node_total {
            return Err(ModelError::DimensionMismatch {
                expected: self.node_total,
                got: velocities.len(),
            });
        }
        let mut u = DVector::<f64>::zeros(3 * self.node_total);
        for (i, v) in velocities.iter().enumerate() {
            u.fixed_rows_mut::<3>(3 * i).copy_from(v);
        }
        let u_norm = u.norm();
        if u_norm == 0.0 {
            return Ok(NodalForces {
                forces: vec![Vector3::zeros(); self.node_total],
                ranges: self.ranges.clone(),
            });
        }

        let lu = self.matrix.clone().lu();
        let f = match lu.solve(&u) {
            Some(f) => f,
            None => {
                return Err(ModelError::IllConditioned {
                    condition: self.condition_estimate(),
                })
            }
        };
        let residual = (&self.matrix * &f - &u).norm() / u_norm;
        if residual > SOLVE_RESIDUAL_TOL {
            let condition = self.condition_estimate();
            if condition > CONDITION_LIMIT || !residual.is_finite() {
                return Err(ModelError::IllConditioned { condition });
            }
        }

        let forces = (0..self.node_total)
            .map(|i| Vector3::from(f.fixed_rows::<3>(3 * i)))
            .collect();
        Ok(NodalForces {
            forces,
            ranges: self.ranges.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn sample_chain() -> Vec<Point3<f64>> {
        // A short kinked chain with nothing special about it.
        vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(4e-3, 1e-3, -2e-3),
            Point3::new(8e-3, -1e-3, -5e-3),
            Point3::new(11e-3, 2e-3, -9e-3),
        ]
    }

    #[test]
    fn integrals_are_positive() {
        let t = segment_integrals(
            &Point3::new(0.0, 0.0, 0.0),
            &Point3::new(5e-3, 0.0, 0.0),
            &Point3::new(2e-3, 3e-3, 1e-3),
            1.6e-3,
        )
        .unwrap();
        for v in [t.t0_m1, t.t0_m3, t.t1_m1, t.t1_m3, t.t2_m3, t.t3_m3] {
            assert!(v > 0.0, "expected positive integral, got {v}");
        }
    }

    #[test]
    fn zero_velocity_gives_zero_forces() {
        let sys = MobilitySystem::assemble(&[sample_chain()], 1.0, 1e-3).unwrap();
        let f = sys.solve(&[Vector3::zeros(); 4]).unwrap();
        assert!(f.all().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn solve_is_linear_in_the_velocities() {
        let sys = MobilitySystem::assemble(&[sample_chain()], 1.0, 1e-3).unwrap();
        let u: Vec<Vector3<f64>> = (0..4)
            .map(|i| Vector3::new(0.01 * i as f64, -0.02, 0.005 * (i as f64 - 1.5)))
            .collect();
        let f1 = sys.solve(&u).unwrap();
        let doubled: Vec<_> = u.iter().map(|v| 2.0 * v).collect();
        let f2 = sys.solve(&doubled).unwrap();
        for (a, b) in f1.all().iter().zip(f2.all()) {
            assert_relative_eq!(2.0 * a, b, max_relative = 1e-10);
        }
    }

    #[test]
    fn viscosity_scales_forces_proportionally() {
        let chain = sample_chain();
        let u: Vec<Vector3<f64>> = (0..4).map(|_| Vector3::new(0.01, 0.0, -0.03)).collect();
        let thin = MobilitySystem::assemble(std::slice::from_ref(&chain), 1.0, 1e-3).unwrap();
        let thick = MobilitySystem::assemble(&[chain], 2.0, 1e-3).unwrap();
        let f_thin = thin.solve(&u).unwrap();
        let f_thick = thick.solve(&u).unwrap();
        for (a, b) in f_thin.all().iter().zip(f_thick.all()) {
            assert_relative_eq!(2.0 * a, b, max_relative = 1e-10);
        }
    }

    #[test]
    fn self_block_is_symmetric_positive_definite() {
        let start = Point3::new(0.0, 0.0, 0.0);
        let end = Point3::new(5e-3, 0.0, 0.0);
        let (b_start, _) = segment_blocks(&start, &end, &start, 1.6e-3).unwrap();
        assert_relative_eq!(b_start, b_start.transpose(), max_relative = 1e-12);
        let eig = b_start.symmetric_eigen().eigenvalues;
        assert!(eig.iter().all(|&l| l > 0.0), "eigenvalues {eig:?}");
    }

    #[test]
    fn rejects_coincident_nodes() {
        let mut chain = sample_chain();
        let dup = chain[1];
        chain.push(dup);
        let err = MobilitySystem::assemble(&[chain], 1.0, 1e-3).unwrap_err();
        match err {
            ModelError::CoincidentNodes { first, second, .. } => {
                assert_eq!((first, second), (1, 4));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_degenerate_segment() {
        let start = Point3::new(0.0, 0.0, 0.0);
        let end = Point3::new(1e-15, 0.0, 0.0);
        assert!(matches!(
            segment_blocks(&start, &end, &Point3::new(1.0, 0.0, 0.0), 1e-3),
            Err(ModelError::DegenerateSegment { .. })
        ));
    }

    #[test]
    fn rejects_wrong_velocity_count() {
        let sys = MobilitySystem::assemble(&[sample_chain()], 1.0, 1e-3).unwrap();
        assert!(matches!(
            sys.solve(&[Vector3::zeros(); 3]),
            Err(ModelError::DimensionMismatch {
                expected: 4,
                got: 3
            })
        ));
    }

    #[test]
    fn resultant_wrench_integrates_the_density_and_negates_once() {
        // Two collinear segments of lengths 2 and 1 give trapezoid
        // weights (1, 1.5, 0.5) for the nodal densities.
        let nodes = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(0.0, 0.0, 2.0),
            Point3::new(0.0, 0.0, 3.0),
        ];
        let forces = vec![
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(0.0, 2.0, 0.0),
            Vector3::new(0.0, 0.0, 4.0),
        ];
        let total = integrated_force(&forces, &nodes);
        assert_relative_eq!(total, Vector3::new(1.0, 3.0, 2.0), max_relative = 1e-15);
        let w = resultant_wrench(
            &forces,
            &nodes,
            &Point3::new(0.0, 0.0, -1.0),
            &Point3::origin(),
        );
        assert_relative_eq!(w.force, -total, max_relative = 1e-15);
        // torque = (attachment - ref) x reaction
        let expected = Vector3::new(0.0, 0.0, -1.0).cross(&w.force);
        assert_relative_eq!(w.torque, expected, max_relative = 1e-15);
        assert_abs_diff_eq!(w.torque.z, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn distributed_torque_matches_a_uniform_rod() {
        // Uniform density f along a rod of length L about its base:
        // the fluid receives (L^2/2) z x f, the rod the negative.
        let nodes = vec![Point3::origin(), Point3::new(0.0, 0.0, 2.0)];
        let f = Vector3::new(3.0, 0.0, 0.0);
        let tau = distributed_reaction_torque(&[f, f], &nodes, &Point3::origin());
        assert_relative_eq!(tau, Vector3::new(0.0, -6.0, 0.0), max_relative = 1e-15);
    }
}
