//! Shared helpers for integration tests: a from-scratch regularized
//! Stokeslet kernel and numerical quadrature over segments. These serve
//! as an oracle for the library's closed-form segment integrals, so they
//! intentionally avoid the library's own antiderivative formulas.
#![allow(dead_code)]

pub mod quadrature;

use nalgebra::{Matrix3, Point3, Vector3};

/// Regularized Stokeslet kernel (velocity response to a regularized
/// point force, up to the 1/(8 pi mu) prefactor):
/// (1/R + c^2/R^3) I + (r r^T)/R^3 with R = sqrt(|r|^2 + c^2).
pub fn regularized_stokeslet(r: &Vector3<f64>, c: f64) -> Matrix3<f64> {
    let r2 = r.norm_squared();
    let big_r = (r2 + c * c).sqrt();
    let inv_r3 = 1.0 / (big_r * big_r * big_r);
    let iso = 1.0 / big_r + c * c * inv_r3;
    Matrix3::identity() * iso + r * r.transpose() * inv_r3
}

/// Numerically integrate the regularized Stokeslet over a straight
/// segment with a linear (hat-function) force interpolation, returning
/// the same (start-weight, end-weight) 3x3 blocks as the closed-form
/// segment integrals: contribution `B_start f_start + B_end f_end`.
///
/// Each matrix entry is integrated adaptively. Components share one
/// magnitude anchor (the largest whole-interval estimate across all
/// entries) so that near-zero off-diagonal entries terminate at a
/// sensible absolute tolerance instead of chasing an unattainable
/// relative one.
pub fn quadrature_segment_blocks(
    start: &Point3<f64>,
    end: &Point3<f64>,
    measure: &Point3<f64>,
    c: f64,
    rel_tol: f64,
) -> (Matrix3<f64>, Matrix3<f64>) {
    let s = end - start;
    let len = s.norm();
    let kernel = |alpha: f64| -> Matrix3<f64> {
        let x = start + s * alpha;
        regularized_stokeslet(&(measure - x), c) * len
    };

    let mut scale = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let est = quadrature::panel_estimate(|a| kernel(a)[(i, j)], 0.0, 1.0);
            scale = scale.max(est.abs());
        }
    }

    let mut b_start = Matrix3::zeros();
    let mut b_end = Matrix3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            b_start[(i, j)] = quadrature::integrate_scaled(
                |a| (1.0 - a) * kernel(a)[(i, j)],
                0.0,
                1.0,
                rel_tol,
                scale,
            );
            b_end[(i, j)] =
                quadrature::integrate_scaled(|a| a * kernel(a)[(i, j)], 0.0, 1.0, rel_tol, scale);
        }
    }
    (b_start, b_end)
}

/// Numerically evaluate the scalar moment integral
/// `int_0^1 alpha^m / R(alpha)^p d alpha` with
/// `R(alpha) = sqrt(|measure - (start + alpha (end-start))|^2 + c^2)`.
/// The integrand is strictly positive, so a per-integral relative
/// tolerance is well-defined.
pub fn quadrature_moment(
    start: &Point3<f64>,
    end: &Point3<f64>,
    measure: &Point3<f64>,
    c: f64,
    m: u32,
    p: u32,
    rel_tol: f64,
) -> f64 {
    let s = end - start;
    quadrature::integrate(
        |alpha: f64| {
            let x = start + s * alpha;
            let r2 = (measure - x).norm_squared();
            let big_r = (r2 + c * c).sqrt();
            alpha.powi(m as i32) / big_r.powi(p as i32)
        },
        0.0,
        1.0,
        rel_tol,
    )
}
