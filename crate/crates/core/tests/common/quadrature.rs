//! Adaptive Gauss-Kronrod quadrature (15-point Kronrod with embedded
//! 7-point Gauss error estimate, bisecting until the local estimate
//! meets the tolerance). Test-only oracle; deliberately independent of
//! any closed-form antiderivatives used by the library.

/// Kronrod-15 abscissae on [0, 1] side of the symmetric rule.
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];

/// Kronrod-15 weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];

/// Gauss-7 weights for the odd-indexed Kronrod abscissae.
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// One Gauss-Kronrod 7-15 panel: returns (Kronrod value, |K15 - G7|).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let center = 0.5 * (a + b);

    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = half * XGK[i];
        let fsum = f(center - dx) + f(center + dx);
        kronrod += WGK[i] * fsum;
        if i % 2 == 1 {
            gauss += WG[i / 2] * fsum;
        }
    }
    kronrod *= half;
    gauss *= half;
    (kronrod, (kronrod - gauss).abs())
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, abs_tol: f64, depth: u32) -> f64 {
    let (value, err) = gk15(f, a, b);
    if err <= abs_tol || depth >= 24 {
        return value;
    }
    let mid = 0.5 * (a + b);
    adapt(f, a, mid, 0.5 * abs_tol, depth + 1) + adapt(f, mid, b, 0.5 * abs_tol, depth + 1)
}

/// Single whole-interval Kronrod estimate, used by callers that need a
/// magnitude anchor shared across several related integrals.
pub fn panel_estimate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    gk15(&f, a, b).0
}

/// Integrate `f` over `[a, b]` to roughly `rel_tol` relative accuracy.
///
/// The absolute splitting tolerance is anchored to the magnitude of an
/// initial whole-interval estimate (or to `scale_floor` if that is
/// larger), so sign-cancelling or tiny components terminate too.
pub fn integrate_scaled<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    scale_floor: f64,
) -> f64 {
    let (first, _) = gk15(&f, a, b);
    let abs_tol = rel_tol * first.abs().max(scale_floor).max(f64::MIN_POSITIVE);
    adapt(&f, a, b, abs_tol, 0)
}

/// Integrate `f` over `[a, b]` to relative tolerance `rel_tol`
/// (relative to the integral's own magnitude).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    integrate_scaled(f, a, b, rel_tol, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomial_exactly() {
        // x^3 over [0, 2] = 4
        let v = integrate(|x| x * x * x, 0.0, 2.0, 1e-13);
        assert!((v - 4.0).abs() < 1e-12, "got {v}");
    }

    #[test]
    fn integrates_peaked_function() {
        // 1/(x^2 + 1e-4) over [-1, 1] = 2 * atan(100) / 1e-2
        let v = integrate(|x| 1.0 / (x * x + 1e-4), -1.0, 1.0, 1e-12);
        let expected = 2.0 * (100.0f64).atan() / 1e-2;
        assert!(
            (v - expected).abs() / expected < 1e-10,
            "got {v}, want {expected}"
        );
    }

    #[test]
    fn handles_sign_cancelling_integrand() {
        // x over [-1, 1] = 0; terminates via the scale floor.
        let v = integrate_scaled(|x| x, -1.0, 1.0, 1e-12, 1.0);
        assert!(v.abs() < 1e-12, "got {v}");
    }
}
