//! Adaptive integration of the dimensionless screening equation
//! `phi'' = phi^(3/2) / sqrt(x)`.
//!
//! Dormand-Prince 5(4) with an embedded error estimate and step-size
//! control. The square-root singularity never enters the integrator: the
//! caller starts from a series expansion at a small positive abscissa.

/// One accepted integration step.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Step {
    pub x: f64,
    pub phi: f64,
    pub dphi: f64,
}

/// How a forward shot ended.
#[derive(Debug, Clone, Copy)]
pub(crate) enum ShootOutcome {
    /// The screening function crossed zero while still falling.
    HitZero { x0: f64, dphi: f64 },
    /// The screening function reached a positive minimum and turned up:
    /// it will diverge.
    TurnedUp,
    /// Reached the end of the integration window.
    Reached { phi: f64, dphi: f64 },
}

#[inline]
fn rhs(x: f64, phi: f64, dphi: f64) -> (f64, f64) {
    (dphi, phi.max(0.0).powf(1.5) / x.sqrt())
}

/// Cubic Hermite value and derivative on `[x0, x1]`.
pub(crate) fn hermite(
    x0: f64,
    f0: f64,
    d0: f64,
    x1: f64,
    f1: f64,
    d1: f64,
    x: f64,
) -> (f64, f64) {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let value = (2.0 * t3 - 3.0 * t2 + 1.0) * f0
        + (t3 - 2.0 * t2 + t) * h * d0
        + (-2.0 * t3 + 3.0 * t2) * f1
        + (t3 - t2) * h * d1;
    let deriv = ((6.0 * t2 - 6.0 * t) * f0
        + (3.0 * t2 - 4.0 * t + 1.0) * h * d0
        + (-6.0 * t2 + 6.0 * t) * f1
        + (3.0 * t2 - 2.0 * t) * h * d1)
        / h;
    (value, deriv)
}

/// Integrates from `(x_start, phi, dphi)` to `x_end` (either direction).
/// With `events` set, stops at a zero crossing or an upward turn.
/// Accepted steps are appended to `record` when provided.
pub(crate) fn integrate(
    x_start: f64,
    phi0: f64,
    dphi0: f64,
    x_end: f64,
    rtol: f64,
    events: bool,
    mut record: Option<&mut Vec<Step>>,
) -> ShootOutcome {
    // Dormand-Prince coefficients
    const A: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    const B5: [f64; 7] = [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
        0.0,
    ];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];

    let dir = if x_end >= x_start { 1.0 } else { -1.0 };
    let mut x = x_start;
    let mut phi = phi0;
    let mut dphi = dphi0;
    if let Some(rec) = record.as_deref_mut() {
        rec.push(Step { x, phi, dphi });
    }
    let mut h = dir * 1e-4 * (x_end - x_start).abs().max(1e-6);

    let mut guard = 0usize;
    loop {
        guard += 1;
        if guard > 2_000_000 {
            return ShootOutcome::Reached { phi, dphi };
        }
        if (x_end - x) * dir <= 0.0 {
            return ShootOutcome::Reached { phi, dphi };
        }
        if (x + h - x_end) * dir > 0.0 {
            h = x_end - x;
        }
        // never step across (or to) the origin
        if dir < 0.0 && x + h < 1e-8 {
            h = 1e-8 - x;
        }
        // recorded passes feed a cubic Hermite table: cap the step so the
        // dense output stays accurate between the stored points
        if record.is_some() {
            let cap = 0.02 * x.abs().max(1e-3);
            if h.abs() > cap {
                h = h.signum() * cap;
            }
        }

        let mut kp = [0.0_f64; 7];
        let mut kd = [0.0_f64; 7];
        let (p0, d0) = rhs(x, phi, dphi);
        kp[0] = p0;
        kd[0] = d0;
        for stage in 0..6 {
            let mut sp = 0.0;
            let mut sd = 0.0;
            for (j, a) in A[stage].iter().enumerate().take(stage + 1) {
                sp += a * kp[j];
                sd += a * kd[j];
            }
            let cs = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0][stage];
            let (p, d) = rhs(x + cs * h, phi + h * sp, dphi + h * sd);
            kp[stage + 1] = p;
            kd[stage + 1] = d;
        }
        let mut phi5 = phi;
        let mut dphi5 = dphi;
        let mut phi4 = phi;
        let mut dphi4 = dphi;
        for j in 0..7 {
            phi5 += h * B5[j] * kp[j];
            dphi5 += h * B5[j] * kd[j];
            phi4 += h * B4[j] * kp[j];
            dphi4 += h * B4[j] * kd[j];
        }
        // purely relative control, with the step increment in the scale:
        // the solution spans 14 orders of magnitude along the far field,
        // so any fixed absolute floor would dominate out there and cap
        // the trajectory accuracy at that floor
        let scale_p = rtol * (phi.abs().max(phi5.abs()) + (h * dphi).abs()) + 1e-280;
        let scale_d = rtol * (dphi.abs().max(dphi5.abs()) + (h * kd[0]).abs()) + 1e-280;
        let err = ((phi5 - phi4) / scale_p)
            .hypot((dphi5 - dphi4) / scale_d)
            / std::f64::consts::SQRT_2;

        if err <= 1.0 {
            let (x_prev, phi_prev, dphi_prev) = (x, phi, dphi);
            x += h;
            phi = phi5;
            dphi = dphi5;
            if events && phi <= 0.0 {
                // refine the crossing on the Hermite interpolant
                let (mut lo, mut hi) = (x_prev, x);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    let (v, _) =
                        hermite(x_prev, phi_prev, dphi_prev, x, phi, dphi, mid);
                    if v > 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo <= 1e-15 * hi.abs().max(1e-300) {
                        break;
                    }
                }
                let x0 = 0.5 * (lo + hi);
                let (_, slope) =
                    hermite(x_prev, phi_prev, dphi_prev, x, phi, dphi, x0);
                if let Some(rec) = record.as_deref_mut() {
                    rec.push(Step {
                        x: x0,
                        phi: 0.0,
                        dphi: slope,
                    });
                }
                return ShootOutcome::HitZero { x0, dphi: slope };
            }
            if let Some(rec) = record.as_deref_mut() {
                rec.push(Step { x, phi, dphi });
            }
            if events && dphi >= 0.0 && phi > 0.0 {
                return ShootOutcome::TurnedUp;
            }
        }
        let factor = if err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h *= factor;
        if h.abs() < 1e-13 * x.abs().max(1e-6) {
            // step collapse: give up at the current state
            return ShootOutcome::Reached { phi, dphi };
        }
    }
}

/// Series start at small `x`:
/// `phi = 1 + s x + (4/3) x^(3/2) + (2 s / 5) x^(5/2) + (1/3) x^3`.
pub(crate) fn series_phi(slope: f64, x: f64) -> (f64, f64) {
    let sqrt_x = x.sqrt();
    let phi = 1.0
        + slope * x
        + 4.0 / 3.0 * x * sqrt_x
        + 0.4 * slope * x * x * sqrt_x
        + x * x * x / 3.0;
    let dphi = slope + 2.0 * sqrt_x + slope * x * sqrt_x + x * x;
    (phi, dphi)
}

/// Decay exponent of the correction to the `144 x^-3` far-field solution.
pub(crate) const TAIL_LAMBDA: f64 = 0.772_001_872_658_765_2; // (sqrt(73) - 7)/2

/// Correction-series coefficients, from substituting
/// `phi = 144 x^-3 (1 + t + c2 t^2 + c3 t^3)` into the equation.
pub(crate) fn tail_c2() -> f64 {
    4.5 / (6.0 + 2.0 * TAIL_LAMBDA * TAIL_LAMBDA)
}

pub(crate) fn tail_c3() -> f64 {
    (9.0 * tail_c2() - 0.75) / (12.0 + 6.0 * TAIL_LAMBDA * TAIL_LAMBDA)
}

/// Far-field state on the decaying manifold, `t = a x^-lambda`.
pub(crate) fn tail_state(a: f64, x: f64) -> (f64, f64) {
    let (c2, c3) = (tail_c2(), tail_c3());
    let t = a * x.powf(-TAIL_LAMBDA);
    let f = 1.0 + t + c2 * t * t + c3 * t * t * t;
    let df = 1.0 + 2.0 * c2 * t + 3.0 * c3 * t * t;
    let phi = 144.0 * x.powi(-3) * f;
    let dphi = 144.0 * x.powi(-4) * (-3.0 * f - TAIL_LAMBDA * t * df);
    (phi, dphi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_satisfies_the_equation_near_zero() {
        // residual phi'' - phi^(3/2)/sqrt(x) should vanish to the kept order
        let s = -1.6;
        let x = 1e-4;
        let h = 1e-6;
        let (pm, _) = series_phi(s, x - h);
        let (p0, _) = series_phi(s, x);
        let (pp, _) = series_phi(s, x + h);
        let second = (pp - 2.0 * p0 + pm) / (h * h);
        let expect = p0.powf(1.5) / x.sqrt();
        assert!(
            (second - expect).abs() <= 1e-3 * expect,
            "phi'' {second} vs {expect}"
        );
    }

    #[test]
    fn steep_slope_hits_zero_shallow_slope_turns_up() {
        let x_start = 1e-6;
        let (p, d) = series_phi(-2.0, x_start);
        match integrate(x_start, p, d, 50.0, 1e-10, true, None) {
            ShootOutcome::HitZero { x0, dphi } => {
                assert!(x0 > 0.0 && dphi < 0.0);
            }
            other => panic!("slope -2 should hit zero, got {other:?}"),
        }
        let (p, d) = series_phi(-1.0, x_start);
        match integrate(x_start, p, d, 50.0, 1e-10, true, None) {
            ShootOutcome::TurnedUp => {}
            other => panic!("slope -1 should turn up, got {other:?}"),
        }
    }

    #[test]
    fn backward_tail_integration_is_stable() {
        // start on the far-field manifold and integrate inward
        let a = -13.0;
        let (p, d) = tail_state(a, 1e4);
        match integrate(1e4, p, d, 20.0, 1e-11, true, None) {
            ShootOutcome::Reached { phi, .. } => {
                // phi(20) is within a factor of 2 of 144/20^3
                let scale = 144.0 / 8000.0;
                assert!(phi > 0.1 * scale && phi < 2.0 * scale, "phi(20) = {phi}");
            }
            other => panic!("backward pass ended early: {other:?}"),
        }
    }

    #[test]
    fn hermite_reproduces_cubics() {
        let f = |x: f64| 2.0 * x * x * x - x + 1.0;
        let d = |x: f64| 6.0 * x * x - 1.0;
        let (v, dv) = hermite(1.0, f(1.0), d(1.0), 2.0, f(2.0), d(2.0), 1.37);
        assert!((v - f(1.37)).abs() < 1e-12);
        assert!((dv - d(1.37)).abs() < 1e-12);
    }
}
