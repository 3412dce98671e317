//! Adaptive Dormand–Prince 5(4) integrator with continuous output, acting on
//! flat complex state vectors.
//!
//! Output is produced through the 4th-order dense interpolant, so the
//! sampling grid never constrains the step size. Optional stop times force a
//! step boundary, which keeps kinks in a piecewise-smooth right-hand side
//! from being straddled.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    /// Upper bound on the step size; `f64::INFINITY` for none.
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-10,
            h_max: f64::INFINITY,
            max_steps: 2_000_000,
        }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

/// Integrates `y' = f(t, y)` from `t0`, calling `observe(index, t, y)` at
/// every time in `t_out` (ascending, all `>= t0`). `stops` are extra times
/// that must coincide with step boundaries. Returns the state at the last
/// output time.
pub fn integrate<F, O>(
    mut f: F,
    t0: f64,
    y0: &[Complex64],
    t_out: &[f64],
    stops: &[f64],
    tol: &Tolerances,
    mut observe: O,
) -> Result<Vec<Complex64>>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
    O: FnMut(usize, f64, &[Complex64]) -> Result<()>,
{
    let n = y0.len();
    let Some(&t_final) = t_out.last() else {
        return Ok(y0.to_vec());
    };
    if t_out.windows(2).any(|w| w[1] < w[0]) || t_out[0] < t0 {
        return Err(Error::InvalidParameter(
            "output times must be ascending and not before the start time".into(),
        ));
    }

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut next_out = 0;
    while next_out < t_out.len() && t_out[next_out] <= t0 {
        observe(next_out, t_out[next_out], &y)?;
        next_out += 1;
    }
    if next_out == t_out.len() {
        return Ok(y);
    }

    let mut stop_iter = stops.iter().copied().filter(|&s| s > t0 && s < t_final).peekable();

    let zero = Complex64::new(0.0, 0.0);
    let buf = || vec![zero; n];
    let (mut k1, mut k2, mut k3, mut k4, mut k5, mut k6, mut k7) =
        (buf(), buf(), buf(), buf(), buf(), buf(), buf());
    let mut y_stage = buf();
    let mut y_new = buf();
    let mut interp = buf();
    let mut dense: [Vec<Complex64>; 5] = std::array::from_fn(|_| buf());

    f(t, &y, &mut k1);
    let span = t_final - t0;
    let mut h = initial_step(&y, &k1, tol, span);
    let mut steps = 0usize;
    let mut last_rejected = false;

    while next_out < t_out.len() {
        steps += 1;
        if steps > tol.max_steps {
            return Err(Error::Integration {
                t,
                reason: format!("exceeded {} steps", tol.max_steps),
            });
        }
        while stop_iter.peek().is_some_and(|&s| s <= t + 1e-14 * t.abs().max(1.0)) {
            stop_iter.next();
        }
        let target = stop_iter.peek().copied().unwrap_or(t_final);
        h = h.min(tol.h_max);
        let landing = t + 1.01 * h >= target;
        if landing {
            h = target - t;
        }
        if h <= 1e-14 * t.abs().max(1.0) {
            return Err(Error::Integration {
                t,
                reason: format!("step size underflow (h = {h:e})"),
            });
        }

        stage(&mut y_stage, &y, h, &[(A21, &k1)]);
        f(t + C2 * h, &y_stage, &mut k2);
        stage(&mut y_stage, &y, h, &[(A31, &k1), (A32, &k2)]);
        f(t + C3 * h, &y_stage, &mut k3);
        stage(&mut y_stage, &y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
        f(t + C4 * h, &y_stage, &mut k4);
        stage(&mut y_stage, &y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
        f(t + C5 * h, &y_stage, &mut k5);
        stage(
            &mut y_stage,
            &y,
            h,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        );
        let t_new = if landing { target } else { t + h };
        f(t_new, &y_stage, &mut k6);
        stage(
            &mut y_new,
            &y,
            h,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        f(t_new, &y_new, &mut k7);

        // Max norm: components that stay near zero cannot dilute the estimate.
        let mut err = 0.0_f64;
        for i in 0..n {
            let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
            let sc = tol.atol + tol.rtol * y[i].norm().max(y_new[i].norm());
            err = err.max(e.norm() / sc);
        }
        if !err.is_finite() {
            return Err(Error::Integration {
                t,
                reason: "non-finite error estimate".into(),
            });
        }

        if err > 1.0 {
            h *= (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, 1.0);
            last_rejected = true;
            continue;
        }

        if next_out < t_out.len() && t_out[next_out] < t_new {
            for i in 0..n {
                let dy = y_new[i] - y[i];
                let bspl = k1[i] * h - dy;
                dense[0][i] = y[i];
                dense[1][i] = dy;
                dense[2][i] = bspl;
                dense[3][i] = dy - k7[i] * h - bspl;
                dense[4][i] = (k1[i] * D1 + k3[i] * D3 + k4[i] * D4 + k5[i] * D5 + k6[i] * D6 + k7[i] * D7) * h;
            }
        }
        while next_out < t_out.len() && t_out[next_out] <= t_new {
            let tq = t_out[next_out];
            if tq == t_new {
                observe(next_out, tq, &y_new)?;
            } else {
                let theta = (tq - t) / h;
                let theta1 = 1.0 - theta;
                for i in 0..n {
                    interp[i] = dense[0][i]
                        + (dense[1][i] + (dense[2][i] + (dense[3][i] + dense[4][i] * theta1) * theta) * theta1)
                            * theta;
                }
                observe(next_out, tq, &interp)?;
            }
            next_out += 1;
        }

        t = t_new;
        std::mem::swap(&mut y, &mut y_new);
        std::mem::swap(&mut k1, &mut k7);

        let fac = if err == 0.0 {
            FAC_MAX
        } else {
            (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, FAC_MAX)
        };
        h *= if last_rejected { fac.min(1.0) } else { fac };
        last_rejected = false;
    }
    Ok(y)
}

fn stage(out: &mut [Complex64], y: &[Complex64], h: f64, terms: &[(f64, &[Complex64])]) {
    for i in 0..out.len() {
        let mut s = Complex64::new(0.0, 0.0);
        for (coef, ki) in terms {
            s += ki[i] * *coef;
        }
        out[i] = y[i] + s * h;
    }
}

fn initial_step(y: &[Complex64], dy: &[Complex64], tol: &Tolerances, span: f64) -> f64 {
    let mut d0 = 0.0_f64;
    let mut d1 = 0.0_f64;
    for (yi, fi) in y.iter().zip(dy) {
        let sc = tol.atol + tol.rtol * yi.norm();
        d0 = d0.max(yi.norm() / sc);
        d1 = d1.max(fi.norm() / sc);
    }
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.min(tol.h_max).min(span).max(1e-10)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn exponential_decay_dense_output() {
        let lambda = Complex64::new(-0.5, 2.0);
        let times: Vec<f64> = (0..=100).map(|i| i as f64 * 0.05).collect();
        let mut seen = 0;
        let y_end = integrate(
            |_, y, dy| dy[0] = lambda * y[0],
            0.0,
            &[Complex64::new(1.0, 0.0)],
            &times,
            &[],
            &Tolerances::default(),
            |i, t, y| {
                assert_eq!(times[i], t);
                let exact = (lambda * t).exp();
                assert!((y[0] - exact).norm() < 1e-8, "t={t}: {} vs {}", y[0], exact);
                seen += 1;
                Ok(())
            },
        )
        .unwrap();
        assert_eq!(seen, times.len());
        assert_abs_diff_eq!((y_end[0] - (lambda * 5.0).exp()).norm(), 0.0, epsilon = 1e-8);
    }

    #[test]
    fn stops_are_step_boundaries_for_kinked_rhs() {
        // y' = |t - 1| has a kink at t = 1; exact y(2) = 1.
        let y = integrate(
            |t, _, dy| dy[0] = Complex64::new((t - 1.0).abs(), 0.0),
            0.0,
            &[Complex64::new(0.0, 0.0)],
            &[2.0],
            &[1.0],
            &Tolerances::default(),
            |_, _, _| Ok(()),
        )
        .unwrap();
        assert_abs_diff_eq!(y[0].re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn step_budget_exhaustion_reports_time() {
        let tol = Tolerances {
            max_steps: 3,
            h_max: 0.01,
            ..Tolerances::default()
        };
        let err = integrate(
            |_, y, dy| dy[0] = -y[0],
            0.0,
            &[Complex64::new(1.0, 0.0)],
            &[1.0],
            &[],
            &tol,
            |_, _, _| Ok(()),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Integration { t, .. } if t > 0.0 && t < 1.0));
    }

    #[test]
    fn rejects_unsorted_output() {
        let r = integrate(
            |_, _, dy| dy[0] = Complex64::new(0.0, 0.0),
            0.0,
            &[Complex64::new(0.0, 0.0)],
            &[1.0, 0.5],
            &[],
            &Tolerances::default(),
            |_, _, _| Ok(()),
        );
        assert!(r.is_err());
    }
}
