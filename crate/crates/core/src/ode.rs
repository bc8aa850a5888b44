//! Dormand–Prince 5(4) with step-size control, on flat real state vectors.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions<T> {
    pub rtol: T,
    pub atol: T,
    /// Initial step; chosen automatically when `None`.
    pub h0: Option<T>,
    pub max_steps: usize,
}

impl<T: Real> Default for OdeOptions<T> {
    fn default() -> Self {
        OdeOptions {
            rtol: T::tol_floor(1e-10, 16.0),
            atol: T::tol_floor(1e-12, 4.0),
            h0: None,
            max_steps: 1_000_000,
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

// fifth-order weights minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates `y' = f(t, y)` from `t0` and returns the state at every time in
/// `t_out` (non-decreasing, all `≥ t0`). Steps are shortened to land exactly on
/// output times. `observe(t, y)` sees every accepted step.
pub fn dopri5<T, F, O>(
    mut f: F,
    t0: T,
    y0: &[T],
    t_out: &[T],
    opts: &OdeOptions<T>,
    mut observe: O,
) -> Result<Vec<Vec<T>>>
where
    T: Real,
    F: FnMut(T, &[T], &mut [T]),
    O: FnMut(T, &[T]),
{
    let n = y0.len();
    let l = T::lit;
    let mut out = Vec::with_capacity(t_out.len());
    let mut t = t0;
    let mut y = y0.to_vec();

    let mut k1 = vec![T::zero(); n];
    let mut k2 = vec![T::zero(); n];
    let mut k3 = vec![T::zero(); n];
    let mut k4 = vec![T::zero(); n];
    let mut k5 = vec![T::zero(); n];
    let mut k6 = vec![T::zero(); n];
    let mut k7 = vec![T::zero(); n];
    let mut tmp = vec![T::zero(); n];
    let mut y_new = vec![T::zero(); n];

    f(t, &y, &mut k1);
    let mut h = match opts.h0 {
        Some(h) => h,
        None => initial_step(&y, &k1, opts),
    };
    let mut steps = 0usize;
    let safety = l(0.9);
    let min_factor = l(0.2);
    let max_factor = l(5.0);

    for &target in t_out {
        if target < t {
            return Err(Error::InvalidParameter(format!(
                "output time {target} precedes current time {t}"
            )));
        }
        while t < target {
            steps += 1;
            if steps > opts.max_steps {
                return Err(Error::StepFailure {
                    t: t.to_f64_lossy(),
                    reason: format!("exceeded {} steps", opts.max_steps),
                });
            }
            let remaining = target - t;
            let landing = h >= remaining;
            let hs = if landing { remaining } else { h };
            if hs <= T::epsilon() * t.abs().max(T::one()) {
                // the gap is below time resolution; treat as reached
                t = target;
                break;
            }

            for i in 0..n {
                tmp[i] = y[i] + hs * l(A21) * k1[i];
            }
            f(t + hs * l(C2), &tmp, &mut k2);
            for i in 0..n {
                tmp[i] = y[i] + hs * (l(A31) * k1[i] + l(A32) * k2[i]);
            }
            f(t + hs * l(C3), &tmp, &mut k3);
            for i in 0..n {
                tmp[i] = y[i] + hs * (l(A41) * k1[i] + l(A42) * k2[i] + l(A43) * k3[i]);
            }
            f(t + hs * l(C4), &tmp, &mut k4);
            for i in 0..n {
                tmp[i] = y[i]
                    + hs * (l(A51) * k1[i] + l(A52) * k2[i] + l(A53) * k3[i] + l(A54) * k4[i]);
            }
            f(t + hs * l(C5), &tmp, &mut k5);
            for i in 0..n {
                tmp[i] = y[i]
                    + hs * (l(A61) * k1[i]
                        + l(A62) * k2[i]
                        + l(A63) * k3[i]
                        + l(A64) * k4[i]
                        + l(A65) * k5[i]);
            }
            f(t + hs, &tmp, &mut k6);
            for i in 0..n {
                y_new[i] = y[i]
                    + hs * (l(A71) * k1[i]
                        + l(A73) * k3[i]
                        + l(A74) * k4[i]
                        + l(A75) * k5[i]
                        + l(A76) * k6[i]);
            }
            f(t + hs, &y_new, &mut k7);

            let mut err = T::zero();
            for i in 0..n {
                let e = hs
                    * (l(E1) * k1[i]
                        + l(E3) * k3[i]
                        + l(E4) * k4[i]
                        + l(E5) * k5[i]
                        + l(E6) * k6[i]
                        + l(E7) * k7[i]);
                let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
                let r = e / sc;
                err += r * r;
            }
            let err = (err / T::from_usize_lossy(n.max(1))).sqrt();
            if !err.is_finite() {
                return Err(Error::StepFailure {
                    t: t.to_f64_lossy(),
                    reason: "non-finite error estimate".into(),
                });
            }

            let factor = if err == T::zero() {
                max_factor
            } else {
                (safety * err.powf(l(-0.2))).max(min_factor).min(max_factor)
            };

            if err <= T::one() {
                t = if landing { target } else { t + hs };
                std::mem::swap(&mut y, &mut y_new);
                std::mem::swap(&mut k1, &mut k7);
                observe(t, &y);
                // a step clipped to hit an output time should not shrink h
                if !landing {
                    h = hs * factor;
                } else {
                    h = h.max(hs * factor);
                }
            } else {
                h = hs * factor.min(T::one());
            }
            if h <= T::epsilon() * t.abs().max(T::one()) * l(16.0) {
                return Err(Error::StepFailure {
                    t: t.to_f64_lossy(),
                    reason: "step size underflow".into(),
                });
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

fn initial_step<T: Real>(y: &[T], dy: &[T], opts: &OdeOptions<T>) -> T {
    let n = T::from_usize_lossy(y.len().max(1));
    let mut d0 = T::zero();
    let mut d1 = T::zero();
    for (&yi, &fi) in y.iter().zip(dy) {
        let sc = opts.atol + opts.rtol * yi.abs();
        d0 += (yi / sc).powi(2);
        d1 += (fi / sc).powi(2);
    }
    let d0 = (d0 / n).sqrt();
    let d1 = (d1 / n).sqrt();
    let lim = T::lit(1e-6);
    if d0 < T::lit(1e-5) || d1 < T::lit(1e-5) {
        lim
    } else {
        (T::lit(0.01) * d0 / d1).max(lim)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let ts: Vec<f64> = (1..=5).map(|k| k as f64).collect();
        let ys = dopri5(
            |_, y, dy| dy[0] = -y[0],
            0.0,
            &[1.0],
            &ts,
            &OdeOptions::default(),
            |_, _| {},
        )
        .unwrap();
        for (t, y) in ts.iter().zip(&ys) {
            assert!((y[0] - (-t).exp()).abs() < 1e-10);
        }
    }

    #[test]
    fn harmonic_oscillator_lands_on_outputs() {
        let ts = [0.0, 0.3, std::f64::consts::PI, 10.0];
        let mut seen = Vec::new();
        let ys = dopri5(
            |_, y, dy| {
                dy[0] = y[1];
                dy[1] = -y[0];
            },
            0.0,
            &[1.0, 0.0],
            &ts,
            &OdeOptions::default(),
            |t, _| seen.push(t),
        )
        .unwrap();
        for (t, y) in ts.iter().zip(&ys) {
            assert!((y[0] - t.cos()).abs() < 1e-9, "t={t}");
            assert!((y[1] + t.sin()).abs() < 1e-9);
        }
        assert!(seen.contains(&std::f64::consts::PI));
        assert!(seen.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn f32_runs_with_floored_tolerances() {
        let ys = dopri5(
            |_, y, dy| dy[0] = -2.0 * y[0],
            0.0f32,
            &[1.0],
            &[1.0],
            &OdeOptions::default(),
            |_, _| {},
        )
        .unwrap();
        assert!((ys[0][0] - (-2.0f32).exp()).abs() < 1e-5);
    }

    #[test]
    fn backwards_output_is_rejected() {
        let r = dopri5(
            |_, _, dy: &mut [f64]| dy[0] = 0.0,
            1.0,
            &[0.0],
            &[0.5],
            &OdeOptions::default(),
            |_, _| {},
        );
        assert!(matches!(r, Err(Error::InvalidParameter(_))));
    }
}
