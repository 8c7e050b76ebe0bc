//! Dormand–Prince 5(4) adaptive integrator over fixed-size states.

use crate::scalar::{lit, Scalar};

/// Step-size controls. The local error estimate of each accepted step satisfies
/// `|err_i| <= atol + rtol * max(|y_i|, |y_new_i|)` componentwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions<T> {
    pub rtol: T,
    pub atol: T,
    pub h_min: T,
    pub h_max: T,
    pub max_steps: usize,
}

impl<T: Scalar> Default for OdeOptions<T> {
    fn default() -> Self {
        Self { rtol: lit(1e-9), atol: lit(1e-12), h_min: lit(1e-13), h_max: T::infinity(), max_steps: 5_000_000 }
    }
}

/// Observer verdict after an accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Stop,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeEnd<T, const N: usize> {
    pub t: T,
    pub y: [T; N],
    pub steps: usize,
    /// True when the observer requested the stop before `t1` was reached.
    pub stopped: bool,
}

/// Failure with the last accepted state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeFailure<T, const N: usize> {
    pub t: T,
    pub y: [T; N],
    pub too_many_steps: bool,
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
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[inline]
fn axpy<T: Scalar, const N: usize>(y: &[T; N], h: T, terms: &[(f64, &[T; N])]) -> [T; N] {
    let mut out = *y;
    for (c, k) in terms {
        let hc = h * lit::<T>(*c);
        for i in 0..N {
            out[i] = out[i] + hc * k[i];
        }
    }
    out
}

#[inline]
fn finite<T: Scalar, const N: usize>(y: &[T; N]) -> bool {
    y.iter().all(|v| v.is_finite())
}

/// Integrates `y' = rhs(t, y)` from `t0` to `t1` (either direction). The observer sees
/// the initial state and every accepted step and may stop the integration.
pub fn integrate<T, const N: usize, F, O>(
    rhs: F,
    t0: T,
    y0: [T; N],
    t1: T,
    opts: &OdeOptions<T>,
    mut observer: O,
) -> Result<OdeEnd<T, N>, OdeFailure<T, N>>
where
    T: Scalar,
    F: Fn(T, &[T; N]) -> [T; N],
    O: FnMut(T, &[T; N]) -> Flow,
{
    let mut t = t0;
    let mut y = y0;
    if observer(t, &y) == Flow::Stop {
        return Ok(OdeEnd { t, y, steps: 0, stopped: true });
    }
    let span = t1 - t0;
    if span == T::zero() {
        return Ok(OdeEnd { t, y, steps: 0, stopped: false });
    }
    let dir = span.signum();
    let mut h = (span.abs() * lit(1e-3)).min(opts.h_max).max(opts.h_min * lit(10.0));
    let mut k1 = rhs(t, &y);
    if !finite(&k1) {
        return Err(OdeFailure { t, y, too_many_steps: false });
    }
    let safety: T = lit(0.9);
    let fifth: T = lit(0.2);
    let mut steps = 0usize;
    let mut last_rejected = false;
    loop {
        if steps >= opts.max_steps {
            return Err(OdeFailure { t, y, too_many_steps: true });
        }
        let remaining = (t1 - t) * dir;
        if remaining <= T::zero() {
            return Ok(OdeEnd { t, y, steps, stopped: false });
        }
        let mut last = false;
        if h >= remaining {
            h = remaining;
            last = true;
        }
        let hs = h * dir;
        let k2 = rhs(t + hs * lit(C2), &axpy(&y, hs, &[(A21, &k1)]));
        let k3 = rhs(t + hs * lit(C3), &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]));
        let k4 = rhs(t + hs * lit(C4), &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = rhs(t + hs * lit(C5), &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = rhs(t + hs, &axpy(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
        let y_new = axpy(&y, hs, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let t_new = if last { t1 } else { t + hs };
        let k7 = rhs(t_new, &y_new);

        let mut err = T::zero();
        let ok = finite(&y_new) && finite(&k7);
        if ok {
            for i in 0..N {
                let e = hs
                    * (lit::<T>(E1) * k1[i]
                        + lit::<T>(E3) * k3[i]
                        + lit::<T>(E4) * k4[i]
                        + lit::<T>(E5) * k5[i]
                        + lit::<T>(E6) * k6[i]
                        + lit::<T>(E7) * k7[i]);
                let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
                err = err.max(e.abs() / sc);
            }
        }
        if ok && err <= T::one() {
            t = t_new;
            y = y_new;
            k1 = k7;
            steps += 1;
            if observer(t, &y) == Flow::Stop {
                return Ok(OdeEnd { t, y, steps, stopped: true });
            }
            if last {
                return Ok(OdeEnd { t, y, steps, stopped: false });
            }
            let mut factor =
                if err == T::zero() { lit(5.0) } else { (safety * err.powf(-fifth)).min(lit(5.0)).max(lit(0.2)) };
            if last_rejected {
                factor = factor.min(T::one());
            }
            h = (h * factor).min(opts.h_max);
            last_rejected = false;
        } else {
            let factor = if ok { (safety * err.powf(-fifth)).max(lit(0.1)) } else { lit(0.25) };
            h = h * factor;
            last_rejected = true;
            if h < opts.h_min {
                return Err(OdeFailure { t, y, too_many_steps: false });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let opts = OdeOptions::<f64>::default();
        let end = integrate(|_, y: &[f64; 1]| [-y[0]], 0.0, [1.0], 5.0, &opts, |_, _| Flow::Continue).unwrap();
        assert!((end.y[0] - (-5f64).exp()).abs() < 1e-10);
        assert_eq!(end.t, 5.0);
    }

    #[test]
    fn backward_harmonic_oscillator() {
        let opts = OdeOptions::<f64>::default();
        let end = integrate(
            |_, y: &[f64; 2]| [y[1], -y[0]],
            1.0,
            [1f64.sin(), 1f64.cos()],
            -2.0,
            &opts,
            |_, _| Flow::Continue,
        )
        .unwrap();
        assert!((end.y[0] - (-2f64).sin()).abs() < 1e-9);
        assert!((end.y[1] - (-2f64).cos()).abs() < 1e-9);
    }

    #[test]
    fn observer_stops() {
        let opts = OdeOptions::<f64>::default();
        let end = integrate(
            |_, _: &[f64; 1]| [1.0],
            0.0,
            [0.0],
            10.0,
            &opts,
            |_, y| {
                if y[0] > 3.0 {
                    Flow::Stop
                } else {
                    Flow::Continue
                }
            },
        )
        .unwrap();
        assert!(end.stopped && end.y[0] > 3.0 && end.t < 10.0);
    }

    #[test]
    fn blow_up_underflows() {
        let opts = OdeOptions::<f64>::default();
        let res = integrate(|_, y: &[f64; 1]| [y[0] * y[0]], 0.0, [1.0], 2.0, &opts, |_, _| Flow::Continue);
        let fail = res.unwrap_err();
        assert!(fail.t < 1.0 && fail.t > 0.99);
    }

    #[test]
    fn works_in_f32() {
        let opts = OdeOptions::<f32> { rtol: 1e-5, atol: 1e-7, ..Default::default() };
        let end = integrate(|_, y: &[f32; 1]| [-y[0]], 0.0, [1.0], 1.0, &opts, |_, _| Flow::Continue).unwrap();
        assert!((end.y[0] - (-1f32).exp()).abs() < 1e-4);
    }
}
