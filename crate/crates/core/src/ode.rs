//! Dormand–Prince 5(4) with an embedded error estimate and FSAL.

/// Step-size control parameters.
#[derive(Debug, Clone, Copy)]
pub struct StepOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_max: f64,
    /// Steps smaller than `h_min_rel · max(|t|, 1)` count as underflow.
    pub h_min_rel: f64,
    pub max_steps: usize,
}

impl Default for StepOptions {
    fn default() -> Self {
        Self { rtol: 1e-9, atol: 1e-12, h_init: 1e-4, h_max: f64::INFINITY, h_min_rel: 1e-14, max_steps: 2_000_000 }
    }
}

/// Decision of the observer after a step has passed the error test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
    /// Discard the step and retry with half the step size.
    Retry,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Termination<const N: usize> {
    ReachedEnd,
    Stopped,
    /// The right-hand side kept failing until the step size underflowed.
    RhsUndefined { t: f64, y: [f64; N], h: f64 },
    /// The error test kept failing until the step size underflowed.
    Underflow { t: f64, y: [f64; N], h: f64 },
    TooManySteps { t: f64, y: [f64; N] },
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
// fifth-order weights minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn combine<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        let s: f64 = terms.iter().map(|(c, k)| c * k[i]).sum();
        out[i] += h * s;
    }
    out
}

/// Integrates `y' = rhs(t, y)` from `t0` towards `t_end > t0`.
///
/// `rhs` returns `None` where the vector field is undefined; the step is
/// then rejected and retried with a quarter of the step size. After every
/// accepted step `observer(t, y, dy)` sees the new state and its
/// derivative and decides whether to continue.
pub fn integrate<const N: usize, F, G>(
    mut rhs: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &StepOptions,
    mut observer: G,
) -> Termination<N>
where
    F: FnMut(f64, &[f64; N]) -> Option<[f64; N]>,
    G: FnMut(f64, &[f64; N], &[f64; N]) -> Control,
{
    let mut t = t0;
    let mut y = y0;
    let mut k1 = match rhs(t, &y) {
        Some(k) => k,
        None => return Termination::RhsUndefined { t, y, h: 0.0 },
    };
    let mut h = opts.h_init.min(t_end - t0).min(opts.h_max);
    let mut steps = 0usize;

    while t < t_end {
        if steps >= opts.max_steps {
            return Termination::TooManySteps { t, y };
        }
        steps += 1;
        let h_min = opts.h_min_rel * t.abs().max(1.0);
        if h < h_min {
            return Termination::Underflow { t, y, h };
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }

        let stages = (|| {
            let k2 = rhs(t + C2 * h, &combine(&y, h, &[(A21, &k1)]))?;
            let k3 = rhs(t + C3 * h, &combine(&y, h, &[(A31, &k1), (A32, &k2)]))?;
            let k4 = rhs(t + C4 * h, &combine(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
            let k5 = rhs(t + C5 * h, &combine(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]))?;
            let k6 = rhs(
                t + h,
                &combine(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
            )?;
            let y_new = combine(&y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
            let k7 = rhs(t + h, &y_new)?;
            Some((k3, k4, k5, k6, k7, y_new))
        })();

        let Some((k3, k4, k5, k6, k7, y_new)) = stages else {
            h *= 0.25;
            if h < h_min {
                return Termination::RhsUndefined { t, y, h };
            }
            continue;
        };

        let mut err = 0.0;
        for i in 0..N {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            err += (e / sc).powi(2);
        }
        let err = (err / N as f64).sqrt();
        if !err.is_finite() {
            h *= 0.25;
            continue;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };

        if err <= 1.0 {
            match observer(if last { t_end } else { t + h }, &y_new, &k7) {
                Control::Retry => {
                    h *= 0.5;
                    continue;
                }
                Control::Stop => return Termination::Stopped,
                Control::Continue => {}
            }
            t = if last { t_end } else { t + h };
            y = y_new;
            k1 = k7;
            h = (h * factor).min(opts.h_max);
        } else {
            h *= factor.min(1.0);
        }
    }
    Termination::ReachedEnd
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let mut last = (0.0, 0.0);
        let end = integrate(
            |_, y: &[f64; 1]| Some([y[0]]),
            0.0,
            [1.0],
            2.0,
            &StepOptions { rtol: 1e-10, atol: 1e-14, h_init: 1e-3, ..Default::default() },
            |t, y, _| {
                last = (t, y[0]);
                Control::Continue
            },
        );
        assert_eq!(end, Termination::ReachedEnd);
        assert_eq!(last.0, 2.0);
        assert!((last.1 - 2f64.exp()).abs() < 1e-8);
    }

    #[test]
    fn harmonic_oscillator_period() {
        let mut y_end = [0.0; 2];
        integrate(
            |_, y: &[f64; 2]| Some([y[1], -y[0]]),
            0.0,
            [1.0, 0.0],
            2.0 * std::f64::consts::PI,
            &StepOptions { rtol: 1e-11, atol: 1e-13, h_init: 1e-2, ..Default::default() },
            |_, y, _| {
                y_end = *y;
                Control::Continue
            },
        );
        assert!((y_end[0] - 1.0).abs() < 1e-8 && y_end[1].abs() < 1e-8);
    }

    #[test]
    fn finite_time_blow_up_is_observed() {
        // y' = y², y(0) = 1 blows up at t = 1
        let mut t_stop = 0.0;
        let end = integrate(
            |_, y: &[f64; 1]| Some([y[0] * y[0]]),
            0.0,
            [1.0],
            2.0,
            &StepOptions::default(),
            |t, y, _| {
                t_stop = t;
                if y[0] > 1e6 {
                    Control::Stop
                } else {
                    Control::Continue
                }
            },
        );
        assert_eq!(end, Termination::Stopped);
        assert!((t_stop - 1.0).abs() < 1e-5);
    }

    #[test]
    fn undefined_region_underflows() {
        let end = integrate(
            |t, y: &[f64; 1]| if t < 0.5 { Some([y[0]]) } else { None },
            0.0,
            [1.0],
            1.0,
            &StepOptions::default(),
            |_, _, _| Control::Continue,
        );
        match end {
            Termination::RhsUndefined { t, .. } => assert!((t - 0.5).abs() < 1e-6),
            other => panic!("{other:?}"),
        }
    }
}
