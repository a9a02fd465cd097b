use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
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
// Difference between the 5th- and embedded 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-10,
            rel: 1e-10,
        }
    }
}

/// Dormand–Prince 5(4) integrator for a scalar ODE `dy/dt = f(t, y)`.
#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub tol: Tolerance,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self {
            tol: Tolerance::default(),
            max_steps: 100_000,
        }
    }
}

impl Dopri5 {
    pub fn new(tol: Tolerance) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }

    /// One step of size `h`; returns the 5th-order value and the local error
    /// estimate.
    fn step<F>(&self, f: &mut F, t: f64, y: f64, h: f64) -> Result<(f64, f64)>
    where
        F: FnMut(f64, f64) -> Result<f64>,
    {
        let mut k = [0.0; 7];
        for i in 0..7 {
            let yi = y + h * (0..i).map(|j| A[i][j] * k[j]).sum::<f64>();
            k[i] = f(t + C[i] * h, yi)?;
        }
        // Row 7 of A holds the 5th-order weights (FSAL).
        let y_new = y + h * (0..6).map(|j| A[6][j] * k[j]).sum::<f64>();
        let err = h * (0..7).map(|j| E[j] * k[j]).sum::<f64>();
        Ok((y_new, err))
    }

    fn error_ratio(&self, y: f64, y_new: f64, err: f64) -> f64 {
        let scale = self.tol.abs + self.tol.rel * y.abs().max(y_new.abs());
        err.abs() / scale
    }

    /// Integrates from `(t0, y0)` to `t_end`.
    pub fn integrate<F>(&self, mut f: F, t0: f64, y0: f64, t_end: f64) -> Result<f64>
    where
        F: FnMut(f64, f64) -> Result<f64>,
    {
        let (mut t, mut y) = (t0, y0);
        let span = t_end - t0;
        if span == 0.0 {
            return Ok(y0);
        }
        let mut h = span / 100.0;
        for _ in 0..self.max_steps {
            if (t_end - t) * span.signum() <= 0.0 {
                return Ok(y);
            }
            if (t + h - t_end) * span.signum() > 0.0 {
                h = t_end - t;
            }
            let (y_new, err) = self.step(&mut f, t, y, h)?;
            let ratio = self.error_ratio(y, y_new, err);
            if ratio <= 1.0 {
                t += h;
                y = y_new;
            }
            h *= step_factor(ratio);
        }
        Err(Error::NoConvergence {
            method: "dopri5",
            message: format!("exceeded {} steps", self.max_steps),
        })
    }

    /// Integrates forward from `(t0, y0)` until `y` first reaches `target`
    /// and returns the crossing time. `y` must move toward the target.
    pub fn time_to_reach<F>(&self, mut f: F, t0: f64, y0: f64, target: f64, h0: f64) -> Result<f64>
    where
        F: FnMut(f64, f64) -> Result<f64>,
    {
        if y0 == target {
            return Ok(t0);
        }
        let dir = (target - y0).signum();
        let (mut t, mut y) = (t0, y0);
        let mut h = h0.abs().max(f64::MIN_POSITIVE);
        for _ in 0..self.max_steps {
            let (y_new, err) = self.step(&mut f, t, y, h)?;
            let ratio = self.error_ratio(y, y_new, err);
            if ratio > 1.0 {
                h *= step_factor(ratio);
                continue;
            }
            if (y_new - target) * dir >= 0.0 {
                return self.locate_crossing(&mut f, t, y, h, y_new, target);
            }
            if (y_new - y) * dir <= 0.0 {
                return Err(Error::NoConvergence {
                    method: "dopri5",
                    message: "trajectory stalled before reaching the target".into(),
                });
            }
            t += h;
            y = y_new;
            h *= step_factor(ratio);
        }
        Err(Error::NoConvergence {
            method: "dopri5",
            message: format!("target not reached within {} steps", self.max_steps),
        })
    }

    // Secant search on the step length over a bracketing step: each trial
    // re-integrates from (t, y) with a single step no longer than the
    // accepted one, so its local error stays within tolerance.
    fn locate_crossing<F>(
        &self,
        f: &mut F,
        t: f64,
        y: f64,
        h: f64,
        y_h: f64,
        target: f64,
    ) -> Result<f64>
    where
        F: FnMut(f64, f64) -> Result<f64>,
    {
        let (mut h_lo, mut g_lo) = (0.0, y - target);
        let (mut h_hi, mut g_hi) = (h, y_h - target);
        if g_hi == 0.0 {
            return Ok(t + h);
        }
        for _ in 0..200 {
            let h_try = h_lo - g_lo * (h_hi - h_lo) / (g_hi - g_lo);
            let h_try = if h_try.is_finite() && h_try > h_lo && h_try < h_hi {
                h_try
            } else {
                0.5 * (h_lo + h_hi)
            };
            let (y_try, _) = self.step(f, t, y, h_try)?;
            let g = y_try - target;
            if g == 0.0 || (h_hi - h_lo) <= 4.0 * f64::EPSILON * (t + h_hi).abs().max(h) {
                return Ok(t + h_try);
            }
            if g.signum() == g_lo.signum() {
                // Illinois modification keeps the secant from stalling on one side.
                h_lo = h_try;
                g_lo = g;
                g_hi *= 0.5;
            } else {
                h_hi = h_try;
                g_hi = g;
                g_lo *= 0.5;
            }
            if g.abs() <= 1e-15 * target.abs().max(1.0) {
                return Ok(t + h_try);
            }
        }
        Err(Error::NoConvergence {
            method: "dopri5",
            message: "crossing search did not converge".into(),
        })
    }
}

fn step_factor(ratio: f64) -> f64 {
    if ratio == 0.0 {
        5.0
    } else {
        (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0)
    }
}
