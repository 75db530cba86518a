//! Embedded Dormand-Prince 5(4) stepper over fixed-size state arrays.
//!
//! The stepper exposes single accepted steps so callers can interleave their
//! own bookkeeping (the moment integrator renormalizes the state after every
//! step to ride out exponential growth; by linearity of its system the
//! rescaled trajectory is exact).

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
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

/// Adaptive stepper state. `h` is carried across steps.
pub struct Dp54<const N: usize> {
    pub rtol: f64,
    pub atol: f64,
    h: f64,
    rejected_in_a_row: u32,
}

impl<const N: usize> Dp54<N> {
    pub fn new(rtol: f64, atol: f64, h0: f64) -> Self {
        Dp54 {
            rtol,
            atol,
            h: h0,
            rejected_in_a_row: 0,
        }
    }

    /// Advance `(t, y)` by one accepted step, never past `t_end`.
    pub fn step<F>(&mut self, f: &mut F, t: &mut f64, y: &mut [f64; N], t_end: f64) -> Result<()>
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
    {
        loop {
            let h = self.h.min(t_end - *t);
            if h <= 0.0 {
                return Ok(());
            }
            let mut k = [[0.0f64; N]; 7];
            k[0] = f(*t, y);
            for s in 1..7 {
                let mut ys = *y;
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = A[s][j];
                    if a != 0.0 {
                        for i in 0..N {
                            ys[i] += h * a * kj[i];
                        }
                    }
                }
                k[s] = f(*t + C[s] * h, &ys);
            }
            let mut y5 = *y;
            let mut err = 0.0f64;
            for i in 0..N {
                let mut d5 = 0.0;
                let mut d4 = 0.0;
                for s in 0..7 {
                    d5 += B5[s] * k[s][i];
                    d4 += B4[s] * k[s][i];
                }
                y5[i] += h * d5;
                let sc = self.atol + self.rtol * y[i].abs().max(y5[i].abs());
                let e = h * (d5 - d4) / sc;
                err += e * e;
            }
            let err = (err / N as f64).sqrt();
            if err <= 1.0 || h < 1e-14 * t.abs().max(1.0) {
                *t += h;
                *y = y5;
                let grow = 0.9 * err.max(1e-10).powf(-0.2);
                self.h = h * grow.clamp(0.2, 5.0);
                self.rejected_in_a_row = 0;
                return Ok(());
            }
            self.rejected_in_a_row += 1;
            if self.rejected_in_a_row > 60 {
                return Err(Error::NoConvergence(format!(
                    "step size collapsed at t = {t:.6e} (error {err:.3e})"
                )));
            }
            self.h = h * (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
        }
    }
}

/// Integrate to `t_end`, returning the final state.
pub fn integrate<const N: usize, F>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    rtol: f64,
    atol: f64,
) -> Result<[f64; N]>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let mut t = t0;
    let mut y = y0;
    let mut stepper = Dp54::new(rtol, atol, (t_end - t0) / 100.0);
    let mut steps = 0u64;
    while t < t_end {
        stepper.step(&mut f, &mut t, &mut y, t_end)?;
        steps += 1;
        if steps > 50_000_000 {
            return Err(Error::ResourceCap("step budget exhausted".into()));
        }
    }
    Ok(y)
}
