//! Full space-time solver for the collision trace Phi(t, X) and the
//! measure-level reconstruction of exponential moments from it.
//!
//! The renewal equation for the trace is
//!
//!   Phi(t, X) = eps(t) [ G0(X - log(1+t)) / (1+t)
//!                        + int_0^t Phi(t - xi, X - log(1+xi)) dxi / (1+xi) ].
//!
//! Substituting u = log(1+xi) turns the kernel into plain du, and choosing
//! the u step equal to the X step makes every shifted evaluation land on an
//! X grid node. Only the time argument t + 1 - e^u falls between grid rows
//! and is interpolated linearly. The u = 0 node carries the unknown row
//! itself, so each row is solved implicitly through a scalar division, and
//! the fractional end cell near u = log(1+t) is closed with the analytic
//! value Phi(0, X) = eps(0) G0(X).

use super::kernel_cell_weights;
use super::profile::InitialProfile;
use crate::{Error, Result};

/// Collision trace on a uniform rectangular grid, rows indexed by time.
#[derive(Debug, Clone)]
pub struct ToyField {
    /// Uniform X grid.
    pub xs: Vec<f64>,
    /// Uniform time grid starting at 0.
    pub ts: Vec<f64>,
    /// values[i][j] = Phi(ts[i], xs[j]); all entries nonnegative.
    pub values: Vec<Vec<f64>>,
    /// Collision rate sampled on the time grid.
    pub epsilon: Vec<f64>,
}

impl ToyField {
    /// Exponential moment lambda_beta(t_i) by trapezoid over the X grid.
    pub fn moment_series(&self, beta: f64) -> Vec<f64> {
        let dx = self.xs[1] - self.xs[0];
        let w: Vec<f64> = self.xs.iter().map(|x| (beta * x).exp()).collect();
        self.values
            .iter()
            .map(|row| {
                let mut s = 0.5 * (w[0] * row[0] + w[row.len() - 1] * row[row.len() - 1]);
                for j in 1..row.len() - 1 {
                    s += w[j] * row[j];
                }
                s * dx
            })
            .collect()
    }

    /// Row index of the grid time nearest to t.
    pub fn time_index(&self, t: f64) -> usize {
        let dt = self.ts[1] - self.ts[0];
        ((t / dt).round() as usize).min(self.ts.len() - 1)
    }
}

/// Solves the trace equation on [0, t_end] x [x_min, x_max].
///
/// The X step is fixed by nx; the time step must not outrun it, i.e.
/// dt <= exp(dx) - 1, or interpolation at the first interior u node would
/// need the row being built. Violations report a resolution error.
pub fn solve_field(
    profile: &InitialProfile,
    epsilon: impl Fn(f64) -> f64,
    x_min: f64,
    x_max: f64,
    nx: usize,
    t_end: f64,
    nt: usize,
) -> Result<ToyField> {
    if !(x_max > x_min) || nx < 2 || !(t_end.is_finite() && t_end > 0.0) || nt < 2 {
        return Err(Error::InvalidParameter(
            "field solver needs a proper rectangle and at least two steps each way".into(),
        ));
    }
    let dx = (x_max - x_min) / nx as f64;
    let dt = t_end / nt as f64;
    if dt > dx.exp_m1() {
        return Err(Error::GridTooCoarse(
            "time step outruns the X resolution; need dt <= exp(dx) - 1".into(),
        ));
    }
    let xs: Vec<f64> = (0..=nx).map(|j| x_min + j as f64 * dx).collect();
    let ts: Vec<f64> = (0..=nt).map(|i| i as f64 * dt).collect();
    let eps: Vec<f64> = ts.iter().map(|t| epsilon(*t)).collect();
    if eps.iter().any(|e| !e.is_finite()) {
        return Err(Error::InvalidParameter(
            "collision rate must stay finite on the grid".into(),
        ));
    }
    let g0: Vec<f64> = xs.iter().map(|x| profile.density(*x)).collect();

    let mut values = vec![vec![0.0f64; nx + 1]; nt + 1];
    for j in 0..=nx {
        values[0][j] = eps[0] * g0[j];
    }

    let mut row = vec![0.0f64; nx + 1];
    for i in 1..=nt {
        let t = ts[i];
        let big_u = t.ln_1p();
        // interior u nodes: 1..=m_last, each an exact X shift of m cells
        let m_last = (big_u / dx).floor() as usize;
        row.iter_mut().for_each(|v| *v = 0.0);
        for m in 1..=m_last {
            let u = m as f64 * dx;
            // causality guard above makes tp <= t - dt up to rounding
            let tp = (t + 1.0 - u.exp()).max(0.0);
            let k = ((tp / dt).floor() as usize).min(i - 1);
            let frac = ((tp - ts[k]) / dt).clamp(0.0, 1.0);
            let (lo, hi) = (&values[k], &values[(k + 1).min(i - 1)]);
            let w = if m == m_last { 0.5 * dx } else { dx };
            for j in m..=nx {
                let f = lo[j - m] * (1.0 - frac) + hi[j - m] * frac;
                row[j] += w * f;
            }
        }
        // fractional cell [m_last dx, big_u]: close with the analytic t = 0
        // value; its inner endpoint doubles the m_last node weight share,
        // except for the earliest rows where that endpoint is u = 0 and
        // belongs to the implicit node instead
        let hp = big_u - m_last as f64 * dx;
        if hp > 0.0 {
            for j in 0..=nx {
                let f_end = eps[0] * profile.density(xs[j] - big_u);
                row[j] += 0.5 * hp * f_end;
            }
            if m_last >= 1 {
                let u = m_last as f64 * dx;
                let tp = (t + 1.0 - u.exp()).max(0.0);
                let k = ((tp / dt).floor() as usize).min(i - 1);
                let frac = ((tp - ts[k]) / dt).clamp(0.0, 1.0);
                let (lo, hi) = (&values[k], &values[(k + 1).min(i - 1)]);
                for j in m_last..=nx {
                    let f_inner = lo[j - m_last] * (1.0 - frac) + hi[j - m_last] * frac;
                    row[j] += 0.5 * hp * f_inner;
                }
            }
        }
        // implicit u = 0 endpoint: its weight is half the first cell, which
        // is the fractional one itself when big_u < dx
        let w0 = if m_last >= 1 { 0.5 * dx } else { 0.5 * hp };
        let denom = 1.0 - eps[i] * w0;
        if denom <= 0.0 {
            return Err(Error::GridTooCoarse(
                "X step too large for this collision rate".into(),
            ));
        }
        let shift = big_u;
        for j in 0..=nx {
            let src = profile.density(xs[j] - shift) / (1.0 + t);
            values[i][j] = eps[i] * (src + row[j]) / denom;
        }
    }

    Ok(ToyField {
        xs,
        ts,
        values,
        epsilon: eps,
    })
}

/// Reconstructs the beta moment of the full population measure at grid row
/// idx, combining the never-collided foreground with the collision trace:
///
///   exp(-int_0^t eps) [ (1+t)^(beta-1) C_beta
///                       + int dX e^(beta X) int_0^t (1+xi)^(beta-1)
///                                                  Phi(t - xi, X) dxi ].
///
/// The order beta = 1 is conserved: the result equals C_1 for every t,
/// which pins the normalisation of the trace against the survival factor.
pub fn reconstruct_total_moment(
    field: &ToyField,
    profile: &InitialProfile,
    beta: f64,
    idx: usize,
) -> Result<f64> {
    if idx >= field.ts.len() {
        return Err(Error::InvalidParameter(
            "reconstruction index beyond the stored rows".into(),
        ));
    }
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::Unsupported(
            "measure reconstruction only covers nonnegative orders".into(),
        ));
    }
    let c_beta = profile.moment(beta)?;
    let t = field.ts[idx];
    let dt = field.ts[1] - field.ts[0];
    // survival exponent by trapezoid of the sampled rate
    let mut e_int = 0.0;
    for i in 1..=idx {
        e_int += 0.5 * dt * (field.epsilon[i - 1] + field.epsilon[i]);
    }
    let lam = field.moment_series(beta);
    // product trapezoid in xi, matching the marching solver's kernel cells
    let (wl, wr) = kernel_cell_weights(beta, dt, idx.max(1));
    let mut conv = 0.0;
    for j in 0..idx {
        conv += wl[j] * lam[idx - j] + wr[j] * lam[idx - j - 1];
    }
    Ok((-e_int).exp() * ((beta - 1.0) * t.ln_1p()).exp() * c_beta + (-e_int).exp() * conv)
}
