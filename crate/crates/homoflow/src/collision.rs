//! Second-moment dynamics under a Maxwell-molecule collision kernel.
//!
//! The angular kernel enters the pressure-tensor equations only through the
//! single rate constant b; collisions relax M toward its isotropic part at
//! rate 2b while the mean flow pumps anisotropy in. For the orthogonal-shear
//! flow the convective coupling carries a secularly growing coefficient
//! t*k1*k3, so moments grow like exp(c t^{5/3}) and trajectories are stored
//! as a unit-scaled part plus a log scale factor.

use nalgebra::Matrix3;

use crate::error::{Error, Result};
use crate::ode::Dp54;
use crate::quad;

/// Indices into the packed symmetric moment vector.
pub const M11: usize = 0;
pub const M12: usize = 1;
pub const M13: usize = 2;
pub const M22: usize = 3;
pub const M23: usize = 4;
pub const M33: usize = 5;

/// Relaxation rate b = 3 pi int_{-1}^{1} B(x) x^2 (1 - x^2) dx of the
/// traceless moment part, for a nonnegative angular kernel B on [-1, 1].
/// Zero kernels give b = 0; a negative rate means the profile was invalid.
pub fn collision_rate<F: Fn(f64) -> f64>(kernel: F) -> Result<f64> {
    let b = 3.0
        * std::f64::consts::PI
        * quad::integrate(|x| kernel(x) * x * x * (1.0 - x * x), -1.0, 1.0, 1e-13)?;
    if b < 0.0 || !b.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "angular profile must be nonnegative and integrable, got b = {b}"
        )));
    }
    Ok(b)
}

/// Closed ODE system for the six second moments in an orthogonal-shear flow
/// with constants (k1, k2, k3). The persistent shear k2 is subdominant to
/// the secular t*k1*k3 coupling and is dropped at leading order; the
/// retained-k2 variant keeps it for cross-checks.
#[derive(Debug, Clone, Copy)]
pub struct MomentOde {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub b: f64,
}

impl MomentOde {
    /// Leading-order system (k2 dropped).
    pub fn new(k1: f64, k3: f64, b: f64) -> Result<Self> {
        Self::with_retained_k2(k1, 0.0, k3, b)
    }

    pub fn with_retained_k2(k1: f64, k2: f64, k3: f64, b: f64) -> Result<Self> {
        if !(b >= 0.0) || !b.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "relaxation rate b must be nonnegative and finite, got {b}"
            )));
        }
        for (name, v) in [("k1", k1), ("k2", k2), ("k3", k3)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} = {v} not finite")));
            }
        }
        log::debug!(
            "moment system with k1 = {k1}, k2 = {k2}, k3 = {k3}, b = {b}; shear production \
             signs follow the closed system whose leading growth scales with (k1 k3)^2"
        );
        Ok(MomentOde { k1, k2, k3, b })
    }

    /// dM/dt = -(L M + M L^T) - 2b (M - m I), m = tr M / 3, with
    /// L the exact orthogonal-shear matrix; linear in M.
    pub fn rhs(&self, t: f64, m: &[f64; 6]) -> [f64; 6] {
        let (k1, k3, b) = (self.k1, self.k3, self.b);
        // secular coupling; at leading order k2 = 0
        let g = t * k1 * k3 - self.k2;
        let iso = (m[M11] + m[M22] + m[M33]) / 3.0;
        [
            -2.0 * k3 * m[M12] + 2.0 * g * m[M13] - 2.0 * b * (m[M11] - iso),
            -k3 * m[M22] + g * m[M23] - k1 * m[M13] - 2.0 * b * m[M12],
            -k3 * m[M23] + g * m[M33] - 2.0 * b * m[M13],
            -2.0 * k1 * m[M23] - 2.0 * b * (m[M22] - iso),
            -k1 * m[M33] - 2.0 * b * m[M23],
            -2.0 * b * (m[M33] - iso),
        ]
    }
}

/// Moment history stored as unit(t) * exp(log_scale(t)); the split is exact
/// because the equations are linear, so rescaling a state only rescales its
/// future.
#[derive(Debug, Clone)]
pub struct MomentTrajectory {
    pub times: Vec<f64>,
    pub log_scale: Vec<f64>,
    pub unit: Vec<[f64; 6]>,
}

impl MomentTrajectory {
    /// log M_idx(t); errors if the component is not positive somewhere.
    pub fn log_moment(&self, idx: usize) -> Result<Vec<f64>> {
        self.unit
            .iter()
            .zip(&self.log_scale)
            .map(|(u, s)| {
                if u[idx] > 0.0 {
                    Ok(s + u[idx].ln())
                } else {
                    Err(Error::Degenerate(format!(
                        "moment component {idx} not positive; no log growth curve"
                    )))
                }
            })
            .collect()
    }

    /// Ratio M_i / M_j along the trajectory; the scale factor cancels.
    pub fn ratio(&self, i: usize, j: usize) -> Vec<f64> {
        self.unit.iter().map(|u| u[i] / u[j]).collect()
    }

    pub fn matrix_at(&self, n: usize) -> Matrix3<f64> {
        let u = &self.unit[n];
        let s = self.log_scale[n].exp();
        Matrix3::new(
            u[M11], u[M12], u[M13], u[M12], u[M22], u[M23], u[M13], u[M23], u[M33],
        ) * s
    }
}

/// Integrate the moment system from m0 at t = 0, recording the state at each
/// requested sample time. The state is renormalized to unit sup-norm after
/// every accepted step, with the log of the scale accumulated separately.
pub fn integrate_moments(
    ode: &MomentOde,
    m0: [f64; 6],
    sample_times: &[f64],
    rtol: f64,
    atol: f64,
) -> Result<MomentTrajectory> {
    if m0[M11] <= 0.0 || m0[M22] <= 0.0 || m0[M33] <= 0.0 {
        return Err(Error::InvalidParameter(
            "initial moment matrix needs positive diagonal".into(),
        ));
    }
    if sample_times.windows(2).any(|w| w[1] <= w[0]) || sample_times.first().is_none_or(|&t| t < 0.0)
    {
        return Err(Error::InvalidParameter(
            "sample times must be increasing and nonnegative".into(),
        ));
    }

    let mut u = m0;
    let mut log_s = 0.0;
    renormalize(&mut u, &mut log_s);

    let mut f = |t: f64, y: &[f64; 6]| ode.rhs(t, y);
    let mut stepper = Dp54::<6>::new(rtol, atol, 1e-4);
    let mut t = 0.0;

    let mut out = MomentTrajectory {
        times: Vec::with_capacity(sample_times.len()),
        log_scale: Vec::with_capacity(sample_times.len()),
        unit: Vec::with_capacity(sample_times.len()),
    };
    for &ts in sample_times {
        while t < ts {
            stepper.step(&mut f, &mut t, &mut u, ts)?;
            renormalize(&mut u, &mut log_s);
        }
        out.times.push(ts);
        out.log_scale.push(log_s);
        out.unit.push(u);
    }
    Ok(out)
}

fn renormalize(u: &mut [f64; 6], log_s: &mut f64) {
    let scale = u.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    if scale > 0.0 {
        for x in u.iter_mut() {
            *x /= scale;
        }
        *log_s += scale.ln();
    }
}

#[derive(Debug, Clone)]
pub struct GrowthFit {
    /// Coefficient of t^{5/3}.
    pub c1: f64,
    /// Coefficient of t.
    pub c2: f64,
    /// Constant offset.
    pub c3: f64,
    pub rms_residual: f64,
}

/// Least-squares fit of the log scale S(t) = c1 t^{5/3} + c2 t + c3 over a
/// window of the trajectory. The window must sit late enough that the
/// power-law term dominates.
pub fn fit_growth(traj: &MomentTrajectory, t0: f64, t1: f64) -> Result<GrowthFit> {
    let mut ts = Vec::new();
    let mut ss = Vec::new();
    for (i, &t) in traj.times.iter().enumerate() {
        if t >= t0 && t <= t1 {
            ts.push(t);
            ss.push(traj.log_scale[i]);
        }
    }
    if ts.len() < 4 {
        return Err(Error::WindowTooShort(format!(
            "only {} samples in [{t0}, {t1}]",
            ts.len()
        )));
    }
    let fit = crate::fit::fit_basis(&ts, &ss, &[&|t: f64| t.powf(5.0 / 3.0), &|t: f64| t, &|_| 1.0])?;
    Ok(GrowthFit {
        c1: fit.coeffs[0],
        c2: fit.coeffs[1],
        c3: fit.coeffs[2],
        rms_residual: fit.rms_residual,
    })
}

/// One row of the late-time ratio diagnostics: each anisotropy ratio next to
/// its predicted value from the leading growth law
/// dS0/dt = (4b/3)^{1/3} (k1 k3 t)^{2/3}.
#[derive(Debug, Clone, Copy)]
pub struct RatioRow {
    pub t: f64,
    pub m13_over_m11: f64,
    pub m13_over_m11_pred: f64,
    pub m33_over_m13: f64,
    pub m33_over_m13_pred: f64,
    pub m11_over_m33: f64,
    pub m11_over_m33_pred: f64,
    pub m22_over_m11: f64,
    pub m22_over_m11_pred: f64,
}

/// Anisotropy ratios along a trajectory against their growth-law
/// predictions. The product of the first three predictions is exactly 1 at
/// every time: the growth law is built from the same cycle the ratios come
/// from.
pub fn ratio_diagnostics(
    traj: &MomentTrajectory,
    k1: f64,
    k3: f64,
    b: f64,
) -> Result<Vec<RatioRow>> {
    if k1 * k3 == 0.0 || b <= 0.0 {
        return Err(Error::InvalidParameter(
            "ratio predictions need k1*k3 != 0 and b > 0".into(),
        ));
    }
    let mut out = Vec::with_capacity(traj.times.len());
    for (i, &t) in traj.times.iter().enumerate() {
        let u = &traj.unit[i];
        if u[M11] == 0.0 || u[M13] == 0.0 || u[M33] == 0.0 {
            return Err(Error::Degenerate(format!(
                "vanishing moment at t = {t}; ratios undefined"
            )));
        }
        let ds0 = (4.0 * b / 3.0).powf(1.0 / 3.0) * (k1 * k3 * t).powf(2.0 / 3.0);
        out.push(RatioRow {
            t,
            m13_over_m11: u[M13] / u[M11],
            m13_over_m11_pred: ds0 / (2.0 * t * k1 * k3),
            m33_over_m13: u[M33] / u[M13],
            m33_over_m13_pred: ds0 / (t * k1 * k3),
            m11_over_m33: u[M11] / u[M33],
            m11_over_m33_pred: 3.0 * ds0 / (2.0 * b),
            m22_over_m11: u[M22] / u[M11],
            m22_over_m11_pred: 2.0 * b / (3.0 * ds0),
        });
    }
    Ok(out)
}
