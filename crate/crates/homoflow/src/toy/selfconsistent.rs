//! Closure of the toy model where the collision rate is driven by the
//! population itself: eps(t) equals the (1 - a)-th moment of the measure,
//! discounted by the survival factor. Writing E(t) = int_0^t eps, the pair
//! (eps, lambda) collapses to one renewal equation for R = d/dt exp(E):
//!
//!   R(t) = C0 (1+t)^(-a) + int_0^t lambda(t - xi) (1+xi)^(-a) dxi,
//!   lambda = eps R = R^2 / exp(E),        eps = R / exp(E),
//!
//! with C0 the (1 - a)-th exponential moment of the initial profile. Each
//! step closes a scalar fixed point in R_i because lambda_i sits in the
//! newest kernel cell; two or three sweeps settle it to roundoff.

use super::kernel_cell_weights;
use super::profile::InitialProfile;
use super::volterra::ToyMomentSeries;
use crate::{Error, Result};

/// Marches the self-consistent model with exponent a in (0, 1) on a uniform
/// grid of n steps covering [0, t_end]. The returned series carries the
/// moment order beta = 1 - a together with the realised rate eps(t).
pub fn solve_selfconsistent(
    a: f64,
    profile: &InitialProfile,
    t_end: f64,
    n: usize,
) -> Result<ToyMomentSeries> {
    if !(a.is_finite() && a > 0.0 && a < 1.0) {
        return Err(Error::InvalidParameter(
            "coupling exponent must lie strictly between 0 and 1".into(),
        ));
    }
    if !(t_end.is_finite() && t_end > 0.0) || n < 2 {
        return Err(Error::InvalidParameter(
            "need a positive horizon and at least two steps".into(),
        ));
    }
    let beta = 1.0 - a;
    let c0 = profile.moment(beta)?;
    if c0 <= 0.0 {
        return Err(Error::Degenerate(
            "self-consistent closure needs a profile with positive mass".into(),
        ));
    }
    let h = t_end / n as f64;
    let times: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
    let (wl, wr) = kernel_cell_weights(beta, h, n);

    let mut lam = vec![0.0f64; n + 1];
    let mut eps = vec![0.0f64; n + 1];
    let mut exp_e = vec![1.0f64; n + 1];
    let mut r = vec![0.0f64; n + 1];

    r[0] = c0;
    eps[0] = c0;
    lam[0] = c0 * c0;

    for i in 1..=n {
        // kernel convolution over settled history; the j = 0 cell's left
        // endpoint holds the unknown lambda_i
        let mut acc = wr[0] * lam[i - 1];
        for j in 1..i {
            acc += wl[j] * lam[i - j] + wr[j] * lam[i - j - 1];
        }
        let src = c0 * (-a * times[i].ln_1p()).exp();
        // fixed point in R_i: lambda_i = R_i^2 / exp(E_i) with exp(E_i)
        // updated by trapezoid of R
        let mut ri = r[i - 1];
        let mut converged = false;
        for _ in 0..50 {
            let ee = exp_e[i - 1] + 0.5 * h * (r[i - 1] + ri);
            let li = ri * ri / ee;
            let next = src + acc + wl[0] * li;
            if (next - ri).abs() <= 1e-13 * next.abs().max(1e-300) {
                ri = next;
                converged = true;
                break;
            }
            ri = next;
        }
        if !converged || !ri.is_finite() || ri <= 0.0 {
            return Err(Error::NoConvergence(
                "self-consistent step failed to settle".into(),
            ));
        }
        r[i] = ri;
        exp_e[i] = exp_e[i - 1] + 0.5 * h * (r[i - 1] + ri);
        eps[i] = ri / exp_e[i];
        lam[i] = ri * eps[i];
    }

    let log_lambda = lam
        .iter()
        .map(|l| if *l > 0.0 { l.ln() } else { f64::NEG_INFINITY })
        .collect();
    Ok(ToyMomentSeries {
        beta,
        times,
        lambda: lam,
        log_lambda,
        epsilon: eps,
    })
}
