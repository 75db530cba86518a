//! Slowly varying rate eps(t) = A / (1 + t): the moment equations then sit
//! at the edge between exponential growth and algebraic decay, split by the
//! moment order.
//!
//! For beta > 1 the instantaneous dispersion root z0(eps(t)) is integrable
//! in the adiabatic sense and log lambda follows
//! (Gamma(beta) A)^(1/beta) (beta / (beta - 1)) t^(1 - 1/beta). For
//! beta < 1 the growth loses to the survival discount and lambda decays
//! like (1 + t)^(beta - 2). The marginal order beta = 1 separates the two
//! regimes and neither prediction applies, so it is refused.

use super::profile::InitialProfile;
use super::volterra::{solve_lambda_volterra, ToyMomentSeries};
use crate::{Error, Result};
use statrs::function::gamma::gamma;

/// Outcome of driving one moment with the decaying rate A / (1 + t).
#[derive(Debug, Clone)]
pub enum AdiabaticReport {
    /// beta > 1: stretched exponential growth. Carries log lambda at the
    /// horizon, the adiabatic prediction for it, and their ratio.
    Growing {
        log_lambda_end: f64,
        predicted_log: f64,
        ratio: f64,
    },
    /// beta < 1: algebraic decay. Carries the fitted log-log slope over the
    /// last decade and the predicted exponent beta - 2.
    Decaying {
        fitted_exponent: f64,
        predicted_exponent: f64,
    },
    /// A = 0: no collisions ever happen and the moment stays at zero.
    Quiescent,
}

/// Runs the marching solver with eps = A / (1 + t) over [0, t_end] and
/// compares the outcome with the adiabatic prediction for this order.
/// Returns the report together with the computed series.
pub fn adiabatic_check(
    beta: f64,
    a_coeff: f64,
    profile: &InitialProfile,
    t_end: f64,
    n: usize,
) -> Result<(AdiabaticReport, ToyMomentSeries)> {
    if !(a_coeff.is_finite() && a_coeff >= 0.0) {
        return Err(Error::InvalidParameter(
            "rate amplitude must be finite and nonnegative".into(),
        ));
    }
    if beta == 1.0 {
        return Err(Error::Unsupported(
            "the unit order is marginal under a decaying rate; no prediction applies".into(),
        ));
    }
    let series = solve_lambda_volterra(beta, |t| a_coeff / (1.0 + t), profile, t_end, n)?;
    if a_coeff == 0.0 {
        return Ok((AdiabaticReport::Quiescent, series));
    }
    let report = if beta > 1.0 {
        let log_end = *series.log_lambda.last().unwrap();
        let predicted =
            (gamma(beta) * a_coeff).powf(1.0 / beta) * (beta / (beta - 1.0)) * t_end.powf(1.0 - 1.0 / beta);
        AdiabaticReport::Growing {
            log_lambda_end: log_end,
            predicted_log: predicted,
            ratio: log_end / predicted,
        }
    } else {
        let fitted = series.loglog_slope(t_end / 10.0, t_end)?;
        AdiabaticReport::Decaying {
            fitted_exponent: fitted,
            predicted_exponent: beta - 2.0,
        }
    };
    Ok((report, series))
}
