//! Free-flow solutions for the regimes where collisions freeze out, and
//! numerical estimators for how fast the collision rate actually decays
//! along them.
//!
//! Three flows are covered. Homogeneous dilatation rescales all velocity
//! components together; cylindrical dilatation contracts the planar
//! components only, G(tau, w) = e^(2 tau) G0(e^tau w1, e^tau w2, w3); simple
//! shear translates w1 by K w2 times the elapsed shear. All three transport
//! mass exactly, which the tests verify by quadrature rather than by the
//! defining substitution.
//!
//! The collision-rate functional is evaluated at w = 0, following the
//! estimate of the supremum by its central value: R(tau) =
//! e^(-tau) int |w|^gamma G(tau, w) dw. After undoing the planar
//! contraction this becomes a radially symmetric weight
//! [e^(-2 tau) rho^2 + w3^2]^(gamma / 2) against the initial profile, with
//! an integrable singularity at the origin for gamma < 0 that is absorbed
//! by splitting the w3 integral at the contraction scale e^(-tau) rho.

use crate::{quad, Error, Result};
use rayon::prelude::*;

/// Mass of the reference radial bump exp(-1/(1-r^2)) over the unit ball,
/// i.e. 4 pi int_0^1 B(r) r^2 dr.
const BUMP_BALL_MASS: f64 = 0.441_088_887_276_606;

/// Centered three-dimensional velocity profiles used as initial data.
#[derive(Debug, Clone)]
pub enum VelocityProfile {
    /// Axis-aligned normal profile with the given standard deviations.
    Gaussian { sx: f64, sy: f64, sz: f64 },
    /// Smooth radial bump supported on |w| <= radius, unit mass.
    Bump { radius: f64 },
}

impl VelocityProfile {
    /// Isotropic Gaussian with variance 1/2 per axis, the reference profile
    /// pi^(-3/2) exp(-|w|^2).
    pub fn maxwellian() -> Self {
        let s = 0.5f64.sqrt();
        VelocityProfile::Gaussian {
            sx: s,
            sy: s,
            sz: s,
        }
    }

    pub fn gaussian(sx: f64, sy: f64, sz: f64) -> Result<Self> {
        if !(sx > 0.0 && sy > 0.0 && sz > 0.0)
            || !(sx.is_finite() && sy.is_finite() && sz.is_finite())
        {
            return Err(Error::InvalidParameter(
                "gaussian profile needs positive finite widths".into(),
            ));
        }
        Ok(VelocityProfile::Gaussian { sx, sy, sz })
    }

    pub fn bump(radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidParameter(
                "bump profile needs a positive radius".into(),
            ));
        }
        Ok(VelocityProfile::Bump { radius })
    }

    /// Density value at w.
    pub fn density(&self, w: [f64; 3]) -> f64 {
        match self {
            VelocityProfile::Gaussian { sx, sy, sz } => {
                let q = w[0] * w[0] / (sx * sx) + w[1] * w[1] / (sy * sy) + w[2] * w[2] / (sz * sz);
                (-0.5 * q).exp() / ((2.0 * std::f64::consts::PI).powf(1.5) * sx * sy * sz)
            }
            VelocityProfile::Bump { radius } => {
                let r2 = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]) / (radius * radius);
                if r2 >= 1.0 {
                    0.0
                } else {
                    (-1.0 / (1.0 - r2)).exp() / (BUMP_BALL_MASS * radius.powi(3))
                }
            }
        }
    }

    /// Mean of the density over the planar circle of radius rho at height
    /// w3. Closed form except for planar-anisotropic Gaussians.
    fn planar_average(&self, rho: f64, w3: f64) -> f64 {
        match self {
            VelocityProfile::Gaussian { sx, sy, .. } if (sx - sy).abs() < 1e-14 => {
                self.density([rho, 0.0, w3])
            }
            VelocityProfile::Gaussian { .. } => {
                let f = |th: f64| self.density([rho * th.cos(), rho * th.sin(), w3]);
                quad::integrate(&f, 0.0, std::f64::consts::TAU, 1e-10).unwrap_or(0.0)
                    / std::f64::consts::TAU
            }
            VelocityProfile::Bump { .. } => self.density([(rho * rho + w3 * w3).sqrt(), 0.0, 0.0]),
        }
    }

    /// Half-width of an axis-aligned box outside which the density is
    /// negligible at the working tolerances.
    fn extent(&self) -> f64 {
        match self {
            VelocityProfile::Gaussian { sx, sy, sz } => 10.0 * sx.max(*sy).max(*sz),
            VelocityProfile::Bump { radius } => *radius,
        }
    }
}

/// Which frozen regime a solution belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    HomogeneousDilatation,
    CylindricalDilatation,
    SimpleShear,
}

/// A free-flow solution: a regime, its initial profile, and the parameters
/// that matter for it (gamma for the dilatation rates, K for shear).
#[derive(Debug, Clone)]
pub struct FreeFlowSolution {
    pub regime: Regime,
    pub profile: VelocityProfile,
    pub gamma: f64,
    pub k_shear: f64,
}

impl FreeFlowSolution {
    /// Density at flow parameter tau (dilatations) or t (shear, t >= 1).
    pub fn density(&self, tau: f64, w: [f64; 3]) -> Result<f64> {
        match self.regime {
            Regime::HomogeneousDilatation => {
                if tau < 0.0 {
                    return Err(Error::InvalidParameter("tau must be nonnegative".into()));
                }
                let e = tau.exp();
                Ok(e.powi(3) * self.profile.density([e * w[0], e * w[1], e * w[2]]))
            }
            Regime::CylindricalDilatation => Ok(cylindrical_free_flow(&self.profile, tau, w)?),
            Regime::SimpleShear => Ok(shear_free_flow(&self.profile, self.k_shear, tau, w)?),
        }
    }
}

/// Collision-clock reparameterisation s(tau) = (1 - e^(-(2+gamma) tau)) /
/// (2 + gamma), strictly increasing with supremum 1 / (2 + gamma).
pub fn time_change(tau: f64, gamma: f64) -> Result<f64> {
    if !(gamma > -2.0) {
        return Err(Error::Unsupported(format!(
            "time change needs gamma > -2, got {gamma}"
        )));
    }
    if !(tau >= 0.0) {
        return Err(Error::InvalidParameter("tau must be nonnegative".into()));
    }
    let c = 2.0 + gamma;
    Ok(-(-c * tau).exp_m1() / c)
}

/// Inverse of the time change on [0, 1/(2+gamma)).
pub fn time_change_inverse(s: f64, gamma: f64) -> Result<f64> {
    if !(gamma > -2.0) {
        return Err(Error::Unsupported(format!(
            "time change needs gamma > -2, got {gamma}"
        )));
    }
    let c = 2.0 + gamma;
    if !(s >= 0.0 && c * s < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "s = {s} outside [0, {})",
            1.0 / c
        )));
    }
    Ok(-(-c * s).ln_1p() / c)
}

/// Cylindrical dilatation: the planar components contract by e^(-tau) while
/// the axial one is frozen.
pub fn cylindrical_free_flow(profile: &VelocityProfile, tau: f64, w: [f64; 3]) -> Result<f64> {
    if !(tau >= 0.0) {
        return Err(Error::InvalidParameter("tau must be nonnegative".into()));
    }
    let e = tau.exp();
    Ok(e * e * profile.density([e * w[0], e * w[1], w[2]]))
}

/// Simple shear: characteristics translate w1 by K w2 times the elapsed
/// shear t - 1. Plain transport, no amplitude factor, so mass is conserved.
pub fn shear_free_flow(profile: &VelocityProfile, k: f64, t: f64, w: [f64; 3]) -> Result<f64> {
    if !(t >= 1.0) {
        return Err(Error::InvalidParameter(
            "the unscaled shear flow starts at t = 1".into(),
        ));
    }
    Ok(profile.density([w[0] + k * w[1] * (t - 1.0), w[1], w[2]]))
}

/// Shear flow in self-similar variables xi = w / t: the xi_1 direction
/// carries the e^tau amplitude that compensates its compression.
pub fn shear_scaled_flow(profile: &VelocityProfile, k: f64, tau: f64, xi: [f64; 3]) -> Result<f64> {
    if !(tau >= 0.0) {
        return Err(Error::InvalidParameter("tau must be nonnegative".into()));
    }
    let e = tau.exp();
    Ok(e * profile.density([xi[0] * e + k * xi[1] * (e - 1.0), xi[1], xi[2]]))
}

/// How the collision rate is predicted to decay along the cylindrical flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PredictedDecay {
    /// log R drops linearly with this slope.
    Exponent(f64),
    /// |gamma| = 1: the bound carries an extra factor of tau and no clean
    /// exponent applies.
    Logarithmic,
}

/// Result of the decay fit.
#[derive(Debug, Clone)]
pub struct RateDecay {
    pub taus: Vec<f64>,
    pub rates: Vec<f64>,
    pub fitted_slope: f64,
    pub predicted: PredictedDecay,
    /// Number of grid points used by the fit after dropping the transient.
    pub fit_points: usize,
}

/// Evaluates R(tau) = e^(-tau) int |w|^gamma G(tau, w) dw on the grid and
/// fits log R against tau, skipping the first fifth of the grid as
/// transient. Predicted slope: -1 for gamma > -1, -(2 + gamma) for
/// -2 < gamma < -1, logarithmic exactly at gamma = -1.
pub fn collision_rate_decay(
    profile: &VelocityProfile,
    gamma: f64,
    tau_grid: &[f64],
) -> Result<RateDecay> {
    if !(gamma > -2.0) {
        return Err(Error::Unsupported(format!(
            "rate functional needs gamma > -2, got {gamma}"
        )));
    }
    if tau_grid.len() < 5 || tau_grid.windows(2).any(|w| !(w[1] > w[0])) || tau_grid[0] < 0.0 {
        return Err(Error::InvalidParameter(
            "tau grid must be increasing, nonnegative, with at least five points".into(),
        ));
    }
    let rates = tau_grid
        .par_iter()
        .map(|tau| rate_at(profile, gamma, *tau))
        .collect::<Result<Vec<f64>>>()?;
    if rates.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::QuadratureUnresolved(
            "rate quadrature produced a nonpositive value".into(),
        ));
    }
    let skip = tau_grid.len() / 5;
    let ts = &tau_grid[skip..];
    let ls: Vec<f64> = rates[skip..].iter().map(|r| r.ln()).collect();
    let fitted_slope = crate::fit::slope(ts, &ls)?;
    let predicted = if gamma == -1.0 {
        PredictedDecay::Logarithmic
    } else if gamma > -1.0 {
        PredictedDecay::Exponent(-1.0)
    } else {
        PredictedDecay::Exponent(-(2.0 + gamma))
    };
    Ok(RateDecay {
        taus: tau_grid.to_vec(),
        rates,
        fitted_slope,
        predicted,
        fit_points: ls.len(),
    })
}

/// One rate value. Undoing the planar contraction gives
///
///   R(tau) = e^(-tau) int [e^(-2 tau) rho^2 + w3^2]^(gamma/2)
///                     2 pi rho A(rho, w3) d w3 d rho,
///
/// with A the planar average of the profile. The w3 integral splits at
/// s = e^(-tau) rho; substituting w3 = s v on the inner part turns the
/// singular weight into s^gamma (1 + v^2)^(gamma/2), smooth in v.
fn rate_at(profile: &VelocityProfile, gamma: f64, tau: f64) -> Result<f64> {
    let ext = profile.extent();
    let contraction = (-tau).exp();
    let radial = |rho: f64| -> Result<f64> {
        if rho == 0.0 {
            return Ok(0.0);
        }
        let s = contraction * rho;
        let inner = quad::integrate(
            &|v: f64| (1.0 + v * v).powf(0.5 * gamma) * profile.planar_average(rho, s * v),
            0.0,
            1.0,
            1e-9,
        )? * s.powf(gamma + 1.0);
        let outer = quad::integrate(
            &|w3: f64| (s * s + w3 * w3).powf(0.5 * gamma) * profile.planar_average(rho, w3),
            s,
            ext,
            1e-9,
        )?;
        // w3 symmetry of the centered presets doubles the half-line
        Ok(2.0 * rho * (inner + outer))
    };
    let total = quad::integrate(&|rho: f64| radial(rho).unwrap_or(f64::NAN), 0.0, ext, 1e-8)?;
    if !total.is_finite() {
        return Err(Error::QuadratureUnresolved(format!(
            "rate integrand failed near the singular shell at tau = {tau}"
        )));
    }
    Ok((-tau).exp() * std::f64::consts::TAU * total)
}

/// Triple integral of f over a box whose w1 extent is a moving window
/// [c(w2) - half, c(w2) + half]. Sheared densities concentrate along an
/// off-center line in w1; a fixed outer box would let the quadrature rule
/// sample past the ridge entirely, so the inner integral is pinned to the
/// analytic support instead.
pub(crate) fn windowed_triple(
    f: &(dyn Fn([f64; 3]) -> f64 + Sync),
    center: &(dyn Fn(f64) -> f64 + Sync),
    half: f64,
    wide: f64,
    rel: f64,
) -> Result<f64> {
    quad::integrate2(
        &|w2: f64, w3: f64| {
            let c = center(w2);
            quad::integrate(&|w1: f64| f([w1, w2, w3]), c - half, c + half, rel * 0.01)
                .unwrap_or(f64::NAN)
        },
        (-wide, wide),
        (-wide, wide),
        rel,
    )
}

/// Report from pairing the scaled shear flow against test functions.
#[derive(Debug, Clone)]
pub struct WeakLimitGap {
    pub taus: Vec<f64>,
    /// |pairing(tau) - limit| per tau.
    pub gaps: Vec<f64>,
    pub limit: f64,
}

/// Pairs G(tau, .) against phi by quadrature and compares with the
/// concentration limit int [int G0(eta, x2, x3) d eta] phi(-K x2, x2, x3).
/// The xi_1 direction concentrates at scale e^(-tau); its integral runs
/// innermost, restricted to the support window around the ridge.
pub fn weak_limit_check(
    profile: &VelocityProfile,
    k: f64,
    taus: &[f64],
    phi: &(dyn Fn([f64; 3]) -> f64 + Sync),
) -> Result<WeakLimitGap> {
    if taus.is_empty() || taus.windows(2).any(|w| !(w[1] > w[0])) || taus[0] < 0.0 {
        return Err(Error::InvalidParameter(
            "tau list must be increasing and nonnegative".into(),
        ));
    }
    let ext = profile.extent();
    let marginal = move |x2: f64, x3: f64| -> f64 {
        quad::integrate(&|eta: f64| profile.density([eta, x2, x3]), -ext, ext, 1e-10).unwrap_or(0.0)
    };
    let limit = quad::integrate2(
        &|x2: f64, x3: f64| marginal(x2, x3) * phi([-k * x2, x2, x3]),
        (-ext, ext),
        (-ext, ext),
        1e-9,
    )?;
    let gaps = taus
        .par_iter()
        .map(|tau| -> Result<f64> {
            // xi_1 support: a window of half-width e^(-tau) ext around the
            // ridge at -K xi_2 (1 - e^(-tau))
            let shrink = (-tau).exp();
            let pairing = windowed_triple(
                &|x: [f64; 3]| {
                    shear_scaled_flow(profile, k, *tau, x).unwrap_or(f64::NAN) * phi(x)
                },
                &|x2: f64| -k * x2 * (1.0 - shrink),
                shrink * ext,
                ext,
                1e-8,
            )?;
            Ok((pairing - limit).abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(WeakLimitGap {
        taus: taus.to_vec(),
        gaps,
        limit,
    })
}

/// Kinetic energy of the sheared flow relative to the asymptotic shear
/// heating K^2 (t-1)^2 int w2^2 G0: the ratio tends to one like
/// 3 theta / (K (t-1))^2 for an isotropic profile of temperature theta.
pub fn shear_energy_ratio(profile: &VelocityProfile, k: f64, t: f64) -> Result<f64> {
    if !(t > 1.0) || k == 0.0 {
        return Err(Error::InvalidParameter(
            "energy ratio needs t > 1 and a nonzero shear".into(),
        ));
    }
    let ext = profile.extent();
    let energy = windowed_triple(
        &|w: [f64; 3]| {
            shear_free_flow(profile, k, t, w).unwrap_or(f64::NAN)
                * (w[0] * w[0] + w[1] * w[1] + w[2] * w[2])
        },
        &|w2: f64| -k * w2 * (t - 1.0),
        ext,
        ext,
        1e-8,
    )?;
    let m2 = quad::integrate3(
        &|w2: f64, w3: f64, w1: f64| profile.density([w1, w2, w3]) * w2 * w2,
        (-ext, ext),
        (-ext, ext),
        (-ext, ext),
        1e-9,
    )?;
    if !(m2 > 0.0) {
        return Err(Error::Degenerate(
            "profile has no planar second moment".into(),
        ));
    }
    Ok(energy / (k * k * (t - 1.0) * (t - 1.0) * m2))
}
