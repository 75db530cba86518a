//! Initial data for the toy model: the density of X = log rho at time zero.

use crate::quad;
use crate::{Error, Result};

/// Density of the initial log-amplitude X. Nonnegative, with finite
/// exponential moments over the support actually used.
#[derive(Debug, Clone)]
pub struct InitialProfile {
    kind: Kind,
}

#[derive(Debug, Clone)]
enum Kind {
    Gaussian { mean: f64, sigma: f64 },
    Bump { center: f64, halfwidth: f64 },
    Tabulated { xs: Vec<f64>, vals: Vec<f64> },
}

/// Mass of the reference bump exp(-1/(1-s^2)) on [-1, 1], used to give the
/// compact preset unit mass.
const BUMP_MASS: f64 = 0.443_993_816_168_079_44;

impl InitialProfile {
    /// Gaussian profile with the given mean and standard deviation.
    pub fn gaussian(mean: f64, sigma: f64) -> Result<Self> {
        if !(mean.is_finite() && sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidParameter(
                "gaussian profile needs finite mean and positive width".into(),
            ));
        }
        Ok(Self {
            kind: Kind::Gaussian { mean, sigma },
        })
    }

    /// Smooth compactly supported bump on [center - halfwidth, center + halfwidth],
    /// scaled to unit mass.
    pub fn bump(center: f64, halfwidth: f64) -> Result<Self> {
        if !(center.is_finite() && halfwidth.is_finite() && halfwidth > 0.0) {
            return Err(Error::InvalidParameter(
                "bump profile needs finite center and positive halfwidth".into(),
            ));
        }
        Ok(Self {
            kind: Kind::Bump { center, halfwidth },
        })
    }

    /// Piecewise linear profile through the given samples, zero outside their
    /// range. Abscissae must be strictly increasing, values nonnegative.
    pub fn tabulated(xs: Vec<f64>, vals: Vec<f64>) -> Result<Self> {
        if xs.len() != vals.len() || xs.len() < 2 {
            return Err(Error::InvalidParameter(
                "tabulated profile needs at least two matching samples".into(),
            ));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter(
                "tabulated abscissae must increase strictly".into(),
            ));
        }
        if vals.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidParameter(
                "tabulated values must be finite and nonnegative".into(),
            ));
        }
        Ok(Self {
            kind: Kind::Tabulated { xs, vals },
        })
    }

    /// Density value at x.
    pub fn density(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Gaussian { mean, sigma } => {
                let s = (x - mean) / sigma;
                (-0.5 * s * s).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
            }
            Kind::Bump { center, halfwidth } => {
                let s = (x - center) / halfwidth;
                if s.abs() >= 1.0 {
                    0.0
                } else {
                    (-1.0 / (1.0 - s * s)).exp() / (BUMP_MASS * halfwidth)
                }
            }
            Kind::Tabulated { xs, vals } => {
                if x <= xs[0] || x >= *xs.last().unwrap() {
                    // endpoints themselves count as support only from inside
                    if x == xs[0] {
                        return vals[0];
                    }
                    if x == *xs.last().unwrap() {
                        return *vals.last().unwrap();
                    }
                    return 0.0;
                }
                let i = xs.partition_point(|&p| p <= x) - 1;
                let f = (x - xs[i]) / (xs[i + 1] - xs[i]);
                vals[i] * (1.0 - f) + vals[i + 1] * f
            }
        }
    }

    /// (mean, sigma) when the profile is the Gaussian preset.
    pub fn gaussian_parameters(&self) -> Option<(f64, f64)> {
        match self.kind {
            Kind::Gaussian { mean, sigma } => Some((mean, sigma)),
            _ => None,
        }
    }

    /// Support interval for the compactly supported kinds.
    pub fn support(&self) -> Option<(f64, f64)> {
        match &self.kind {
            Kind::Gaussian { .. } => None,
            Kind::Bump { center, halfwidth } => Some((center - halfwidth, center + halfwidth)),
            Kind::Tabulated { xs, .. } => Some((xs[0], *xs.last().unwrap())),
        }
    }

    /// Exponential moment C_beta = int G0(X) exp(beta X) dX.
    pub fn moment(&self, beta: f64) -> Result<f64> {
        if !beta.is_finite() {
            return Err(Error::InvalidParameter(
                "moment order must be finite".into(),
            ));
        }
        let (lo, hi) = match &self.kind {
            // integrand peaks at mean + beta sigma^2; twelve widths of margin
            Kind::Gaussian { mean, sigma } => {
                let peak = mean + beta * sigma * sigma;
                (peak - 12.0 * sigma, peak + 12.0 * sigma)
            }
            Kind::Bump { center, halfwidth } => (center - halfwidth, center + halfwidth),
            Kind::Tabulated { xs, .. } => (xs[0], *xs.last().unwrap()),
        };
        let c = quad::integrate(|x| self.density(x) * (beta * x).exp(), lo, hi, 1e-12)?;
        if !c.is_finite() {
            return Err(Error::InvalidParameter(
                "exponential moment overflows for this profile".into(),
            ));
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_moments_match_closed_form() {
        let g = InitialProfile::gaussian(0.3, 0.7).unwrap();
        for beta in [0.0f64, 0.5, 1.0, 2.0, 3.5] {
            let exact = (beta * 0.3 + 0.5 * beta * beta * 0.49).exp();
            let got = g.moment(beta).unwrap();
            assert!(
                (got - exact).abs() <= 1e-10 * exact,
                "beta {beta}: {got} vs {exact}"
            );
        }
    }

    #[test]
    fn bump_has_unit_mass_and_compact_support() {
        let b = InitialProfile::bump(1.0, 2.0).unwrap();
        let mass = b.moment(0.0).unwrap();
        assert!((mass - 1.0).abs() < 1e-10, "mass {mass}");
        assert_eq!(b.density(3.0), 0.0);
        assert_eq!(b.density(-1.0), 0.0);
        assert!(b.density(1.0) > 0.0);
    }

    #[test]
    fn tabulated_interpolates_linearly() {
        let p = InitialProfile::tabulated(vec![0.0, 1.0, 2.0], vec![0.0, 2.0, 0.0]).unwrap();
        assert_eq!(p.density(0.5), 1.0);
        assert_eq!(p.density(1.5), 1.0);
        assert_eq!(p.density(2.5), 0.0);
        // triangle of area 2
        assert!((p.moment(0.0).unwrap() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_profiles() {
        assert!(InitialProfile::gaussian(0.0, 0.0).is_err());
        assert!(InitialProfile::bump(0.0, -1.0).is_err());
        assert!(InitialProfile::tabulated(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(InitialProfile::tabulated(vec![0.0, 1.0], vec![1.0, -1.0]).is_err());
        assert!(InitialProfile::tabulated(vec![0.0], vec![1.0]).is_err());
    }
}
