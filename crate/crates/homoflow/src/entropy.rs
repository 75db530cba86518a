//! Entropy per particle and the ideal-gas-form decomposition
//! s / rho = log(eps^(3/2) / rho) + C_G.
//!
//! The constant C_G depends only on the shape of the velocity profile, not
//! on its mass or temperature: dilations and amplitude scalings cancel
//! exactly between the entropy term and the moment term. That makes the
//! decomposition a two-route consistency check: computing s / rho directly
//! and reconstructing it through C_G of the normalized profile must agree
//! to quadrature accuracy for any profile whatsoever.
//!
//! Along the free flows of collision-frozen regimes the per-particle
//! entropy is exactly conserved when the density is transported by value
//! (the velocity-space compression is paid for by spatial dilution). The
//! tests pair densities from the frozen-flow module in that form.
//!
//! Particle mass is normalized to 2 throughout, so the reference
//! Maxwellian is e^(-|xi|^2) / pi^(3/2) and eps = int |w|^2 g / int g with
//! no factor 1/2.

use crate::{frozen, Error, Result};

/// Integration region for a 3D velocity density. Sheared profiles
/// concentrate along a line w1 = slope * w2; their region follows that
/// window so the quadrature never has to find the ridge inside a huge box.
#[derive(Debug, Clone, Copy)]
pub enum Domain {
    Cube { half: f64 },
    ShearWindow { wide: f64, half: f64, slope: f64 },
}

impl Domain {
    pub fn cube(half: f64) -> Result<Self> {
        if !(half.is_finite() && half > 0.0) {
            return Err(Error::InvalidParameter(
                "domain half-width must be positive".into(),
            ));
        }
        Ok(Domain::Cube { half })
    }

    pub fn shear_window(wide: f64, half: f64, slope: f64) -> Result<Self> {
        if !(wide > 0.0 && half > 0.0 && slope.is_finite()) {
            return Err(Error::InvalidParameter(
                "shear window needs positive extents and a finite slope".into(),
            ));
        }
        Ok(Domain::ShearWindow { wide, half, slope })
    }

    fn integrate(&self, f: &(dyn Fn([f64; 3]) -> f64 + Sync), rel: f64) -> Result<f64> {
        match *self {
            Domain::Cube { half } => frozen::windowed_triple(f, &|_| 0.0, half, half, rel),
            Domain::ShearWindow { wide, half, slope } => {
                frozen::windowed_triple(f, &move |w2: f64| slope * w2, half, wide, rel)
            }
        }
    }

    /// The region that holds w / lambda whenever this one holds w.
    fn scaled(&self, lambda: f64) -> Self {
        match *self {
            Domain::Cube { half } => Domain::Cube {
                half: half / lambda,
            },
            Domain::ShearWindow { wide, half, slope } => Domain::ShearWindow {
                wide: wide / lambda,
                half: half / lambda,
                slope,
            },
        }
    }
}

/// Entropy diagnostics of one velocity density.
#[derive(Debug, Clone)]
pub struct EntropyReport {
    /// Entropy density -int g log g.
    pub s: f64,
    /// Mass int g.
    pub rho: f64,
    /// Internal energy per particle, int |w|^2 g / rho.
    pub eps: f64,
    pub s_per_particle: f64,
    pub c_g: f64,
    /// s/rho - log(eps^(3/2)/rho) - C_G, zero in exact arithmetic.
    pub residual: f64,
}

fn neg_g_log_g(g: f64) -> f64 {
    // 0 log 0 := 0, and values this small cannot move the integral anyway
    if g > 1e-300 {
        -g * g.ln()
    } else {
        0.0
    }
}

/// s / rho = -int g log g / int g.
pub fn entropy_per_particle(
    g: &(dyn Fn([f64; 3]) -> f64 + Sync),
    domain: &Domain,
) -> Result<f64> {
    let rho = domain.integrate(g, 1e-10)?;
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::Degenerate("density has no mass".into()));
    }
    let s = domain.integrate(&|w| neg_g_log_g(g(w)), 1e-10)?;
    if !s.is_finite() {
        return Err(Error::QuadratureUnresolved(
            "entropy integral failed to converge".into(),
        ));
    }
    Ok(s / rho)
}

/// Shape constant C_G = -int G log G / int G
/// - log[ (int |xi|^2 G)^(3/2) / (int G)^(5/2) ].
pub fn c_g(g: &(dyn Fn([f64; 3]) -> f64 + Sync), domain: &Domain) -> Result<f64> {
    let mass = domain.integrate(g, 1e-10)?;
    let energy = domain.integrate(&|w| g(w) * (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]), 1e-10)?;
    if !(mass > 0.0 && energy > 0.0) {
        return Err(Error::Degenerate(
            "profile needs positive mass and energy".into(),
        ));
    }
    let s = domain.integrate(&|w| neg_g_log_g(g(w)), 1e-10)?;
    let value = s / mass - (energy.powf(1.5) / mass.powf(2.5)).ln();
    if !value.is_finite() {
        return Err(Error::QuadratureUnresolved(
            "shape constant integrals diverged".into(),
        ));
    }
    Ok(value)
}

/// Difference between s/rho and its ideal-gas-form reconstruction through
/// the mass- and scale-normalized profile. The two routes traverse the
/// quadrature differently, so the result measures numerical consistency;
/// analytically it vanishes for every admissible density.
pub fn ideal_form_residual(
    g: &(dyn Fn([f64; 3]) -> f64 + Sync),
    domain: &Domain,
    rho: f64,
) -> Result<f64> {
    let report = report(g, domain)?;
    if !((report.rho - rho).abs() <= 1e-6 * rho.abs()) {
        return Err(Error::InvalidParameter(format!(
            "density integrates to {} but rho = {rho} was claimed",
            report.rho
        )));
    }
    Ok(report.residual)
}

/// All entropy diagnostics of one density in a single pass.
pub fn report(g: &(dyn Fn([f64; 3]) -> f64 + Sync), domain: &Domain) -> Result<EntropyReport> {
    let rho = domain.integrate(g, 1e-10)?;
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::Degenerate("density has no mass".into()));
    }
    let energy = domain.integrate(&|w| g(w) * (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]), 1e-10)?;
    let eps = energy / rho;
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Degenerate("density has no kinetic energy".into()));
    }
    let s = domain.integrate(&|w| neg_g_log_g(g(w)), 1e-10)?;
    let s_per_particle = s / rho;
    // mass- and scale-normalized shape: unit mass, unit second moment
    let lambda = eps.sqrt();
    let hat = move |xi: [f64; 3]| {
        lambda.powi(3) / rho * g([lambda * xi[0], lambda * xi[1], lambda * xi[2]])
    };
    let cg = c_g(&hat, &domain.scaled(lambda))?;
    let residual = s_per_particle - (eps.powf(1.5) / rho).ln() - cg;
    Ok(EntropyReport {
        s,
        rho,
        eps,
        s_per_particle,
        c_g: cg,
        residual,
    })
}
