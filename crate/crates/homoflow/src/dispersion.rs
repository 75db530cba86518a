//! The Laplace symbol of the toy-model memory kernel and its root structure.
//!
//! The renewal equation for the collision flux has kernel (1+xi)^{beta-1},
//! so exponential modes e^{zt} e^{-ikX} survive self-consistently when
//! 1 = eps * Lambda(z, k) with
//!
//!   Lambda(z, k) = int_0^inf e^{-zt} (1+t)^{beta-1-ik} dt.
//!
//! The real root z0(0; eps) is the growth rate of the beta-th moment; the
//! complex curve k -> z0(k; eps) expanded to second order at k = 0 gives the
//! drift and spread of the traveling front in X = log rho.

use num_complex::Complex64;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::fit;
use crate::quad;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Lambda(z, k); requires Re z > 0 so the integral converges for every beta.
pub fn lambda_transform(z: Complex64, k: f64, beta: f64) -> Result<Complex64> {
    laplace_power_integral(z, k, beta, 0)
}

/// B(z, k) = int_0^inf t e^{-zt} (1+t)^{beta-1-ik} dt = -d Lambda / dz.
pub fn lambda_t_moment(z: Complex64, k: f64, beta: f64) -> Result<Complex64> {
    laplace_power_integral(z, k, beta, 1)
}

/// int_0^inf t^p e^{-zt} (1+t)^{beta-1-ik} dt, split at t = 1/|z| and then
/// integrated over doubling tail segments until the analytic remainder bound
/// is negligible.
fn laplace_power_integral(z: Complex64, k: f64, beta: f64, p: u32) -> Result<Complex64> {
    let x = z.re;
    if !(x > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need Re z > 0 for the Laplace integral, got {z}"
        )));
    }
    if !beta.is_finite() || !k.is_finite() {
        return Err(Error::InvalidParameter("beta and k must be finite".into()));
    }
    let f = |t: f64| -> Complex64 {
        let l = (1.0 + t).ln();
        let tp = match p {
            0 => 1.0,
            _ => t,
        };
        (Complex64::new((beta - 1.0) * l, -k * l) - z * t).exp() * tp
    };

    let t_split = 1.0 / z.norm();
    // with modulation the integrand oscillates and the error estimate
    // bottoms out near the round-off floor, so certify one digit less
    let head_rel = if k == 0.0 { 1e-13 } else { 1e-12 };
    let mut acc = quad::integrate_complex(&f, 0.0, t_split, head_rel)?;

    // power of (1+t) bounding the non-exponential factor, including t^p
    let m = beta - 1.0 + p as f64;
    let mut a = t_split;
    for _ in 0..220 {
        // remainder past a: int_a^inf (1+t)^m e^{-xt} dt
        let bound = if m <= 0.0 {
            (1.0 + a).powf(m) * (-x * a).exp() / x
        } else if x * (1.0 + a) > 2.0 * m {
            // geometric-series envelope for the polynomially growing factor
            2.0 * (1.0 + a).powf(m) * (-x * a).exp() / x
        } else {
            f64::INFINITY
        };
        if bound <= 1e-14 * acc.norm().max(1e-300) {
            return Ok(acc);
        }
        let b = 2.0 * a;
        // a segment is bounded by the remainder estimate, so once that is
        // tiny against the accumulated value its own relative tolerance can
        // loosen without moving the total
        let seg_tol = (1e-16 * acc.norm() / bound).clamp(head_rel, 1e-3);
        acc += quad::integrate_complex(&f, a, b, seg_tol)?;
        a = b;
    }
    Err(Error::QuadratureUnresolved(format!(
        "tail of the Laplace integral did not close for z = {z}, beta = {beta}"
    )))
}

/// A solved dispersion root together with its independently re-evaluated
/// residual |1 - eps Lambda(z0, k)| (always < 1e-10 on return).
#[derive(Debug, Clone, Copy)]
pub struct DispersionRoot {
    pub epsilon: f64,
    pub beta: f64,
    pub k: f64,
    pub z0: Complex64,
    pub residual: f64,
}

/// Solve 1 = eps Lambda(z, k). For k = 0 the root is real and positive and
/// found by Newton from the small-eps seed (Gamma(beta) eps)^{1/beta}
/// (beta = 0 seeds from the exponentially small exp(-gamma - 1/eps)); for
/// k != 0 a complex Newton starts from the k = 0 root.
pub fn solve_root(epsilon: f64, k: f64, beta: f64) -> Result<DispersionRoot> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    if beta < 0.0 {
        return Err(Error::Unsupported(
            "negative beta has no growing root in this family".into(),
        ));
    }
    let z_real = solve_real_root(epsilon, beta)?;
    let z0 = if k == 0.0 {
        Complex64::new(z_real, 0.0)
    } else {
        // continuation: walk k in small increments so each Newton solve
        // starts next to its root (the curve bends well away from the real
        // axis for k comparable to the root itself)
        let steps = (k.abs() / 0.05).ceil().max(1.0) as usize;
        let mut z = Complex64::new(z_real, 0.0);
        for j in 1..=steps {
            let kj = k * j as f64 / steps as f64;
            z = newton_complex(epsilon, kj, beta, z)?;
        }
        z
    };
    let residual = (1.0 - epsilon * lambda_transform(z0, k, beta)?).norm();
    if residual >= 1e-10 {
        return Err(Error::NoConvergence(format!(
            "root residual {residual:.3e} above 1e-10"
        )));
    }
    Ok(DispersionRoot {
        epsilon,
        beta,
        k,
        z0,
        residual,
    })
}

fn newton_complex(epsilon: f64, k: f64, beta: f64, seed: Complex64) -> Result<Complex64> {
    let mut z = seed;
    for _ in 0..80 {
        let lam = lambda_transform(z, k, beta)?;
        let g = epsilon * lam - 1.0;
        if g.norm() < 1e-12 {
            return Ok(z);
        }
        let b = lambda_t_moment(z, k, beta)?;
        let mut step = g / (epsilon * b);
        // keep the iterate in the half-plane where the integral converges
        let mut backtracks = 0;
        while (z + step).re <= 0.0 {
            step *= 0.5;
            backtracks += 1;
            if backtracks > 60 {
                return Err(Error::NoConvergence(format!(
                    "root iteration pinned against Re z = 0 at k = {k}"
                )));
            }
        }
        z += step;
    }
    Err(Error::NoConvergence(format!(
        "dispersion root did not converge for k = {k}, beta = {beta}"
    )))
}

fn solve_real_root(epsilon: f64, beta: f64) -> Result<f64> {
    let seed = if beta > 0.0 {
        (gamma(beta) * epsilon).powf(1.0 / beta)
    } else {
        (-EULER_GAMMA - 1.0 / epsilon).exp()
    };
    if !(seed > 0.0) || !seed.is_finite() {
        return Err(Error::Unsupported(format!(
            "root seed underflowed for epsilon = {epsilon}, beta = {beta}"
        )));
    }
    let lam_re = |z: f64| -> Result<f64> {
        Ok(lambda_transform(Complex64::new(z, 0.0), 0.0, beta)?.re)
    };
    let mut z = seed;
    for _ in 0..60 {
        let g = epsilon * lam_re(z)? - 1.0;
        if g.abs() < 1e-13 {
            return Ok(z);
        }
        let b = lambda_t_moment(Complex64::new(z, 0.0), 0.0, beta)?.re;
        let z_new = z + g / (epsilon * b);
        if z_new <= 0.0 || !z_new.is_finite() {
            break;
        }
        if (z_new - z).abs() <= 1e-15 * z {
            z = z_new;
            return Ok(z);
        }
        z = z_new;
    }
    // Newton left the basin; Lambda(., 0) is strictly decreasing on the real
    // axis so a sign-change bracket always exists
    let mut lo = seed;
    while epsilon * lam_re(lo)? <= 1.0 {
        lo *= 0.5;
        if lo < 1e-300 {
            return Err(Error::NoConvergence("no lower bracket for root".into()));
        }
    }
    let mut hi = seed.max(1e-8);
    while epsilon * lam_re(hi)? >= 1.0 {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::NoConvergence("no upper bracket for root".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if epsilon * lam_re(mid)? > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Drift, spread and normalization of the traveling front in X = log rho:
/// the first two come from the k-expansion of the root curve,
/// z0(k) = z0(0) + i A1 k - A2 k^2 + O(k^3).
#[derive(Debug, Clone, Copy)]
pub struct FrontCoefficients {
    /// Im dz0/dk at k = 0 (negative: the front moves toward positive X).
    pub a1: f64,
    /// -Re d2z0/dk2 / 2 at k = 0; positive, sets the sqrt(t) spread.
    pub a2: f64,
    /// B_eps = -dLambda/dz at the real root.
    pub b_eps: f64,
}

/// k-derivatives of the root curve by central differences (h = 1e-3, one
/// Richardson refinement), using conjugate symmetry z0(-k) = conj z0(k) to
/// halve the evaluations.
pub fn front_coefficients(epsilon: f64, beta: f64) -> Result<FrontCoefficients> {
    let z0 = solve_root(epsilon, 0.0, beta)?.z0.re;
    let h = 1e-3;
    let zh = solve_root(epsilon, h, beta)?.z0;
    let zh2 = solve_root(epsilon, 0.5 * h, beta)?.z0;

    // z(h) - z(-h) = 2i Im z(h); z(h) + z(-h) - 2 z(0) = 2 (Re z(h) - z0)
    let d1 = |zh: Complex64, h: f64| zh.im / h;
    let a1 = (4.0 * d1(zh2, 0.5 * h) - d1(zh, h)) / 3.0;
    let d2 = |zh: Complex64, h: f64| 2.0 * (zh.re - z0) / (h * h);
    let ddz = (4.0 * d2(zh2, 0.5 * h) - d2(zh, h)) / 3.0;
    let a2 = -0.5 * ddz;
    if !(a2 > 0.0) {
        return Err(Error::Degenerate(format!(
            "front spread rate came out nonpositive (a2 = {a2:.3e})"
        )));
    }
    let b_eps = lambda_t_moment(Complex64::new(z0, 0.0), 0.0, beta)?.re;
    Ok(FrontCoefficients { a1, a2, b_eps })
}

/// Predicted growth of the beta-th density moment.
#[derive(Debug, Clone, Copy)]
pub struct PredictedGrowth {
    /// Exact rate at this epsilon: the real dispersion root.
    pub rate: f64,
    /// Small-epsilon form (Gamma(beta) eps)^{1/beta} of the same rate.
    pub rate_small_eps: f64,
    /// Prefactor multiplying e^{rate t}: rate_small_eps / beta times the
    /// initial moment integral.
    pub amplitude: f64,
}

/// Growth law of the beta-th moment given the initial moment
/// C_beta = int G0 e^{beta X} dX.
pub fn predicted_moment_growth(
    epsilon: f64,
    beta: f64,
    moment_integral: f64,
) -> Result<PredictedGrowth> {
    if !(beta > 0.0) {
        return Err(Error::InvalidParameter(
            "moment growth prediction needs beta > 0".into(),
        ));
    }
    if !(moment_integral > 0.0) {
        return Err(Error::InvalidParameter(
            "initial moment integral must be positive".into(),
        ));
    }
    let rate = solve_root(epsilon, 0.0, beta)?.z0.re;
    let rate_small_eps = (gamma(beta) * epsilon).powf(1.0 / beta);
    Ok(PredictedGrowth {
        rate,
        rate_small_eps,
        amplitude: rate_small_eps / beta * moment_integral,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct FrontReport {
    /// sup |normalized slice - normalized Gaussian| over the xi window.
    pub sup_distance: f64,
    /// Grid points inside the window.
    pub samples: usize,
}

const XI_WINDOW: f64 = 6.0;

/// Compare a solved slice Phi(t, .) against the predicted traveling front:
/// weight by e^{beta X}, map to xi = (X + A1 t) / sqrt(A2 t), normalize to
/// unit mass over |xi| <= 6 and measure the sup-distance to the similarly
/// normalized Gaussian exp(-xi^2/4).
pub fn front_profile_check(
    xs: &[f64],
    phi: &[f64],
    t: f64,
    coeffs: &FrontCoefficients,
    beta: f64,
) -> Result<FrontReport> {
    if xs.len() != phi.len() || xs.len() < 8 {
        return Err(Error::InvalidParameter(
            "slice and grid must match and resolve the front".into(),
        ));
    }
    if !(t > 0.0) {
        return Err(Error::InvalidParameter("need t > 0".into()));
    }
    let spread = (coeffs.a2 * t).sqrt();
    let mut xi = Vec::new();
    let mut w = Vec::new();
    let mut q = Vec::new();
    for (&x, &p) in xs.iter().zip(phi) {
        let s = (x + coeffs.a1 * t) / spread;
        if s.abs() <= XI_WINDOW {
            xi.push(s);
            w.push(p * (beta * x).exp());
            q.push((-s * s / 4.0).exp());
        }
    }
    if xi.len() < 8 {
        return Err(Error::WindowTooShort(format!(
            "only {} grid points under the front window",
            xi.len()
        )));
    }
    let mass = trapezoid(&xi, &w);
    if !(mass > 0.0) {
        return Err(Error::Degenerate("slice carries no mass in the window".into()));
    }
    let qmass = trapezoid(&xi, &q);
    let sup = w
        .iter()
        .zip(&q)
        .map(|(&a, &b)| (a / mass - b / qmass).abs())
        .fold(0.0f64, f64::max);
    Ok(FrontReport {
        sup_distance: sup,
        samples: xi.len(),
    })
}

fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

/// Fitted drift rate of the front peak: slope of peak position against time.
/// The prediction is -A1 (positive drift for A1 < 0).
pub fn front_drift_rate(ts: &[f64], peak_positions: &[f64]) -> Result<f64> {
    let (_, slope) = fit::line(ts, peak_positions)?;
    Ok(slope)
}
