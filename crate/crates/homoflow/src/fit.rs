//! Least-squares fitting helpers used by the growth-diagnostics modules:
//! straight-line and log-log slope fits, and fits against arbitrary basis
//! functions (e.g. `S(t) = c1 t^{5/3} + c2 t + c3`).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Result of a linear least-squares fit.
#[derive(Debug, Clone)]
pub struct Fit {
    /// Coefficients in basis order.
    pub coeffs: Vec<f64>,
    /// Root-mean-square residual of the fit.
    pub rms_residual: f64,
    /// 2-norm condition number of the design matrix.
    pub condition: f64,
}

/// Solve min ||D c - y|| over the rows of `design`. Errors if the window has
/// fewer rows than columns or the design is numerically rank-deficient.
pub fn least_squares(design: &DMatrix<f64>, y: &DVector<f64>) -> Result<Fit> {
    let (n, p) = design.shape();
    if n < p {
        return Err(Error::WindowTooShort(format!(
            "{n} samples for {p} coefficients"
        )));
    }
    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition < 1e12) {
        return Err(Error::WindowTooShort(format!(
            "design matrix condition {condition:.3e}; window too narrow to separate basis functions"
        )));
    }
    let c = svd
        .solve(y, 0.0)
        .map_err(|e| Error::WindowTooShort(e.to_string()))?;
    let resid = design * &c - y;
    let rms = (resid.norm_squared() / n as f64).sqrt();
    Ok(Fit {
        coeffs: c.iter().copied().collect(),
        rms_residual: rms,
        condition,
    })
}

/// Fit `y = a + b x`; returns (intercept, slope).
pub fn line(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidParameter("x/y length mismatch".into()));
    }
    let design = DMatrix::from_fn(xs.len(), 2, |i, j| if j == 0 { 1.0 } else { xs[i] });
    let fit = least_squares(&design, &DVector::from_column_slice(ys))?;
    Ok((fit.coeffs[0], fit.coeffs[1]))
}

/// Log-log slope of y against x. All samples must be strictly positive.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.iter().any(|&x| x <= 0.0) || ys.iter().any(|&y| y <= 0.0) {
        return Err(Error::InvalidParameter(
            "log-log fit requires positive samples".into(),
        ));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    Ok(line(&lx, &ly)?.1)
}

/// Slope of y against x (semilog growth-rate fits).
pub fn slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    Ok(line(xs, ys)?.1)
}

/// Fit y(x) = sum_j c_j * basis_j(x).
pub fn fit_basis(xs: &[f64], ys: &[f64], basis: &[&dyn Fn(f64) -> f64]) -> Result<Fit> {
    let design = DMatrix::from_fn(xs.len(), basis.len(), |i, j| basis[j](xs[i]));
    least_squares(&design, &DVector::from_column_slice(ys))
}
