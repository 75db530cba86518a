//! Mean-flow kinematics: the matrix L(t) = (I + tA)^{-1} A generated by an
//! affine initial condition, its blow-up horizon, the seven-case long-time
//! classification, and the hydrodynamic balance laws (density decay, drift
//! damping, energy balance).
//!
//! Classification strategy: the asymptotics of L(t) are controlled by the
//! splitting of R^3 into the generalized kernel of A (nilpotent directions,
//! where L(t) = A - tA^2 exactly) and its invariant complement (where
//! t L(t) converges to the spectral projector). The case is decided from the
//! ranks of A, A^2, A^3 (SVD with scaled floors; eigenvalue routines are
//! unreliable for near-nilpotent matrices, rank counts are not), and the
//! template parameters are read off projectors and adapted bases rather than
//! Jordan chains.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::fit;
use crate::quad;

/// Relative floor for rank decisions on A^k.
const RANK_FLOOR: f64 = 1e-12;
/// Tolerance under which a shear constant counts as zero.
const SHEAR_TOL: f64 = 1e-9;
/// Times at which classification templates are checked against L(t).
const PROBE_TIMES: [f64; 3] = [1e2, 1e3, 1e4];

/// The deformation matrix A together with its blow-up horizon: the largest
/// time up to which det(I + tA) stays positive (infinite for most flows of
/// interest).
#[derive(Debug, Clone)]
pub struct DeformationMatrix {
    pub a: Matrix3<f64>,
    pub horizon: f64,
}

impl DeformationMatrix {
    pub fn new(a: Matrix3<f64>) -> Self {
        let horizon = blow_up_horizon(&a);
        DeformationMatrix { a, horizon }
    }

    /// L(t) = (I + tA)^{-1} A. Errors once det(I + tA) is no longer safely positive.
    pub fn evolve_l(&self, t: f64) -> Result<Matrix3<f64>> {
        if t < 0.0 || t > self.horizon {
            return Err(Error::InvalidParameter(format!(
                "t = {t} outside [0, horizon = {}]",
                self.horizon
            )));
        }
        let m = Matrix3::identity() + self.a * t;
        let lu = m.lu();
        lu.solve(&self.a)
            .ok_or_else(|| Error::InvalidParameter(format!("I + tA singular at t = {t}")))
    }

    /// Drift damping B(t) = (I + tA)^{-1} B0.
    pub fn drift_offset(&self, b0: Vector3<f64>, t: f64) -> Result<Vector3<f64>> {
        if t < 0.0 || t > self.horizon {
            return Err(Error::InvalidParameter(format!(
                "t = {t} outside [0, horizon = {}]",
                self.horizon
            )));
        }
        let m = Matrix3::identity() + self.a * t;
        m.lu()
            .solve(&b0)
            .ok_or_else(|| Error::InvalidParameter(format!("I + tA singular at t = {t}")))
    }

    /// Density along the flow, rho0 * exp(-int_0^t Tr L), evaluated by
    /// adaptive quadrature and cross-checked against the closed form
    /// rho0 / det(I + tA); the two must agree to 1e-10 relative.
    pub fn density(&self, rho0: f64, t: f64) -> Result<f64> {
        if rho0 <= 0.0 {
            return Err(Error::InvalidParameter("rho0 must be positive".into()));
        }
        let trace_l = |s: f64| -> f64 {
            let m = Matrix3::identity() + self.a * s;
            match m.lu().solve(&self.a) {
                Some(l) => l.trace(),
                None => f64::NAN,
            }
        };
        let integral = quad::integrate(trace_l, 0.0, t, 1e-12)?;
        let by_quadrature = rho0 * (-integral).exp();
        let det = (Matrix3::identity() + self.a * t).determinant();
        if det <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "det(I + tA) = {det} at t = {t}; past the horizon"
            )));
        }
        let closed_form = rho0 / det;
        let rel = (by_quadrature - closed_form).abs() / closed_form.abs();
        if rel > 1e-10 {
            return Err(Error::QuadratureUnresolved(format!(
                "density routes disagree by {rel:.3e} at t = {t}"
            )));
        }
        Ok(by_quadrature)
    }
}

fn blow_up_horizon(a: &Matrix3<f64>) -> f64 {
    let det_at = |t: f64| (Matrix3::identity() + a * t).determinant();
    // det(I + tA) is a cubic in t starting at 1; look for a sign change on a
    // doubling bracket, then bisect. Sign changes past t_noise come from
    // eigenvalues below rounding noise relative to ||A|| (the classifier
    // treats those as zero), so the scan stops there.
    let t_noise = 1e9 / a.norm().max(1e-300);
    let mut hi = 1.0;
    let mut found = false;
    for _ in 0..80 {
        if det_at(hi) <= 0.0 {
            found = true;
            break;
        }
        hi *= 2.0;
        if hi > t_noise {
            break;
        }
    }
    if !found {
        return f64::INFINITY;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if det_at(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    lo
}

/// The seven long-time shapes of L(t), with the shear constants each
/// template carries. Constants are reported in a canonical orthonormal
/// basis and are nonnegative where a reflection can absorb the sign.
#[derive(Debug, Clone, PartialEq)]
pub enum FlowClass {
    /// L ~ I/t: every direction expands.
    HomogeneousDilatation,
    /// L ~ P/t with P the rank-2 orthogonal projector on the expanding plane.
    CylindricalDilatation,
    /// Same, but the projector is oblique; k measures the shear tilt of its
    /// kernel against the expanding plane.
    CylindricalDilatationShear { k: f64 },
    /// L ~ P/t with rank-1 P; k is the tilt of the contracting plane.
    PlanarShear { k: f64 },
    /// L = A constant of rank 1 (A^2 = 0); k is the shear rate.
    SimpleShear { k: f64 },
    /// Constant rank-1 shear plus a decaying rank-1 dilatation, L = N + P/t.
    /// In the adapted basis the decaying couplings vanish, so the only
    /// constant reported is the persistent shear rate k2.
    SimpleShearDecayingPlanar { k2: f64 },
    /// Nilpotent A of order 3: L(t) = A - tA^2 exactly, with one secularly
    /// growing entry k1*k3*t. Constants from the triangularizing basis.
    CombinedOrthogonalShear { k1: f64, k2: f64, k3: f64 },
}

/// Template attached to a classification: either the affine shape N + R/t or
/// the exact nilpotent form A - tA^2.
#[derive(Debug, Clone)]
pub enum Template {
    Affine { n: Matrix3<f64>, r: Matrix3<f64> },
    NilpotentExact { a: Matrix3<f64> },
}

impl Template {
    pub fn eval(&self, t: f64) -> Matrix3<f64> {
        match self {
            Template::Affine { n, r } => n + r / t,
            Template::NilpotentExact { a } => a - a * a * t,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FlowClassification {
    pub class: FlowClass,
    pub template: Template,
    /// For affine templates, max over probe times of
    /// ||L(t) - template(t)|| * t^2 / ||A||; bounded because those templates
    /// are accurate to O(1/t^2). For the exact nilpotent template, the
    /// relative defect max ||L - template|| / ||template||, which only
    /// measures rounding.
    pub residual: f64,
}

fn svd_rank(m: &Matrix3<f64>, floor: f64) -> usize {
    let sv = m.singular_values();
    sv.iter().filter(|&&s| s > floor).count()
}

/// Unit kernel vector (right singular direction of the smallest singular value).
fn kernel_vector(m: &Matrix3<f64>) -> Vector3<f64> {
    let svd = m.svd(true, true);
    let vt = svd.v_t.expect("svd requested");
    vt.row(2).transpose().normalize()
}

fn left_kernel_vector(m: &Matrix3<f64>) -> Vector3<f64> {
    kernel_vector(&m.transpose())
}

/// Any unit vector orthogonal to v.
fn orthogonal_to(v: &Vector3<f64>) -> Vector3<f64> {
    let trial = if v.x.abs() < 0.9 {
        Vector3::x()
    } else {
        Vector3::y()
    };
    (trial - v * v.dot(&trial)).normalize()
}

/// Classify the long-time shape of L(t) for a flow with infinite horizon.
pub fn classify_flow(dm: &DeformationMatrix) -> Result<FlowClassification> {
    if dm.horizon.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "flow blows up at t = {:.6e}; only global-in-time flows are classified",
            dm.horizon
        )));
    }
    let a = dm.a;
    let norm_a = a.norm();
    if norm_a == 0.0 {
        return Err(Error::StaticFlow);
    }
    let a2 = a * a;
    let a3 = a2 * a;
    let r1 = svd_rank(&a, RANK_FLOOR * norm_a);
    let r3 = svd_rank(&a3, RANK_FLOOR * norm_a.powi(3));
    // dimension of the generalized kernel = 3 - rank(A^3)
    let n0 = 3 - r3;

    let (class, template) = match (n0, r1) {
        (0, _) => {
            // A invertible on all of R^3: L = (A^{-1} + t)^{-1} -> I/t
            (
                FlowClass::HomogeneousDilatation,
                Template::Affine {
                    n: Matrix3::zeros(),
                    r: Matrix3::identity(),
                },
            )
        }
        (1, _) => {
            // one neutral direction; t L -> I - P0 with P0 the spectral
            // projector on ker A (simple zero eigenvalue)
            let n = kernel_vector(&a);
            let m = left_kernel_vector(&a);
            let overlap = m.dot(&n);
            if overlap.abs() < SHEAR_TOL {
                return Err(Error::Degenerate(
                    "kernel and left kernel nearly orthogonal; projector ill-conditioned".into(),
                ));
            }
            let p0 = n * m.transpose() / overlap;
            let lam = Matrix3::identity() - p0;
            // tilt of the projector kernel against the expanding plane, read
            // in an orthonormal basis whose third axis is the left kernel
            let mh = m.normalize();
            let u1 = orthogonal_to(&mh);
            let u2 = mh.cross(&u1);
            let k = (u1.dot(&(lam * mh)).powi(2) + u2.dot(&(lam * mh)).powi(2)).sqrt();
            let class = if k <= SHEAR_TOL {
                FlowClass::CylindricalDilatation
            } else {
                FlowClass::CylindricalDilatationShear { k }
            };
            (
                class,
                Template::Affine {
                    n: Matrix3::zeros(),
                    r: lam,
                },
            )
        }
        (2, 1) => {
            // A of rank 1 with a single expanding direction: A^3 = c P with
            // P the rank-1 spectral projector, so P = A^3 / tr(A^3)
            let tr = a3.trace();
            if tr.abs() <= RANK_FLOOR * norm_a.powi(3) {
                return Err(Error::Degenerate(
                    "rank-1 flow with vanishing trace of A^3; no template fits".into(),
                ));
            }
            let lam = a3 / tr;
            let mh = left_kernel_vector(&(a - Matrix3::identity() * eigen_scale(&a)));
            // tilt against the left eigendirection, same reading as above
            let u1 = orthogonal_to(&mh);
            let u2 = mh.cross(&u1);
            let k = (u1.dot(&(lam * mh)).powi(2) + u2.dot(&(lam * mh)).powi(2)).sqrt();
            (
                FlowClass::PlanarShear { k },
                Template::Affine {
                    n: Matrix3::zeros(),
                    r: lam,
                },
            )
        }
        (2, 2) => {
            // constant shear on the 2D nilpotent part plus a decaying rank-1
            // dilatation; read both off probe values of L
            let t1 = 1e6;
            let t2 = 2e6;
            let l1 = dm.evolve_l(t1)?;
            let l2 = dm.evolve_l(t2)?;
            let r = (l1 - l2) * (t1 * t2 / (t2 - t1));
            let n = l1 - r / t1;
            let k2 = n.singular_values()[0];
            if k2 <= SHEAR_TOL * norm_a {
                return Err(Error::Degenerate(
                    "persistent shear part vanished; no template fits".into(),
                ));
            }
            (
                FlowClass::SimpleShearDecayingPlanar { k2 },
                Template::Affine { n, r },
            )
        }
        (3, 0) => return Err(Error::StaticFlow),
        (3, 1) => {
            // A^2 = 0: L(t) = A for all t
            let k = a.singular_values()[0];
            (
                FlowClass::SimpleShear { k },
                Template::Affine {
                    n: a,
                    r: Matrix3::zeros(),
                },
            )
        }
        (3, 2) => {
            // nilpotent of order 3: triangularize by the kernel flag
            // q1 = ker A, q2 = ker A^2 minus q1, q3 the rest
            let q1 = kernel_vector(&a);
            let k2v = kernel_vector(&a2);
            // a2 has a 2D kernel; take the component independent of q1
            let q2cand = if (k2v - q1 * q1.dot(&k2v)).norm() > 0.1 {
                k2v
            } else {
                // the SVD picked the q1 direction; use the other null direction
                let svd = a2.svd(true, true);
                let vt = svd.v_t.expect("svd requested");
                vt.row(1).transpose()
            };
            let q2 = (q2cand - q1 * q1.dot(&q2cand)).normalize();
            let q3 = q1.cross(&q2);
            let t12 = q1.dot(&(a * q2));
            let t13 = q1.dot(&(a * q3));
            let t23 = q2.dot(&(a * q3));
            // reflections of q1, q3 make the two guaranteed-nonzero entries positive
            let (s1, s3) = (t12.signum(), t23.signum());
            let (k3, k2c, k1) = (t12 * s1, t13 * s1 * s3, t23 * s3);
            if k1.abs() <= SHEAR_TOL * norm_a || k3.abs() <= SHEAR_TOL * norm_a {
                return Err(Error::Degenerate(
                    "order-3 nilpotent flow with a vanishing shear constant".into(),
                ));
            }
            (
                FlowClass::CombinedOrthogonalShear {
                    k1,
                    k2: k2c,
                    k3,
                },
                Template::NilpotentExact { a },
            )
        }
        _ => {
            return Err(Error::Degenerate(format!(
                "rank pattern (generalized kernel {n0}, rank {r1}) fits no template"
            )))
        }
    };

    let mut residual: f64 = 0.0;
    for &t in &PROBE_TIMES {
        let l = dm.evolve_l(t)?;
        let tmpl = template.eval(t);
        let diff = (l - tmpl).norm();
        residual = residual.max(match template {
            Template::Affine { .. } => diff * t * t / norm_a,
            Template::NilpotentExact { .. } => diff / tmpl.norm(),
        });
    }
    Ok(FlowClassification {
        class,
        template,
        residual,
    })
}

/// The nonzero eigenvalue of a rank-1 A (equals tr A since the other two
/// eigenvalues vanish).
fn eigen_scale(a: &Matrix3<f64>) -> f64 {
    a.trace()
}

/// Energy-balance defect r(t) = rho * d(eps)/dt + Tr(M L) on aligned grids,
/// with the time derivative by centered differences. Interior points only.
pub fn energy_balance_residual(
    times: &[f64],
    moments: &[Matrix3<f64>],
    dm: &DeformationMatrix,
    rho: &[f64],
    eps: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let n = times.len();
    if moments.len() != n || rho.len() != n || eps.len() != n {
        return Err(Error::InvalidParameter(
            "time, moment, density and energy grids must have equal length".into(),
        ));
    }
    if n < 3 {
        return Err(Error::WindowTooShort("need at least 3 samples".into()));
    }
    let mut out = Vec::with_capacity(n - 2);
    for i in 1..n - 1 {
        let deps = (eps[i + 1] - eps[i - 1]) / (times[i + 1] - times[i - 1]);
        let l = dm.evolve_l(times[i])?;
        let r = rho[i] * deps + (moments[i] * l).trace();
        out.push((times[i], r));
    }
    Ok(out)
}

/// Fitted decay order p of ||L(t) - template(t)|| ~ t^{-p} over the probe
/// times; `None` when the template is exact to rounding (nothing to fit).
pub fn residual_decay_order(dm: &DeformationMatrix, cls: &FlowClassification) -> Result<Option<f64>> {
    let mut ts = Vec::new();
    let mut ds = Vec::new();
    for &t in &PROBE_TIMES {
        let d = (dm.evolve_l(t)? - cls.template.eval(t)).norm();
        if d > 1e-13 * dm.a.norm() {
            ts.push(t);
            ds.push(d);
        }
    }
    if ts.len() < 2 {
        return Ok(None);
    }
    Ok(Some(-fit::loglog_slope(&ts, &ds)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn shear(k: f64) -> Matrix3<f64> {
        let mut a = Matrix3::zeros();
        a[(0, 1)] = k;
        a
    }

    #[test]
    fn l_zero_matrix() {
        let dm = DeformationMatrix::new(Matrix3::zeros());
        assert_eq!(dm.evolve_l(7.0).unwrap(), Matrix3::zeros());
        assert_eq!(dm.horizon, f64::INFINITY);
    }

    #[test]
    fn l_constant_for_simple_shear() {
        let dm = DeformationMatrix::new(shear(2.5));
        for t in [0.0, 1.0, 1e3, 1e6] {
            assert_relative_eq!(dm.evolve_l(t).unwrap(), shear(2.5), max_relative = 1e-14);
        }
    }

    #[test]
    fn l_identity_halves() {
        let dm = DeformationMatrix::new(Matrix3::identity());
        let l = dm.evolve_l(1.0).unwrap();
        assert_relative_eq!(l, Matrix3::identity() * 0.5, max_relative = 1e-14);
    }

    #[test]
    fn commutation_of_resolvent() {
        let a = Matrix3::new(0.3, 1.0, -0.2, 0.0, 0.1, 0.7, 0.0, 0.0, 0.2);
        let dm = DeformationMatrix::new(a);
        let t = 3.7;
        let l = dm.evolve_l(t).unwrap();
        let m = Matrix3::identity() + a * t;
        let other = a * m.try_inverse().unwrap();
        assert_relative_eq!(l, other, max_relative = 1e-12);
    }

    #[test]
    fn riccati_equation_residual_refines() {
        // dL/dt + L^2 = 0 checked by centered differences at two step sizes
        let a = Matrix3::new(0.5, 1.0, 0.0, 0.0, 0.3, 2.0, 0.0, 0.0, 0.1);
        let dm = DeformationMatrix::new(a);
        let t = 2.0;
        let resid = |h: f64| {
            let lp = dm.evolve_l(t + h).unwrap();
            let lm = dm.evolve_l(t - h).unwrap();
            let l = dm.evolve_l(t).unwrap();
            ((lp - lm) / (2.0 * h) + l * l).norm()
        };
        let r1 = resid(1e-3);
        let r2 = resid(5e-4);
        assert!(r1 < 1e-5);
        assert!(r2 < r1 / 3.2, "O(h^2): r(h/2) ~ r(h)/4, got {r1:.3e} -> {r2:.3e}");
    }

    #[test]
    fn horizon_of_contracting_flow() {
        // eigenvalue -1: det(I + tA) = (1 - t)... horizon at t = 1
        let a = Matrix3::from_diagonal(&Vector3::new(-1.0, 1.0, 2.0));
        let dm = DeformationMatrix::new(a);
        assert_relative_eq!(dm.horizon, 1.0, max_relative = 1e-10);
        assert!(classify_flow(&dm).is_err());
    }

    #[test]
    fn density_two_routes_agree() {
        let a = Matrix3::new(0.5, 1.0, 0.0, 0.0, 0.3, 2.0, 0.0, 0.0, 0.1);
        let dm = DeformationMatrix::new(a);
        let rho = dm.density(2.0, 5.0).unwrap();
        let det = (Matrix3::identity() + a * 5.0).determinant();
        assert_relative_eq!(rho, 2.0 / det, max_relative = 1e-10);
    }

    #[test]
    fn density_simple_shear_constant() {
        let dm = DeformationMatrix::new(shear(1.0));
        for t in [1.0, 10.0, 100.0] {
            assert_relative_eq!(dm.density(1.3, t).unwrap(), 1.3, max_relative = 1e-11);
        }
    }

    #[test]
    fn density_dilatation_cubic() {
        let dm = DeformationMatrix::new(Matrix3::identity());
        let rho = dm.density(1.0, 3.0).unwrap();
        assert_relative_eq!(rho, 1.0 / 64.0, max_relative = 1e-10);
    }

    #[test]
    fn density_cylindrical_slope_two() {
        // two expanding directions: -log rho grows like 2 log t
        let a = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, 0.0));
        let dm = DeformationMatrix::new(a);
        let ts: Vec<f64> = (0..20).map(|i| 100.0 * 1.5f64.powi(i)).collect();
        let rhos: Vec<f64> = ts.iter().map(|&t| dm.density(1.0, t).unwrap()).collect();
        let slope = fit::loglog_slope(&ts, &rhos).unwrap();
        assert!((slope + 2.0).abs() < 0.01, "slope {slope}");
    }

    #[test]
    fn drift_examples() {
        let dm = DeformationMatrix::new(Matrix3::identity());
        let b = dm.drift_offset(Vector3::new(2.0, 0.0, -4.0), 1.0).unwrap();
        assert_relative_eq!(b, Vector3::new(1.0, 0.0, -2.0), max_relative = 1e-14);

        // nilpotent: resolvent truncates to I - tA
        let dm = DeformationMatrix::new(shear(3.0));
        let b0 = Vector3::new(1.0, 1.0, 0.0);
        let b = dm.drift_offset(b0, 2.0).unwrap();
        assert_relative_eq!(b, b0 - shear(3.0) * b0 * 2.0, max_relative = 1e-14);

        assert_eq!(
            dm.drift_offset(Vector3::zeros(), 5.0).unwrap(),
            Vector3::zeros()
        );
    }

    #[test]
    fn classify_homogeneous_dilatation() {
        let cls = classify_flow(&DeformationMatrix::new(Matrix3::identity())).unwrap();
        assert_eq!(cls.class, FlowClass::HomogeneousDilatation);
        assert!(cls.residual < 2.0, "residual {}", cls.residual);
    }

    #[test]
    fn classify_simple_shear() {
        let cls = classify_flow(&DeformationMatrix::new(shear(2.0))).unwrap();
        assert_eq!(cls.class, FlowClass::SimpleShear { k: 2.0 });
        assert!(cls.residual < 1e-10);
    }

    #[test]
    fn classify_combined_orthogonal_shear() {
        let mut a = Matrix3::zeros();
        a[(0, 1)] = 1.5; // K3
        a[(1, 2)] = 0.8; // K1
        let dm = DeformationMatrix::new(a);
        let cls = classify_flow(&dm).unwrap();
        match cls.class {
            FlowClass::CombinedOrthogonalShear { k1, k2, k3 } => {
                assert_relative_eq!(k1, 0.8, max_relative = 1e-10);
                assert_relative_eq!(k3, 1.5, max_relative = 1e-10);
                assert!(k2.abs() < 1e-10);
            }
            other => panic!("expected combined shear, got {other:?}"),
        }
        // secular growth of the corner entry: L(t)_{13} = -t K1 K3
        let l = dm.evolve_l(1e4).unwrap();
        assert_relative_eq!(l[(0, 2)], -1e4 * 0.8 * 1.5, max_relative = 1e-12);
        assert!(cls.residual < 1e-9);
    }

    #[test]
    fn classify_cylindrical_with_and_without_shear() {
        let mut a = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, 0.0));
        let cls = classify_flow(&DeformationMatrix::new(a)).unwrap();
        assert_eq!(cls.class, FlowClass::CylindricalDilatation);

        a[(0, 2)] = 0.7; // couples the neutral direction into the expanding plane
        let cls = classify_flow(&DeformationMatrix::new(a)).unwrap();
        match cls.class {
            FlowClass::CylindricalDilatationShear { k } => {
                assert_relative_eq!(k, 0.7, max_relative = 1e-9)
            }
            other => panic!("expected cylindrical shear, got {other:?}"),
        }
        assert!(cls.residual < 3.0);
    }

    #[test]
    fn classify_planar_shear() {
        let mut a = Matrix3::zeros();
        a[(2, 2)] = 1.0;
        a[(1, 2)] = 0.6;
        let cls = classify_flow(&DeformationMatrix::new(a)).unwrap();
        match cls.class {
            FlowClass::PlanarShear { k } => assert_relative_eq!(k, 0.6, max_relative = 1e-9),
            other => panic!("expected planar shear, got {other:?}"),
        }
    }

    #[test]
    fn classify_shear_with_decaying_dilatation() {
        let mut a = Matrix3::zeros();
        a[(0, 1)] = 1.2;
        a[(2, 2)] = 1.0;
        let cls = classify_flow(&DeformationMatrix::new(a)).unwrap();
        match cls.class {
            FlowClass::SimpleShearDecayingPlanar { k2 } => {
                assert_relative_eq!(k2, 1.2, max_relative = 1e-6)
            }
            other => panic!("expected decaying-planar case, got {other:?}"),
        }
        assert!(cls.residual < 3.0, "residual {}", cls.residual);
    }

    #[test]
    fn classification_rotation_invariant_for_dilatation() {
        // conjugating by a rotation must not change the dilatation cases
        let rot = nalgebra::Rotation3::from_euler_angles(0.3, -0.8, 1.1);
        let r = rot.matrix();
        let a = r * Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, 0.0)) * r.transpose();
        let cls = classify_flow(&DeformationMatrix::new(a)).unwrap();
        assert_eq!(cls.class, FlowClass::CylindricalDilatation);

        let a = r * Matrix3::identity() * r.transpose();
        let cls = classify_flow(&DeformationMatrix::new(a)).unwrap();
        assert_eq!(cls.class, FlowClass::HomogeneousDilatation);
    }

    #[test]
    fn residual_decays_like_inverse_square() {
        let a = Matrix3::from_diagonal(&Vector3::new(1.0, 2.0, 0.5));
        let dm = DeformationMatrix::new(a);
        let cls = classify_flow(&dm).unwrap();
        let order = residual_decay_order(&dm, &cls).unwrap().unwrap();
        assert!(order > 1.9, "decay order {order}");
    }

    #[test]
    fn near_nilpotent_still_classified() {
        // tiny perturbation of an order-3 nilpotent matrix; eigenvalue
        // methods scatter roots of size eps^{1/3} ~ 1e-5, rank floors do not
        let mut a = Matrix3::zeros();
        a[(0, 1)] = 1.0;
        a[(1, 2)] = 1.0;
        a[(0, 0)] = 1e-15;
        let cls = classify_flow(&DeformationMatrix::new(a)).unwrap();
        assert!(matches!(cls.class, FlowClass::CombinedOrthogonalShear { .. }));
    }

    #[test]
    fn energy_balance_zero_for_trivial_input() {
        let dm = DeformationMatrix::new(shear(1.0));
        let ts = [1.0, 2.0, 3.0];
        let ms = [Matrix3::zeros(); 3];
        let rho = [1.0; 3];
        let eps = [2.0; 3];
        let r = energy_balance_residual(&ts, &ms, &dm, &rho, &eps).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].1, 0.0);
    }
}
