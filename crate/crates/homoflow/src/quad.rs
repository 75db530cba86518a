//! Adaptive Gauss-Kronrod quadrature (real and complex) plus small helpers
//! for iterated multi-dimensional integrals.
//!
//! The 7/15-point pair gives a cheap embedded error estimate; subdivision is
//! plain bisection with per-half tolerance splitting. Integrable endpoint
//! singularities (|x|^g with g > -1) are handled by the recursion depth.

use num_complex::Complex64;

use crate::error::{Error, Result};

// Kronrod-15 abscissae on [0,1] side of [-1,1] (symmetric), QUADPACK values.
const XK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
// Embedded Gauss-7 weights (nodes XK[1], XK[3], XK[5], XK[7]).
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// One 15-point Kronrod panel over [a, b]: returns (integral, error estimate).
pub fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut ik = 0.0;
    let mut ig = 0.0;
    for i in 0..8 {
        let (fp, fm) = if i == 7 {
            let v = f(c);
            (v, 0.0)
        } else {
            (f(c + h * XK[i]), f(c - h * XK[i]))
        };
        let s = fp + fm;
        ik += WK[i] * s;
        if i % 2 == 1 {
            ig += WG[i / 2] * s;
        }
    }
    ik *= h;
    ig *= h;
    (ik, (ik - ig).abs())
}

fn gk15_c<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut ik = Complex64::new(0.0, 0.0);
    let mut ig = Complex64::new(0.0, 0.0);
    for i in 0..8 {
        let s = if i == 7 {
            f(c)
        } else {
            f(c + h * XK[i]) + f(c - h * XK[i])
        };
        ik += WK[i] * s;
        if i % 2 == 1 {
            ig += WG[i / 2] * s;
        }
    }
    ik *= h;
    ig *= h;
    (ik, (ik - ig).norm())
}

const MAX_PANELS: usize = 30_000;

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    err: f64,
}

// Worst-panel-first subdivision with a global error budget. Splitting the
// largest contributor concentrates panels at singular endpoints without the
// per-level tolerance starvation a plain bisection recursion suffers from.
fn adapt_core<T, F, G, N>(f: &mut F, panel: &mut G, norm: N, a: f64, b: f64, rel: f64) -> Result<T>
where
    T: Copy + std::ops::Add<Output = T>,
    F: FnMut(f64) -> T,
    G: FnMut(&mut F, f64, f64) -> (T, f64),
    N: Fn(T) -> f64,
{
    let (v0, e0) = panel(f, a, b);
    let mut panels = vec![Panel {
        a,
        b,
        value: v0,
        err: e0,
    }];
    loop {
        let mut total_err = 0.0;
        let mut estimate = panels[0].value;
        let mut worst = 0usize;
        for (i, p) in panels.iter().enumerate() {
            total_err += p.err;
            if i > 0 {
                estimate = estimate + p.value;
            }
            if p.err > panels[worst].err {
                worst = i;
            }
        }
        if total_err <= rel * norm(estimate).max(1e-300) + 1e-305 {
            return Ok(estimate);
        }
        if panels.len() >= MAX_PANELS {
            return Err(Error::QuadratureUnresolved(format!(
                "error {total_err:.3e} still above {:.3e} after {} panels",
                rel * norm(estimate),
                panels.len()
            )));
        }
        let p = panels.swap_remove(worst);
        let m = 0.5 * (p.a + p.b);
        if !(p.a < m && m < p.b) {
            // width at the floating-point floor; keep the panel, drop its error
            panels.push(Panel { err: 0.0, ..p });
            continue;
        }
        let (v1, e1) = panel(f, p.a, m);
        let (v2, e2) = panel(f, m, p.b);
        panels.push(Panel {
            a: p.a,
            b: m,
            value: v1,
            err: e1,
        });
        panels.push(Panel {
            a: m,
            b: p.b,
            value: v2,
            err: e2,
        });
    }
}

/// Adaptive integral of `f` over [a, b] to relative tolerance `rel`
/// (with a small absolute floor so that zero integrals terminate).
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, rel: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    adapt_core(&mut f, &mut gk15, |v: f64| v.abs(), a, b, rel)
}

/// Complex-valued adaptive integral over a real interval.
pub fn integrate_complex<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    rel: f64,
) -> Result<Complex64> {
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    adapt_core(&mut f, &mut gk15_c, |v: Complex64| v.norm(), a, b, rel)
}

/// Iterated 2D integral over a rectangle. Inner integrals run at a tighter
/// tolerance so the outer estimate stays meaningful.
pub fn integrate2<F: Fn(f64, f64) -> f64>(
    f: F,
    (ax, bx): (f64, f64),
    (ay, by): (f64, f64),
    rel: f64,
) -> Result<f64> {
    integrate(
        |x| integrate(|y| f(x, y), ay, by, rel * 0.1).unwrap_or(f64::NAN),
        ax,
        bx,
        rel,
    )
}

/// Iterated 3D integral over a box.
pub fn integrate3<F: Fn(f64, f64, f64) -> f64>(
    f: F,
    (ax, bx): (f64, f64),
    (ay, by): (f64, f64),
    (az, bz): (f64, f64),
    rel: f64,
) -> Result<f64> {
    integrate(
        |x| integrate2(|y, z| f(x, y, z), (ay, by), (az, bz), rel * 0.1).unwrap_or(f64::NAN),
        ax,
        bx,
        rel,
    )
}
