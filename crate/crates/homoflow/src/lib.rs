//! Numerical laboratory for homoenergetic gas flows in the regime where the
//! affine mean-flow transport term dominates the collision operator.
//!
//! The library covers, end to end:
//!
//! * classification of the long-time mean-flow matrix `L(t)` generated by an
//!   initial condition `A` ([`flow`]), together with blow-up horizons and
//!   density factors;
//! * the closed second-moment system for Maxwell molecules under simple shear
//!   and its renormalized long-time integration ([`collision`]);
//! * a graph-based growth-exponent engine for linear ODE systems whose
//!   coupling coefficients are constant or grow linearly in time ([`wkb`]);
//! * a shear-and-collision toy model: Volterra moment equations, the full
//!   collision-trace field, a self-consistent nonlinear rate, adiabatic
//!   regimes ([`toy`]), the Laplace-symbol dispersion relation whose roots
//!   predict the growth rates ([`dispersion`]), and an event-driven Monte
//!   Carlo simulation of the same particle system ([`mc`]);
//! * closed-form free flows for the frozen-collision regimes and decay-rate
//!   estimators for the collision frequency ([`frozen`]);
//! * entropy-per-particle diagnostics exposing the "energy grows, entropy
//!   does not" signature of these flows ([`entropy`]).
//!
//! Everything is deterministic: quadratures and ODE marches are adaptive with
//! fixed tolerances, and the Monte Carlo module derives per-particle RNG
//! streams from `(seed, particle index)` so results are reproducible across
//! thread counts.

pub mod collision;
pub mod dispersion;
pub mod entropy;
pub mod error;
pub mod fit;
pub mod flow;
pub mod frozen;
pub mod mc;
pub mod ode;
pub mod quad;
pub mod toy;
pub mod wkb;

pub use error::{Error, Result};

/// Crate version, recorded in run manifests by downstream tools.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
