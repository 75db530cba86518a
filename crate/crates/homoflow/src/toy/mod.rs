//! The simplified shear-and-collision model in log coordinates.
//!
//! One particle carries (rho, zeta): zeta grows linearly between collisions,
//! a collision multiplies rho by zeta and resets zeta to 1, and the
//! collision rate eps(t) is either prescribed or coupled back to a negative
//! moment of the population. Everything here works on the collision-trace
//! density Phi(t, X) with X = log rho, and on its exponential moments
//! lambda_beta(t) = int e^{beta X} Phi dX, which obey Volterra equations in
//! time with the shear kernel (1 + xi)^{beta - 1}.

mod adiabatic;
mod field;
mod profile;
mod selfconsistent;
mod volterra;

pub use adiabatic::{adiabatic_check, AdiabaticReport};
pub use field::{reconstruct_total_moment, solve_field, ToyField};
pub use profile::InitialProfile;
pub use selfconsistent::solve_selfconsistent;
pub use volterra::{solve_lambda_volterra, ToyMomentSeries};

pub(crate) use volterra::kernel_cell_weights;
