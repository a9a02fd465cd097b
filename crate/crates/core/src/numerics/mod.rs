//! Quadrature and ODE integration used by the physics modules.

mod ode;
mod quadrature;

pub use ode::{Dopri5, Tolerance};
pub use quadrature::{gauss_legendre, try_integrate, GaussKronrod, Integral};
