//! Numerical laboratory for superluminal evanescent-wave tunneling through
//! inhomogeneous dielectric band-gap media.
//!
//! The crate is organised bottom-up:
//!
//! * [`dielectric`] holds even-power permittivity profiles ε(x) and their real
//!   continuation ε_c(x) = ε(−ix).
//! * [`wkb`] evaluates oscillating and evanescent WKB fields.
//! * [`matching`] joins an incident Gaussian packet, the barrier solution and the
//!   transmitted packet.
//! * [`transport`] computes Poynting flux, energy density, energy-transport
//!   velocity and the tunneling time.
//! * [`kemmer`] builds the 10×10 Kemmer β matrices with exact arithmetic and the
//!   photon bilinears.
//! * [`fdtd`] and [`tmm`] are independent solvers used as cross-checks.
//!
//! All quantities are in natural units with a configurable speed of light `c`.

pub mod dielectric;
pub mod error;
pub mod fdtd;
pub mod kemmer;
pub mod matching;
pub mod numerics;
pub mod tmm;
pub mod transport;
pub mod wkb;

pub use dielectric::{DielectricProfile, ProfileForm, ValidationReport};
pub use error::{Error, Result};

/// Default speed of light in natural units.
pub const DEFAULT_C: f64 = 1.0;
