//! Energy flux, energy density, energy-transport velocity and tunneling time
//! in the evanescent region.

use serde::{Deserialize, Serialize};

use crate::dielectric::DielectricProfile;
use crate::error::{Error, Result};
use crate::numerics::{try_integrate, Dopri5, GaussKronrod, Tolerance};

/// Points at which the velocity profile is sampled in [`TransportResult`].
pub const VELOCITY_SAMPLES: usize = 65;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportResult {
    pub tau: f64,
    /// d/c.
    pub tau_vacuum: f64,
    pub superluminal: bool,
    /// (x, v(x)) on a uniform grid over [0, d].
    pub velocity: Vec<(f64, f64)>,
}

impl TransportResult {
    /// τc/d: below 1 for superluminal traversal.
    pub fn ratio(&self) -> f64 {
        self.tau / self.tau_vacuum
    }
}

/// S_x = −c E_z H_y.
pub fn poynting(e_z: f64, h_y: f64, c: f64) -> f64 {
    -c * e_z * h_y
}

/// ½(ε_c E_z² + H_y²).
pub fn energy_density(eps_c: f64, e_z: f64, h_y: f64) -> f64 {
    debug_assert!(eps_c > 0.0);
    0.5 * (eps_c * e_z * e_z + h_y * h_y)
}

/// v(x) = c/√ε_c(x).
pub fn transport_velocity(profile: &DielectricProfile, x: f64, c: f64) -> Result<f64> {
    Ok(c / profile.sqrt_continued(x)?)
}

/// τ = ∫₀ᵈ dx/v(x) = (1/c)∫₀ᵈ √ε_c(x) dx.
pub fn tunneling_time(profile: &DielectricProfile, c: f64) -> Result<TransportResult> {
    check_c(c)?;
    profile.validate().into_result()?;
    let d = profile.width();
    let integral = try_integrate(
        &GaussKronrod::with_rel_tol(1e-12),
        |x| profile.sqrt_continued(x),
        0.0,
        d,
    )?;
    let tau = integral / c;
    let tau_vacuum = d / c;
    let velocity = (0..VELOCITY_SAMPLES)
        .map(|i| {
            let x = d * i as f64 / (VELOCITY_SAMPLES - 1) as f64;
            transport_velocity(profile, x, c).map(|v| (x, v))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TransportResult {
        tau,
        tau_vacuum,
        superluminal: tau < tau_vacuum,
        velocity,
    })
}

/// Closed form τ = d/c − a d³/(3c) for √ε_c = 1 − a x².
pub fn analytic_tau(a: f64, d: f64, c: f64) -> Result<f64> {
    check_c(c)?;
    if !(d > 0.0) {
        return Err(Error::invalid(
            "transport",
            format!("width must be positive, got {d}"),
        ));
    }
    if a * d * d >= 1.0 {
        return Err(Error::domain(
            "transport",
            format!("a·d² = {} ≥ 1: √ε_c vanishes inside the barrier", a * d * d),
        ));
    }
    Ok(d / c - a * d.powi(3) / (3.0 * c))
}

/// Transit time from the guidance law dx/dt = v(x), integrated as an ODE
/// from x = 0 until x = d.
pub fn bohm_transit_time(profile: &DielectricProfile, c: f64) -> Result<f64> {
    bohm_transit_time_with(profile, c, Tolerance::default())
}

pub fn bohm_transit_time_with(profile: &DielectricProfile, c: f64, tol: Tolerance) -> Result<f64> {
    check_c(c)?;
    profile.validate().into_result()?;
    let d = profile.width();
    let ode = Dopri5::new(tol);
    // Runge-Kutta stages may probe outside [0, d], where the continuation
    // need not stay positive. The trajectory itself never leaves the
    // barrier before the crossing, so the field is frozen at the ends.
    ode.time_to_reach(
        |_, x| transport_velocity(profile, x.clamp(0.0, d), c),
        0.0,
        0.0,
        d,
        d / (50.0 * c),
    )
}

fn check_c(c: f64) -> Result<()> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(
            "transport",
            format!("c must be positive, got {c}"),
        ))
    }
}
