//! WKB solutions of d²Y/dx² + (ω²/c²)ε(x)Y = 0.
//!
//! Pass-band fields oscillate with phase ∫k dx; gap fields are the mapped
//! (x → −ix, t → −it) solutions with attenuation ∫κ dx. Fields are real: the
//! complex exponentials of the textbook form are reduced with real c₁, c₂.

use crate::dielectric::DielectricProfile;
use crate::error::{Error, Result};
use crate::numerics::{try_integrate, GaussKronrod};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WkbKind {
    Oscillating,
    Evanescent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WkbSolution {
    pub kind: WkbKind,
    pub c1: f64,
    pub c2: f64,
    pub omega: f64,
    pub c: f64,
    pub profile: DielectricProfile,
}

impl WkbSolution {
    pub fn new(
        kind: WkbKind,
        c1: f64,
        c2: f64,
        omega: f64,
        c: f64,
        profile: DielectricProfile,
    ) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::invalid(
                "wkb",
                format!("omega must be positive, got {omega}"),
            ));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::invalid(
                "wkb",
                format!("c must be positive, got {c}"),
            ));
        }
        if kind == WkbKind::Evanescent {
            profile.validate().into_result()?;
        }
        Ok(Self {
            kind,
            c1,
            c2,
            omega,
            c,
            profile,
        })
    }

    /// Field value for whichever branch this solution describes.
    pub fn field(&self, x: f64, t: f64) -> Result<f64> {
        match self.kind {
            WkbKind::Oscillating => oscillating_field(self, x, t),
            WkbKind::Evanescent => evanescent_field(self, x, t),
        }
    }
}

fn quadrature() -> GaussKronrod {
    GaussKronrod::with_rel_tol(1e-12)
}

// Signed ∫_{x0}^{x1} f; callers that require x0 ≤ x1 check it themselves.
fn signed_integral<F>(f: F, x0: f64, x1: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    try_integrate(&quadrature(), f, x0, x1)
}

fn ordered(x0: f64, x1: f64) -> Result<()> {
    if x0 <= x1 {
        Ok(())
    } else {
        Err(Error::invalid(
            "wkb",
            format!("integration limits out of order: {x0} > {x1}"),
        ))
    }
}

/// ∫_{x0}^{x1} (ω/c)√ε(x) dx.
pub fn phase_integral(
    profile: &DielectricProfile,
    x0: f64,
    x1: f64,
    omega: f64,
    c: f64,
) -> Result<f64> {
    ordered(x0, x1)?;
    signed_integral(|x| Ok(profile.wavenumber(x, omega, c)), x0, x1)
}

/// ∫_{x0}^{x1} κ(x) dx with κ = (ω/c)√ε(−ix).
pub fn attenuation_integral(
    profile: &DielectricProfile,
    x0: f64,
    x1: f64,
    omega: f64,
    c: f64,
) -> Result<f64> {
    ordered(x0, x1)?;
    signed_integral(|x| profile.kappa(x, omega, c), x0, x1)
}

/// Real oscillating field k^{-1/2}(c₁+c₂)cos(∫₀ˣk dx − ωt).
///
/// The complex form k^{-1/2}[c₁e^{−iθ} + c₂e^{iθ}] with θ = ∫₀ˣk dx − ωt has
/// real part (c₁+c₂)cos θ for real c₁, c₂; that part is returned.
pub fn oscillating_field(sol: &WkbSolution, x: f64, t: f64) -> Result<f64> {
    if sol.kind != WkbKind::Oscillating {
        return Err(Error::invalid("wkb", "solution is not of oscillating kind"));
    }
    let k = sol.profile.wavenumber(x, sol.omega, sol.c);
    let theta = signed_integral(|s| Ok(sol.profile.wavenumber(s, sol.omega, sol.c)), 0.0, x)?
        - sol.omega * t;
    Ok((sol.c1 + sol.c2) * theta.cos() / k.sqrt())
}

/// κ^{-1/2}[c₁exp(−∫₀ˣκ dx + ωt) + c₂exp(∫₀ˣκ dx − ωt)].
pub fn evanescent_field(sol: &WkbSolution, x: f64, t: f64) -> Result<f64> {
    if sol.kind != WkbKind::Evanescent {
        return Err(Error::invalid("wkb", "solution is not of evanescent kind"));
    }
    let kappa = sol.profile.kappa(x, sol.omega, sol.c)?;
    let s = signed_integral(|s| sol.profile.kappa(s, sol.omega, sol.c), 0.0, x)? - sol.omega * t;
    Ok((sol.c1 * (-s).exp() + sol.c2 * s.exp()) / kappa.sqrt())
}

/// |ε′(x)|·(2π/k(x))/ε(x): relative change of ε over one local wavelength.
pub fn wkb_validity(profile: &DielectricProfile, omega: f64, c: f64, x: f64) -> f64 {
    let eps = profile.eval_eps(x);
    let k = profile.wavenumber(x, omega, c);
    profile.eval_eps_derivative(x).abs() * (2.0 * std::f64::consts::PI / k) / eps
}

/// Max over `samples` points in [x0, x1] of the residual of the governing
/// equation at t = 0, relative to max|q·Y|: Y″ + qY for the oscillating
/// branch (q = k²) and Y″ − qY for the evanescent one (q = κ²). Y″ uses a
/// five-point stencil with step 0.02·c/ω.
pub fn substitution_residual(sol: &WkbSolution, x0: f64, x1: f64, samples: usize) -> Result<f64> {
    ordered(x0, x1)?;
    if samples < 2 {
        return Err(Error::invalid("wkb", "residual needs at least two samples"));
    }
    let h = 0.02 * sol.c / sol.omega;
    let k2 = |x: f64| -> Result<f64> {
        match sol.kind {
            WkbKind::Oscillating => Ok(sol.profile.wavenumber(x, sol.omega, sol.c).powi(2)),
            WkbKind::Evanescent => Ok(-sol.profile.kappa(x, sol.omega, sol.c)?.powi(2)),
        }
    };
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..samples {
        let x = x0 + (x1 - x0) * i as f64 / (samples - 1) as f64;
        let y = |dx: f64| sol.field(x + dx, 0.0);
        let d2 = (-y(2.0 * h)? + 16.0 * y(h)? - 30.0 * y(0.0)? + 16.0 * y(-h)? - y(-2.0 * h)?)
            / (12.0 * h * h);
        let qy = k2(x)? * y(0.0)?;
        worst = worst.max((d2 + qy).abs());
        scale = scale.max(qy.abs());
    }
    if scale == 0.0 {
        return Ok(worst);
    }
    Ok(worst / scale)
}
