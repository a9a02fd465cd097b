//! Three-region wave-packet solution: incident and reflected Gaussian packet
//! for x ≤ 0, evanescent field in the barrier, transmitted packet for x ≥ d.
//!
//! The carrier frequency is ω₀ = c·k₀ and the barrier decay constant is
//! κ(x) = k₀√ε_c(x). The medium is non-magnetic with μ = 1, so H = B.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::dielectric::DielectricProfile;
use crate::error::{Error, Result};
use crate::numerics::{gauss_legendre, try_integrate, GaussKronrod};
use crate::transport::tunneling_time;

/// Gauss–Legendre nodes used for the superposition over k.
pub const PACKET_NODES: usize = 4096;
/// Half-width of the k-range in units of σ.
pub const PACKET_SPAN_SIGMAS: f64 = 10.0;
/// Default σ/k₀.
pub const NARROW_BAND_RATIO: f64 = 0.02;

fn packet_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PACKET_NODES))
}

/// Gaussian spectral amplitude A(k) = exp[−(k−k₀)²/2σ²]/√(2πσ²).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavePacket {
    pub k0: f64,
    pub sigma: f64,
}

impl WavePacket {
    pub fn new(k0: f64, sigma: f64) -> Result<Self> {
        if !(k0 > 0.0 && k0.is_finite()) {
            return Err(Error::invalid(
                "matching",
                format!("k0 must be positive, got {k0}"),
            ));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::invalid(
                "matching",
                format!("sigma must be positive, got {sigma}"),
            ));
        }
        Ok(Self { k0, sigma })
    }

    /// σ = 0.02·k₀.
    pub fn narrow_band(k0: f64) -> Result<Self> {
        Self::new(k0, NARROW_BAND_RATIO * k0)
    }

    pub fn amplitude(&self, k: f64) -> f64 {
        let u = (k - self.k0) / self.sigma;
        (-0.5 * u * u).exp() / (2.0 * PI * self.sigma * self.sigma).sqrt()
    }

    /// ∫A(k)f(k)dk over k₀ ± 10σ by 4096-node Gauss–Legendre.
    pub fn superpose<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let (nodes, weights) = packet_rule();
        let half = PACKET_SPAN_SIGMAS * self.sigma;
        nodes
            .iter()
            .zip(weights)
            .map(|(&u, &w)| {
                let k = self.k0 + half * u;
                w * self.amplitude(k) * f(k)
            })
            .sum::<f64>()
            * half
    }
}

/// Phase φ and barrier amplitude C from matching at x = 0, t = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeftMatch {
    pub phi: f64,
    pub amplitude: f64,
}

/// Exit phase χ and √T from matching at x = d, t = τ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RightMatch {
    pub chi: f64,
    pub sqrt_t: f64,
}

fn check_reflectance(r: f64) -> Result<()> {
    if (0.0..1.0).contains(&r) {
        Ok(())
    } else {
        Err(Error::invalid(
            "matching",
            format!("reflection coefficient must lie in [0, 1), got {r}"),
        ))
    }
}

fn barrier_kappa(profile: &DielectricProfile, k0: f64, x: f64) -> Result<f64> {
    Ok(k0 * profile.sqrt_continued(x)?)
}

/// tan φ = κ(0)/k₀ and C = √κ(0)(1 − √R)cos φ.
pub fn match_left(profile: &DielectricProfile, k0: f64, r: f64) -> Result<LeftMatch> {
    check_reflectance(r)?;
    let kappa0 = barrier_kappa(profile, k0, 0.0)?;
    let phi = (kappa0 / k0).atan();
    Ok(LeftMatch {
        phi,
        amplitude: kappa0.sqrt() * (1.0 - r.sqrt()) * phi.cos(),
    })
}

/// tan χ = κ(d)/k₀ and
/// √T = [√κ(0)(1 − √R)cos φ/√κ(d)]·sec χ·exp[−∫₀ᵈκ dx + ω₀τ].
pub fn match_right(
    profile: &DielectricProfile,
    k0: f64,
    r: f64,
    tau: f64,
    c: f64,
) -> Result<RightMatch> {
    let left = match_left(profile, k0, r)?;
    let d = profile.width();
    let kappa_d = barrier_kappa(profile, k0, d)?;
    let chi = (kappa_d / k0).atan();
    let exponent = -attenuation(profile, k0, d)? + c * k0 * tau;
    Ok(RightMatch {
        chi,
        sqrt_t: left.amplitude / kappa_d.sqrt() / chi.cos() * exponent.exp(),
    })
}

fn attenuation(profile: &DielectricProfile, k0: f64, x: f64) -> Result<f64> {
    try_integrate(
        &GaussKronrod::with_rel_tol(1e-12),
        |s| barrier_kappa(profile, k0, s),
        0.0,
        x,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Incident,
    Barrier,
    Transmitted,
}

impl Region {
    pub fn as_str(&self) -> &'static str {
        match self {
            Region::Incident => "incident",
            Region::Barrier => "barrier",
            Region::Transmitted => "transmitted",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub e_z: f64,
    pub h_y: f64,
    pub region: Region,
}

/// Fully matched three-region solution.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchedSolution {
    pub phi: f64,
    /// Barrier amplitude C.
    pub amplitude: f64,
    pub chi: f64,
    pub reflectance: f64,
    pub sqrt_t: f64,
    pub tau: f64,
    pub c: f64,
    pub profile: DielectricProfile,
    pub packet: WavePacket,
}

// θ(s): the barrier switches on at t = 0, the transmitted packet at t = τ.
fn step(s: f64) -> f64 {
    if s >= 0.0 {
        1.0
    } else {
        0.0
    }
}

impl MatchedSolution {
    pub fn new(
        profile: DielectricProfile,
        packet: WavePacket,
        reflectance: f64,
        c: f64,
    ) -> Result<Self> {
        check_reflectance(reflectance)?;
        let tau = tunneling_time(&profile, c)?.tau;
        let left = match_left(&profile, packet.k0, reflectance)?;
        let right = match_right(&profile, packet.k0, reflectance, tau, c)?;
        Ok(Self {
            phi: left.phi,
            amplitude: left.amplitude,
            chi: right.chi,
            reflectance,
            sqrt_t: right.sqrt_t,
            tau,
            c,
            profile,
            packet,
        })
    }

    pub fn transmittance(&self) -> f64 {
        self.sqrt_t * self.sqrt_t
    }

    pub fn omega0(&self) -> f64 {
        self.c * self.packet.k0
    }

    pub fn region(&self, x: f64) -> Region {
        if x < 0.0 {
            Region::Incident
        } else if x <= self.profile.width() {
            Region::Barrier
        } else {
            Region::Transmitted
        }
    }

    /// (E_z, H_y) at (x, t). The boundaries x = 0 and x = d belong to the
    /// barrier.
    pub fn region_fields(&self, x: f64, t: f64) -> Result<FieldSample> {
        let region = self.region(x);
        let (e_z, h_y) = match region {
            Region::Incident => self.incident(x, t),
            Region::Barrier => self.barrier(x, t)?,
            Region::Transmitted => self.transmitted(x, t),
        };
        Ok(FieldSample { e_z, h_y, region })
    }

    fn incident(&self, x: f64, t: f64) -> (f64, f64) {
        let c = self.c;
        let phi = self.phi;
        let sqrt_r = self.reflectance.sqrt();
        let forward = self.packet.superpose(|k| (k * x - c * k * t - phi).cos());
        let backward = self.packet.superpose(|k| (k * x + c * k * t + phi).cos());
        // A right-moving wave carries H_y = −E_z; the reflected wave, which
        // enters E_z with a minus sign, carries H_y = −√R·cos(...).
        (forward - sqrt_r * backward, -forward - sqrt_r * backward)
    }

    fn barrier(&self, x: f64, t: f64) -> Result<(f64, f64)> {
        if step(t) == 0.0 {
            return Ok((0.0, 0.0));
        }
        let k0 = self.packet.k0;
        let kappa = barrier_kappa(&self.profile, k0, x)?;
        let envelope = (-attenuation(&self.profile, k0, x)? + self.omega0() * t).exp();
        let e_z = self.amplitude / kappa.sqrt() * envelope;
        let h_y = -self.amplitude * kappa.sqrt() * (self.c / self.omega0()) * envelope;
        Ok((e_z, h_y))
    }

    fn transmitted(&self, x: f64, t: f64) -> (f64, f64) {
        if step(t - self.tau) == 0.0 {
            return (0.0, 0.0);
        }
        let (c, d, tau, chi) = (self.c, self.profile.width(), self.tau, self.chi);
        let e = self.sqrt_t
            * self
                .packet
                .superpose(|k| (k * (x - d) - c * k * (t - tau) + chi).cos());
        (e, -e)
    }
}
