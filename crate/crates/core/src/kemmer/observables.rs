//! Bilinear observables of the photon wavefunction.
//!
//! In a medium with continued permittivity ε_c the D slots carry √ε_c·E, so
//! the γ-bilinear gives ½(ε_c E² + H²), and the velocity operator
//! (c/√ε_c)β̃_i turns the flux bilinear into c(E×H).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::{GaussInt, DIM};
use super::{KemmerSet, FIELD_SLOTS};
use crate::error::{Error, Result};

/// Real ten-component photon wavefunction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KemmerState {
    pub psi: [f64; DIM],
    /// Mass parameter m₀; drops out of every observable.
    pub m0: f64,
    pub c: f64,
}

impl KemmerState {
    pub fn new(psi: [f64; DIM], m0: f64, c: f64) -> Result<Self> {
        if !(m0 > 0.0 && c > 0.0) {
            return Err(Error::invalid("kemmer", "m0 and c must be positive"));
        }
        Ok(Self { psi, m0, c })
    }

    pub fn rest_energy(&self) -> f64 {
        self.m0 * self.c * self.c
    }

    /// γψ: the six field slots, the rest zeroed.
    pub fn projected(&self) -> [f64; DIM] {
        let mut out = [0.0; DIM];
        out[..FIELD_SLOTS].copy_from_slice(&self.psi[..FIELD_SLOTS]);
        out
    }
}

/// ψ = (−√ε_c E, H, 0, 0, 0, 0)/√(m₀c²).
pub fn assemble_psi(e: [f64; 3], h: [f64; 3], eps_c: f64, m0: f64, c: f64) -> Result<KemmerState> {
    if !(eps_c > 0.0) {
        return Err(Error::domain(
            "kemmer",
            format!("eps_c must be positive, got {eps_c}"),
        ));
    }
    let norm = 1.0 / (m0 * c * c).sqrt();
    let n = eps_c.sqrt();
    let mut psi = [0.0; DIM];
    for k in 0..3 {
        psi[k] = -n * e[k] * norm;
        psi[3 + k] = h[k] * norm;
    }
    KemmerState::new(psi, m0, c)
}

fn quadratic(m: &[[f64; DIM]; DIM], u: &[f64; DIM], v: &[f64; DIM]) -> f64 {
    let mut s = 0.0;
    for i in 0..DIM {
        if u[i] == 0.0 {
            continue;
        }
        let row: f64 = (0..DIM).map(|j| m[i][j] * v[j]).sum();
        s += u[i] * row;
    }
    s
}

fn gamma_norm(state: &KemmerState) -> f64 {
    state.psi[..FIELD_SLOTS].iter().map(|v| v * v).sum()
}

/// 𝓔 = (m₀c²/2)ψᵀγψ.
pub fn bilinear_energy(_set: &KemmerSet, state: &KemmerState) -> f64 {
    0.5 * state.rest_energy() * gamma_norm(state)
}

fn flux_forms(set: &KemmerSet, state: &KemmerState) -> [f64; 3] {
    let gpsi = state.projected();
    [0, 1, 2].map(|i| quadratic(&set.beta_tilde_f[i], &gpsi, &gpsi))
}

/// S_i = (m₀c³/2)(1/√ε_c)ψᵀγβ̃_iγψ, which equals c(E×H)_i for states built
/// by [`assemble_psi`].
pub fn bilinear_poynting(set: &KemmerSet, state: &KemmerState, eps_c: f64) -> Result<[f64; 3]> {
    if !(eps_c > 0.0) {
        return Err(Error::domain(
            "kemmer",
            format!("eps_c must be positive, got {eps_c}"),
        ));
    }
    let scale = 0.5 * state.rest_energy() * state.c / eps_c.sqrt();
    Ok(flux_forms(set, state).map(|f| scale * f))
}

/// v_i = (c/√ε_c)·ψᵀγβ̃_iγψ / ψᵀγψ.
pub fn bohm_velocity(set: &KemmerSet, state: &KemmerState, eps_c: f64) -> Result<[f64; 3]> {
    if !(eps_c > 0.0) {
        return Err(Error::domain(
            "kemmer",
            format!("eps_c must be positive, got {eps_c}"),
        ));
    }
    let norm = gamma_norm(state);
    if norm == 0.0 {
        return Err(Error::domain(
            "kemmer",
            "Bohm velocity undefined for a null state",
        ));
    }
    let scale = state.c / eps_c.sqrt() / norm;
    Ok(flux_forms(set, state).map(|f| scale * f))
}

/// Charge current ψᵀβ_μγψ of a photon state.
pub fn charge_current(set: &KemmerSet, state: &KemmerState, mu: usize) -> Complex64 {
    let gpsi = state.projected();
    let beta = &set.beta[mu];
    let mut sum = Complex64::new(0.0, 0.0);
    for (i, &pi) in state.psi.iter().enumerate() {
        for (j, &pj) in gpsi.iter().enumerate() {
            let b = beta.get(i, j);
            if b.re != 0 || b.im != 0 {
                sum += Complex64::new(b.re as f64, b.im as f64) * pi * pj;
            }
        }
    }
    sum
}

/// Kemmer charge current ψ̄β_μψ = ψ†η₀β_μψ of a general ten-component
/// column, in exact arithmetic. η₀β_μ is antisymmetric, so this vanishes for
/// every real column.
pub fn dkp_charge_current(set: &KemmerSet, psi: &[GaussInt; DIM], mu: usize) -> GaussInt {
    let kernel = set.eta0 * set.beta[mu];
    let image = kernel.apply(psi);
    psi.iter()
        .zip(image.iter())
        .map(|(p, v)| p.conj() * v)
        .sum()
}

/// Θ_{μν} = −(m₀c²/2)ψ̄(β_μβ_ν + β_νβ_μ − g_{μν})γψ with ψ̄ = ψᵀη₀.
pub fn energy_momentum(set: &KemmerSet, state: &KemmerState, mu: usize, nu: usize) -> f64 {
    -0.5 * state.rest_energy() * quadratic(&set.theta_f[mu][nu], &state.psi, &state.psi)
}
