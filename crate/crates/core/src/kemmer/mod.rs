//! Kemmer–Duffin–Petiau formalism for the photon.
//!
//! The 10×10 spin-1 representation is stored with exact Gaussian-integer
//! entries. Rows and columns are ordered as the wavefunction
//!
//! ```text
//! ψᵀ = (−D_x, −D_y, −D_z, B_x, B_y, B_z, −m₀A_x, −m₀A_y, −m₀A_z, m₀A₀) / √(m₀c²)
//! ```
//!
//! so the four printed arrays split into 3+3+3+1 blocks. The metric is
//! diag(+1, −1, −1, −1) and γ projects onto the six field-strength slots.

mod evolution;
mod matrix;
mod observables;

pub use evolution::{
    constraint_residual, evolution_rhs, maxwell_rhs, DivergenceStencil, FieldGrid,
};
pub use matrix::{ExactMatrix, GaussInt, MatrixDump, DIM};
pub use observables::{
    assemble_psi, bilinear_energy, bilinear_poynting, bohm_velocity, charge_current,
    dkp_charge_current, energy_momentum, KemmerState,
};

use serde::{Deserialize, Serialize};

use matrix::gi;

/// Metric signature g_{μν}.
pub const METRIC: [i64; 4] = [1, -1, -1, -1];

/// Number of γ-projected (field) components.
pub const FIELD_SLOTS: usize = 6;

/// The β matrices with γ, η₀ and the metric.
#[derive(Debug, Clone, PartialEq)]
pub struct KemmerSet {
    pub beta: [ExactMatrix; 4],
    pub gamma: ExactMatrix,
    pub eta0: ExactMatrix,
    pub metric: [i64; 4],
    // Floating copies of the real matrices used by the bilinears.
    pub(crate) beta_tilde_f: [[[f64; DIM]; DIM]; 3],
    pub(crate) theta_f: [[[[f64; DIM]; DIM]; 4]; 4],
}

/// Printed arrays: iβ₁, iβ₂, iβ₃ (real) and β₀.
fn printed_arrays() -> [ExactMatrix; 4] {
    let ib1 = ExactMatrix::from_entries(&[
        (1, 10, gi(-1, 0)),
        (5, 9, gi(-1, 0)),
        (6, 8, gi(1, 0)),
        (8, 6, gi(1, 0)),
        (9, 5, gi(-1, 0)),
        (10, 1, gi(-1, 0)),
    ]);
    let ib2 = ExactMatrix::from_entries(&[
        (2, 10, gi(-1, 0)),
        (4, 9, gi(1, 0)),
        (6, 7, gi(-1, 0)),
        (7, 6, gi(-1, 0)),
        (9, 4, gi(1, 0)),
        (10, 2, gi(-1, 0)),
    ]);
    let ib3 = ExactMatrix::from_entries(&[
        (3, 10, gi(-1, 0)),
        (4, 8, gi(-1, 0)),
        (5, 7, gi(1, 0)),
        (7, 5, gi(1, 0)),
        (8, 4, gi(-1, 0)),
        (10, 3, gi(-1, 0)),
    ]);
    let b0 = ExactMatrix::from_entries(&[
        (1, 7, gi(0, -1)),
        (2, 8, gi(0, -1)),
        (3, 9, gi(0, -1)),
        (7, 1, gi(0, 1)),
        (8, 2, gi(0, 1)),
        (9, 3, gi(0, 1)),
    ]);
    [b0, ib1, ib2, ib3]
}

impl KemmerSet {
    /// β₀ as printed; β_i = (iβ_i)/i = −i·(iβ_i). γ = diag(1⁶, 0⁴) and
    /// η₀ = 2β₀² − 1.
    pub fn build() -> Self {
        let [b0, ib1, ib2, ib3] = printed_arrays();
        let minus_i = gi(0, -1);
        let beta = [
            b0,
            ib1.scale(minus_i),
            ib2.scale(minus_i),
            ib3.scale(minus_i),
        ];
        let gamma = ExactMatrix::diagonal([1, 1, 1, 1, 1, 1, 0, 0, 0, 0]);
        let eta0 = (beta[0] * beta[0]).scale(gi(2, 0)) - ExactMatrix::identity();

        let beta_tilde_f = [1, 2, 3].map(|i| commutator(&beta[0], &beta[i]).real_f64());
        let mut theta_f = [[[[0.0; DIM]; DIM]; 4]; 4];
        for mu in 0..4 {
            for nu in 0..4 {
                let kernel = theta_kernel(&beta, &eta0, &gamma, mu, nu);
                debug_assert!(kernel.is_real());
                theta_f[mu][nu] = kernel.real_f64();
            }
        }
        Self {
            beta,
            gamma,
            eta0,
            metric: METRIC,
            beta_tilde_f,
            theta_f,
        }
    }

    pub fn g(&self, mu: usize, nu: usize) -> i64 {
        if mu == nu {
            self.metric[mu]
        } else {
            0
        }
    }

    /// JSON-friendly dump of β₀..β₃, γ and η₀.
    pub fn dump(&self) -> Vec<MatrixDump> {
        let mut out: Vec<MatrixDump> = self
            .beta
            .iter()
            .enumerate()
            .map(|(mu, b)| MatrixDump {
                name: format!("beta{mu}"),
                entries: b.to_pairs(),
            })
            .collect();
        out.push(MatrixDump {
            name: "gamma".into(),
            entries: self.gamma.to_pairs(),
        });
        out.push(MatrixDump {
            name: "eta0".into(),
            entries: self.eta0.to_pairs(),
        });
        out
    }
}

impl Default for KemmerSet {
    fn default() -> Self {
        Self::build()
    }
}

fn commutator(a: &ExactMatrix, b: &ExactMatrix) -> ExactMatrix {
    a * b - b * a
}

// η₀(β_μβ_ν + β_νβ_μ − g_{μν})γ
fn theta_kernel(
    beta: &[ExactMatrix; 4],
    eta0: &ExactMatrix,
    gamma: &ExactMatrix,
    mu: usize,
    nu: usize,
) -> ExactMatrix {
    let g = if mu == nu { METRIC[mu] } else { 0 };
    let sym = beta[mu] * beta[nu] + beta[nu] * beta[mu] - ExactMatrix::identity().scale(gi(g, 0));
    &(eta0 * &sym) * gamma
}

/// β̃_i = β₀β_i − β_iβ₀ for spatial index i ∈ {1, 2, 3}.
pub fn beta_tilde(set: &KemmerSet, i: usize) -> ExactMatrix {
    assert!(
        (1..=3).contains(&i),
        "spatial index must be 1, 2 or 3, got {i}"
    );
    commutator(&set.beta[0], &set.beta[i])
}

/// An index triple for which the trilinear relation fails.
#[derive(Debug, Clone, PartialEq)]
pub struct TripleFailure {
    pub mu: usize,
    pub nu: usize,
    pub lambda: usize,
    pub residual: ExactMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraReport {
    pub checked: usize,
    pub failures: Vec<TripleFailure>,
}

impl AlgebraReport {
    pub fn passed(&self) -> usize {
        self.checked - self.failures.len()
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks β_μβ_νβ_λ + β_λβ_νβ_μ = β_μ g_{νλ} + β_λ g_{νμ} for all 64 triples.
pub fn verify_algebra(set: &KemmerSet) -> AlgebraReport {
    let mut failures = Vec::new();
    let mut checked = 0;
    for mu in 0..4 {
        for nu in 0..4 {
            for lambda in 0..4 {
                checked += 1;
                let b = &set.beta;
                let lhs = (b[mu] * b[nu]) * b[lambda] + (b[lambda] * b[nu]) * b[mu];
                let rhs =
                    b[mu].scale(gi(set.g(nu, lambda), 0)) + b[lambda].scale(gi(set.g(nu, mu), 0));
                let residual = lhs - rhs;
                if !residual.is_zero() {
                    failures.push(TripleFailure {
                        mu,
                        nu,
                        lambda,
                        residual,
                    });
                }
            }
        }
    }
    AlgebraReport { checked, failures }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub passed: bool,
}

/// The remaining exact identities: γ² = γ, γβ_μ + β_μγ = β_μ, η₀ = 2β₀² − 1,
/// η₀² = 1, β₀³ = β₀, zero diagonals and reality of β̃_i.
pub fn verify_identities(set: &KemmerSet) -> Vec<IdentityCheck> {
    let mut checks = Vec::new();
    let mut push = |name: String, passed: bool| checks.push(IdentityCheck { name, passed });
    let g = &set.gamma;
    push("gamma^2 = gamma".into(), g * g == *g);
    for (mu, b) in set.beta.iter().enumerate() {
        push(
            format!("gamma beta{mu} + beta{mu} gamma = beta{mu}"),
            g * b + b * g == *b,
        );
    }
    let b0 = &set.beta[0];
    let b0sq = b0 * b0;
    push(
        "eta0 = 2 beta0^2 - 1".into(),
        set.eta0 == b0sq.scale(gi(2, 0)) - ExactMatrix::identity(),
    );
    push(
        "eta0^2 = 1".into(),
        set.eta0 * set.eta0 == ExactMatrix::identity(),
    );
    push("beta0^3 = beta0".into(), &b0sq * b0 == *b0);
    for (mu, b) in set.beta.iter().enumerate() {
        push(format!("beta{mu} has zero diagonal"), b.diagonal_is_zero());
    }
    for i in 1..=3 {
        push(
            format!("beta_tilde{i} is real"),
            beta_tilde(set, i).is_real(),
        );
    }
    checks
}
