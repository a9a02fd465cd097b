//! Seeded randomized suites shared by `kemmer-verify` and the acceptance run.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use evsim_core::kemmer::{
    assemble_psi, bilinear_energy, bilinear_poynting, charge_current, dkp_charge_current,
    evolution_rhs, maxwell_rhs, FieldGrid, GaussInt, KemmerSet, DIM,
};
use evsim_core::{DielectricProfile, ProfileForm, Result};

const MAX_DRAWS: usize = 100_000;

/// `count` valid profiles with a positive a₂, drawn by rejection from a mix
/// of both forms, widths in [0.3, 2] and up to three even terms.
pub fn random_profiles(seed: u64, count: usize) -> Vec<DielectricProfile> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..MAX_DRAWS {
        if out.len() == count {
            break;
        }
        let d: f64 = rng.random_range(0.3..2.0);
        let form = if rng.random_bool(0.5) {
            ProfileForm::Permittivity
        } else {
            ProfileForm::SqrtPermittivity
        };
        let mut terms = vec![(2, rng.random_range(0.01..0.9) / (d * d))];
        if rng.random_bool(0.5) {
            terms.push((4, rng.random_range(-0.2..0.2) / d.powi(4)));
        }
        if rng.random_bool(0.5) {
            terms.push((6, rng.random_range(0.0..0.2) / d.powi(6)));
        }
        if let Ok(p) = DielectricProfile::new(form, terms, d) {
            if p.validate().ok {
                out.push(p);
            }
        }
    }
    assert_eq!(
        out.len(),
        count,
        "profile sampler exhausted its draw budget"
    );
    out
}

/// Worst deviations of the Kemmer bilinears from the classical formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BilinearSummary {
    pub states: usize,
    /// max |𝓔 − ½(ε_c E² + H²)| / max(1, ½(ε_c E² + H²)).
    pub energy_error: f64,
    /// max |S − c E×H| / max(1, c|E||H|).
    pub poynting_error: f64,
    /// Number of photon states with any ψᵀβ_μγψ ≠ 0.
    pub nonzero_photon_currents: usize,
    /// Number of real integer columns with any ψ̄β_μψ ≠ 0.
    pub nonzero_real_currents: usize,
}

impl BilinearSummary {
    pub fn passed(&self, tol: f64) -> bool {
        self.energy_error <= tol
            && self.poynting_error <= tol
            && self.nonzero_photon_currents == 0
            && self.nonzero_real_currents == 0
    }
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Compares the bilinears with the classical energy density and Poynting
/// vector over random field states, and checks that the charge current of
/// real states vanishes.
pub fn bilinear_suite(
    set: &KemmerSet,
    seed: u64,
    states: usize,
    c: f64,
) -> Result<BilinearSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut summary = BilinearSummary {
        states,
        energy_error: 0.0,
        poynting_error: 0.0,
        nonzero_photon_currents: 0,
        nonzero_real_currents: 0,
    };
    for _ in 0..states {
        let e: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let h: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let eps_c = rng.random_range(0.05..1.0);
        let m0 = rng.random_range(0.5..2.0);
        let state = assemble_psi(e, h, eps_c, m0, c)?;

        let classical = 0.5 * (eps_c * dot(e, e) + dot(h, h));
        let energy = bilinear_energy(set, &state);
        summary.energy_error = summary
            .energy_error
            .max((energy - classical).abs() / classical.max(1.0));

        let flux = bilinear_poynting(set, &state, eps_c)?;
        let expected = cross(e, h).map(|v| c * v);
        let scale = (c * dot(e, e).sqrt() * dot(h, h).sqrt()).max(1.0);
        for k in 0..3 {
            summary.poynting_error = summary
                .poynting_error
                .max((flux[k] - expected[k]).abs() / scale);
        }

        if (0..4).any(|mu| {
            let j = charge_current(set, &state, mu);
            j.re != 0.0 || j.im != 0.0
        }) {
            summary.nonzero_photon_currents += 1;
        }
        let column: [GaussInt; DIM] =
            std::array::from_fn(|_| GaussInt::new(rng.random_range(-9..=9), 0));
        if (0..4).any(|mu| dkp_charge_current(set, &column, mu) != GaussInt::new(0, 0)) {
            summary.nonzero_real_currents += 1;
        }
    }
    Ok(summary)
}

/// A smooth random field pair on [0, 1] with an inhomogeneous ε(x) = 1 + αx².
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothField {
    /// (wavenumber, E amplitude, H amplitude, phase).
    pub modes: Vec<(f64, f64, f64, f64)>,
    pub alpha: f64,
}

impl SmoothField {
    pub fn random(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let modes = (1..=4)
            .map(|m| {
                (
                    m as f64 * std::f64::consts::PI,
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(0.0..std::f64::consts::TAU),
                )
            })
            .collect();
        Self {
            modes,
            alpha: rng.random_range(-0.3..0.5),
        }
    }

    pub fn eps(&self, x: f64) -> f64 {
        1.0 + self.alpha * x * x
    }

    pub fn fields(&self, x: f64) -> (f64, f64) {
        self.modes.iter().fold((0.0, 0.0), |(e, h), &(k, a, b, p)| {
            (e + a * (k * x + p).sin(), h + b * (k * x - p).cos())
        })
    }

    pub fn derivatives(&self, x: f64) -> (f64, f64) {
        self.modes.iter().fold((0.0, 0.0), |(e, h), &(k, a, b, p)| {
            (e + a * k * (k * x + p).cos(), h - b * k * (k * x - p).sin())
        })
    }
}

/// Errors of the Kemmer-route time derivative on an `n`-node grid over
/// [0, 1]: against the exact Maxwell derivative, and against the
/// finite-difference Maxwell route on the same grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvolutionErrors {
    pub vs_exact: f64,
    pub vs_maxwell: f64,
}

pub fn evolution_errors(
    set: &KemmerSet,
    field: &SmoothField,
    n: usize,
    c: f64,
) -> Result<EvolutionErrors> {
    let h = 1.0 / (n - 1) as f64;
    let grid = FieldGrid::sample(0.0, h, n, 0.0, |x| field.fields(x))?;
    let eps: Vec<f64> = (0..n).map(|j| field.eps(grid.x(j))).collect();
    let kemmer = evolution_rhs(set, &grid, &eps, c)?;
    let maxwell = maxwell_rhs(&grid, &eps, c)?;
    let mut errors = EvolutionErrors {
        vs_exact: 0.0,
        vs_maxwell: 0.0,
    };
    for j in 0..n {
        let (de, dh) = field.derivatives(grid.x(j));
        errors.vs_exact = errors
            .vs_exact
            .max((kemmer.e_z[j] - c * dh / eps[j]).abs())
            .max((kemmer.h_y[j] - c * de).abs());
        errors.vs_maxwell = errors
            .vs_maxwell
            .max((kemmer.e_z[j] - maxwell.e_z[j]).abs())
            .max((kemmer.h_y[j] - maxwell.h_y[j]).abs());
    }
    Ok(errors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profiles_are_valid_and_reproducible() {
        let a = random_profiles(3, 20);
        let b = random_profiles(3, 20);
        assert_eq!(a, b);
        assert!(a
            .iter()
            .all(|p| p.validate().ok && p.coefficients()[&2] > 0.0));
        assert!(a.iter().any(|p| p.form() == ProfileForm::Permittivity));
        assert!(a.iter().any(|p| p.form() == ProfileForm::SqrtPermittivity));
    }

    #[test]
    fn bilinears_match_classical_formulas() {
        let set = KemmerSet::build();
        let s = bilinear_suite(&set, 1, 200, 1.0).unwrap();
        assert!(s.passed(1e-12), "{s:?}");
        let s = bilinear_suite(&set, 2, 50, 3.0).unwrap();
        assert!(s.passed(1e-12), "{s:?}");
    }

    #[test]
    fn smooth_field_derivatives_match_differences() {
        let f = SmoothField::random(4);
        let h = 1e-6;
        for x in [0.0, 0.3, 0.9] {
            let (e1, h1) = f.fields(x + h);
            let (e0, h0) = f.fields(x - h);
            let (de, dh) = f.derivatives(x);
            assert!(((e1 - e0) / (2.0 * h) - de).abs() < 1e-6);
            assert!(((h1 - h0) / (2.0 * h) - dh).abs() < 1e-6);
        }
    }

    #[test]
    fn kemmer_route_is_second_order() {
        let set = KemmerSet::build();
        let f = SmoothField::random(8);
        let coarse = evolution_errors(&set, &f, 512, 1.0).unwrap();
        let fine = evolution_errors(&set, &f, 1023, 1.0).unwrap();
        assert!((coarse.vs_exact / fine.vs_exact - 4.0).abs() < 0.5);
        assert!(coarse.vs_maxwell < 1e-10);
    }
}
