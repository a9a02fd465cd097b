//! One-dimensional field evolution through the β̃ velocity operator, and the
//! divergence constraint.

use serde::{Deserialize, Serialize};

use super::matrix::DIM;
use super::KemmerSet;
use crate::error::{Error, Result};

/// Slot of −D_z (and −E_z in the field-strength column).
const EZ_SLOT: usize = 2;
/// Slot of B_y.
const HY_SLOT: usize = 4;

/// E_z and H_y sampled on a uniform grid x_j = x0 + j·spacing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldGrid {
    pub x0: f64,
    pub spacing: f64,
    pub time: f64,
    pub e_z: Vec<f64>,
    pub h_y: Vec<f64>,
}

impl FieldGrid {
    pub fn new(x0: f64, spacing: f64, time: f64, e_z: Vec<f64>, h_y: Vec<f64>) -> Result<Self> {
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::invalid(
                "kemmer",
                format!("grid spacing must be positive, got {spacing}"),
            ));
        }
        if e_z.len() != h_y.len() {
            return Err(Error::invalid(
                "kemmer",
                format!("E_z has {} nodes but H_y has {}", e_z.len(), h_y.len()),
            ));
        }
        Ok(Self {
            x0,
            spacing,
            time,
            e_z,
            h_y,
        })
    }

    /// Samples `f(x) -> (E_z, H_y)` on `n` nodes.
    pub fn sample(
        x0: f64,
        spacing: f64,
        n: usize,
        time: f64,
        f: impl Fn(f64) -> (f64, f64),
    ) -> Result<Self> {
        let (e_z, h_y) = (0..n).map(|j| f(x0 + j as f64 * spacing)).unzip();
        Self::new(x0, spacing, time, e_z, h_y)
    }

    pub fn len(&self) -> usize {
        self.e_z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.e_z.is_empty()
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x0 + j as f64 * self.spacing
    }

    fn check(&self, eps: &[f64]) -> Result<()> {
        if self.len() < 3 {
            return Err(Error::GridTooSmall {
                required: 3,
                actual: self.len(),
            });
        }
        if self.e_z.len() != self.h_y.len() || eps.len() != self.len() {
            return Err(Error::invalid(
                "kemmer",
                "field and permittivity arrays differ in length",
            ));
        }
        if let Some(e) = eps.iter().find(|e| !(**e > 0.0)) {
            return Err(Error::domain(
                "kemmer",
                format!("permittivity must be positive, got {e}"),
            ));
        }
        Ok(())
    }
}

/// Second-order derivative: central in the interior, one-sided at the ends.
fn derivative(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    let mut d = vec![0.0; n];
    for j in 1..n - 1 {
        d[j] = (v[j + 1] - v[j - 1]) / (2.0 * h);
    }
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
    d
}

/// ∂_t(γψ) = −c β̃_x ∂_x(γψ) applied to the column (−E_z, H_y) at every
/// node. The D slot of the result is divided by ε to give ∂_tE_z.
pub fn evolution_rhs(set: &KemmerSet, grid: &FieldGrid, eps: &[f64], c: f64) -> Result<FieldGrid> {
    grid.check(eps)?;
    let bt = &set.beta_tilde_f[0];
    let de = derivative(&grid.e_z, grid.spacing);
    let dh = derivative(&grid.h_y, grid.spacing);
    let mut e_t = Vec::with_capacity(grid.len());
    let mut h_t = Vec::with_capacity(grid.len());
    for j in 0..grid.len() {
        let mut dpsi = [0.0; DIM];
        dpsi[EZ_SLOT] = -de[j];
        dpsi[HY_SLOT] = dh[j];
        let mut out = [0.0; DIM];
        for (r, row) in bt.iter().enumerate() {
            out[r] = -c * row.iter().zip(dpsi.iter()).map(|(a, b)| a * b).sum::<f64>();
        }
        e_t.push(-out[EZ_SLOT] / eps[j]);
        h_t.push(out[HY_SLOT]);
    }
    FieldGrid::new(grid.x0, grid.spacing, grid.time, e_t, h_t)
}

/// ∂_tE_z = (c/ε)∂_xH_y and ∂_tH_y = c∂_xE_z with the same stencil.
pub fn maxwell_rhs(grid: &FieldGrid, eps: &[f64], c: f64) -> Result<FieldGrid> {
    grid.check(eps)?;
    let de = derivative(&grid.e_z, grid.spacing);
    let dh = derivative(&grid.h_y, grid.spacing);
    let e_t = dh.iter().zip(eps).map(|(d, e)| c * d / e).collect();
    let h_t = de.iter().map(|d| c * d).collect();
    FieldGrid::new(grid.x0, grid.spacing, grid.time, e_t, h_t)
}

/// Electric field at the six axis neighbours of a point:
/// `neighbors[axis][0]` at −spacing, `neighbors[axis][1]` at +spacing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceStencil {
    pub spacing: f64,
    pub neighbors: [[[f64; 3]; 2]; 3],
}

impl DivergenceStencil {
    pub fn sample(center: [f64; 3], spacing: f64, field: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        let neighbors = std::array::from_fn(|axis| {
            [-1.0, 1.0].map(|s| {
                let mut p = center;
                p[axis] += s * spacing;
                field(p)
            })
        });
        Self { spacing, neighbors }
    }
}

/// Max over stencils of |Σ_i β_iβ₀²∂_iψ + m₀c(1 − β₀²)γψ| in the A₀ row,
/// which is the divergence of E for massless states.
pub fn constraint_residual(set: &KemmerSet, stencils: &[DivergenceStencil]) -> f64 {
    let b0 = &set.beta[0];
    let b0sq = b0 * b0;
    let ops: Vec<_> = (1..4).map(|i| set.beta[i] * b0sq).collect();
    let row = DIM - 1;
    stencils
        .iter()
        .map(|s| {
            let mut acc = num_complex::Complex64::new(0.0, 0.0);
            for (axis, op) in ops.iter().enumerate() {
                let [lo, hi] = s.neighbors[axis];
                let mut dpsi = [0.0; DIM];
                for k in 0..3 {
                    dpsi[k] = -(hi[k] - lo[k]) / (2.0 * s.spacing);
                }
                for (col, d) in dpsi.iter().enumerate() {
                    let m = op.get(row, col);
                    acc += num_complex::Complex64::new(m.re as f64, m.im as f64) * d;
                }
            }
            // The mass term has no A₀ component for γ-projected states.
            acc.norm()
        })
        .fold(0.0, f64::max)
}
