//! Normal-incidence transfer matrices for lossless layered stacks in air.
//!
//! Each layer contributes the characteristic matrix
//!
//! ```text
//! [ cos δ        −i sin δ / n ]
//! [ −i n sin δ   cos δ        ],    δ = n ω t / c
//! ```
//!
//! and with unit ambient index the stack product M gives
//! t = 2/(M₁₁ + M₁₂ + M₂₁ + M₂₂) and r = (M₁₁ + M₁₂ − M₂₁ − M₂₂)/(same).

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Matrix2 = [[Complex64; 2]; 2];

/// Default transmittance threshold that delimits a band gap.
pub const GAP_THRESHOLD: f64 = 1e-2;

/// Default quarter-wave indices.
pub const DEFAULT_HIGH_INDEX: f64 = 2.25;
pub const DEFAULT_LOW_INDEX: f64 = 1.45;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub index: f64,
    pub thickness: f64,
}

impl Layer {
    pub fn new(index: f64, thickness: f64) -> Result<Self> {
        if !(index > 1.0 && index.is_finite()) {
            return Err(Error::invalid(
                "tmm",
                format!("layer index must exceed 1, got {index}"),
            ));
        }
        if !(thickness > 0.0 && thickness.is_finite()) {
            return Err(Error::invalid(
                "tmm",
                format!("layer thickness must be positive, got {thickness}"),
            ));
        }
        Ok(Self { index, thickness })
    }

    pub fn matrix(&self, omega: f64, c: f64) -> Matrix2 {
        let delta = self.index * omega * self.thickness / c;
        let (s, co) = delta.sin_cos();
        let i = Complex64::i();
        [
            [Complex64::from(co), -i * (s / self.index)],
            [-i * (s * self.index), Complex64::from(co)],
        ]
    }

    pub fn optical_path(&self) -> f64 {
        self.index * self.thickness
    }
}

/// Ordered layers between two semi-infinite air regions.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LayeredStack {
    layers: Vec<Layer>,
}

impl LayeredStack {
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        for l in &layers {
            Layer::new(l.index, l.thickness)?;
        }
        Ok(Self { layers })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// N periods of a high/low pair, each a quarter wave thick at ω₀.
    pub fn quarter_wave(
        n_high: f64,
        n_low: f64,
        periods: usize,
        omega0: f64,
        c: f64,
    ) -> Result<Self> {
        if !(omega0 > 0.0 && c > 0.0) {
            return Err(Error::invalid(
                "tmm",
                "design frequency and c must be positive",
            ));
        }
        let quarter = |n: f64| std::f64::consts::FRAC_PI_2 * c / (n * omega0);
        let high = Layer::new(n_high, quarter(n_high))?;
        let low = Layer::new(n_low, quarter(n_low))?;
        Ok(Self {
            layers: (0..periods).flat_map(|_| [high, low]).collect(),
        })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    pub fn thickness(&self) -> f64 {
        self.layers.iter().map(|l| l.thickness).sum()
    }

    /// This stack followed by `other`.
    pub fn concat(&self, other: &LayeredStack) -> LayeredStack {
        let mut layers = self.layers.clone();
        layers.extend_from_slice(&other.layers);
        LayeredStack { layers }
    }

    pub fn matrix(&self, omega: f64, c: f64) -> Matrix2 {
        self.layers
            .iter()
            .fold(identity(), |acc, l| mat_mul(&acc, &l.matrix(omega, c)))
    }
}

pub fn identity() -> Matrix2 {
    let (o, z) = (Complex64::from(1.0), Complex64::from(0.0));
    [[o, z], [z, o]]
}

pub fn mat_mul(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    let mut out = [[Complex64::from(0.0); 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub omega: f64,
    pub r: Complex64,
    pub t: Complex64,
    pub transmittance: f64,
    pub reflectance: f64,
    /// arg t in (−π, π].
    pub phase: f64,
}

/// Amplitude coefficients from a stack matrix with air on both sides.
pub fn coefficients(m: &Matrix2) -> (Complex64, Complex64) {
    let denom = m[0][0] + m[0][1] + m[1][0] + m[1][1];
    let t = 2.0 / denom;
    let r = (m[0][0] + m[0][1] - m[1][0] - m[1][1]) / denom;
    (r, t)
}

pub fn stack_response(stack: &LayeredStack, omega: f64, c: f64) -> Result<SpectrumPoint> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::invalid(
            "tmm",
            format!("omega must be positive, got {omega}"),
        ));
    }
    if !(c > 0.0) {
        return Err(Error::invalid("tmm", "c must be positive"));
    }
    let (r, t) = coefficients(&stack.matrix(omega, c));
    Ok(SpectrumPoint {
        omega,
        r,
        t,
        transmittance: t.norm_sqr(),
        reflectance: r.norm_sqr(),
        phase: t.arg(),
    })
}

/// Uniform sweep over [omega_min, omega_max], computed in parallel.
pub fn spectrum(
    stack: &LayeredStack,
    omega_min: f64,
    omega_max: f64,
    samples: usize,
    c: f64,
) -> Result<Vec<SpectrumPoint>> {
    if !(omega_min > 0.0 && omega_max > omega_min) {
        return Err(Error::invalid(
            "tmm",
            format!("frequency range must satisfy 0 < min < max, got [{omega_min}, {omega_max}]"),
        ));
    }
    if samples < 2 {
        return Err(Error::invalid(
            "tmm",
            format!("need at least 2 samples, got {samples}"),
        ));
    }
    let step = (omega_max - omega_min) / (samples - 1) as f64;
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let omega = if i + 1 == samples {
                omega_max
            } else {
                omega_min + i as f64 * step
            };
            stack_response(stack, omega, c)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    pub lower: f64,
    pub upper: f64,
    /// Smallest sampled transmittance inside the gap.
    pub min_transmittance: f64,
}

impl Gap {
    pub fn center(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// The contiguous run of samples with T below `threshold` that contains the
/// deepest sample. Edges are placed where log T crosses the threshold, by
/// linear interpolation between samples.
pub fn find_gap(points: &[SpectrumPoint], threshold: f64) -> Option<Gap> {
    let (deepest, min_t) = points
        .iter()
        .enumerate()
        .map(|(i, p)| (i, p.transmittance))
        .min_by(|a, b| a.1.total_cmp(&b.1))?;
    if min_t >= threshold {
        return None;
    }
    let mut lo = deepest;
    while lo > 0 && points[lo - 1].transmittance < threshold {
        lo -= 1;
    }
    let mut hi = deepest;
    while hi + 1 < points.len() && points[hi + 1].transmittance < threshold {
        hi += 1;
    }
    let crossing = |outside: &SpectrumPoint, inside: &SpectrumPoint| {
        let (a, b) = (outside.transmittance.ln(), inside.transmittance.ln());
        let f = (a - threshold.ln()) / (a - b);
        outside.omega + f * (inside.omega - outside.omega)
    };
    let lower = if lo == 0 {
        points[0].omega
    } else {
        crossing(&points[lo - 1], &points[lo])
    };
    let upper = if hi + 1 == points.len() {
        points[hi].omega
    } else {
        crossing(&points[hi + 1], &points[hi])
    };
    Some(Gap {
        lower,
        upper,
        min_transmittance: min_t,
    })
}

// Phase increment of t between ω − h and ω + h, free of branch cuts.
fn phase_difference(stack: &LayeredStack, omega: f64, step: f64, c: f64) -> f64 {
    let (_, t_hi) = coefficients(&stack.matrix(omega + step, c));
    let (_, t_lo) = coefficients(&stack.matrix(omega - step, c));
    (t_hi / t_lo).arg()
}

/// d(arg t)/dω by central differences, halving the step until successive
/// Richardson-extrapolated estimates agree to a relative 1e-9.
pub fn group_delay(stack: &LayeredStack, omega: f64, c: f64) -> Result<f64> {
    if !(omega > 0.0 && c > 0.0) {
        return Err(Error::invalid("tmm", "omega and c must be positive"));
    }
    // Initial step: a small fraction of the finest phase scale in the stack.
    let optical: f64 = stack
        .layers()
        .iter()
        .map(Layer::optical_path)
        .sum::<f64>()
        .max(c / omega);
    let mut step = (1e-2 * c / optical).min(0.25 * omega);
    let mut previous = phase_difference(stack, omega, step, c) / (2.0 * step);
    let mut previous_extrapolated = f64::NAN;
    for _ in 0..30 {
        step *= 0.5;
        let current = phase_difference(stack, omega, step, c) / (2.0 * step);
        let extrapolated = (4.0 * current - previous) / 3.0;
        let scale = extrapolated.abs().max(1e-6 * optical / c);
        if (extrapolated - previous_extrapolated).abs() <= 1e-9 * scale {
            return Ok(extrapolated);
        }
        previous = current;
        previous_extrapolated = extrapolated;
    }
    Err(Error::NoConvergence {
        method: "group delay",
        message: format!("no stable derivative at omega = {omega}"),
    })
}

/// Least-squares line through (x, y) with the Pearson correlation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub correlation: f64,
}

pub fn linear_fit(points: &[(f64, f64)]) -> Result<LinearFit> {
    if points.len() < 2 {
        return Err(Error::invalid(
            "tmm",
            "a line fit needs at least two points",
        ));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("tmm", "line fit abscissae are all equal"));
    }
    let slope = sxy / sxx;
    let correlation = if syy == 0.0 {
        0.0
    } else {
        sxy / (sxx * syy).sqrt()
    };
    Ok(LinearFit {
        slope,
        intercept: my - slope * mx,
        correlation,
    })
}

/// ln T at the design frequency of quarter-wave stacks for each period count.
pub fn midgap_decay(
    n_high: f64,
    n_low: f64,
    periods: impl IntoIterator<Item = usize>,
    c: f64,
) -> Result<Vec<(usize, f64)>> {
    let omega0 = 1.0;
    periods
        .into_iter()
        .map(|n| {
            let stack = LayeredStack::quarter_wave(n_high, n_low, n, omega0, c)?;
            Ok((n, stack_response(&stack, omega0, c)?.transmittance.ln()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn qw(n: usize) -> LayeredStack {
        LayeredStack::quarter_wave(DEFAULT_HIGH_INDEX, DEFAULT_LOW_INDEX, n, 1.0, 1.0).unwrap()
    }

    #[test]
    fn empty_stack_is_transparent() {
        let p = stack_response(&LayeredStack::empty(), 2.0, 1.0).unwrap();
        assert_eq!(p.t, Complex64::from(1.0));
        assert_eq!(p.r, Complex64::from(0.0));
        assert_eq!(group_delay(&LayeredStack::empty(), 2.0, 1.0).unwrap(), 0.0);
        let sweep = spectrum(&LayeredStack::empty(), 0.5, 3.0, 50, 1.0).unwrap();
        assert!(sweep.iter().all(|p| p.transmittance == 1.0));
    }

    #[test]
    fn thin_slab_becomes_transparent() {
        let mut last = 0.0;
        for t in [1e-1, 1e-2, 1e-3, 1e-4] {
            let stack = LayeredStack::new(vec![Layer::new(2.0, t).unwrap()]).unwrap();
            let tr = stack_response(&stack, 1.0, 1.0).unwrap().transmittance;
            assert!(tr > last);
            last = tr;
        }
        assert!(1.0 - last < 1e-7);
    }

    #[test]
    fn rejects_invalid_layers_and_ranges() {
        assert!(Layer::new(1.0, 1.0).is_err());
        assert!(Layer::new(1.5, 0.0).is_err());
        assert!(stack_response(&qw(2), 0.0, 1.0).is_err());
        assert!(spectrum(&qw(2), 1.0, 0.5, 10, 1.0).is_err());
        assert!(spectrum(&qw(2), 0.5, 1.0, 1, 1.0).is_err());
    }

    #[test]
    fn midgap_closed_form() {
        let q = DEFAULT_LOW_INDEX / DEFAULT_HIGH_INDEX;
        for n in [1, 4, 8, 16] {
            let expected = 4.0 / (q.powi(n as i32) + q.powi(-(n as i32))).powi(2);
            let got = stack_response(&qw(n), 1.0, 1.0).unwrap().transmittance;
            assert!(
                (got - expected).abs() <= 1e-10 * expected,
                "N={n}: {got} vs {expected}"
            );
        }
    }

    #[test]
    fn gap_is_centred_and_grows_with_contrast() {
        let sweep = spectrum(&qw(12), 0.5, 1.5, 4001, 1.0).unwrap();
        let gap = find_gap(&sweep, GAP_THRESHOLD).unwrap();
        assert!((gap.center() - 1.0).abs() < 1e-2, "{gap:?}");
        assert!(gap.min_transmittance < 2e-4);

        let low_contrast =
            LayeredStack::quarter_wave(2.0, DEFAULT_LOW_INDEX, 12, 1.0, 1.0).unwrap();
        let narrow = find_gap(
            &spectrum(&low_contrast, 0.5, 1.5, 4001, 1.0).unwrap(),
            GAP_THRESHOLD,
        )
        .unwrap();
        assert!(gap.width() > narrow.width());
    }

    #[test]
    fn slab_delay_matches_optical_path() {
        let (n, l) = (1.2, 5.0);
        let stack = LayeredStack::new(vec![Layer::new(n, l).unwrap()]).unwrap();
        // Away from Fabry–Perot resonances the delay oscillates about nL/c
        // with relative amplitude of order the interface reflectance.
        let samples: Vec<f64> = (0..200)
            .map(|i| group_delay(&stack, 3.0 + 0.005 * i as f64, 1.0).unwrap())
            .collect();
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        assert!((mean - n * l).abs() / (n * l) < 1e-2, "{mean}");
        assert!(samples.iter().all(|d| (d - n * l).abs() / (n * l) < 0.05));
    }

    #[test]
    fn group_delay_matches_oracle_difference() {
        let stack = qw(6);
        let omega = 0.8;
        let h = 1e-5;
        let oracle = {
            let (_, a) = coefficients(&stack.matrix(omega + h, 1.0));
            let (_, b) = coefficients(&stack.matrix(omega - h, 1.0));
            (a / b).arg() / (2.0 * h)
        };
        let got = group_delay(&stack, omega, 1.0).unwrap();
        assert!((got - oracle).abs() < 1e-6 * oracle.abs());
    }

    #[test]
    fn line_fit_recovers_exact_line() {
        let pts: Vec<_> = (0..10).map(|i| (i as f64, 3.0 - 0.5 * i as f64)).collect();
        let fit = linear_fit(&pts).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-14 && (fit.intercept - 3.0).abs() < 1e-13);
        assert!((fit.correlation + 1.0).abs() < 1e-14);
    }

    fn layer_strategy() -> impl Strategy<Value = Layer> {
        (1.01f64..4.0, 0.01f64..3.0).prop_map(|(n, t)| Layer::new(n, t).unwrap())
    }

    proptest! {
        #[test]
        fn energy_is_conserved(layers in prop::collection::vec(layer_strategy(), 0..12), omega in 0.05f64..20.0) {
            let stack = LayeredStack::new(layers).unwrap();
            let p = stack_response(&stack, omega, 1.0).unwrap();
            prop_assert!((p.reflectance + p.transmittance - 1.0).abs() < 1e-10);
        }

        #[test]
        fn composition_is_matrix_product(
            a in prop::collection::vec(layer_strategy(), 0..6),
            b in prop::collection::vec(layer_strategy(), 0..6),
            omega in 0.05f64..10.0,
        ) {
            let (a, b) = (LayeredStack::new(a).unwrap(), LayeredStack::new(b).unwrap());
            let joined = a.concat(&b).matrix(omega, 1.0);
            let product = mat_mul(&a.matrix(omega, 1.0), &b.matrix(omega, 1.0));
            for i in 0..2 {
                for j in 0..2 {
                    prop_assert!((joined[i][j] - product[i][j]).norm() < 1e-9 * (1.0 + product[i][j].norm()));
                }
            }
        }

        #[test]
        fn quarter_wave_gap_is_symmetric(x in 0.0f64..0.9, n in 1usize..12) {
            let stack = qw(n);
            let above = stack_response(&stack, 1.0 + x, 1.0).unwrap().transmittance;
            let below = stack_response(&stack, 1.0 - x, 1.0).unwrap().transmittance;
            prop_assert!((above - below).abs() <= 1e-9 * above.max(below));
        }
    }
}
