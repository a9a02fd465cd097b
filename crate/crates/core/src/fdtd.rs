//! Finite-difference time-domain solver for the one-dimensional system
//!
//! ```text
//! ∂_t H_y = c ∂_x E_z,    ∂_t E_z = (c/ε) ∂_x H_y
//! ```
//!
//! on a staggered (Yee) grid, with the barrier nodes carrying the real
//! continued permittivity ε_c < 1. E lives on integer nodes and steps, H on
//! half nodes and half steps. A right-moving wave has H = −E.

use serde::{Deserialize, Serialize};

use crate::dielectric::DielectricProfile;
use crate::error::{Error, Result};
use crate::kemmer::FieldGrid;
use crate::transport::tunneling_time;

/// Minimum carrier resolution in nodes per vacuum wavelength.
pub const MIN_NODES_PER_WAVELENGTH: f64 = 20.0;

/// Default probe-energy floor below which a centroid is not computed.
pub const DEFAULT_PULSE_THRESHOLD: f64 = 1e-20;

// Full-array finiteness scan interval.
const NAN_SCAN_INTERVAL: usize = 256;

// Subcell samples used to average ε over a cell.
const CELL_SAMPLES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// First-order Mur (one-way wave equation) termination.
    Absorbing,
    /// Perfectly conducting walls, E = 0 at both ends.
    Reflecting,
}

/// Soft source added to E at one node: exp(−½(cσ(t − delay))²)·sin(ck₀(t − delay)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SoftSource {
    pub k0: f64,
    pub sigma: f64,
    pub position: f64,
    pub delay: f64,
}

/// Right-moving Gaussian packet present at t = 0:
/// E = exp(−½σ²(x − center)²)·cos(k₀(x − center)), H = −nE with n the local
/// index. Exact for a packet launched in a uniform region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialPulse {
    pub k0: f64,
    pub sigma: f64,
    pub center: f64,
}

impl InitialPulse {
    fn field(&self, x: f64) -> f64 {
        let u = x - self.center;
        (-0.5 * (self.sigma * u).powi(2)).exp() * (self.k0 * u).cos()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdtdConfig {
    pub length: f64,
    pub spacing: f64,
    pub courant: f64,
    pub steps: usize,
    pub c: f64,
    /// Permittivity at each E node.
    pub eps: Vec<f64>,
    pub boundary: Boundary,
    pub source: Option<SoftSource>,
    pub initial: Option<InitialPulse>,
    pub probes: Vec<f64>,
}

impl FdtdConfig {
    /// Vacuum-filled domain [0, length] with absorbing ends.
    pub fn vacuum(length: f64, spacing: f64, courant: f64, steps: usize, c: f64) -> Result<Self> {
        if !(length > 0.0 && spacing > 0.0 && length.is_finite() && spacing.is_finite()) {
            return Err(Error::invalid(
                "fdtd",
                "domain length and spacing must be positive",
            ));
        }
        let nodes = node_count(length, spacing);
        Ok(Self {
            length,
            spacing,
            courant,
            steps,
            c,
            eps: vec![1.0; nodes],
            boundary: Boundary::Absorbing,
            source: None,
            initial: None,
            probes: Vec::new(),
        })
    }

    pub fn nodes(&self) -> usize {
        self.eps.len()
    }

    pub fn dt(&self) -> f64 {
        self.courant * self.spacing / self.c
    }

    pub fn node_of(&self, x: f64) -> usize {
        ((x / self.spacing).round().max(0.0) as usize).min(self.nodes().saturating_sub(1))
    }

    /// Fills the cells over [x_b, x_b + d] with ε_c(x − x_b), cell-averaged.
    pub fn with_barrier(mut self, profile: &DielectricProfile, x_b: f64) -> Result<Self> {
        profile.validate().into_result()?;
        let d = profile.width();
        self.fill_eps(x_b, d, |x| profile.eval_eps_continued(x))?;
        Ok(self)
    }

    /// Same as [`with_barrier`](Self::with_barrier) with the profile reversed
    /// in space, ε(x_b + s) = ε_c(d − s).
    pub fn with_mirrored_barrier(mut self, profile: &DielectricProfile, x_b: f64) -> Result<Self> {
        profile.validate().into_result()?;
        let d = profile.width();
        self.fill_eps(x_b, d, |s| profile.eval_eps_continued(d - s))?;
        Ok(self)
    }

    fn fill_eps(&mut self, x_b: f64, d: f64, eps_c: impl Fn(f64) -> Result<f64>) -> Result<()> {
        let h = self.spacing;
        for j in 0..self.nodes() {
            let x = j as f64 * h;
            if x + 0.5 * h <= x_b || x - 0.5 * h >= x_b + d {
                continue;
            }
            let mut sum = 0.0;
            for q in 0..CELL_SAMPLES {
                let xs = x - 0.5 * h + (q as f64 + 0.5) * h / CELL_SAMPLES as f64;
                let s = xs - x_b;
                sum += if (0.0..=d).contains(&s) {
                    eps_c(s.clamp(0.0, d))?
                } else {
                    1.0
                };
            }
            self.eps[j] = sum / CELL_SAMPLES as f64;
        }
        Ok(())
    }

    /// Checks stability, resolution and array sizes.
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::invalid(
                "fdtd",
                format!("c must be positive, got {}", self.c),
            ));
        }
        if !(self.spacing > 0.0 && self.length > 0.0) {
            return Err(Error::invalid(
                "fdtd",
                "domain length and spacing must be positive",
            ));
        }
        let expected = node_count(self.length, self.spacing);
        if self.nodes() != expected || expected < 3 {
            return Err(Error::invalid(
                "fdtd",
                format!(
                    "expected {expected} permittivity values (at least 3), got {}",
                    self.nodes()
                ),
            ));
        }
        if let Some(e) = self.eps.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
            return Err(Error::domain(
                "fdtd",
                format!("node permittivity must be positive, got {e}"),
            ));
        }
        if !(self.courant > 0.0 && self.courant <= 1.0) {
            return Err(Error::Unstable {
                courant: self.courant,
                limit: 1.0,
            });
        }
        let eps_min = self.eps.iter().copied().fold(f64::INFINITY, f64::min);
        let effective = self.courant / eps_min.sqrt();
        if effective > 1.0 {
            return Err(Error::Unstable {
                courant: effective,
                limit: 1.0,
            });
        }
        let carriers = self
            .source
            .map(|s| (s.k0, s.sigma))
            .into_iter()
            .chain(self.initial.map(|p| (p.k0, p.sigma)));
        for (k0, sigma) in carriers {
            if !(k0 > 0.0 && sigma > 0.0) {
                return Err(Error::invalid(
                    "fdtd",
                    "pulse k0 and sigma must be positive",
                ));
            }
            let per_wavelength = 2.0 * std::f64::consts::PI / (k0 * self.spacing);
            if per_wavelength < MIN_NODES_PER_WAVELENGTH {
                return Err(Error::invalid(
                    "fdtd",
                    format!(
                        "carrier resolved by {per_wavelength:.1} nodes per wavelength, need at least {MIN_NODES_PER_WAVELENGTH}"
                    ),
                ));
            }
        }
        for &p in self
            .probes
            .iter()
            .chain(self.source.iter().map(|s| &s.position))
        {
            if !(0.0..=self.length).contains(&p) {
                return Err(Error::invalid(
                    "fdtd",
                    format!("position {p} outside [0, {}]", self.length),
                ));
            }
        }
        Ok(())
    }
}

fn node_count(length: f64, spacing: f64) -> usize {
    (length / spacing).round() as usize + 1
}

/// Time series recorded at one E node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeSeries {
    pub position: f64,
    pub node: usize,
    pub eps: f64,
    pub t: Vec<f64>,
    pub e_z: Vec<f64>,
    pub h_y: Vec<f64>,
    pub s_x: Vec<f64>,
    pub energy: Vec<f64>,
}

impl ProbeSeries {
    fn new(position: f64, node: usize, eps: f64, capacity: usize) -> Self {
        Self {
            position,
            node,
            eps,
            t: Vec::with_capacity(capacity),
            e_z: Vec::with_capacity(capacity),
            h_y: Vec::with_capacity(capacity),
            s_x: Vec::with_capacity(capacity),
            energy: Vec::with_capacity(capacity),
        }
    }

    fn push(&mut self, t: f64, e: f64, h: f64, c: f64) {
        self.t.push(t);
        self.e_z.push(e);
        self.h_y.push(h);
        self.s_x.push(-c * e * h);
        self.energy.push(0.5 * (self.eps * e * e + h * h));
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

/// Leapfrog state. Between steps E is at t = n·dt and H at (n − ½)·dt.
#[derive(Debug, Clone)]
pub struct Simulation {
    config: FdtdConfig,
    e: Vec<f64>,
    h: Vec<f64>,
    step: usize,
    probes: Vec<ProbeSeries>,
    source_node: Option<usize>,
}

impl Simulation {
    pub fn new(config: FdtdConfig) -> Result<Self> {
        config.validate()?;
        let n = config.nodes();
        let mut e = vec![0.0; n];
        let mut h = vec![0.0; n - 1];
        if let Some(p) = config.initial {
            let dx = config.spacing;
            let dt = config.dt();
            for (j, v) in e.iter_mut().enumerate() {
                *v = p.field(j as f64 * dx);
            }
            // H = −nE at t = −dt/2 on half nodes, with the local index n.
            for (j, v) in h.iter_mut().enumerate() {
                let n = (0.5 * (config.eps[j] + config.eps[j + 1])).sqrt();
                *v = -n * p.field((j as f64 + 0.5) * dx + 0.5 * config.c * dt / n);
            }
        }
        Self::assemble(config, e, h)
    }

    /// Starts from explicit E (n nodes) and H (n − 1 half nodes) arrays.
    pub fn from_fields(config: FdtdConfig, e: Vec<f64>, h: Vec<f64>) -> Result<Self> {
        config.validate()?;
        if e.len() != config.nodes() || h.len() + 1 != config.nodes() {
            return Err(Error::invalid("fdtd", "field arrays do not match the grid"));
        }
        Self::assemble(config, e, h)
    }

    fn assemble(config: FdtdConfig, mut e: Vec<f64>, h: Vec<f64>) -> Result<Self> {
        let n = config.nodes();
        if config.boundary == Boundary::Reflecting {
            e[0] = 0.0;
            e[n - 1] = 0.0;
        }
        let probes = config
            .probes
            .iter()
            .map(|&x| {
                let node = config.node_of(x);
                ProbeSeries::new(x, node, config.eps[node], config.steps)
            })
            .collect();
        let source_node = config.source.map(|s| config.node_of(s.position));
        Ok(Self {
            config,
            e,
            h,
            step: 0,
            probes,
            source_node,
        })
    }

    pub fn config(&self) -> &FdtdConfig {
        &self.config
    }

    pub fn time(&self) -> f64 {
        self.step as f64 * self.config.dt()
    }

    pub fn steps_taken(&self) -> usize {
        self.step
    }

    pub fn e_field(&self) -> &[f64] {
        &self.e
    }

    pub fn h_field(&self) -> &[f64] {
        &self.h
    }

    pub fn probes(&self) -> &[ProbeSeries] {
        &self.probes
    }

    fn h_coefficient(&self) -> f64 {
        self.config.courant
    }

    fn advanced_h(&self) -> Vec<f64> {
        let k = self.h_coefficient();
        self.h
            .iter()
            .enumerate()
            .map(|(j, h)| h + k * (self.e[j + 1] - self.e[j]))
            .collect()
    }

    // H at the E node j at the current time: mean over the two neighbouring
    // half nodes of the mean over the two neighbouring half steps.
    fn h_at_node(old: &[f64], new: &[f64], j: usize) -> f64 {
        let at = |i: usize| 0.5 * (old[i] + new[i]);
        let last = old.len();
        match j {
            0 => at(0),
            _ if j == last => at(last - 1),
            _ => 0.5 * (at(j - 1) + at(j)),
        }
    }

    /// Advances E by one full step, recording probes at the current time.
    pub fn step(&mut self) -> Result<()> {
        let n = self.config.nodes();
        let s = self.config.courant;
        let h_old = std::mem::take(&mut self.h);
        self.h = h_old.clone();
        for j in 0..n - 1 {
            self.h[j] += s * (self.e[j + 1] - self.e[j]);
        }

        let t = self.time();
        let c = self.config.c;
        for p in &mut self.probes {
            let hv = Self::h_at_node(&h_old, &self.h, p.node);
            p.push(t, self.e[p.node], hv, c);
        }

        let (e0, e1) = (self.e[0], self.e[1]);
        let (en, en1) = (self.e[n - 1], self.e[n - 2]);
        for j in 1..n - 1 {
            self.e[j] += s / self.config.eps[j] * (self.h[j] - self.h[j - 1]);
        }
        if let (Some(src), Some(node)) = (self.config.source, self.source_node) {
            let tau = t + 0.5 * self.config.dt() - src.delay;
            let envelope = (-0.5 * (c * src.sigma * tau).powi(2)).exp();
            self.e[node] += envelope * (c * src.k0 * tau).sin();
        }
        match self.config.boundary {
            Boundary::Reflecting => {
                self.e[0] = 0.0;
                self.e[n - 1] = 0.0;
            }
            Boundary::Absorbing => {
                let mur = |eps: f64| {
                    let q = s / eps.sqrt();
                    (q - 1.0) / (q + 1.0)
                };
                self.e[0] = e1 + mur(self.config.eps[0]) * (self.e[1] - e0);
                self.e[n - 1] = en1 + mur(self.config.eps[n - 1]) * (self.e[n - 2] - en);
            }
        }
        self.step += 1;

        let scan = self.step.is_multiple_of(NAN_SCAN_INTERVAL) || self.step == self.config.steps;
        if scan {
            self.check_finite()?;
        }
        Ok(())
    }

    fn check_finite(&self) -> Result<()> {
        let bad = self
            .e
            .iter()
            .position(|v| !v.is_finite())
            .or_else(|| self.h.iter().position(|v| !v.is_finite()));
        match bad {
            Some(node) => Err(Error::NonFinite {
                step: self.step,
                node,
            }),
            None => Ok(()),
        }
    }

    /// Runs until `config.steps` steps have been taken.
    pub fn run_to_end(&mut self) -> Result<()> {
        while self.step < self.config.steps {
            self.step()?;
        }
        Ok(())
    }

    /// E and time-centred H at the E nodes.
    pub fn snapshot(&self) -> FieldGrid {
        let h_new = self.advanced_h();
        let h_y = (0..self.config.nodes())
            .map(|j| Self::h_at_node(&self.h, &h_new, j))
            .collect();
        FieldGrid {
            x0: 0.0,
            spacing: self.config.spacing,
            time: self.time(),
            e_z: self.e.clone(),
            h_y,
        }
    }

    /// Discrete energy conserved by the leapfrog update in a closed domain:
    /// h·Σ ½εE² over E nodes plus h·Σ ½H^{n−½}H^{n+½} over H nodes.
    pub fn energy(&self) -> f64 {
        let n = self.e.len();
        let electric: f64 = self
            .e
            .iter()
            .zip(&self.config.eps)
            .enumerate()
            .map(|(j, (e, eps))| {
                let w = if j == 0 || j + 1 == n { 0.5 } else { 1.0 };
                w * 0.5 * eps * e * e
            })
            .sum();
        let magnetic: f64 = self
            .h
            .iter()
            .zip(self.advanced_h())
            .map(|(a, b)| 0.5 * a * b)
            .sum();
        self.config.spacing * (electric + magnetic)
    }
}

/// Probe records and final field snapshot of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdtdOutput {
    pub probes: Vec<ProbeSeries>,
    pub final_grid: FieldGrid,
}

pub fn run(config: FdtdConfig) -> Result<FdtdOutput> {
    let mut sim = Simulation::new(config)?;
    sim.run_to_end()?;
    let final_grid = sim.snapshot();
    Ok(FdtdOutput {
        probes: sim.probes,
        final_grid,
    })
}

/// h·Σ ½(εE² + H²) over the nodes, with the two end nodes weighted by ½
/// since they bound half cells.
pub fn total_energy(grid: &FieldGrid, eps: &[f64]) -> f64 {
    let n = grid.e_z.len();
    let sum: f64 = grid
        .e_z
        .iter()
        .zip(&grid.h_y)
        .zip(eps)
        .enumerate()
        .map(|(j, ((e, h), eps))| {
            let w = if j == 0 || j + 1 == n { 0.5 } else { 1.0 };
            w * 0.5 * (eps * e * e + h * h)
        })
        .sum();
    grid.spacing * sum
}

/// Energy-weighted mean arrival time ∫t𝓔dt / ∫𝓔dt.
pub fn centroid_arrival(series: &ProbeSeries) -> Result<f64> {
    centroid_arrival_with(series, DEFAULT_PULSE_THRESHOLD)
}

pub fn centroid_arrival_with(series: &ProbeSeries, threshold: f64) -> Result<f64> {
    let dt = if series.len() > 1 {
        series.t[1] - series.t[0]
    } else {
        1.0
    };
    let weight: f64 = series.energy.iter().sum::<f64>() * dt;
    if !(weight > threshold) {
        return Err(Error::NoPulse {
            energy: weight,
            threshold,
        });
    }
    let moment: f64 = series
        .t
        .iter()
        .zip(&series.energy)
        .map(|(t, e)| t * e)
        .sum::<f64>()
        * dt;
    Ok(moment / weight)
}

/// Barrier-transit measurement with a vacuum reference run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitExperiment {
    pub k0: f64,
    /// Envelope width σ as a fraction of k₀.
    pub sigma_ratio: f64,
    pub nodes_per_wavelength: f64,
    pub courant: f64,
    /// Vacuum gap between each probe and the barrier face.
    pub gap: f64,
    pub c: f64,
    /// Half-width of the simulated packet in units of 1/σ.
    pub envelope_sigmas: f64,
}

impl Default for TransitExperiment {
    fn default() -> Self {
        Self {
            k0: 20.0 * std::f64::consts::PI,
            sigma_ratio: 0.02,
            nodes_per_wavelength: 40.0,
            courant: 0.5,
            gap: 0.25,
            c: 1.0,
            envelope_sigmas: 7.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitReport {
    /// Centroid transit time across the barrier.
    pub barrier_transit: f64,
    /// Same measurement with the barrier removed.
    pub vacuum_transit: f64,
    /// Quadrature transport time (1/c)∫√ε_c.
    pub tau: f64,
    /// d/c.
    pub vacuum_time: f64,
    pub spacing: f64,
    pub dt: f64,
    pub nodes: usize,
    pub steps: usize,
}

impl TransitReport {
    pub fn relative_error(&self) -> f64 {
        (self.barrier_transit - self.tau).abs() / self.tau
    }

    pub fn vacuum_relative_error(&self) -> f64 {
        (self.vacuum_transit - self.vacuum_time).abs() / self.vacuum_time
    }

    pub fn superluminal(&self) -> bool {
        self.barrier_transit < self.vacuum_time
    }
}

struct Layout {
    spacing: f64,
    length: f64,
    steps: usize,
    x_b: f64,
    probe_in: f64,
    probe_out: f64,
    pulse: InitialPulse,
}

impl TransitExperiment {
    fn layout(&self, d: f64) -> Result<Layout> {
        if !(self.k0 > 0.0 && self.sigma_ratio > 0.0 && self.gap >= 0.0 && self.c > 0.0) {
            return Err(Error::invalid(
                "fdtd",
                "transit experiment parameters must be positive",
            ));
        }
        let spacing = 2.0 * std::f64::consts::PI / (self.k0 * self.nodes_per_wavelength);
        let snap = |x: f64| (x / spacing).round() * spacing;
        let sigma = self.sigma_ratio * self.k0;
        let half_width = self.envelope_sigmas / sigma;
        let center = snap(half_width);
        let probe_in = snap(center + half_width);
        let x_b = snap(probe_in + self.gap);
        let cells = (d / spacing).round();
        if (cells * spacing - d).abs() > 1e-9 * d.max(1.0) {
            return Err(Error::invalid(
                "fdtd",
                format!("barrier width {d} is not a whole number of cells of {spacing}"),
            ));
        }
        let probe_out = snap(x_b + d + self.gap);
        let length = snap(probe_out + half_width + 1.0);
        let dt = self.courant * spacing / self.c;
        let steps = ((probe_out + half_width - center) / self.c / dt).ceil() as usize;
        Ok(Layout {
            spacing,
            length,
            steps,
            x_b,
            probe_in,
            probe_out,
            pulse: InitialPulse {
                k0: self.k0,
                sigma,
                center,
            },
        })
    }

    fn base_config(&self, layout: &Layout) -> Result<FdtdConfig> {
        let mut config = FdtdConfig::vacuum(
            layout.length,
            layout.spacing,
            self.courant,
            layout.steps,
            self.c,
        )?;
        config.initial = Some(layout.pulse);
        config.probes = vec![layout.probe_in, layout.probe_out];
        Ok(config)
    }

    fn arrivals(config: FdtdConfig) -> Result<(f64, f64, usize)> {
        let nodes = config.nodes();
        let out = run(config)?;
        Ok((
            centroid_arrival(&out.probes[0])?,
            centroid_arrival(&out.probes[1])?,
            nodes,
        ))
    }

    /// Runs the vacuum reference and the barrier run. The barrier transit is
    /// the outgoing-probe centroid of the barrier run minus the incoming-probe
    /// centroid of the vacuum run, less the two vacuum gaps.
    pub fn measure(&self, profile: &DielectricProfile) -> Result<TransitReport> {
        self.measure_impl(profile, false)
    }

    /// As [`measure`](Self::measure) with the barrier reversed in space.
    pub fn measure_mirrored(&self, profile: &DielectricProfile) -> Result<TransitReport> {
        self.measure_impl(profile, true)
    }

    /// The barrier run as a plain configuration, for recording probe series.
    pub fn barrier_config(&self, profile: &DielectricProfile) -> Result<FdtdConfig> {
        let layout = self.layout(profile.width())?;
        self.base_config(&layout)?.with_barrier(profile, layout.x_b)
    }

    fn measure_impl(&self, profile: &DielectricProfile, mirrored: bool) -> Result<TransitReport> {
        let d = profile.width();
        let tau = tunneling_time(profile, self.c)?.tau;
        let layout = self.layout(d)?;
        let base = self.base_config(&layout)?;
        let dt = base.dt();
        let gaps = (layout.probe_out - layout.probe_in - d) / self.c;

        let (vac_in, vac_out, nodes) = Self::arrivals(base.clone())?;
        let barrier = if mirrored {
            base.with_mirrored_barrier(profile, layout.x_b)?
        } else {
            base.with_barrier(profile, layout.x_b)?
        };
        let (_, bar_out, _) = Self::arrivals(barrier)?;
        Ok(TransitReport {
            barrier_transit: bar_out - vac_in - gaps,
            vacuum_transit: vac_out - vac_in - gaps,
            tau,
            vacuum_time: d / self.c,
            spacing: layout.spacing,
            dt,
            nodes,
            steps: layout.steps,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_probe(center: f64, width: f64, dt: f64, n: usize) -> ProbeSeries {
        let mut p = ProbeSeries::new(0.0, 0, 1.0, n);
        for i in 0..n {
            let t = i as f64 * dt;
            let e = (-((t - center) / width).powi(2)).exp();
            p.push(t, e, -e, 1.0);
        }
        p
    }

    #[test]
    fn centroid_of_symmetric_pulse() {
        let p = gaussian_probe(10.0, 1.0, 0.01, 2001);
        assert!((centroid_arrival(&p).unwrap() - 10.0).abs() < 1e-10);
        let empty = gaussian_probe(1e6, 1.0, 0.01, 10);
        assert!(matches!(
            centroid_arrival(&empty),
            Err(Error::NoPulse { .. })
        ));
    }

    #[test]
    fn total_energy_examples() {
        let zero = FieldGrid {
            x0: 0.0,
            spacing: 0.01,
            time: 0.0,
            e_z: vec![0.0; 5],
            h_y: vec![0.0; 5],
        };
        assert_eq!(total_energy(&zero, &[1.0; 5]), 0.0);
        let single = FieldGrid {
            e_z: vec![0.0, 0.0, 1.0, 0.0, 0.0],
            ..zero
        };
        assert!((total_energy(&single, &[1.0; 5]) - 0.005).abs() < 1e-15);
    }

    #[test]
    fn zero_fields_stay_zero() {
        let mut config = FdtdConfig::vacuum(1.0, 0.01, 0.5, 500, 1.0).unwrap();
        config.probes = vec![0.5];
        let out = run(config).unwrap();
        assert!(out
            .final_grid
            .e_z
            .iter()
            .chain(&out.final_grid.h_y)
            .all(|v| *v == 0.0));
        assert!(out.probes[0].energy.iter().all(|v| *v == 0.0));
        assert_eq!(out.probes[0].len(), 500);
    }

    #[test]
    fn config_rejections() {
        let base = FdtdConfig::vacuum(1.0, 0.01, 0.5, 10, 1.0).unwrap();
        let mut c = base.clone();
        c.courant = 1.2;
        assert!(matches!(c.validate(), Err(Error::Unstable { .. })));

        // s = 0.95 is fine in vacuum but not with ε_min = 0.81.
        let mut c = base.clone();
        c.courant = 0.95;
        assert!(c.validate().is_ok());
        c.eps[40] = 0.81;
        assert!(matches!(c.validate(), Err(Error::Unstable { courant, .. }) if courant > 1.0));

        let mut c = base.clone();
        c.initial = Some(InitialPulse {
            k0: 2.0 * std::f64::consts::PI / 0.1,
            sigma: 1.0,
            center: 0.5,
        });
        assert!(matches!(c.validate(), Err(Error::InvalidInput { .. })));

        let mut c = base.clone();
        c.probes = vec![2.0];
        assert!(c.validate().is_err());

        let mut c = base;
        c.eps.pop();
        assert!(c.validate().is_err());
    }

    #[test]
    fn non_finite_fields_abort() {
        let config = FdtdConfig::vacuum(1.0, 0.01, 0.5, NAN_SCAN_INTERVAL, 1.0).unwrap();
        let mut e = vec![0.0; config.nodes()];
        e[50] = f64::NAN;
        let h = vec![0.0; config.nodes() - 1];
        let mut sim = Simulation::from_fields(config, e, h).unwrap();
        assert!(matches!(sim.run_to_end(), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn barrier_cells_carry_continued_permittivity() {
        let profile = DielectricProfile::quadratic_model(0.1, 1.0).unwrap();
        let config = FdtdConfig::vacuum(3.0, 0.01, 0.5, 1, 1.0)
            .unwrap()
            .with_barrier(&profile, 1.0)
            .unwrap();
        assert_eq!(config.eps[50], 1.0);
        assert!((config.eps[150] - 0.975f64.powi(2)).abs() < 1e-5);
        // Interface cell at x = 2 is half barrier, half vacuum.
        assert!((config.eps[200] - 0.5 * (1.0 + 0.81)).abs() < 1e-3);
        let mirrored = FdtdConfig::vacuum(3.0, 0.01, 0.5, 1, 1.0)
            .unwrap()
            .with_mirrored_barrier(&profile, 1.0)
            .unwrap();
        for j in 100..=200 {
            assert!((mirrored.eps[j] - config.eps[300 - j]).abs() < 1e-12);
        }
    }

    #[test]
    fn soft_source_radiates_both_ways() {
        let k0 = 2.0 * std::f64::consts::PI;
        let mut config = FdtdConfig::vacuum(20.0, 0.02, 0.5, 1200, 1.0).unwrap();
        config.source = Some(SoftSource {
            k0,
            sigma: 0.3 * k0,
            position: 10.0,
            delay: 3.0,
        });
        config.probes = vec![7.0, 13.0];
        let out = run(config).unwrap();
        let left = centroid_arrival(&out.probes[0]).unwrap();
        let right = centroid_arrival(&out.probes[1]).unwrap();
        assert!((left - right).abs() < 1e-3 * left);
        // Peak emission at t ≈ delay, arriving 3 units later.
        assert!((left - 6.0).abs() < 0.05, "{left}");
        let flux: f64 = out.probes[1].s_x.iter().sum();
        assert!(flux > 0.0);
    }
}
