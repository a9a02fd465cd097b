//! Experiment orchestration: each subcommand turns a [`RunConfig`] into an
//! [`Outcome`], which [`render`] serializes into files.

use rayon::prelude::*;
use serde_json::{json, Value};

use evsim_core::fdtd::{centroid_arrival, run as run_fdtd, TransitExperiment};
use evsim_core::kemmer::{verify_algebra, verify_identities, KemmerSet};
use evsim_core::matching::{MatchedSolution, Region, WavePacket};
use evsim_core::tmm::{find_gap, group_delay, linear_fit, midgap_decay, spectrum, LayeredStack};
use evsim_core::transport::{
    analytic_tau, bohm_transit_time, energy_density, poynting, tunneling_time,
};
use evsim_core::wkb::{
    attenuation_integral, substitution_residual, wkb_validity, WkbKind, WkbSolution,
};

use crate::config::{Format, RunConfig};
use crate::error::CliError;
use crate::output::{line_plot, Cell, Series, Table};
use crate::suite::{bilinear_suite, evolution_errors, SmoothField};

/// Tolerance for the floating-point bilinear checks.
pub const BILINEAR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Tau,
    Simulate,
    Fdtd,
    Spectrum,
    KemmerVerify { dump_matrices: bool },
    WkbCheck,
}

impl Experiment {
    /// Stem of the output file names.
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Tau => "tau",
            Experiment::Simulate => "simulate",
            Experiment::Fdtd => "fdtd",
            Experiment::Spectrum => "spectrum",
            Experiment::KemmerVerify { .. } => "kemmer_verify",
            Experiment::WkbCheck => "wkb_check",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    pub log_y: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub experiment: Experiment,
    pub result: Value,
    /// Named tables; the first is the primary one.
    pub tables: Vec<(String, Table)>,
    pub plot: Option<Plot>,
    pub extra_json: Vec<(String, Value)>,
    /// Human-readable lines for stdout.
    pub report: Vec<String>,
    /// Set when a verification suite failed.
    pub failure: Option<String>,
}

impl Outcome {
    fn new(experiment: Experiment, result: Value) -> Self {
        Self {
            experiment,
            result,
            tables: Vec::new(),
            plot: None,
            extra_json: Vec::new(),
            report: Vec::new(),
            failure: None,
        }
    }
}

pub fn run_experiment(experiment: Experiment, config: &RunConfig) -> Result<Outcome, CliError> {
    match experiment {
        Experiment::Tau => run_tau(config),
        Experiment::Simulate => run_simulate(config),
        Experiment::Fdtd => run_fdtd_transit(config),
        Experiment::Spectrum => run_spectrum(config),
        Experiment::KemmerVerify { dump_matrices } => run_kemmer(config, dump_matrices),
        Experiment::WkbCheck => run_wkb(config),
    }
}

/// The a of a pure √ε_c = 1 − ax² model, when the config is one.
fn quadratic_model(config: &RunConfig) -> Option<f64> {
    let p = config.sqrt_profile.as_ref()?;
    match p.0.iter().collect::<Vec<_>>().as_slice() {
        [(2, a)] => Some(**a),
        _ => None,
    }
}

fn run_tau(config: &RunConfig) -> Result<Outcome, CliError> {
    let profile = config.dielectric()?;
    let c = config.c;
    let transport = tunneling_time(&profile, c)?;
    let analytic = quadratic_model(config).and_then(|a| analytic_tau(a, config.d, c).ok());
    let bohm = if config.tau.bohm {
        Some(bohm_transit_time(&profile, c)?)
    } else {
        None
    };
    let omega0 = c * config.packet.k0;
    let exponent =
        attenuation_integral(&profile, 0.0, config.d, omega0, c)? - omega0 * transport.tau;

    let mut table = Table::new(&["x [L]", "eps_c [1]", "v [L/T]"]);
    for &(x, v) in &transport.velocity {
        table.push(vec![
            x.into(),
            profile.eval_eps_continued(x)?.into(),
            v.into(),
        ]);
    }
    let result = json!({
        "tau": transport.tau,
        "tau_vacuum": transport.tau_vacuum,
        "ratio": transport.ratio(),
        "superluminal": transport.superluminal,
        "analytic_tau": analytic,
        "bohm_time": bohm,
        "omega0": omega0,
        "exponent_residual": exponent,
    });
    let mut outcome = Outcome::new(Experiment::Tau, result);
    outcome.report.push(format!(
        "tau = {:.9} (vacuum {:.9}, ratio {:.6}){}",
        transport.tau,
        transport.tau_vacuum,
        transport.ratio(),
        if transport.superluminal {
            ", superluminal"
        } else {
            ""
        }
    ));
    if let Some(t) = analytic {
        outcome.report.push(format!("closed form {t:.9}"));
    }
    if let Some(t) = bohm {
        outcome.report.push(format!("guidance-law transit {t:.9}"));
    }
    outcome.plot = Some(Plot {
        title: "energy-transport velocity".into(),
        x_label: "x [L]".into(),
        y_label: "v [L/T]".into(),
        series: vec![
            Series {
                name: "v(x)".into(),
                points: transport.velocity.clone(),
            },
            Series {
                name: "c".into(),
                points: vec![(0.0, c), (config.d, c)],
            },
        ],
        log_y: false,
    });
    outcome.tables.push(("velocity".into(), table));
    Ok(outcome)
}

fn linspace(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> + Clone {
    (0..n).map(move |i| {
        if i + 1 == n {
            b
        } else {
            a + (b - a) * i as f64 / (n - 1) as f64
        }
    })
}

fn run_simulate(config: &RunConfig) -> Result<Outcome, CliError> {
    let profile = config.dielectric()?;
    let p = &config.packet;
    let packet = WavePacket::new(p.k0, p.sigma_ratio * p.k0)?;
    let sol = MatchedSolution::new(profile, packet, p.reflectance, config.c)?;
    let s = &config.simulate;
    let points: Vec<(f64, f64)> = s
        .times
        .iter()
        .flat_map(|&t| linspace(s.x_min, s.x_max, s.samples).map(move |x| (t, x)))
        .collect();
    let rows: Vec<(f64, f64, Region, f64, f64, f64, f64)> = points
        .par_iter()
        .map(|&(t, x)| {
            let f = sol.region_fields(x, t)?;
            let eps = match f.region {
                Region::Barrier => sol.profile.eval_eps_continued(x)?,
                _ => 1.0,
            };
            Ok((
                t,
                x,
                f.region,
                f.e_z,
                f.h_y,
                poynting(f.e_z, f.h_y, config.c),
                energy_density(eps, f.e_z, f.h_y),
            ))
        })
        .collect::<evsim_core::Result<_>>()?;

    let mut table = Table::new(&[
        "t [T]",
        "x [L]",
        "region [label]",
        "E_z [arb]",
        "H_y [arb]",
        "S_x [arb*L/T]",
        "energy [arb/L]",
    ]);
    let mut series: Vec<Series> = Vec::new();
    for &(t, x, region, e, h, flux, energy) in &rows {
        table.push(vec![
            t.into(),
            x.into(),
            region.as_str().into(),
            e.into(),
            h.into(),
            flux.into(),
            energy.into(),
        ]);
        match series.last_mut() {
            Some(last) if last.name == format!("t = {t}") => last.points.push((x, e)),
            _ => series.push(Series {
                name: format!("t = {t}"),
                points: vec![(x, e)],
            }),
        }
    }
    let result = json!({
        "phi": sol.phi,
        "amplitude": sol.amplitude,
        "chi": sol.chi,
        "sqrt_t": sol.sqrt_t,
        "transmittance": sol.transmittance(),
        "tau": sol.tau,
        "omega0": sol.omega0(),
        "samples": rows.len(),
    });
    let mut outcome = Outcome::new(Experiment::Simulate, result);
    outcome.report.push(format!(
        "matched packet: phi = {:.12}, T = {:.6}, tau = {:.9}, {} samples",
        sol.phi,
        sol.transmittance(),
        sol.tau,
        rows.len()
    ));
    outcome.tables.push(("fields".into(), table));
    outcome.plot = Some(Plot {
        title: "matched field E_z(x)".into(),
        x_label: "x [L]".into(),
        y_label: "E_z [arb]".into(),
        series,
        log_y: false,
    });
    Ok(outcome)
}

fn run_fdtd_transit(config: &RunConfig) -> Result<Outcome, CliError> {
    let profile = config.dielectric()?;
    let f = &config.fdtd;
    let experiment = TransitExperiment {
        k0: f.k0,
        sigma_ratio: f.sigma_ratio,
        nodes_per_wavelength: f.nodes_per_wavelength,
        courant: f.courant,
        gap: f.gap,
        c: config.c,
        ..TransitExperiment::default()
    };
    let barrier = experiment.barrier_config(&profile)?;
    barrier.validate()?;
    let report = experiment.measure(&profile)?;
    let output = run_fdtd(barrier)?;

    let mut series_table = Table::new(&[
        "probe [index]",
        "x [L]",
        "t [T]",
        "E_z [arb]",
        "H_y [arb]",
        "S_x [arb*L/T]",
        "energy [arb/L]",
    ]);
    let mut centroids = Vec::new();
    let mut plot_series = Vec::new();
    for (i, probe) in output.probes.iter().enumerate() {
        centroids.push(centroid_arrival(probe)?);
        for k in 0..probe.len() {
            series_table.push(vec![
                i.into(),
                probe.position.into(),
                probe.t[k].into(),
                probe.e_z[k].into(),
                probe.h_y[k].into(),
                probe.s_x[k].into(),
                probe.energy[k].into(),
            ]);
        }
        plot_series.push(Series {
            name: format!("probe at x = {:.4}", probe.position),
            points: probe
                .t
                .iter()
                .copied()
                .zip(probe.e_z.iter().copied())
                .collect(),
        });
    }
    let result = json!({
        "report": report,
        "relative_error": report.relative_error(),
        "vacuum_relative_error": report.vacuum_relative_error(),
        "superluminal": report.superluminal(),
        "probe_centroids": centroids,
    });
    let mut outcome = Outcome::new(Experiment::Fdtd, result);
    outcome.report.push(format!(
        "barrier transit {:.6} vs tau {:.6} ({:+.3}%), vacuum transit {:.6} vs {:.6} ({:+.3}%)",
        report.barrier_transit,
        report.tau,
        100.0 * report.relative_error(),
        report.vacuum_transit,
        report.vacuum_time,
        100.0 * report.vacuum_relative_error()
    ));
    outcome.tables.push(("probes".into(), series_table));
    if f.snapshot {
        let grid = &output.final_grid;
        let mut snap = Table::new(&["x [L]", "E_z [arb]", "H_y [arb]"]);
        for j in 0..grid.len() {
            snap.push(vec![
                grid.x(j).into(),
                grid.e_z[j].into(),
                grid.h_y[j].into(),
            ]);
        }
        outcome.tables.push(("snapshot".into(), snap));
    }
    outcome.plot = Some(Plot {
        title: "FDTD probe signals".into(),
        x_label: "t [T]".into(),
        y_label: "E_z [arb]".into(),
        series: plot_series,
        log_y: false,
    });
    Ok(outcome)
}

fn run_spectrum(config: &RunConfig) -> Result<Outcome, CliError> {
    let t = &config.tmm;
    let c = config.c;
    let stack = LayeredStack::quarter_wave(t.n_high, t.n_low, t.periods, t.omega0, c)?;
    let points = spectrum(&stack, t.omega_min, t.omega_max, t.samples, c)?;
    let delays: Vec<f64> = points
        .par_iter()
        .map(|p| group_delay(&stack, p.omega, c))
        .collect::<evsim_core::Result<_>>()?;
    let gap = find_gap(&points, t.gap_threshold);
    let conservation = points
        .iter()
        .map(|p| (p.reflectance + p.transmittance - 1.0).abs())
        .fold(0.0, f64::max);

    let [lo, hi] = t.decay_periods;
    let decay = midgap_decay(t.n_high, t.n_low, lo..=hi, c)?;
    let fit_points: Vec<(f64, f64)> = decay.iter().map(|&(n, ln_t)| (n as f64, ln_t)).collect();
    let fit = linear_fit(&fit_points)?;
    let midgap = |periods: usize| -> evsim_core::Result<f64> {
        let s = LayeredStack::quarter_wave(t.n_high, t.n_low, periods, t.omega0, c)?;
        group_delay(&s, t.omega0, c)
    };
    let (delay_n, delay_2n) = (midgap(t.periods)?, midgap(2 * t.periods)?);

    let mut table = Table::new(&[
        "omega [1/T]",
        "T [1]",
        "R [1]",
        "phase [rad]",
        "group_delay [T]",
    ]);
    for (p, &delay) in points.iter().zip(&delays) {
        table.push(vec![
            p.omega.into(),
            p.transmittance.into(),
            p.reflectance.into(),
            p.phase.into(),
            delay.into(),
        ]);
    }
    let mut decay_table = Table::new(&["periods [1]", "ln_T [1]"]);
    for &(n, ln_t) in &decay {
        decay_table.push(vec![n.into(), ln_t.into()]);
    }
    let result = json!({
        "stack_thickness": stack.thickness(),
        "gap": gap.map(|g| json!({
            "lower": g.lower,
            "upper": g.upper,
            "center": g.center(),
            "width": g.width(),
            "min_transmittance": g.min_transmittance,
        })),
        "max_conservation_error": conservation,
        "decay_fit": fit,
        "midgap_delay": delay_n,
        "midgap_delay_doubled": delay_2n,
        "delay_ratio": delay_2n / delay_n,
    });
    let mut outcome = Outcome::new(Experiment::Spectrum, result);
    outcome.report.push(match gap {
        Some(g) => format!(
            "gap [{:.6}, {:.6}], min T = {:.3e}; ln T slope {:.6} per period (r = {:.6})",
            g.lower, g.upper, g.min_transmittance, fit.slope, fit.correlation
        ),
        None => format!("no gap below T = {}", t.gap_threshold),
    });
    outcome.report.push(format!(
        "midgap delay {delay_n:.6} at N = {}, {delay_2n:.6} at N = {} (ratio {:.4})",
        t.periods,
        2 * t.periods,
        delay_2n / delay_n
    ));
    outcome.plot = Some(Plot {
        title: "quarter-wave stack transmittance".into(),
        x_label: "omega [1/T]".into(),
        y_label: "T".into(),
        series: vec![Series {
            name: format!("N = {}", t.periods),
            points: points.iter().map(|p| (p.omega, p.transmittance)).collect(),
        }],
        log_y: true,
    });
    outcome.tables.push(("spectrum".into(), table));
    outcome.tables.push(("decay".into(), decay_table));
    Ok(outcome)
}

fn run_kemmer(config: &RunConfig, dump_matrices: bool) -> Result<Outcome, CliError> {
    let set = KemmerSet::build();
    let algebra = verify_algebra(&set);
    let identities = verify_identities(&set);
    let bilinears = bilinear_suite(&set, config.seed, config.kemmer.random_states, config.c)?;
    let field = SmoothField::random(config.seed);
    let evolution = evolution_errors(&set, &field, 257, config.c)?;
    let evolution_ok = evolution.vs_maxwell <= 1e-10;

    let mut table = Table::new(&["check [name]", "status [pass|FAIL]", "detail [text]"]);
    let mut row = |name: &str, ok: bool, detail: String| {
        table.push(vec![
            name.into(),
            if ok { "pass" } else { "FAIL" }.into(),
            Cell::Text(detail),
        ]);
    };
    row(
        "trilinear algebra",
        algebra.ok(),
        format!("{}/{} triples", algebra.passed(), algebra.checked),
    );
    for check in &identities {
        row(&check.name, check.passed, "exact".into());
    }
    row(
        "energy bilinear",
        bilinears.energy_error <= BILINEAR_TOL,
        format!(
            "max rel error {:e} over {} states",
            bilinears.energy_error, bilinears.states
        ),
    );
    row(
        "Poynting bilinear",
        bilinears.poynting_error <= BILINEAR_TOL,
        format!("max rel error {:e}", bilinears.poynting_error),
    );
    row(
        "charge current of photon states",
        bilinears.nonzero_photon_currents == 0,
        format!("{} nonzero", bilinears.nonzero_photon_currents),
    );
    row(
        "charge current of real columns",
        bilinears.nonzero_real_currents == 0,
        format!("{} nonzero", bilinears.nonzero_real_currents),
    );
    row(
        "evolution matches Maxwell",
        evolution_ok,
        format!("max difference {:e}", evolution.vs_maxwell),
    );

    let failed: Vec<String> = table
        .rows
        .iter()
        .filter(|r| r[1] == Cell::Text("FAIL".into()))
        .map(|r| match &r[0] {
            Cell::Text(s) => s.clone(),
            other => format!("{other:?}"),
        })
        .collect();
    let result = json!({
        "algebra": { "checked": algebra.checked, "passed": algebra.passed() },
        "identities": identities,
        "bilinears": bilinears,
        "evolution": evolution,
        "all_passed": failed.is_empty(),
    });
    let mut outcome = Outcome::new(Experiment::KemmerVerify { dump_matrices }, result);
    for r in &table.rows {
        if let [Cell::Text(name), Cell::Text(status), Cell::Text(detail)] = r.as_slice() {
            outcome
                .report
                .push(format!("{status:4}  {name}  ({detail})"));
        }
    }
    if !failed.is_empty() {
        outcome.failure = Some(format!("failed checks: {}", failed.join(", ")));
    }
    if dump_matrices {
        outcome
            .extra_json
            .push(("matrices".into(), json!(set.dump())));
    }
    outcome.tables.push(("checks".into(), table));
    Ok(outcome)
}

fn run_wkb(config: &RunConfig) -> Result<Outcome, CliError> {
    let profile = config.dielectric()?;
    let (c, d) = (config.c, config.d);
    let w = &config.wkb;
    let mut omegas = w.omegas.clone();
    omegas.sort_by(f64::total_cmp);
    let rows: Vec<(f64, f64, f64, f64)> = omegas
        .par_iter()
        .map(|&omega| {
            let validity = linspace(0.0, d, w.samples)
                .map(|x| wkb_validity(&profile, omega, c, x))
                .fold(0.0, f64::max);
            let osc = WkbSolution::new(WkbKind::Oscillating, 1.0, 0.0, omega, c, profile.clone())?;
            let eva = WkbSolution::new(WkbKind::Evanescent, 1.0, 0.0, omega, c, profile.clone())?;
            Ok((
                omega,
                validity,
                substitution_residual(&osc, 0.0, d, w.samples)?,
                substitution_residual(&eva, 0.0, d, w.samples)?,
            ))
        })
        .collect::<evsim_core::Result<_>>()?;

    let decreasing = rows.windows(2).all(|p| p[1].2 < p[0].2 && p[1].3 < p[0].3);
    let mut table = Table::new(&[
        "omega [1/T]",
        "max_validity [1]",
        "oscillating_residual [1]",
        "evanescent_residual [1]",
    ]);
    for &(omega, v, o, e) in &rows {
        table.push(vec![omega.into(), v.into(), o.into(), e.into()]);
    }
    let result = json!({
        "rows": rows.iter().map(|&(omega, v, o, e)| json!({
            "omega": omega,
            "max_validity": v,
            "oscillating_residual": o,
            "evanescent_residual": e,
        })).collect::<Vec<_>>(),
        "residuals_decrease": decreasing,
    });
    let mut outcome = Outcome::new(Experiment::WkbCheck, result);
    for &(omega, v, o, e) in &rows {
        outcome.report.push(format!(
            "omega {omega}: validity {v:.3e}, residuals {o:.3e} (oscillating) {e:.3e} (evanescent)"
        ));
    }
    if !decreasing {
        outcome.failure = Some("WKB residuals do not decrease with frequency".into());
    }
    outcome.plot = Some(Plot {
        title: "WKB substitution residual".into(),
        x_label: "omega [1/T]".into(),
        y_label: "residual".into(),
        series: vec![
            Series {
                name: "oscillating".into(),
                points: rows.iter().map(|r| (r.0, r.2)).collect(),
            },
            Series {
                name: "evanescent".into(),
                points: rows.iter().map(|r| (r.0, r.3)).collect(),
            },
        ],
        log_y: true,
    });
    outcome.tables.push(("residuals".into(), table));
    Ok(outcome)
}

/// A file to be written under the output directory.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub file: String,
    pub contents: String,
}

/// Serializes an outcome. The JSON summary always embeds the resolved
/// config; tables go into it (json) or into one CSV each (csv).
pub fn render(outcome: &Outcome, config: &RunConfig) -> Vec<Artifact> {
    let stem = outcome.experiment.name();
    let mut summary = json!({
        "command": stem,
        "config": config,
        "result": outcome.result,
        "passed": outcome.failure.is_none(),
    });
    let mut artifacts = Vec::new();
    match config.output.format {
        Format::Json => {
            let tables: serde_json::Map<String, Value> = outcome
                .tables
                .iter()
                .map(|(name, t)| (name.clone(), t.to_json()))
                .collect();
            summary["tables"] = Value::Object(tables);
        }
        Format::Csv => {
            for (i, (name, table)) in outcome.tables.iter().enumerate() {
                let file = if i == 0 {
                    format!("{stem}.csv")
                } else {
                    format!("{stem}_{name}.csv")
                };
                artifacts.push(Artifact {
                    file,
                    contents: table.to_csv(),
                });
            }
        }
    }
    for (name, value) in &outcome.extra_json {
        artifacts.push(Artifact {
            file: format!("{stem}_{name}.json"),
            contents: to_json_text(value),
        });
    }
    if config.output.svg {
        if let Some(p) = &outcome.plot {
            artifacts.push(Artifact {
                file: format!("{stem}.svg"),
                contents: line_plot(&p.title, &p.x_label, &p.y_label, &p.series, p.log_y),
            });
        }
    }
    artifacts.insert(
        0,
        Artifact {
            file: format!("{stem}.json"),
            contents: to_json_text(&summary),
        },
    );
    artifacts
}

fn to_json_text(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    s.push('\n');
    s
}
