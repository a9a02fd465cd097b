//! Acceptance run: one line per criterion, nonzero exit on any failure.

use std::f64::consts::FRAC_PI_4;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use evsim_cli::suite::{bilinear_suite, evolution_errors, random_profiles, SmoothField};
use evsim_core::fdtd::{Boundary, FdtdConfig, InitialPulse, Simulation, TransitExperiment};
use evsim_core::kemmer::{verify_algebra, verify_identities, KemmerSet};
use evsim_core::matching::{match_left, match_right};
use evsim_core::tmm::{group_delay, linear_fit, midgap_decay, spectrum, LayeredStack};
use evsim_core::transport::{analytic_tau, bohm_transit_time, tunneling_time};
use evsim_core::wkb::attenuation_integral;
use evsim_core::DielectricProfile;

const SUITE_SEED: u64 = 2024;
const SUITE_SIZE: usize = 100;

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, &'static str, Box<dyn Fn() -> Check + 'a>);

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(limit: Duration, start: Instant, detail: String) -> Check {
    let elapsed = start.elapsed();
    ensure(
        elapsed < limit,
        format!(
            "{detail}; {:.3} s (limit {} s)",
            elapsed.as_secs_f64(),
            limit.as_secs()
        ),
    )
}

fn closed_form_tau() -> Check {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for a in [0.0, 0.05, 0.1, 0.3] {
        for d in [0.5, 1.0, 2.0] {
            if a * d * d >= 1.0 {
                continue;
            }
            let profile = DielectricProfile::quadratic_model(a, d).map_err(|e| e.to_string())?;
            let numeric = tunneling_time(&profile, 1.0)
                .map_err(|e| e.to_string())?
                .tau;
            let exact = analytic_tau(a, d, 1.0).map_err(|e| e.to_string())?;
            worst = worst.max((numeric - exact).abs() / exact);
            cases += 1;
        }
    }
    ensure(
        worst <= 1e-10,
        format!("{cases} cases, max rel error {worst:.2e}"),
    )
    .and_then(|d| within(Duration::from_secs(1), start, d))
}

fn superluminality(profiles: &[DielectricProfile]) -> Check {
    let mut slowest: f64 = 0.0;
    for p in profiles {
        let r = tunneling_time(p, 1.0).map_err(|e| format!("{p}: {e}"))?;
        if !(r.tau < p.width()) {
            return Err(format!("{p}: tau {} not below d/c {}", r.tau, p.width()));
        }
        slowest = slowest.max(r.ratio());
    }
    for d in [0.5, 1.0, 1.7] {
        let vacuum = DielectricProfile::vacuum(d).map_err(|e| e.to_string())?;
        let tau = tunneling_time(&vacuum, 1.0).map_err(|e| e.to_string())?.tau;
        if tau != d {
            return Err(format!("vacuum tau {tau} != d/c {d}"));
        }
    }
    Ok(format!(
        "{} profiles, max tau c/d {slowest:.6}; vacuum exact",
        profiles.len()
    ))
}

fn exponent_cancellation(profiles: &[DielectricProfile]) -> Check {
    let mut worst: f64 = 0.0;
    for p in profiles {
        let tau = tunneling_time(p, 1.0).map_err(|e| e.to_string())?.tau;
        for omega0 in [1.0, 10.0, 100.0] {
            let integral =
                attenuation_integral(p, 0.0, p.width(), omega0, 1.0).map_err(|e| e.to_string())?;
            worst = worst.max((integral - omega0 * tau).abs());
        }
    }
    ensure(
        worst <= 1e-10,
        format!(
            "3 frequencies x {} profiles, max |residual| {worst:.2e}",
            profiles.len()
        ),
    )
}

fn kemmer_algebra() -> Check {
    let start = Instant::now();
    let set = KemmerSet::build();
    let algebra = verify_algebra(&set);
    let identities = verify_identities(&set);
    let failed: Vec<_> = identities
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name.clone())
        .collect();
    ensure(
        algebra.ok() && algebra.checked == 64 && failed.is_empty(),
        format!(
            "{}/{} triples, {}/{} identities{}",
            algebra.passed(),
            algebra.checked,
            identities.len() - failed.len(),
            identities.len(),
            if failed.is_empty() {
                String::new()
            } else {
                format!(", failed: {}", failed.join("; "))
            }
        ),
    )
    .and_then(|d| within(Duration::from_secs(1), start, d))
}

fn bilinear_equivalence() -> Check {
    let set = KemmerSet::build();
    let s = bilinear_suite(&set, SUITE_SEED, 1000, 1.0).map_err(|e| e.to_string())?;
    ensure(
        s.passed(1e-12),
        format!(
            "{} states, energy {:.1e}, Poynting {:.1e}, nonzero currents {}+{}",
            s.states,
            s.energy_error,
            s.poynting_error,
            s.nonzero_photon_currents,
            s.nonzero_real_currents
        ),
    )
}

fn curl_equivalence() -> Check {
    let set = KemmerSet::build();
    let mut ratios = Vec::new();
    let mut route_gap: f64 = 0.0;
    for seed in 0..5 {
        let field = SmoothField::random(SUITE_SEED + seed);
        let coarse = evolution_errors(&set, &field, 1024, 1.0).map_err(|e| e.to_string())?;
        let fine = evolution_errors(&set, &field, 2047, 1.0).map_err(|e| e.to_string())?;
        ratios.push(coarse.vs_exact / fine.vs_exact);
        route_gap = route_gap.max(coarse.vs_maxwell).max(fine.vs_maxwell);
    }
    let ok = ratios.iter().all(|r| (r - 4.0).abs() <= 0.5) && route_gap <= 1e-10;
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.3}")).collect();
    ensure(
        ok,
        format!(
            "error ratios [{}], max route difference {route_gap:.1e}",
            shown.join(", ")
        ),
    )
}

fn bohm_agreement(profiles: &[DielectricProfile]) -> Check {
    let mut worst: f64 = 0.0;
    for p in profiles {
        let tau = tunneling_time(p, 1.0).map_err(|e| e.to_string())?.tau;
        let bohm = bohm_transit_time(p, 1.0).map_err(|e| format!("{p}: {e}"))?;
        worst = worst.max((bohm - tau).abs());
    }
    ensure(
        worst <= 1e-8,
        format!("{} profiles, max |difference| {worst:.2e}", profiles.len()),
    )
}

fn fdtd_transit() -> Check {
    let start = Instant::now();
    let profile = DielectricProfile::quadratic_model(0.1, 1.0).map_err(|e| e.to_string())?;
    let experiment = TransitExperiment::default();
    let report = experiment.measure(&profile).map_err(|e| e.to_string())?;
    ensure(
        report.barrier_transit < 1.0
            && report.relative_error().abs() <= 0.02
            && report.vacuum_relative_error().abs() <= 5e-3,
        format!(
            "transit {:.5} vs tau {:.5} ({:+.2}%), vacuum {:.5} ({:+.2}%) at {} nodes/wavelength",
            report.barrier_transit,
            report.tau,
            100.0 * report.relative_error(),
            report.vacuum_transit,
            100.0 * report.vacuum_relative_error(),
            experiment.nodes_per_wavelength
        ),
    )
    .and_then(|d| within(Duration::from_secs(60), start, d))
}

fn fdtd_energy() -> Check {
    let k0 = 2.0 * std::f64::consts::PI;
    let mut config =
        FdtdConfig::vacuum(10.0, 1.0 / 25.0, 0.5, 10_000, 1.0).map_err(|e| e.to_string())?;
    config.boundary = Boundary::Reflecting;
    config.initial = Some(InitialPulse {
        k0,
        sigma: 0.3 * k0,
        center: 5.0,
    });
    let profile = DielectricProfile::quadratic_model(0.1, 1.0).map_err(|e| e.to_string())?;
    let config = config
        .with_barrier(&profile, 2.0)
        .map_err(|e| e.to_string())?;
    let mut sim = Simulation::new(config).map_err(|e| e.to_string())?;
    let e0 = sim.energy();
    let mut worst: f64 = 0.0;
    while sim.steps_taken() < 10_000 {
        sim.step().map_err(|e| e.to_string())?;
        worst = worst.max((sim.energy() - e0).abs() / e0);
    }
    ensure(
        worst <= 1e-3,
        format!("10000 steps, max relative drift {worst:.2e}"),
    )
}

fn tmm_gap() -> Check {
    let (n_high, n_low, c) = (2.25, 1.45, 1.0);
    let decay = midgap_decay(n_high, n_low, 2..=16, c).map_err(|e| e.to_string())?;
    let points: Vec<(f64, f64)> = decay.iter().map(|&(n, ln_t)| (n as f64, ln_t)).collect();
    let fit = linear_fit(&points).map_err(|e| e.to_string())?;

    let mut conservation: f64 = 0.0;
    for periods in [1, 8, 16] {
        let stack = LayeredStack::quarter_wave(n_high, n_low, periods, 1.0, c)
            .map_err(|e| e.to_string())?;
        for p in spectrum(&stack, 0.1, 3.0, 2001, c).map_err(|e| e.to_string())? {
            conservation = conservation.max((p.reflectance + p.transmittance - 1.0).abs());
        }
    }
    let delay = |periods: usize| -> Result<f64, String> {
        let stack = LayeredStack::quarter_wave(n_high, n_low, periods, 1.0, c)
            .map_err(|e| e.to_string())?;
        group_delay(&stack, 1.0, c).map_err(|e| e.to_string())
    };
    let ratio = delay(16)? / delay(8)?;
    ensure(
        fit.slope < 0.0 && fit.correlation.abs() > 0.999 && conservation <= 1e-10 && ratio < 1.2,
        format!(
            "ln T slope {:.4}/period, |r| {:.6}; max |R+T-1| {conservation:.1e}; delay(16)/delay(8) {ratio:.4}",
            fit.slope,
            fit.correlation.abs()
        ),
    )
}

fn matching_identities(profiles: &[DielectricProfile]) -> Check {
    for p in profiles {
        for k0 in [0.5, 1.0, 7.0] {
            let phi = match_left(p, k0, 0.0).map_err(|e| e.to_string())?.phi;
            if phi != FRAC_PI_4 {
                return Err(format!("{p}: phi = {phi}"));
            }
        }
    }
    let mut worst: f64 = 0.0;
    for d in [0.5, 1.0, 2.0] {
        let vacuum = DielectricProfile::vacuum(d).map_err(|e| e.to_string())?;
        for r in [0.0, 0.1, 0.25, 0.5, 0.9] {
            for k0 in [1.0, 3.0] {
                let m = match_right(&vacuum, k0, r, d, 1.0).map_err(|e| e.to_string())?;
                worst = worst.max((m.sqrt_t * m.sqrt_t - (1.0 - r.sqrt()).powi(2)).abs());
            }
        }
    }
    ensure(
        worst <= 1e-10,
        format!(
            "phi = pi/4 on {} profiles; no-barrier max |T - (1-sqrt R)^2| {worst:.1e}",
            profiles.len()
        ),
    )
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = "d = 1.0\nseed = 99\n[sqrt_profile]\na2 = 0.1\n[simulate]\nsamples = 61\n[tmm]\nsamples = 201\n";
    std::fs::write(dir.path().join("run.toml"), config).map_err(|e| e.to_string())?;
    let commands = ["tau", "simulate", "spectrum", "kemmer-verify", "wkb-check"];
    let mut snapshots = Vec::new();
    for run in ["first", "second"] {
        let cwd = dir.path().join(run);
        std::fs::create_dir(&cwd).map_err(|e| e.to_string())?;
        std::fs::copy(dir.path().join("run.toml"), cwd.join("run.toml"))
            .map_err(|e| e.to_string())?;
        for format in ["csv", "json"] {
            for cmd in commands {
                let status = Command::new(env!("CARGO_BIN_EXE_evsim"))
                    .current_dir(&cwd)
                    .args([
                        cmd,
                        "--config",
                        "run.toml",
                        "--svg",
                        "--format",
                        format,
                        "--out-dir",
                    ])
                    .arg(format!("out-{format}"))
                    .output()
                    .map_err(|e| e.to_string())?;
                if !status.status.success() {
                    return Err(format!(
                        "{cmd} failed: {}",
                        String::from_utf8_lossy(&status.stderr)
                    ));
                }
            }
        }
        snapshots.push(read_tree(&cwd)?);
    }
    let files = snapshots[0].len();
    ensure(
        files > 0 && snapshots[0] == snapshots[1],
        format!("{files} output files byte-identical across two runs"),
    )
}

fn read_tree(root: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut out = Vec::new();
    for dir in ["out-csv", "out-json"] {
        for entry in std::fs::read_dir(root.join(dir)).map_err(|e| e.to_string())? {
            let path = entry.map_err(|e| e.to_string())?.path();
            let bytes = std::fs::read(&path).map_err(|e| e.to_string())?;
            out.push((
                format!("{dir}/{}", path.file_name().unwrap().to_string_lossy()),
                bytes,
            ));
        }
    }
    out.sort();
    Ok(out)
}

fn main() -> ExitCode {
    let profiles = random_profiles(SUITE_SEED, SUITE_SIZE);
    let criteria: Vec<Criterion> = vec![
        (
            "AC01",
            "closed-form tunneling time",
            Box::new(closed_form_tau),
        ),
        (
            "AC02",
            "superluminality",
            Box::new(|| superluminality(&profiles)),
        ),
        (
            "AC03",
            "exponent cancellation",
            Box::new(|| exponent_cancellation(&profiles)),
        ),
        ("AC04", "Kemmer algebra", Box::new(kemmer_algebra)),
        (
            "AC05",
            "bilinear/classical equivalence",
            Box::new(bilinear_equivalence),
        ),
        (
            "AC06",
            "curl equivalence of the evolution",
            Box::new(curl_equivalence),
        ),
        (
            "AC07",
            "guidance-law/transport agreement",
            Box::new(|| bohm_agreement(&profiles)),
        ),
        (
            "AC08",
            "FDTD transit cross-validation",
            Box::new(fdtd_transit),
        ),
        ("AC09", "FDTD energy conservation", Box::new(fdtd_energy)),
        ("AC10", "TMM band-gap properties", Box::new(tmm_gap)),
        (
            "AC11",
            "matching identities",
            Box::new(|| matching_identities(&profiles)),
        ),
        ("AC12", "CLI determinism", Box::new(determinism)),
    ];
    let mut failures = 0;
    for (id, name, check) in &criteria {
        match check() {
            Ok(detail) => println!("[PASS] {id} {name}: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("[FAIL] {id} {name}: {detail}");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
