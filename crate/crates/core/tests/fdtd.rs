use std::f64::consts::PI;

use evsim_core::fdtd::{
    centroid_arrival, run, total_energy, Boundary, FdtdConfig, InitialPulse, Simulation,
    TransitExperiment,
};
use evsim_core::transport::tunneling_time;
use evsim_core::DielectricProfile;

// Vacuum arrival delay between probes 4 units apart, relative error.
fn vacuum_delay_error(nodes_per_wavelength: f64, courant: f64) -> f64 {
    let k0 = 2.0 * PI;
    let h = 1.0 / nodes_per_wavelength;
    let sigma = 0.1 * k0;
    let mut config = FdtdConfig::vacuum(24.0, h, courant, 0, 1.0).unwrap();
    config.steps = (18.0 / config.dt()).ceil() as usize;
    config.initial = Some(InitialPulse {
        k0,
        sigma,
        center: 6.0,
    });
    config.probes = vec![12.0, 16.0];
    let out = run(config).unwrap();
    let t1 = centroid_arrival(&out.probes[0]).unwrap();
    let t2 = centroid_arrival(&out.probes[1]).unwrap();
    ((t2 - t1) - 4.0).abs() / 4.0
}

#[test]
fn vacuum_arrival_at_twenty_nodes_per_wavelength() {
    assert!(vacuum_delay_error(20.0, 0.9) < 5e-3);
}

#[test]
fn vacuum_arrival_converges_at_second_order() {
    let coarse = vacuum_delay_error(20.0, 0.5);
    let fine = vacuum_delay_error(40.0, 0.5);
    let ratio = coarse / fine;
    assert!((ratio - 4.0).abs() < 0.5, "{coarse} {fine} {ratio}");
}

#[test]
fn uniform_slab_halves_the_speed() {
    let k0 = 2.0 * PI;
    let mut config = FdtdConfig::vacuum(16.0, 1.0 / 80.0, 0.9, 0, 1.0).unwrap();
    config.eps = vec![4.0; config.nodes()];
    config.steps = (2.0 * 11.0 / config.dt()).ceil() as usize;
    // Wavelength in the slab is 0.5, resolved by 40 nodes.
    config.initial = Some(InitialPulse {
        k0: 2.0 * k0,
        sigma: 0.2 * k0,
        center: 3.0,
    });
    config.probes = vec![7.0, 10.0];
    let out = run(config).unwrap();
    let delay =
        centroid_arrival(&out.probes[1]).unwrap() - centroid_arrival(&out.probes[0]).unwrap();
    assert!((delay - 6.0).abs() / 6.0 < 5e-3, "{delay}");
}

#[test]
fn closed_domain_conserves_energy() {
    let k0 = 2.0 * PI;
    let mut config = FdtdConfig::vacuum(10.0, 1.0 / 25.0, 0.5, 10_000, 1.0).unwrap();
    config.boundary = Boundary::Reflecting;
    config.initial = Some(InitialPulse {
        k0,
        sigma: 0.3 * k0,
        center: 5.0,
    });
    // Nonuniform interior exercises the ε-weighted energy.
    let profile = DielectricProfile::quadratic_model(0.1, 1.0).unwrap();
    let config = config.with_barrier(&profile, 2.0).unwrap();
    let mut sim = Simulation::new(config).unwrap();
    let e0 = sim.energy();
    let mut worst: f64 = 0.0;
    while sim.steps_taken() < 10_000 {
        sim.step().unwrap();
        if sim.steps_taken().is_multiple_of(50) {
            worst = worst.max((sim.energy() - e0).abs() / e0);
        }
    }
    assert!(worst <= 1e-3, "relative drift {worst}");
}

#[test]
fn snapshot_energy_tracks_the_conserved_energy() {
    let k0 = 2.0 * PI;
    let mut config = FdtdConfig::vacuum(10.0, 1.0 / 40.0, 0.5, 100, 1.0).unwrap();
    config.initial = Some(InitialPulse {
        k0,
        sigma: 0.3 * k0,
        center: 5.0,
    });
    let mut sim = Simulation::new(config).unwrap();
    sim.run_to_end().unwrap();
    let grid = sim.snapshot();
    let nodes = total_energy(&grid, &sim.config().eps);
    assert!((nodes - sim.energy()).abs() / sim.energy() < 1e-2);
}

#[test]
fn model_barrier_transit_is_superluminal() {
    let profile = DielectricProfile::quadratic_model(0.1, 1.0).unwrap();
    let report = TransitExperiment::default().measure(&profile).unwrap();
    let tau = tunneling_time(&profile, 1.0).unwrap().tau;
    assert_eq!(report.tau, tau);
    assert!(report.superluminal());
    assert!(report.relative_error() < 0.02, "{report:?}");
    assert!(report.vacuum_relative_error() < 5e-3, "{report:?}");
}

#[test]
fn transit_converges_to_transport_time() {
    let profile = DielectricProfile::quadratic_model(0.3, 1.0).unwrap();
    let coarse = TransitExperiment {
        nodes_per_wavelength: 20.0,
        ..Default::default()
    }
    .measure(&profile)
    .unwrap();
    let fine = TransitExperiment::default().measure(&profile).unwrap();
    assert!(
        fine.relative_error() < coarse.relative_error(),
        "{coarse:?} {fine:?}"
    );
}

#[test]
fn transit_is_reciprocal() {
    let profile = DielectricProfile::permittivity([(2, 0.15), (4, 0.01)], 1.0).unwrap();
    let exp = TransitExperiment {
        nodes_per_wavelength: 20.0,
        ..Default::default()
    };
    let forward = exp.measure(&profile).unwrap().barrier_transit;
    let backward = exp.measure_mirrored(&profile).unwrap().barrier_transit;
    assert!(
        (forward - backward).abs() <= 1e-6 * forward,
        "{forward} {backward}"
    );
}
