use num_complex::Complex64;

use evsim_core::wkb::{
    evanescent_field, oscillating_field, substitution_residual, wkb_validity, WkbKind, WkbSolution,
};
use evsim_core::DielectricProfile;

// Max over interior samples of |Y″ + s·q(x)Y| / max|q Y|, with Y″ from a
// five-point stencil.
fn relative_residual(y: impl Fn(f64) -> f64, q: impl Fn(f64) -> f64, sign: f64, h: f64) -> f64 {
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..=200 {
        let x = 0.2 + 1.4 * i as f64 / 200.0;
        let d2 = (-y(x + 2.0 * h) + 16.0 * y(x + h) - 30.0 * y(x) + 16.0 * y(x - h)
            - y(x - 2.0 * h))
            / (12.0 * h * h);
        worst = worst.max((d2 + sign * q(x) * y(x)).abs());
        scale = scale.max((q(x) * y(x)).abs());
    }
    worst / scale
}

#[test]
fn oscillating_residual_shrinks_with_validity() {
    let profile = DielectricProfile::permittivity([(2, 0.1)], 2.0).unwrap();
    let residual = |omega: f64| {
        let sol =
            WkbSolution::new(WkbKind::Oscillating, 0.5, 0.5, omega, 1.0, profile.clone()).unwrap();
        let h = 0.02 / omega;
        relative_residual(
            |x| oscillating_field(&sol, x, 0.0).unwrap(),
            |x| omega * omega * profile.eval_eps(x),
            1.0,
            h,
        )
    };
    let (r10, r100) = (residual(10.0), residual(100.0));
    let (v10, v100) = (
        wkb_validity(&profile, 10.0, 1.0, 1.0),
        wkb_validity(&profile, 100.0, 1.0, 1.0),
    );
    assert!(r10 < 1e-2, "{r10}");
    // No worse than linear in the validity metric.
    assert!(r100 / r10 <= 1.1 * v100 / v10, "{r10} {r100}");
}

#[test]
fn library_residual_agrees_with_local_stencil() {
    let profile = DielectricProfile::permittivity([(2, 0.1)], 2.0).unwrap();
    let sol = WkbSolution::new(WkbKind::Oscillating, 0.5, 0.5, 10.0, 1.0, profile.clone()).unwrap();
    let lib = substitution_residual(&sol, 0.2, 1.6, 201).unwrap();
    let local = relative_residual(
        |x| oscillating_field(&sol, x, 0.0).unwrap(),
        |x| 100.0 * profile.eval_eps(x),
        1.0,
        0.002,
    );
    assert!((lib - local).abs() <= 1e-6 * local, "{lib} {local}");
    let vacuum = WkbSolution::new(
        WkbKind::Evanescent,
        1.0,
        0.0,
        10.0,
        1.0,
        DielectricProfile::vacuum(1.0).unwrap(),
    )
    .unwrap();
    assert!(substitution_residual(&vacuum, 0.1, 0.9, 50).unwrap() < 1e-8);
}

#[test]
fn evanescent_field_solves_mapped_equation() {
    let profile = DielectricProfile::quadratic_model(0.1, 2.0).unwrap();
    let residual = |omega: f64| {
        let sol =
            WkbSolution::new(WkbKind::Evanescent, 0.7, 0.3, omega, 1.0, profile.clone()).unwrap();
        let t = 0.1 / omega;
        relative_residual(
            |x| evanescent_field(&sol, x, t).unwrap(),
            |x| omega * omega * profile.eval_eps_continued(x).unwrap(),
            -1.0,
            0.02 / omega,
        )
    };
    let (r10, r100) = (residual(10.0), residual(100.0));
    assert!(r10 < 1e-2, "{r10}");
    assert!(r100 < r10 / 10.0, "{r10} {r100}");
}

// Complex oscillating form k^{-1/2}[c₁e^{−i(kx−ωt)} + c₂e^{i(kx−ωt)}] in vacuum.
fn vacuum_complex(c1: f64, c2: f64, k: f64, omega: f64, x: Complex64, t: Complex64) -> Complex64 {
    let phase = k * x - omega * t;
    let i = Complex64::i();
    (c1 * (-i * phase).exp() + c2 * (i * phase).exp()) / k.sqrt()
}

#[test]
fn vacuum_mapping_turns_oscillation_into_tunneling() {
    let (c1, c2, omega) = (0.8, 0.35, 2.0);
    let vacuum = DielectricProfile::vacuum(3.0).unwrap();
    let osc = WkbSolution::new(WkbKind::Oscillating, c1, c1, omega, 1.0, vacuum.clone()).unwrap();
    let eva = WkbSolution::new(WkbKind::Evanescent, c1, c2, omega, 1.0, vacuum).unwrap();
    let minus_i = Complex64::new(0.0, -1.0);
    for (x, t) in [(0.0, 0.0), (0.4, 0.1), (1.3, -0.2), (2.5, 0.7)] {
        // Real form: equal amplitudes give (c₁ + c₂)cos(kx − ωt).
        let real = vacuum_complex(c1, c1, omega, omega, x.into(), t.into());
        assert!((real.re - oscillating_field(&osc, x, t).unwrap()).abs() < 1e-14);
        assert!(real.im.abs() < 1e-14);

        let mapped = vacuum_complex(c1, c2, omega, omega, minus_i * x, minus_i * t);
        let direct = evanescent_field(&eva, x, t).unwrap();
        assert!(
            (mapped.re - direct).abs() < 1e-12 * direct.abs().max(1.0),
            "{mapped} vs {direct}"
        );
        assert!(mapped.im.abs() < 1e-12);
    }
}
