//! Cross-module consistency checks with independent numerical oracles.

mod common;

use common::{adaptive_simpson, linspace, simpson_uniform};
use dho_core::dynamics::{integrate, IntegrateOptions};
use dho_core::ode::{solve_on_grid, OdeOptions};
use dho_core::spectrum::{self, Coordinate};
use dho_core::timewarp::{self, OscillatorParams};
use dho_core::wavefunction::{self, quadrature_norm, superpose};
use num_complex::Complex64;

#[test]
fn hamilton_equations_reproduce_warped_equation_of_motion() {
    // Trajectories of H = kinetic*p^2 + potential*q^2 must solve
    // 4 a^2 tau^2 q'' + 8 a^2 tau q' + w^2 q = 0.
    let p = OscillatorParams::new(0.5, 1.3).unwrap();
    let alpha = p.alpha();
    let omega = p.omega();
    let k = p.warp_constant();
    let taus = linspace(k, 10.0 * k, 201);
    let opts = OdeOptions {
        rel_tol: 1e-11,
        abs_tol: 1e-13,
        ..Default::default()
    };

    // Route A: Hamilton's equations with the published coefficients.
    let p_ref = &p;
    let hamiltonian = solve_on_grid(
        move |tau, y, dy| {
            let (kin, pot) = spectrum::hamiltonian_coefficients(p_ref, tau).unwrap();
            dy[0] = y[1] * (2.0 * kin);
            dy[1] = -y[0] * (2.0 * pot);
        },
        k,
        vec![Complex64::new(1.0, 0.0), Complex64::ZERO],
        &taus,
        opts,
    )
    .unwrap();

    // Route B: the second-order equation integrated directly.
    let direct = solve_on_grid(
        move |tau, y, dy| {
            dy[0] = y[1];
            dy[1] = -(y[1] * (8.0 * alpha * alpha * tau) + y[0] * (omega * omega))
                / (4.0 * alpha * alpha * tau * tau);
        },
        k,
        vec![Complex64::new(1.0, 0.0), Complex64::ZERO],
        &taus,
        opts,
    )
    .unwrap();

    let mut worst = 0.0f64;
    for (a, b) in hamiltonian.iter().zip(&direct) {
        worst = worst.max((a[0].re - b[0].re).abs());
    }
    assert!(worst < 1e-8, "L-infinity difference {worst:.3e}");
}

#[test]
fn phase_theta_matches_quadrature_oracle() {
    let p = OscillatorParams::with_constants(0.5, 1.0, 1.0, 1.0).unwrap();
    let n = 0;
    for tau in [1.5, std::f64::consts::E, 7.0] {
        let integral = adaptive_simpson(
            &|tp: f64| spectrum::energy_tau(&p, n, tp).unwrap() / p.hbar(),
            p.warp_constant(),
            tau,
            1e-13,
        );
        let theta = spectrum::phase_theta(&p, n, tau).unwrap();
        assert!(
            (theta + integral).abs() < 1e-10,
            "tau={tau}: theta={theta} quadrature={integral}"
        );
    }
    // Analytic spot value: omega=1, alpha=0.5, n=0, K=1, tau=e -> -1/2.
    let theta = spectrum::phase_theta(&p, 0, std::f64::consts::E).unwrap();
    assert!((theta + 0.5).abs() < 1e-12);
}

#[test]
fn diagonal_overlap_term_vanishes() {
    // The adiabatic diagonal term <m,tau| d/dtau |m,tau> drops out of the
    // coefficient equation; for these real normalized eigenfunctions it is
    // half the tau-derivative of the norm, so the overlap quadrature must
    // vanish.
    let p = OscillatorParams::with_constants(0.005, 1.0, 1.0, 100.0).unwrap();
    let tau = 100.0;
    let h = 1e-4 * tau;
    let grid = linspace(-14.0, 14.0, 2801);
    let dx = grid[1] - grid[0];
    for m in [0usize, 1, 3, 6] {
        let overlap: Vec<f64> = grid
            .iter()
            .map(|&x| {
                let psi = wavefunction::psi_n_tau(&p, m, x, tau).unwrap();
                let dpsi = (wavefunction::psi_n_tau(&p, m, x, tau + h).unwrap()
                    - wavefunction::psi_n_tau(&p, m, x, tau - h).unwrap())
                    / (2.0 * h);
                psi * dpsi
            })
            .collect();
        let value = simpson_uniform(&overlap, dx);
        assert!(value.abs() < 1e-8, "m={m}: <m|d/dtau|m> = {value:.3e}");
    }
}

#[test]
fn superposition_norm_equals_coefficient_norm() {
    // Parseval: the quadrature norm of the superposed state equals the
    // coefficient-space norm of the evolved amplitudes.
    let p = OscillatorParams::new(0.75, 1.0).unwrap();
    let samples = [5.0];
    let trajectory = integrate(&p, 0, &samples, &IntegrateOptions::default()).unwrap();
    let state = &trajectory[0];
    let tau = timewarp::tau_of_t(&p, state.time()).unwrap();
    let grid = linspace(-1.0, 1.0, 4001);
    let sample = superpose(&p, state, &grid, tau).unwrap();
    let norm = quadrature_norm(&sample).unwrap();
    assert!(!norm.support_warning);
    assert!(
        (norm.value - state.norm_sq()).abs() < 1e-8,
        "quadrature {} vs coefficients {}",
        norm.value,
        state.norm_sq()
    );
}

#[test]
fn single_mode_superposition_is_the_eigenfunction() {
    let p = OscillatorParams::new(0.75, 1.0).unwrap();
    let k = p.warp_constant();
    let mut c = vec![Complex64::ZERO; 5];
    c[0] = Complex64::new(1.0, 0.0);
    let coeffs = dho_core::ModeAmplitudes::new(c, 0.0, 0);
    let grid = linspace(-6.0, 6.0, 501);
    let sample = superpose(&p, &coeffs, &grid, k).unwrap();
    for (&x, value) in grid.iter().zip(sample.values()) {
        let expected = wavefunction::psi_n_tau(&p, 0, x, k).unwrap();
        assert!((value - Complex64::new(expected, 0.0)).norm() < 1e-14);
    }
}

#[test]
fn equal_weight_superposition_has_unit_norm() {
    let p = OscillatorParams::new(0.75, 1.0).unwrap();
    let k = p.warp_constant();
    let w = 1.0 / 2.0f64.sqrt();
    let mut c = vec![Complex64::ZERO; 3];
    c[0] = Complex64::new(w, 0.0);
    c[2] = Complex64::new(w, 0.0);
    let coeffs = dho_core::ModeAmplitudes::new(c, 0.0, 0);
    let grid = linspace(-8.0, 8.0, 3201);
    let sample = superpose(&p, &coeffs, &grid, 2.0 * k).unwrap();
    let norm = quadrature_norm(&sample).unwrap();
    assert!((norm.value - 1.0).abs() < 1e-8, "norm = {}", norm.value);
}

#[test]
fn wavefunction_coordinate_consistency_along_time() {
    let p = OscillatorParams::with_constants(0.005, 1.0, 1.0, 100.0).unwrap();
    for t in [0.0, 50.0, 250.0] {
        let tau = timewarp::tau_of_t(&p, t).unwrap();
        for n in [0usize, 1, 2] {
            for x in [-3.0, -0.7, 0.0, 1.9] {
                let via_t = wavefunction::psi_n_t(&p, n, x, t).unwrap();
                let via_tau = wavefunction::psi_n_tau(&p, n, x, tau).unwrap();
                let scale = via_t.abs().max(1e-300);
                assert!(
                    (via_t - via_tau).abs() <= 1e-12 * scale,
                    "n={n} t={t} x={x}: {via_t} vs {via_tau}"
                );
            }
        }
    }
}

#[test]
fn spectrum_rows_cover_requested_range() {
    let p = OscillatorParams::new(0.5, 1.0).unwrap();
    let rows = spectrum::spectrum_rows(&p, 2, Coordinate::T, &[0.0, 1.0]).unwrap();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[0].n, 0);
    assert_eq!(rows[0].at, 0.0);
    assert_eq!(rows[0].value, 0.5);
    assert_eq!(rows[5].n, 2);
    assert_eq!(rows[5].at, 1.0);
}
