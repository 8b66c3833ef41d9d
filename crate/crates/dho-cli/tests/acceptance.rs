//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (run with `-- --nocapture` to see them for passing tests).
//!
//! Criterion 1 is asserted exactly as pinned (fixed truncation M = 60 over
//! t in [0, 10] at tolerance 1e-6) and fails: probability reflected off the
//! M = 60 wall contaminates the retained modes beyond the bound in every
//! pinned regime, and overdamped spreading outruns any fixed truncation.
//! The same comparison with containment-sized truncations passes at the
//! same tolerance (see `oracle_equivalence` in the core crate and the
//! windowed diagnostics this test prints).

use std::time::Instant;

use dho_core::dynamics::{
    self, classify_regime, closed_form_n0, closed_form_n2, critical_n0, integrate,
    oscillation_period, DampingRegime, IntegrateOptions,
};
use dho_core::qubits::{self, RcsjParams, UnitSystem};
use dho_core::spectrum::{energy_t, Coordinate};
use dho_core::timewarp::{helmholtz_selfadjoint_residual, OscillatorParams};
use dho_core::wavefunction::{quadrature_norm, sample_eigenfunction, second_moment};

use dho_cli::figures::{write_figure, ALL_FIGURES};

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Deterministic uniform(0,1) stream for the randomized sweeps.
struct Lcg(u64);

impl Lcg {
    fn next_f64(&mut self) -> f64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }

    fn in_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Log-uniform over [lo, hi].
    fn log_range(&mut self, lo: f64, hi: f64) -> f64 {
        (self.in_range(lo.ln(), hi.ln())).exp()
    }
}

fn interior_maxima(values: &[f64]) -> Vec<usize> {
    (1..values.len() - 1)
        .filter(|&i| values[i] > values[i - 1] && values[i] > values[i + 1])
        .collect()
}

fn interior_minima(values: &[f64]) -> Vec<usize> {
    (1..values.len() - 1)
        .filter(|&i| values[i] < values[i - 1] && values[i] < values[i + 1])
        .collect()
}

/// Parabolic refinement of a sampled peak position.
fn refine_peak(ts: &[f64], vs: &[f64], i: usize) -> f64 {
    let h = ts[1] - ts[0];
    let denom = vs[i - 1] - 2.0 * vs[i] + vs[i + 1];
    if denom == 0.0 {
        return ts[i];
    }
    ts[i] + 0.5 * h * (vs[i - 1] - vs[i + 1]) / denom
}

#[test]
fn accept_01_closed_forms_match_ode_at_pinned_truncation() {
    let tolerance = 1e-6;
    let samples = linspace(0.0, 10.0, 101);
    let mut all_ok = true;
    let mut report = String::new();

    for (alpha, initial_n) in [(0.75, 0usize), (0.75, 2), (2.0, 0), (2.0, 2)] {
        let p = OscillatorParams::new(alpha, 1.0).unwrap();
        let closed_form = if initial_n == 0 {
            closed_form_n0
        } else {
            closed_form_n2
        };
        let started = Instant::now();
        let opts = IntegrateOptions::default(); // truncation 60, rel 1e-9, abs 1e-12
        let outcome = integrate(&p, initial_n, &samples, &opts);
        let elapsed = started.elapsed();
        let line = match outcome {
            Ok(trajectory) => {
                let mut worst = 0.0f64;
                for state in &trajectory {
                    for m in (0..=20).step_by(2) {
                        let exact = closed_form(&p, m, state.time()).unwrap();
                        worst = worst.max((state.amplitude(m) - exact).norm());
                    }
                }
                let ok = worst < tolerance && elapsed.as_secs_f64() < 10.0;
                all_ok &= ok;
                format!(
                    "  case alpha/omega={alpha}, n={initial_n}: max|dc| = {worst:.3e} \
                     (bound {tolerance:.0e}), runtime {elapsed:.2?} -> {}",
                    if ok { "ok" } else { "exceeded" }
                )
            }
            Err(err) => {
                all_ok = false;
                format!(
                    "  case alpha/omega={alpha}, n={initial_n}: integration aborted ({err}); \
                     runtime {elapsed:.2?}"
                )
            }
        };
        report.push_str(&line);
        report.push('\n');
    }

    // Same comparison with a truncation sized for containment, for contrast.
    let p = OscillatorParams::new(0.75, 1.0).unwrap();
    let opts = IntegrateOptions {
        truncation: 140,
        rel_tol: 1e-10,
        abs_tol: 1e-13,
        ..Default::default()
    };
    let trajectory = integrate(&p, 0, &samples, &opts).unwrap();
    let mut contained = 0.0f64;
    for state in &trajectory {
        for m in (0..=20).step_by(2) {
            let exact = closed_form_n0(&p, m, state.time()).unwrap();
            contained = contained.max((state.amplitude(m) - exact).norm());
        }
    }
    report.push_str(&format!(
        "  (contrast: alpha/omega=0.75, n=0 with truncation 140: max|dc| = {contained:.3e})\n"
    ));

    println!(
        "criterion 1 (oracle equivalence, truncation pinned at M=60): {}\n{report}",
        if all_ok { "PASS" } else { "FAIL" }
    );
    assert!(
        all_ok,
        "closed-form vs ODE mismatch at the pinned truncation M = 60 over t in [0, 10]:\n\
         {report}\
         The coefficient coupling moves probability to ever-higher modes; at M = 60 the \
         truncation wall is reached within the compared window in every pinned case \
         (immediately for alpha/omega = 2, whose spreading is exponential in time), and \
         reflected probability corrupts the retained modes beyond 1e-6. The identical \
         comparison with containment-sized truncations meets the tolerance (see the \
         contrast line and the core oracle_equivalence tests)."
    );
}

#[test]
fn accept_02_normalization() {
    let mut ok = true;
    let mut detail = String::new();

    // Along trajectories: the truncated coupling is anti-Hermitian, so the
    // coefficient norm is conserved independent of containment; the
    // overdamped run disables the tail abort to follow the full window.
    let cases: [(f64, usize, f64, f64); 3] =
        [(0.75, 0, 10.0, 1e-3), (0.75, 2, 10.0, 1e-3), (2.0, 0, 10.0, f64::INFINITY)];
    for (alpha, initial_n, t_end, tail_abort) in cases {
        let p = OscillatorParams::new(alpha, 1.0).unwrap();
        let samples = linspace(0.0, t_end, 201);
        // The overdamped run accumulates ~1e-8 integrator drift at the
        // default tolerance; conservation itself is exact, so check it at a
        // tolerance that keeps integration error subdominant.
        let opts = IntegrateOptions {
            tail_abort,
            rel_tol: 1e-10,
            abs_tol: 1e-13,
            ..Default::default()
        };
        let trajectory = integrate(&p, initial_n, &samples, &opts).unwrap();
        let worst = trajectory
            .iter()
            .map(|s| (s.norm_sq() - 1.0).abs())
            .fold(0.0f64, f64::max);
        ok &= worst < 1e-8;
        detail.push_str(&format!(
            "  trajectory alpha={alpha}, n={initial_n}, t<={t_end}: max |norm-1| = {worst:.2e}\n"
        ));
    }

    // Closed-form families to m <= 80, on the domain 80 modes can hold the
    // state (underdamped at any time; critical/overdamped while young).
    let points: [(f64, &[f64]); 3] = [
        (0.75, &[0.5, 1.0, 2.0, 5.0, 10.0, 20.0]),
        (1.0, &[0.5, 1.0]),
        (2.0, &[0.25, 0.4]),
    ];
    for (alpha, times) in points {
        let p = OscillatorParams::new(alpha, 1.0).unwrap();
        for &t in times {
            let s0: f64 = (0..=80)
                .step_by(2)
                .map(|m| closed_form_n0(&p, m, t).unwrap().norm_sqr())
                .sum();
            let s2: f64 = (0..=80)
                .step_by(2)
                .map(|m| closed_form_n2(&p, m, t).unwrap().norm_sqr())
                .sum();
            ok &= (s0 - 1.0).abs() < 1e-8 && (s2 - 1.0).abs() < 1e-8;
            detail.push_str(&format!(
                "  closed forms alpha={alpha}, t={t}: |sum-1| = {:.2e} (n0), {:.2e} (n2)\n",
                (s0 - 1.0).abs(),
                (s2 - 1.0).abs()
            ));
        }
    }

    println!(
        "criterion 2 (normalization within 1e-8): {}\n{detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "normalization violated:\n{detail}");
}

#[test]
fn accept_03_critical_damping_condition() {
    let omega = 1.0;
    // Classification window.
    let classified_ok = classify_regime(&OscillatorParams::new(omega * (1.0 - 1e-3), omega).unwrap())
        == DampingRegime::Underdamped
        && classify_regime(&OscillatorParams::new(omega * (1.0 + 1e-3), omega).unwrap())
            == DampingRegime::Overdamped
        && classify_regime(&OscillatorParams::new(omega * (1.0 - 1e-10), omega).unwrap())
            == DampingRegime::Critical
        && classify_regime(&OscillatorParams::new(omega * (1.0 + 1e-10), omega).unwrap())
            == DampingRegime::Critical;

    // Oscillation detection on |c_0(t)|^2 flips across alpha = omega(1 +/- 1e-3).
    // The detuned period is ~70, so the window must reach past one rebound.
    let times = linspace(0.0, 100.0, 10001);
    let minima_count = |alpha: f64| -> usize {
        let p = OscillatorParams::new(alpha, omega).unwrap();
        let probs: Vec<f64> = times
            .iter()
            .map(|&t| closed_form_n0(&p, 0, t).unwrap().norm_sqr())
            .collect();
        interior_minima(&probs).len()
    };
    let under_minima = minima_count(omega * (1.0 - 1e-3));
    let over_minima = minima_count(omega * (1.0 + 1e-3));
    let flip_ok = under_minima >= 1 && over_minima == 0;

    let ok = classified_ok && flip_ok;
    println!(
        "criterion 3 (critical damping at alpha = omega): {} — \
         classification window ok: {classified_ok}; |c0|^2 rebounds: {under_minima} \
         (underdamped side) vs {over_minima} (overdamped side)",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok);
}

#[test]
fn accept_04_oscillation_period() {
    let p = OscillatorParams::new(0.75, 1.0).unwrap();
    let predicted = oscillation_period(&p).unwrap();
    let samples = linspace(0.0, 15.0, 3001);
    let trajectory = integrate(&p, 0, &samples, &IntegrateOptions::default()).unwrap();
    let probs: Vec<f64> = trajectory.iter().map(|s| s.probability(0)).collect();
    let peaks: Vec<f64> = interior_maxima(&probs)
        .into_iter()
        .map(|i| refine_peak(&samples, &probs, i))
        .collect();
    assert!(peaks.len() >= 2, "need at least two peaks, got {peaks:?}");
    let mut worst_rel = 0.0f64;
    for pair in peaks.windows(2) {
        let spacing = pair[1] - pair[0];
        worst_rel = worst_rel.max((spacing - predicted).abs() / predicted);
    }
    let ok = worst_rel < 0.01;
    println!(
        "criterion 4 (oscillation period pi/sqrt(omega^2-alpha^2) = {predicted:.4}): {} — \
         peak spacings within {:.3}% of prediction",
        if ok { "PASS" } else { "FAIL" },
        worst_rel * 100.0
    );
    assert!(ok, "peak-to-peak spacing deviates by {worst_rel:.3e}");
}

#[test]
fn accept_05_monotonicity_at_criticality() {
    let p = OscillatorParams::new(1.0, 1.0).unwrap();
    // omega t in (0, 20], step 0.01.
    let times: Vec<f64> = (1..=2000).map(|k| k as f64 * 0.01).collect();
    let p0: Vec<f64> = times
        .iter()
        .map(|&t| closed_form_n0(&p, 0, t).unwrap().norm_sqr())
        .collect();
    let strictly_decreasing = p0.windows(2).all(|w| w[1] < w[0]);

    let mut maxima_ok = true;
    let mut detail = String::new();
    for m in [2usize, 4, 6] {
        let pm: Vec<f64> = times
            .iter()
            .map(|&t| closed_form_n0(&p, m, t).unwrap().norm_sqr())
            .collect();
        let maxima = interior_maxima(&pm);
        maxima_ok &= maxima.len() == 1;
        detail.push_str(&format!(
            " m={m}: {} interior maximum(s) (expected near wt = sqrt({m}))",
            maxima.len()
        ));
    }

    let ok = strictly_decreasing && maxima_ok;
    println!(
        "criterion 5 (critical monotonicity): {} — |c0|^2 strictly decreasing: \
         {strictly_decreasing};{detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok);
}

#[test]
fn accept_06_beating_for_second_excited_start() {
    let p = OscillatorParams::new(0.75, 1.0).unwrap();
    let period = oscillation_period(&p).unwrap();
    let times = linspace(0.0, 15.0, 7501);

    let count_in_windows = |initial_n: usize| -> (usize, Vec<usize>) {
        let closed_form = if initial_n == 0 {
            closed_form_n0
        } else {
            closed_form_n2
        };
        let probs: Vec<f64> = times
            .iter()
            .map(|&t| closed_form(&p, 4, t).unwrap().norm_sqr())
            .collect();
        let maxima = interior_maxima(&probs);
        let mut per_window = Vec::new();
        let mut k = 0;
        while (k as f64 + 1.0) * period <= 15.0 {
            let lo = k as f64 * period;
            let hi = lo + period;
            per_window.push(
                maxima
                    .iter()
                    .filter(|&&i| times[i] > lo && times[i] <= hi)
                    .count(),
            );
            k += 1;
        }
        (maxima.len(), per_window)
    };

    let (n2_total, n2_windows) = count_in_windows(2);
    let (n0_total, n0_windows) = count_in_windows(0);
    // Beating = more than one |c_4|^2 maximum inside a single period window.
    let n2_beats = n2_total >= 2 && n2_windows.iter().all(|&c| c >= 2);
    let n0_none = n0_windows.iter().all(|&c| c <= 1);
    let ok = n2_beats && n0_none;
    println!(
        "criterion 6 (beating in |c4|^2, underdamped): {} — n=2 start: {n2_total} maxima \
         over [0,15], per period {n2_windows:?}; n=0 start: {n0_total} maxima, per period \
         {n0_windows:?}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok);
}

#[test]
fn accept_07_spectrum_ladder_and_decay() {
    // Exact undamped ladder at t = 0 with the default K = 1/(2 alpha), at
    // damping values whose reciprocal doubling is exact in binary.
    let mut exact_ok = true;
    for alpha in [0.25, 0.5, 1.0, 2.0] {
        for omega in [1.0, 2.0] {
            let p = OscillatorParams::new(alpha, omega).unwrap();
            for n in 0..=10 {
                let e = energy_t(&p, n, 0.0).unwrap();
                exact_ok &= e == p.hbar() * omega * (n as f64 + 0.5);
            }
        }
    }

    // Decay factor e^{-2 alpha dt} to 1e-12 relative over random draws.
    let mut rng = Lcg(0x5eed_0007);
    let mut decay_worst = 0.0f64;
    for _ in 0..300 {
        let alpha = rng.in_range(0.05, 4.0);
        let p = OscillatorParams::new(alpha, rng.in_range(0.2, 5.0)).unwrap();
        let t = rng.in_range(-2.0, 2.0);
        let dt = rng.in_range(1e-3, 4.0);
        let n = (rng.next_f64() * 12.0) as usize;
        let ratio = energy_t(&p, n, t + dt).unwrap() / energy_t(&p, n, t).unwrap();
        let expected = (-2.0 * alpha * dt).exp();
        decay_worst = decay_worst.max((ratio - expected).abs() / expected);
    }
    let decay_ok = decay_worst < 1e-12;

    let ok = exact_ok && decay_ok;
    println!(
        "criterion 7 (spectrum ladder and decay): {} — E_n(0) exact: {exact_ok}; \
         max decay-factor deviation {decay_worst:.2e}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok);
}

#[test]
fn accept_08_wavefunction_orthonormality_and_localization() {
    let p = OscillatorParams::with_constants(0.005, 1.0, 1.0, 100.0).unwrap();

    // Orthonormality over m, n <= 8 by Simpson quadrature.
    let grid = linspace(-15.0, 15.0, 3001);
    let h = grid[1] - grid[0];
    let states: Vec<_> = (0..=8)
        .map(|n| sample_eigenfunction(&p, n, Coordinate::Tau, 100.0, &grid).unwrap())
        .collect();
    let mut ortho_worst = 0.0f64;
    for (m, a) in states.iter().enumerate() {
        for (n, b) in states.iter().enumerate() {
            let prod: Vec<f64> = a
                .values()
                .iter()
                .zip(b.values())
                .map(|(u, v)| (u * v).re)
                .collect();
            // Composite Simpson, odd point count.
            let mut acc = prod[0] + prod[prod.len() - 1];
            for (i, v) in prod[1..prod.len() - 1].iter().enumerate() {
                acc += if i % 2 == 0 { 4.0 * v } else { 2.0 * v };
            }
            let integral = acc * h / 3.0;
            let expected = if m == n { 1.0 } else { 0.0 };
            ortho_worst = ortho_worst.max((integral - expected).abs());
        }
    }
    let ortho_ok = ortho_worst < 1e-7;

    // Width of |psi_0|^2 shrinks by e^{-alpha t} between t = 0 and t = 250.
    let grid0 = linspace(-30.0, 30.0, 4001);
    let s0 = sample_eigenfunction(&p, 0, Coordinate::T, 0.0, &grid0).unwrap();
    let grid1 = linspace(-10.0, 10.0, 4001);
    let s1 = sample_eigenfunction(&p, 0, Coordinate::T, 250.0, &grid1).unwrap();
    let w0 = (second_moment(&s0).unwrap() / quadrature_norm(&s0).unwrap().value).sqrt();
    let w1 = (second_moment(&s1).unwrap() / quadrature_norm(&s1).unwrap().value).sqrt();
    let shrink_dev = (w1 / w0 / (-0.005f64 * 250.0).exp() - 1.0).abs();
    let shrink_ok = shrink_dev < 1e-6;

    let ok = ortho_ok && shrink_ok;
    println!(
        "criterion 8 (wavefunctions): {} — max orthonormality defect {ortho_worst:.2e}; \
         width-shrink deviation {shrink_dev:.2e}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok);
}

#[test]
fn accept_09_helmholtz_certificate() {
    let alpha = 0.6f64;
    let taus = [0.5, 1.0, 2.0, 5.0];

    // Transformed coefficients a = 4 a^2 tau^2, b = 8 a^2 tau: residual ~ 0.
    let res = helmholtz_selfadjoint_residual(
        move |tau| 4.0 * alpha * alpha * tau * tau,
        move |tau| 8.0 * alpha * alpha * tau,
        &taus,
    );
    let transformed_worst = res.iter().fold(0.0f64, |acc, r| acc.max(r.abs()));
    let transformed_ok = transformed_worst < 1e-8;

    // Untransformed equation a = 1, b = 2 alpha: residual exactly 2 alpha.
    let res = helmholtz_selfadjoint_residual(|_| 1.0, move |_| 2.0 * alpha, &taus);
    let untransformed_ok = res.iter().all(|r| *r == 2.0 * alpha);

    let ok = transformed_ok && untransformed_ok;
    println!(
        "criterion 9 (Helmholtz self-adjointness certificate): {} — transformed residual \
         max {transformed_worst:.2e}; untransformed residual equals 2*alpha exactly: \
         {untransformed_ok}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok);
}

#[test]
fn accept_10_qubit_identities() {
    let mut rng = Lcg(0xACC_0010);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let c = rng.log_range(1e-13, 1e-9);
        let i0 = rng.log_range(1e-7, 1e-4);
        let l = rng.log_range(1e-10, 1e-6);
        let q = RcsjParams::flux(c, 50.0, i0, l, rng.in_range(-0.2, 0.2), UnitSystem::Si).unwrap();

        let rp = qubits::critical_resistance_phase(&q);
        let wp = qubits::omega_p(&q);
        worst = worst.max((1.0 / (4.0 * rp * rp * c * c) - wp * wp).abs() / (wp * wp));

        let rf = qubits::critical_resistance_flux(&q).unwrap();
        let wf = qubits::omega_f(&q).unwrap();
        worst = worst.max((1.0 / (4.0 * rf * rf * c * c) - wf * wf).abs() / (wf * wf));
    }
    let identity_ok = worst < 1e-12;

    // Flux -> phase convergence over six decades of inductance.
    let mut gaps = Vec::new();
    for exp in 0..=6 {
        let l = 1e-9 * 10f64.powi(exp);
        let q = RcsjParams::flux(1e-12, 50.0, 1e-6, l, 0.0, UnitSystem::Si).unwrap();
        let rf = qubits::critical_resistance_flux(&q).unwrap();
        let rp = qubits::critical_resistance_phase(&q);
        gaps.push((rp - rf) / rp);
    }
    let monotone = gaps.windows(2).all(|w| w[1] < w[0] && w[1] > 0.0);
    let converged = *gaps.last().unwrap() < 1e-6;
    let limit_ok = monotone && converged;

    let ok = identity_ok && limit_ok;
    println!(
        "criterion 10 (qubit critical-resistance identities): {} — max identity deviation \
         {worst:.2e}; flux->phase gap monotone over six decades: {monotone}, final relative \
         gap {:.2e}",
        if ok { "PASS" } else { "FAIL" },
        gaps.last().unwrap()
    );
    assert!(ok);
}

#[test]
fn accept_11_figure_goldens() {
    let golden_dir =
        std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/goldens");
    let outdir = tempfile::tempdir().unwrap();
    let started = Instant::now();
    let mut ok = true;
    let mut detail = String::new();
    for figure in ALL_FIGURES {
        let (path, _) = write_figure(figure, Some(outdir.path())).unwrap();
        let fresh = std::fs::read(&path).unwrap();
        let golden = std::fs::read(golden_dir.join(format!("{figure}.csv"))).unwrap();
        let same = fresh == golden;
        ok &= same;
        if !same {
            detail.push_str(&format!("  {figure}: differs from golden\n"));
        }
    }
    let elapsed = started.elapsed();
    ok &= elapsed.as_secs_f64() < 60.0;
    println!(
        "criterion 11 (figure goldens byte-identical): {} — 8 presets regenerated in \
         {elapsed:.2?}\n{detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "{detail}runtime {elapsed:?}");
}
