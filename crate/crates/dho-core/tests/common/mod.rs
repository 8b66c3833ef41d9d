#![allow(dead_code)]

//! Shared helpers for the integration tests: independent quadrature oracles
//! and grid utilities. These stay deliberately separate from the library
//! code they check.

/// Adaptive Simpson quadrature with interval bisection.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(a: f64, fa: f64, b: f64, fb: f64, fm: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(a, fa, m, fm, flm);
        let right = simpson(m, fm, b, fb, frm);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            recurse(f, a, fa, m, fm, flm, left, tol * 0.5, depth - 1)
                + recurse(f, m, fm, b, fb, frm, right, tol * 0.5, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson(a, fa, b, fb, fm);
    recurse(&f, a, fa, b, fb, fm, whole, tol, 48)
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Composite Simpson on a uniform grid (odd point counts).
pub fn simpson_uniform(values: &[f64], h: f64) -> f64 {
    assert!(values.len() >= 3 && values.len() % 2 == 1);
    let mut acc = values[0] + values[values.len() - 1];
    for (i, v) in values[1..values.len() - 1].iter().enumerate() {
        acc += if i % 2 == 0 { 4.0 * v } else { 2.0 * v };
    }
    acc * h / 3.0
}
