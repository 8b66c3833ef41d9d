//! Position-space eigenfunctions, superpositions and quadrature checks.
//!
//! All eigenfunctions share the scale s = 2ωατ/ħ: ψ_n(x,τ) =
//! (s/π)^{1/4} (2ⁿn!)^{-1/2} H_n(√s·x) e^{-s x²/2}. In the original time
//! coordinate the same state picks up the amplitude factor e^{αt/2} and the
//! argument scale e^{αt}, which together keep the x-normalization
//! time-independent while the density localizes around the origin.

use num_complex::Complex64;
use thiserror::Error;

use crate::dynamics::ModeAmplitudes;
use crate::spectrum::{self, Coordinate};
use crate::timewarp::OscillatorParams;

#[derive(Debug, Error, PartialEq)]
pub enum WavefunctionError {
    #[error("warped time must be positive, got tau = {0}")]
    TauDomain(f64),
    #[error("wavefunctions need damping alpha > 0")]
    DampingRequired,
    #[error("warp constant K must be positive here, got {0}")]
    WarpConstantSign(f64),
    #[error("position grid must hold at least {min} strictly increasing points")]
    GridTooSmall { min: usize },
    #[error("position grid must be strictly increasing")]
    NonMonotonicGrid,
    #[error("quadrature needs a uniform grid; spacing varies near index {index}")]
    NonUniformGrid { index: usize },
    #[error("grid and value lengths differ: {x_len} vs {value_len}")]
    LengthMismatch { x_len: usize, value_len: usize },
}

/// Physicists' Hermite polynomial H_n(y) by the three-term recurrence
/// H_{n+1} = 2y H_n − 2n H_{n−1}.
///
/// Overflow for very large `n` and `y` follows IEEE rules and is not trapped.
pub fn hermite(n: usize, y: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut h_prev = 1.0;
    let mut h = 2.0 * y;
    for k in 1..n {
        let next = 2.0 * y * h - 2.0 * k as f64 * h_prev;
        h_prev = h;
        h = next;
    }
    h
}

/// (2ⁿ n!)^{-1/2}, switching to log-space above n = 20 to avoid overflow in
/// the intermediate product.
fn inv_sqrt_norm(n: usize) -> f64 {
    if n <= 20 {
        let mut prod = 1.0;
        for k in 1..=n {
            prod *= 2.0 * k as f64;
        }
        1.0 / prod.sqrt()
    } else {
        let mut log_prod = 0.0;
        for k in 1..=n {
            log_prod += (2.0 * k as f64).ln();
        }
        (-0.5 * log_prod).exp()
    }
}

fn validate(p: &OscillatorParams) -> Result<(), WavefunctionError> {
    if p.alpha() == 0.0 {
        return Err(WavefunctionError::DampingRequired);
    }
    Ok(())
}

/// ψ_n(x, τ) in warped time.
pub fn psi_n_tau(
    p: &OscillatorParams,
    n: usize,
    x: f64,
    tau: f64,
) -> Result<f64, WavefunctionError> {
    validate(p)?;
    if !(tau > 0.0) {
        return Err(WavefunctionError::TauDomain(tau));
    }
    let s = 2.0 * p.omega() * p.alpha() * tau / p.hbar();
    Ok((s / std::f64::consts::PI).powf(0.25)
        * inv_sqrt_norm(n)
        * hermite(n, s.sqrt() * x)
        * (-0.5 * s * x * x).exp())
}

/// ψ_n(x, t) in the original time coordinate, including the e^{αt/2}
/// amplitude factor; equals [`psi_n_tau`] at τ = K e^{2αt}.
pub fn psi_n_t(p: &OscillatorParams, n: usize, x: f64, t: f64) -> Result<f64, WavefunctionError> {
    validate(p)?;
    if p.warp_constant() <= 0.0 {
        return Err(WavefunctionError::WarpConstantSign(p.warp_constant()));
    }
    let s0 = 2.0 * p.omega() * p.alpha() * p.warp_constant() / p.hbar();
    let a_t = p.alpha() * t;
    Ok((s0 / std::f64::consts::PI).powf(0.25)
        * inv_sqrt_norm(n)
        * hermite(n, s0.sqrt() * a_t.exp() * x)
        * (0.5 * a_t - 0.5 * s0 * x * x * (2.0 * a_t).exp()).exp())
}

/// Labels what a [`WavefunctionSample`] holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeLabel {
    Eigenstate(usize),
    Superposition,
}

/// Complex amplitudes ψ(x) on a position grid at one instant.
#[derive(Clone, Debug)]
pub struct WavefunctionSample {
    x: Vec<f64>,
    values: Vec<Complex64>,
    coordinate: Coordinate,
    time: f64,
    label: ModeLabel,
}

impl WavefunctionSample {
    pub fn new(
        x: Vec<f64>,
        values: Vec<Complex64>,
        coordinate: Coordinate,
        time: f64,
        label: ModeLabel,
    ) -> Result<Self, WavefunctionError> {
        if x.len() < 2 {
            return Err(WavefunctionError::GridTooSmall { min: 2 });
        }
        if x.len() != values.len() {
            return Err(WavefunctionError::LengthMismatch {
                x_len: x.len(),
                value_len: values.len(),
            });
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(WavefunctionError::NonMonotonicGrid);
        }
        Ok(Self {
            x,
            values,
            coordinate,
            time,
            label,
        })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn coordinate(&self) -> Coordinate {
        self.coordinate
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn label(&self) -> ModeLabel {
        self.label
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }
}

/// Sample one eigenfunction on a grid, in either coordinate.
pub fn sample_eigenfunction(
    p: &OscillatorParams,
    n: usize,
    coordinate: Coordinate,
    time: f64,
    x_grid: &[f64],
) -> Result<WavefunctionSample, WavefunctionError> {
    let values: Result<Vec<Complex64>, WavefunctionError> = x_grid
        .iter()
        .map(|&x| {
            let v = match coordinate {
                Coordinate::Tau => psi_n_tau(p, n, x, time)?,
                Coordinate::T => psi_n_t(p, n, x, time)?,
            };
            Ok(Complex64::new(v, 0.0))
        })
        .collect();
    WavefunctionSample::new(
        x_grid.to_vec(),
        values?,
        coordinate,
        time,
        ModeLabel::Eigenstate(n),
    )
}

/// Ψ(x, τ) = Σ_m c_m ψ_m(x, τ) e^{iθ_m(τ)} with the dynamical phases from
/// [`spectrum::phase_theta`].
///
/// The coefficients' own time label is not interpreted; pass the warped time
/// the superposition should be assembled at.
pub fn superpose(
    p: &OscillatorParams,
    coeffs: &ModeAmplitudes,
    x_grid: &[f64],
    tau: f64,
) -> Result<WavefunctionSample, WavefunctionError> {
    validate(p)?;
    if !(tau > 0.0) {
        return Err(WavefunctionError::TauDomain(tau));
    }
    let mut values = vec![Complex64::ZERO; x_grid.len()];
    for (m, &c) in coeffs.amplitudes().iter().enumerate() {
        if c == Complex64::ZERO {
            continue;
        }
        let theta = spectrum::phase_theta(p, m, tau).map_err(|e| match e {
            spectrum::SpectrumError::TauDomain(v) => WavefunctionError::TauDomain(v),
            spectrum::SpectrumError::DampingRequired => WavefunctionError::DampingRequired,
            spectrum::SpectrumError::WarpConstantSign(v) => {
                WavefunctionError::WarpConstantSign(v)
            }
        })?;
        let weight = c * Complex64::from_polar(1.0, theta);
        for (value, &x) in values.iter_mut().zip(x_grid) {
            *value += weight * psi_n_tau(p, m, x, tau)?;
        }
    }
    WavefunctionSample::new(
        x_grid.to_vec(),
        values,
        Coordinate::Tau,
        tau,
        ModeLabel::Superposition,
    )
}

/// Result of [`quadrature_norm`]: the integral and a flag raised when the
/// grid endpoints do not cover the support of |ψ|.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureNorm {
    pub value: f64,
    pub support_warning: bool,
}

/// Endpoint amplitudes above this fraction of the peak raise the support
/// warning.
pub const SUPPORT_WARNING_RATIO: f64 = 1e-10;

/// Composite Simpson integral of |ψ|² over the sample grid.
///
/// The grid must be uniform; an even number of points is handled with a
/// trailing trapezoid panel.
pub fn quadrature_norm(sample: &WavefunctionSample) -> Result<QuadratureNorm, WavefunctionError> {
    let x = sample.x();
    if x.len() < 3 {
        return Err(WavefunctionError::GridTooSmall { min: 3 });
    }
    let h = x[1] - x[0];
    for (i, w) in x.windows(2).enumerate() {
        if ((w[1] - w[0]) / h - 1.0).abs() > 1e-8 {
            return Err(WavefunctionError::NonUniformGrid { index: i });
        }
    }
    let prob: Vec<f64> = sample.values().iter().map(|v| v.norm_sqr()).collect();
    let value = simpson_uniform(&prob, h);

    let peak = sample
        .values()
        .iter()
        .map(|v| v.norm())
        .fold(0.0f64, f64::max);
    let first = sample.values().first().unwrap().norm();
    let last = sample.values().last().unwrap().norm();
    let support_warning = peak > 0.0 && (first > SUPPORT_WARNING_RATIO * peak || last > SUPPORT_WARNING_RATIO * peak);
    Ok(QuadratureNorm {
        value,
        support_warning,
    })
}

/// Second moment ∫ x²|ψ|² dx by the same Simpson rule; with
/// [`quadrature_norm`] this gives the width of the probability density.
pub fn second_moment(sample: &WavefunctionSample) -> Result<f64, WavefunctionError> {
    let x = sample.x();
    if x.len() < 3 {
        return Err(WavefunctionError::GridTooSmall { min: 3 });
    }
    let h = x[1] - x[0];
    for (i, w) in x.windows(2).enumerate() {
        if ((w[1] - w[0]) / h - 1.0).abs() > 1e-8 {
            return Err(WavefunctionError::NonUniformGrid { index: i });
        }
    }
    let weighted: Vec<f64> = sample
        .values()
        .iter()
        .zip(x)
        .map(|(v, &xi)| xi * xi * v.norm_sqr())
        .collect();
    Ok(simpson_uniform(&weighted, h))
}

fn simpson_uniform(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    let (simpson_end, trailing) = if n % 2 == 1 {
        (n, 0.0)
    } else {
        // Odd number of intervals: close the last one with a trapezoid.
        (n - 1, 0.5 * h * (values[n - 2] + values[n - 1]))
    };
    let mut acc = values[0] + values[simpson_end - 1];
    for (i, v) in values[1..simpson_end - 1].iter().enumerate() {
        acc += if i % 2 == 0 { 4.0 * v } else { 2.0 * v };
    }
    acc * h / 3.0 + trailing
}
