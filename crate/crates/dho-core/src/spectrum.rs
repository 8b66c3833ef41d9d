//! Energy eigenvalues in both time coordinates and the dynamical phase.
//!
//! In warped time the Hamiltonian H = ½[p²/(4α²τ²) + ω²q²] carries an
//! equally spaced ladder E_n(τ) = ħω/(2ατ)(n + ½); pulled back to the
//! original coordinate the ladder decays as e^{-2αt}. With the default
//! warp constant K = 1/(2α) the spectrum at t = 0 is exactly the undamped
//! oscillator's ħω(n + ½).

use thiserror::Error;

use crate::timewarp::{self, OscillatorParams};

/// Which time coordinate a quantity is expressed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coordinate {
    Tau,
    T,
}

impl std::fmt::Display for Coordinate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Coordinate::Tau => write!(f, "tau"),
            Coordinate::T => write!(f, "t"),
        }
    }
}

/// One labelled point of the spectrum, as exported by the CLI.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyLevel {
    pub n: usize,
    pub value: f64,
    pub coordinate: Coordinate,
    pub at: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum SpectrumError {
    #[error("warped time must be positive, got tau = {0}")]
    TauDomain(f64),
    #[error("spectrum operations need damping alpha > 0")]
    DampingRequired,
    #[error("warp constant K must be positive here, got {0}")]
    WarpConstantSign(f64),
}

fn require_damping(p: &OscillatorParams) -> Result<(), SpectrumError> {
    if p.alpha() == 0.0 {
        return Err(SpectrumError::DampingRequired);
    }
    Ok(())
}

/// E_n(τ) = ħω/(2ατ) (n + ½).
pub fn energy_tau(p: &OscillatorParams, n: usize, tau: f64) -> Result<f64, SpectrumError> {
    require_damping(p)?;
    if !(tau > 0.0) {
        return Err(SpectrumError::TauDomain(tau));
    }
    Ok(p.hbar() * p.omega() / (2.0 * p.alpha() * tau) * (n as f64 + 0.5))
}

/// E_n(t) = ħω/(2αK) e^{-2αt} (n + ½).
pub fn energy_t(p: &OscillatorParams, n: usize, t: f64) -> Result<f64, SpectrumError> {
    require_damping(p)?;
    if p.warp_constant() <= 0.0 {
        return Err(SpectrumError::WarpConstantSign(p.warp_constant()));
    }
    Ok(p.hbar() * p.omega() / (2.0 * p.alpha() * p.warp_constant())
        * (-2.0 * p.alpha() * t).exp()
        * (n as f64 + 0.5))
}

/// Dynamical phase θ_n(τ) = −(1/ħ)∫_K^τ E_n dτ′ = −(ω/2α)(n + ½) ln(τ/K).
///
/// The integral starts at τ = K, i.e. at t = 0, so θ_n(K) = 0.
pub fn phase_theta(p: &OscillatorParams, n: usize, tau: f64) -> Result<f64, SpectrumError> {
    require_damping(p)?;
    if p.warp_constant() <= 0.0 {
        return Err(SpectrumError::WarpConstantSign(p.warp_constant()));
    }
    if !(tau > 0.0) {
        return Err(SpectrumError::TauDomain(tau));
    }
    Ok(-(p.omega() / (2.0 * p.alpha())) * (n as f64 + 0.5) * (tau / p.warp_constant()).ln())
}

/// Multipliers of p² and q² in H = ½[p²/(4α²τ²) + ω²q²], the global ½
/// included: (1/(8α²τ²), ω²/2).
pub fn hamiltonian_coefficients(
    p: &OscillatorParams,
    tau: f64,
) -> Result<(f64, f64), SpectrumError> {
    require_damping(p)?;
    if !(tau > 0.0) {
        return Err(SpectrumError::TauDomain(tau));
    }
    let a = p.alpha();
    Ok((
        1.0 / (8.0 * a * a * tau * tau),
        0.5 * p.omega() * p.omega(),
    ))
}

/// Spectrum rows over a range of times, as consumed by the CLI export.
pub fn spectrum_rows(
    p: &OscillatorParams,
    n_max: usize,
    coordinate: Coordinate,
    times: &[f64],
) -> Result<Vec<EnergyLevel>, SpectrumError> {
    let mut rows = Vec::with_capacity(times.len() * (n_max + 1));
    for &at in times {
        for n in 0..=n_max {
            let value = match coordinate {
                Coordinate::Tau => energy_tau(p, n, at)?,
                Coordinate::T => energy_t(p, n, at)?,
            };
            rows.push(EnergyLevel {
                n,
                value,
                coordinate,
                at,
            });
        }
    }
    Ok(rows)
}

/// Coordinate consistency: [`energy_t`] equals [`energy_tau`] evaluated at
/// the warped time. Exposed for cross-checks.
pub fn energy_t_via_tau(p: &OscillatorParams, n: usize, t: f64) -> Result<f64, SpectrumError> {
    let tau = timewarp::tau_of_t(p, t).map_err(|_| SpectrumError::DampingRequired)?;
    energy_tau(p, n, tau)
}
