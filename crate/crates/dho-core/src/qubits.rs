//! RCSJ phase- and flux-qubit application of the warped-time quantization.
//!
//! The junction phase δ of both circuits obeys a driven, damped oscillator
//! equation with decay exponent 1/(CR) and small-angle frequencies
//! Ω_P = √(2eI₀/ħC) (phase) and Ω_F = √(Ω_P² + 1/LC) (flux). The circuit
//! spectra carry α_P = α_F = 1/(CR) as the decay exponent, which corresponds
//! to a core-oscillator damping coefficient α = 1/(2CR); the mapping here
//! stores the former and hands the latter to the oscillator core, so the
//! circuit spectra and the critical resistances come out consistent with
//! each other.
//!
//! The constant offsets −(Ω_P² + (I/I₀)²) and −(Ω_P² + (δ_X/LCΩ_F²)²) mix a
//! squared frequency with a dimensionless number; they are carried in that
//! exact form, which is only dimensionally consistent in reduced units. SI
//! runs still evaluate them, so treat SI offsets as bookkeeping.

use thiserror::Error;

use crate::timewarp::{OscillatorParams, ParamError};

/// Reduced Planck constant in J·s (2018 SI).
pub const HBAR_SI: f64 = 1.054571817e-34;
/// Elementary charge in C (2018 SI, exact).
pub const ELEMENTARY_CHARGE_SI: f64 = 1.602176634e-19;

/// |δ-shift| above which the small-angle expansion of cos δ is no longer
/// trusted (expansion error reaches the percent level).
pub const SMALL_ANGLE_LIMIT: f64 = 0.3;

/// Chooses the pair (ħ, e) used by the circuit formulas.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnitSystem {
    /// ħ = 1, e = 1/2, so 2e/ħ = 1.
    Reduced,
    Si,
}

impl UnitSystem {
    pub fn constants(&self) -> (f64, f64) {
        match self {
            UnitSystem::Reduced => (1.0, 0.5),
            UnitSystem::Si => (HBAR_SI, ELEMENTARY_CHARGE_SI),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QubitKind {
    Phase,
    Flux,
}

impl std::fmt::Display for QubitKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QubitKind::Phase => write!(f, "phase"),
            QubitKind::Flux => write!(f, "flux"),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum QubitError {
    #[error("{name} must be finite and positive, got {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("bias current magnitude {bias} exceeds the critical current {critical}")]
    BiasAboveCritical { bias: f64, critical: f64 },
    #[error("inductance is only defined for flux qubits")]
    MissingInductance,
    #[error("warp constant K must be finite and nonzero, got {0}")]
    InvalidWarpConstant(f64),
    #[error("oscillator mapping failed: {0}")]
    Mapping(#[from] ParamError),
}

/// RCSJ circuit parameters for a phase or flux qubit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RcsjParams {
    kind: QubitKind,
    capacitance: f64,
    resistance: f64,
    critical_current: f64,
    bias_current: f64,
    inductance: Option<f64>,
    external_flux: f64,
    hbar: f64,
    charge: f64,
}

fn positive(name: &'static str, value: f64) -> Result<f64, QubitError> {
    if !value.is_finite() || value <= 0.0 {
        return Err(QubitError::InvalidParameter { name, value });
    }
    Ok(value)
}

impl RcsjParams {
    /// Current-biased junction (phase qubit).
    pub fn phase(
        capacitance: f64,
        resistance: f64,
        critical_current: f64,
        bias_current: f64,
        units: UnitSystem,
    ) -> Result<Self, QubitError> {
        let capacitance = positive("capacitance", capacitance)?;
        let resistance = positive("resistance", resistance)?;
        let critical_current = positive("critical current", critical_current)?;
        if !bias_current.is_finite() || bias_current.abs() > critical_current {
            return Err(QubitError::BiasAboveCritical {
                bias: bias_current,
                critical: critical_current,
            });
        }
        let (hbar, charge) = units.constants();
        Ok(Self {
            kind: QubitKind::Phase,
            capacitance,
            resistance,
            critical_current,
            bias_current,
            inductance: None,
            external_flux: 0.0,
            hbar,
            charge,
        })
    }

    /// Flux-biased loop (flux qubit) with inductance `L` and dimensionless
    /// external flux parameter `delta_x`.
    pub fn flux(
        capacitance: f64,
        resistance: f64,
        critical_current: f64,
        inductance: f64,
        delta_x: f64,
        units: UnitSystem,
    ) -> Result<Self, QubitError> {
        let capacitance = positive("capacitance", capacitance)?;
        let resistance = positive("resistance", resistance)?;
        let critical_current = positive("critical current", critical_current)?;
        let inductance = positive("inductance", inductance)?;
        if !delta_x.is_finite() {
            return Err(QubitError::InvalidParameter {
                name: "external flux parameter",
                value: delta_x,
            });
        }
        let (hbar, charge) = units.constants();
        Ok(Self {
            kind: QubitKind::Flux,
            capacitance,
            resistance,
            critical_current,
            bias_current: 0.0,
            inductance: Some(inductance),
            external_flux: delta_x,
            hbar,
            charge,
        })
    }

    pub fn kind(&self) -> QubitKind {
        self.kind
    }

    pub fn capacitance(&self) -> f64 {
        self.capacitance
    }

    pub fn resistance(&self) -> f64 {
        self.resistance
    }

    pub fn critical_current(&self) -> f64 {
        self.critical_current
    }

    pub fn bias_current(&self) -> f64 {
        self.bias_current
    }

    pub fn inductance(&self) -> Option<f64> {
        self.inductance
    }

    pub fn external_flux(&self) -> f64 {
        self.external_flux
    }

    /// Decay exponent α_P = α_F = 1/(CR) of the circuit spectra.
    pub fn decay_rate(&self) -> f64 {
        1.0 / (self.capacitance * self.resistance)
    }
}

/// Small-angle plasma frequency Ω_P = √(2eI₀/(ħC)).
pub fn omega_p(q: &RcsjParams) -> f64 {
    (2.0 * q.charge * q.critical_current / (q.hbar * q.capacitance)).sqrt()
}

/// Flux-qubit frequency Ω_F = √(Ω_P² + 1/(LC)).
pub fn omega_f(q: &RcsjParams) -> Result<f64, QubitError> {
    let l = q.inductance.ok_or(QubitError::MissingInductance)?;
    let wp = omega_p(q);
    Ok((wp * wp + 1.0 / (l * q.capacitance)).sqrt())
}

/// How an RCSJ circuit maps onto the damped-oscillator core.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitOscillatorMap {
    /// α_P = α_F = 1/(CR); the core-oscillator damping is half of this.
    pub decay_rate: f64,
    /// Ω_P or Ω_F.
    pub frequency: f64,
    /// Constant energy offset of the translated Hamiltonian.
    pub energy_offset: f64,
    /// Operator translation I/I₀ (phase) or δ_X/(LCΩ_F²) (flux).
    pub displacement: f64,
    /// False when |displacement| exceeds [`SMALL_ANGLE_LIMIT`]; the mapped
    /// oscillator is then outside the trusted small-angle regime.
    pub small_angle_ok: bool,
}

/// Map circuit parameters onto oscillator-core parameters.
///
/// The returned [`OscillatorParams`] carry α = 1/(2CR), ω = Ω and the
/// default warp constant K = 1/(2α) = CR, so the core spectrum formula
/// reproduces the circuit spectrum up to the constant offset.
pub fn map_to_oscillator(
    q: &RcsjParams,
) -> Result<(QubitOscillatorMap, OscillatorParams), QubitError> {
    let decay_rate = q.decay_rate();
    let wp = omega_p(q);
    let (frequency, displacement) = match q.kind {
        QubitKind::Phase => (wp, q.bias_current / q.critical_current),
        QubitKind::Flux => {
            let wf = omega_f(q)?;
            let l = q.inductance.expect("flux params always carry L");
            (
                wf,
                q.external_flux / (l * q.capacitance * wf * wf),
            )
        }
    };
    let energy_offset = -(wp * wp + displacement * displacement);
    let map = QubitOscillatorMap {
        decay_rate,
        frequency,
        energy_offset,
        displacement,
        small_angle_ok: displacement.abs() < SMALL_ANGLE_LIMIT,
    };
    let core = OscillatorParams::with_constants(
        0.5 * decay_rate,
        frequency,
        q.hbar,
        1.0 / decay_rate,
    )?;
    Ok((map, core))
}

/// Phase-qubit spectrum E_n^{(P)}(t) = ħΩ_P/(α_P K) e^{−α_P t}(n+½) − (Ω_P² + (I/I₀)²).
pub fn energy_phase(q: &RcsjParams, n: usize, t: f64, warp_constant: f64) -> Result<f64, QubitError> {
    if !warp_constant.is_finite() || warp_constant == 0.0 {
        return Err(QubitError::InvalidWarpConstant(warp_constant));
    }
    let wp = omega_p(q);
    let alpha_p = q.decay_rate();
    let shift = q.bias_current / q.critical_current;
    Ok(q.hbar * wp / (alpha_p * warp_constant) * (-alpha_p * t).exp() * (n as f64 + 0.5)
        - (wp * wp + shift * shift))
}

/// Flux-qubit spectrum E_n^{(F)}(t) = ħΩ_F/(α_F K) e^{−α_F t}(n+½) − (Ω_P² + (δ_X/LCΩ_F²)²).
pub fn energy_flux(q: &RcsjParams, n: usize, t: f64, warp_constant: f64) -> Result<f64, QubitError> {
    if !warp_constant.is_finite() || warp_constant == 0.0 {
        return Err(QubitError::InvalidWarpConstant(warp_constant));
    }
    let l = q.inductance.ok_or(QubitError::MissingInductance)?;
    let wp = omega_p(q);
    let wf = omega_f(q)?;
    let alpha_f = q.decay_rate();
    let shift = q.external_flux / (l * q.capacitance * wf * wf);
    Ok(q.hbar * wf / (alpha_f * warp_constant) * (-alpha_f * t).exp() * (n as f64 + 0.5)
        - (wp * wp + shift * shift))
}

/// Critical-damping resistance of the phase qubit, R = √(ħ/(8eI₀C));
/// satisfies 1/(2RC) = Ω_P, the classical α = ω condition in circuit form.
pub fn critical_resistance_phase(q: &RcsjParams) -> f64 {
    (q.hbar / (8.0 * q.charge * q.critical_current * q.capacitance)).sqrt()
}

/// Critical-damping resistance of the flux qubit,
/// R = √(ħL/(4C(2eI₀L + ħ))); satisfies 1/(2RC) = Ω_F.
pub fn critical_resistance_flux(q: &RcsjParams) -> Result<f64, QubitError> {
    let l = q.inductance.ok_or(QubitError::MissingInductance)?;
    Ok((q.hbar * l
        / (4.0 * q.capacitance * (2.0 * q.charge * q.critical_current * l + q.hbar)))
    .sqrt())
}
