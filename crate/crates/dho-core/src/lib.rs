//! Quantization of the linearly damped harmonic oscillator through an
//! exponential time-coordinate transform.
//!
//! The damped equation of motion q̈ + 2αq̇ + ω²q = 0 admits no Lagrangian in
//! the original time coordinate, but becomes self-adjoint after the warp
//! τ = K e^{2αt}. This crate implements the machinery built on that
//! transform:
//!
//! * [`timewarp`] — oscillator parameters, the warp map and its inverse, the
//!   self-adjointness residual certificate, and a numeric solver for the
//!   warp constraint with time-dependent damping α(t);
//! * [`spectrum`] — energy eigenvalues in both time coordinates, the
//!   dynamical phase θ_n, and Hamiltonian coefficients;
//! * [`wavefunction`] — Hermite-function eigenstates, superpositions and
//!   quadrature normalization;
//! * [`dynamics`] — the coupled transition-amplitude ODE in both
//!   coordinates, an adaptive integrator for it, closed-form amplitudes for
//!   ground-state and second-excited-state initial conditions, and
//!   damping-regime analysis;
//! * [`qubits`] — the RCSJ phase/flux-qubit application: parameter mapping
//!   onto the oscillator core, small-angle spectra and critical-damping
//!   resistances.
//!
//! All public operations are pure functions over immutable value types and
//! are safe to call from multiple threads.
//!
//! ```
//! use dho_core::{dynamics, spectrum, timewarp, OscillatorParams};
//!
//! // Underdamped oscillator with the default warp constant K = 1/(2 alpha).
//! let p = OscillatorParams::new(0.75, 1.0).unwrap();
//!
//! // The ladder at t = 0 is the undamped one, and decays as e^{-2 alpha t}.
//! assert_eq!(spectrum::energy_t(&p, 0, 0.0).unwrap(), 0.5);
//!
//! // Warp round trip.
//! let tau = timewarp::tau_of_t(&p, 1.0).unwrap();
//! assert!((timewarp::t_of_tau(&p, tau).unwrap() - 1.0).abs() < 1e-14);
//!
//! // Ground-state survival probability at t = 1 from the closed form.
//! let c0 = dynamics::closed_form_n0(&p, 0, 1.0).unwrap();
//! assert!(c0.norm_sqr() < 1.0);
//! ```

pub mod dynamics;
pub mod ode;
pub mod qubits;
pub mod spectrum;
pub mod timewarp;
pub mod wavefunction;

pub use dynamics::{ClosedFormConstants, DampingRegime, IntegrateOptions, ModeAmplitudes};
pub use qubits::{QubitKind, QubitOscillatorMap, RcsjParams, UnitSystem};
pub use spectrum::{Coordinate, EnergyLevel};
pub use timewarp::{OscillatorParams, TimeWarp};
pub use wavefunction::{ModeLabel, WavefunctionSample};
