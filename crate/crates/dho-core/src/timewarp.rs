//! Oscillator parameters and the exponential time-coordinate transform.
//!
//! The damped equation of motion only satisfies the self-adjointness
//! (Helmholtz) condition after switching to the warped time τ = K e^{2αt}.
//! This module holds the parameter set shared by the whole crate, the warp
//! map and its inverse, a numerical certificate for the self-adjointness
//! condition b(τ) = da/dτ, and a solver for the warp constraint
//! τ″ = 2α(t)τ′ when the damping coefficient varies in time.

use num_complex::Complex64;
use thiserror::Error;

use crate::ode::{self, OdeError, OdeOptions};

/// Damping coefficient, frequency, action scale and warp constant for one
/// damped oscillator.
///
/// Mass is taken as 1 throughout; the warp constant `K` absorbs it. The
/// default `K = 1/(2α)` makes the energy ladder at `t = 0` coincide with the
/// undamped oscillator's. `alpha = 0` (no damping, hence no warp) can only
/// be expressed through [`OscillatorParams::with_constants`] and is rejected
/// by every operation that needs the transform.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OscillatorParams {
    alpha: f64,
    omega: f64,
    hbar: f64,
    warp_constant: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum ParamError {
    #[error("damping coefficient alpha must be finite and non-negative, got {0}")]
    InvalidAlpha(f64),
    #[error("the default warp constant K = 1/(2 alpha) needs alpha > 0")]
    DefaultWarpNeedsDamping,
    #[error("angular frequency omega must be finite and positive, got {0}")]
    InvalidOmega(f64),
    #[error("hbar must be finite and positive, got {0}")]
    InvalidHbar(f64),
    #[error("warp constant K must be finite and nonzero, got {0}")]
    InvalidWarpConstant(f64),
}

impl OscillatorParams {
    /// Oscillator with `hbar = 1` and the default warp constant `K = 1/(2α)`.
    pub fn new(alpha: f64, omega: f64) -> Result<Self, ParamError> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return if alpha == 0.0 {
                Err(ParamError::DefaultWarpNeedsDamping)
            } else {
                Err(ParamError::InvalidAlpha(alpha))
            };
        }
        Self::with_constants(alpha, omega, 1.0, 1.0 / (2.0 * alpha))
    }

    /// Fully explicit construction; `alpha = 0` is allowed here so the
    /// conservative limit can be represented.
    pub fn with_constants(
        alpha: f64,
        omega: f64,
        hbar: f64,
        warp_constant: f64,
    ) -> Result<Self, ParamError> {
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(ParamError::InvalidAlpha(alpha));
        }
        if !omega.is_finite() || omega <= 0.0 {
            return Err(ParamError::InvalidOmega(omega));
        }
        if !hbar.is_finite() || hbar <= 0.0 {
            return Err(ParamError::InvalidHbar(hbar));
        }
        if !warp_constant.is_finite() || warp_constant == 0.0 {
            return Err(ParamError::InvalidWarpConstant(warp_constant));
        }
        Ok(Self {
            alpha,
            omega,
            hbar,
            warp_constant,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn warp_constant(&self) -> f64 {
        self.warp_constant
    }
}

#[derive(Debug, Error)]
pub enum TimewarpError {
    #[error("the time warp is degenerate for alpha = 0; no transform is needed")]
    DegenerateWarp,
    #[error("tau/K must be positive, got tau = {tau} with K = {warp_constant}")]
    TauDomain { tau: f64, warp_constant: f64 },
    #[error("time grid must hold at least two strictly increasing finite points")]
    InvalidGrid,
    #[error("alpha(t) must be finite on the grid; alpha({t}) = {value}")]
    NonFiniteAlpha { t: f64, value: f64 },
    #[error(
        "grid too coarse for a faithful sampled warp: dtau/dt changes by a factor \
         {growth:.3} across one interval; use steps no larger than ~{max_step:.3e}"
    )]
    GridTooCoarse { growth: f64, max_step: f64 },
    #[error(
        "warp orientation: dtau/dt at the anchor is {0}; alpha(t0) and K must give \
         2 alpha(t0) K > 0 for a monotone increasing warp"
    )]
    NonPositiveDerivative(f64),
    #[error("warp constraint integration failed: {0}")]
    Solver(#[from] OdeError),
}

/// τ(t) = K e^{2αt}.
pub fn tau_of_t(p: &OscillatorParams, t: f64) -> Result<f64, TimewarpError> {
    if p.alpha() == 0.0 {
        return Err(TimewarpError::DegenerateWarp);
    }
    Ok(p.warp_constant() * (2.0 * p.alpha() * t).exp())
}

/// Inverse warp t = ln(τ/K) / (2α); requires τ/K > 0.
pub fn t_of_tau(p: &OscillatorParams, tau: f64) -> Result<f64, TimewarpError> {
    if p.alpha() == 0.0 {
        return Err(TimewarpError::DegenerateWarp);
    }
    let ratio = tau / p.warp_constant();
    if !(ratio > 0.0) {
        return Err(TimewarpError::TauDomain {
            tau,
            warp_constant: p.warp_constant(),
        });
    }
    Ok(ratio.ln() / (2.0 * p.alpha()))
}

/// Relative step used by the central-difference derivative in
/// [`helmholtz_selfadjoint_residual`].
pub const RESIDUAL_DERIVATIVE_STEP: f64 = 1e-6;

/// Self-adjointness residual b(τ) − da/dτ for a single second-order equation
/// a(τ) q̈ + b(τ) q̇ + g(q, τ) = 0.
///
/// A vanishing residual at every sample certifies that a Lagrangian exists in
/// these coordinates. The derivative of `a` is taken by central differences
/// with step `|τ|·1e-6` (floored at 1e-6 near τ = 0), so smooth coefficient
/// functions need no symbolic input. Non-finite evaluations propagate into
/// the corresponding residual entry as NaN diagnostics.
pub fn helmholtz_selfadjoint_residual(
    a: impl Fn(f64) -> f64,
    b: impl Fn(f64) -> f64,
    tau_samples: &[f64],
) -> Vec<f64> {
    tau_samples
        .iter()
        .map(|&tau| {
            let h = RESIDUAL_DERIVATIVE_STEP * tau.abs().max(1.0);
            let da = (a(tau + h) - a(tau - h)) / (2.0 * h);
            b(tau) - da
        })
        .collect()
}

/// One node of a numerically solved warp.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WarpPoint {
    pub t: f64,
    pub tau: f64,
    pub dtau_dt: f64,
}

/// A monotone map t ↔ τ, either the exact exponential or a sampled solution
/// of the warp constraint for time-dependent damping.
#[derive(Clone, Debug)]
pub enum TimeWarp {
    Analytic { alpha: f64, warp_constant: f64 },
    Sampled(Vec<WarpPoint>),
}

impl TimeWarp {
    pub fn analytic(p: &OscillatorParams) -> Result<Self, TimewarpError> {
        if p.alpha() == 0.0 {
            return Err(TimewarpError::DegenerateWarp);
        }
        Ok(TimeWarp::Analytic {
            alpha: p.alpha(),
            warp_constant: p.warp_constant(),
        })
    }

    /// τ at time `t`; sampled warps interpolate with a cubic Hermite through
    /// the stored nodes and return `None` outside the grid.
    pub fn tau(&self, t: f64) -> Option<f64> {
        match self {
            TimeWarp::Analytic {
                alpha,
                warp_constant,
            } => Some(warp_constant * (2.0 * alpha * t).exp()),
            TimeWarp::Sampled(points) => {
                let last = points.last()?;
                if t < points.first()?.t || t > last.t {
                    return None;
                }
                if points.len() == 1 {
                    return Some(points[0].tau);
                }
                let idx = points
                    .partition_point(|p| p.t <= t)
                    .clamp(1, points.len() - 1);
                let (lo, hi) = (&points[idx - 1], &points[idx]);
                let h = hi.t - lo.t;
                let theta = (t - lo.t) / h;
                let t2 = theta * theta;
                let t3 = t2 * theta;
                Some(
                    lo.tau * (2.0 * t3 - 3.0 * t2 + 1.0)
                        + lo.dtau_dt * h * (t3 - 2.0 * t2 + theta)
                        + hi.tau * (-2.0 * t3 + 3.0 * t2)
                        + hi.dtau_dt * h * (t3 - t2),
                )
            }
        }
    }

    /// Stored nodes of a sampled warp; `None` for the analytic kind.
    pub fn points(&self) -> Option<&[WarpPoint]> {
        match self {
            TimeWarp::Analytic { .. } => None,
            TimeWarp::Sampled(points) => Some(points),
        }
    }
}

/// Sampled-warp fidelity limit: dτ/dt may grow by at most this factor inside
/// one grid interval before the sampled representation is considered too
/// coarse to interpolate.
pub const MAX_DERIVATIVE_GROWTH_PER_STEP: f64 = 1.5;

/// Solve the warp constraint τ″ = 2α(t)τ′ for time-dependent damping.
///
/// Initial conditions are anchored at the first grid point t₀ as
/// τ(t₀) = K e^{2α(t₀)t₀} and τ′(t₀) = 2α(t₀) K e^{2α(t₀)t₀}, so a constant
/// α collapses to the analytic warp K e^{2αt} on any grid; start grids at
/// t₀ = 0 for varying α, where this reads τ(0) = K, τ′(0) = 2α(0)K.
pub fn solve_warp_time_dependent(
    alpha_fn: impl Fn(f64) -> f64,
    t_grid: &[f64],
    warp_constant: f64,
) -> Result<TimeWarp, TimewarpError> {
    if warp_constant == 0.0 || !warp_constant.is_finite() {
        return Err(TimewarpError::TauDomain {
            tau: f64::NAN,
            warp_constant,
        });
    }
    if t_grid.len() < 2 || t_grid.iter().any(|t| !t.is_finite()) {
        return Err(TimewarpError::InvalidGrid);
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(TimewarpError::InvalidGrid);
    }
    let mut all_zero = true;
    for &t in t_grid {
        let a = alpha_fn(t);
        if !a.is_finite() {
            return Err(TimewarpError::NonFiniteAlpha { t, value: a });
        }
        if a != 0.0 {
            all_zero = false;
        }
    }
    if all_zero {
        return Err(TimewarpError::DegenerateWarp);
    }

    let t0 = t_grid[0];
    let a0 = alpha_fn(t0);
    if a0 == 0.0 {
        // The anchor fixes tau'(t0) = 2 alpha(t0) K; a zero there pins the
        // derivative to zero for all time. Start the grid where alpha is
        // nonzero.
        return Err(TimewarpError::DegenerateWarp);
    }
    if 2.0 * a0 * warp_constant <= 0.0 {
        return Err(TimewarpError::NonPositiveDerivative(2.0 * a0 * warp_constant));
    }
    let tau0 = warp_constant * (2.0 * a0 * t0).exp();
    let y0 = vec![
        Complex64::new(tau0, 0.0),
        Complex64::new(2.0 * a0 * tau0, 0.0),
    ];
    let states = ode::solve_on_grid(
        |t, y, dy| {
            dy[0] = y[1];
            dy[1] = y[1] * (2.0 * alpha_fn(t));
        },
        t0,
        y0,
        t_grid,
        OdeOptions {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            ..Default::default()
        },
    )?;

    let points: Vec<WarpPoint> = t_grid
        .iter()
        .zip(&states)
        .map(|(&t, y)| WarpPoint {
            t,
            tau: y[0].re,
            dtau_dt: y[1].re,
        })
        .collect();

    if let Some(bad) = points.iter().find(|p| !(p.dtau_dt > 0.0)) {
        return Err(TimewarpError::NonPositiveDerivative(bad.dtau_dt));
    }
    for w in points.windows(2) {
        let growth = (w[1].dtau_dt / w[0].dtau_dt).max(w[0].dtau_dt / w[1].dtau_dt);
        if growth > MAX_DERIVATIVE_GROWTH_PER_STEP {
            let dt = w[1].t - w[0].t;
            let max_step = if growth.is_finite() && growth > 1.0 {
                dt * MAX_DERIVATIVE_GROWTH_PER_STEP.ln() / growth.ln()
            } else {
                dt / 2.0
            };
            return Err(TimewarpError::GridTooCoarse { growth, max_step });
        }
    }
    Ok(TimeWarp::Sampled(points))
}
