//! Transition-amplitude dynamics between instantaneous eigenstates.
//!
//! The coefficients c_m of an evolving state expanded over the instantaneous
//! Fock basis obey, in the original time coordinate,
//!
//! dc_m/dt = (α/2)[ c_{m−2} √(m(m−1)) e^{i2ωt} − c_{m+2} √((m+2)(m+1)) e^{−i2ωt} ],
//!
//! which couples modes two apart and conserves Σ|c_m|² exactly (the coupling
//! matrix is anti-Hermitian, also after truncation). For initial conditions
//! c_m(0) = δ_{m,0} and δ_{m,2} the system has closed-form solutions built
//! from the complex constants ξ = √(1 − ω²/α²) and e^{±ζ} = ξ ± iω/α;
//! ξ = 0 marks critical damping at exactly the classical condition α = ω.
//!
//! Numerical notes: the closed forms involve half-integer powers of
//! cosh(ζ + ξαt). In the underdamped regime that argument winds around the
//! origin, so principal-branch powers would jump; the implementation instead
//! evaluates cosh^{-1/2} through e^{-u/2}·((1 + e^{-2u})/2)^{-1/2}, whose
//! inner factor stays in the right half-plane for all t ≥ 0, giving the
//! analytic (continuous) branch that matches the ODE. Magnitude-safe
//! groupings (|sinh/cosh| < 1 throughout) keep every mode index finite
//! without overflow.

use num_complex::Complex64;
use thiserror::Error;

use crate::ode::{Dopri5, OdeError, OdeOptions};
use crate::timewarp::OscillatorParams;

/// Default truncation order for [`integrate`].
pub const DEFAULT_TRUNCATION: usize = 60;
/// Tail occupation |c_M|² + |c_{M−1}|² above which a sample is flagged as
/// truncation-affected.
pub const TAIL_FLAG_THRESHOLD: f64 = 1e-12;
/// Default tail occupation at which [`integrate`] aborts: past this point
/// probability reflected off the truncation wall visibly corrupts the
/// retained modes.
pub const DEFAULT_TAIL_ABORT: f64 = 1e-3;
/// |ξ| below which the closed forms delegate to the critical expansions.
pub const XI_CRITICAL_SWITCH: f64 = 1e-6;
/// Relative width |α − ω| ≤ window·ω classified as critically damped.
pub const CRITICAL_CLASSIFICATION_WINDOW: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("dynamics operations need damping alpha > 0")]
    DampingRequired,
    #[error("warped time must be positive, got tau = {0}")]
    TauDomain(f64),
    #[error("warp constant K must be positive here, got {0}")]
    WarpConstantSign(f64),
    #[error("truncation order {given} too small for initial mode {initial_mode}; need at least {required}")]
    TruncationTooSmall {
        given: usize,
        initial_mode: usize,
        required: usize,
    },
    #[error("truncation order {truncation} must have the parity of the initial mode {initial_mode} so the top mode is reachable")]
    TruncationParity {
        truncation: usize,
        initial_mode: usize,
    },
    #[error("sample times must be finite, strictly increasing and non-negative")]
    InvalidSampleTimes,
    #[error(
        "truncation tail overflow at t = {t:.4}: |c_M|^2 + |c_(M-1)|^2 = {tail:.3e} exceeds \
         {threshold:.1e}; increase the truncation order above {truncation}"
    )]
    TailOverflow {
        t: f64,
        tail: f64,
        threshold: f64,
        truncation: usize,
    },
    #[error("defined only in the underdamped regime (alpha < omega); these parameters are {regime}")]
    NotUnderdamped { regime: DampingRegime },
    #[error(transparent)]
    Ode(#[from] OdeError),
}

/// Damping regime relative to the classical boundary α = ω.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DampingRegime {
    Underdamped,
    Critical,
    Overdamped,
}

impl std::fmt::Display for DampingRegime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DampingRegime::Underdamped => write!(f, "underdamped"),
            DampingRegime::Critical => write!(f, "critical"),
            DampingRegime::Overdamped => write!(f, "overdamped"),
        }
    }
}

/// Sign of α − ω with the tie window [`CRITICAL_CLASSIFICATION_WINDOW`]·ω
/// classed critical.
pub fn classify_regime(p: &OscillatorParams) -> DampingRegime {
    let diff = p.alpha() - p.omega();
    if diff.abs() <= CRITICAL_CLASSIFICATION_WINDOW * p.omega() {
        DampingRegime::Critical
    } else if diff < 0.0 {
        DampingRegime::Underdamped
    } else {
        DampingRegime::Overdamped
    }
}

/// Complex constants of the closed-form amplitudes.
///
/// ξ is the principal square root of 1 − ω²/α² (real for α ≥ ω, positive
/// imaginary for α < ω) and ζ the principal logarithm of ξ + iω/α, so that
/// e^{±ζ} = ξ ± iω/α and cosh ζ = ξ hold identically.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosedFormConstants {
    pub xi: Complex64,
    pub zeta: Complex64,
    pub regime: DampingRegime,
}

pub fn xi_zeta(p: &OscillatorParams) -> Result<ClosedFormConstants, DynamicsError> {
    if p.alpha() == 0.0 {
        return Err(DynamicsError::DampingRequired);
    }
    let ratio = p.omega() / p.alpha();
    let xi = Complex64::new(1.0 - ratio * ratio, 0.0).sqrt();
    let zeta = (xi + Complex64::new(0.0, ratio)).ln();
    Ok(ClosedFormConstants {
        xi,
        zeta,
        regime: classify_regime(p),
    })
}

/// dc_m/dt for the coefficient vector `c` (index m = 0..=M, out-of-range
/// neighbours treated as zero).
pub fn rhs_t(p: &OscillatorParams, t: f64, c: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::ZERO; c.len()];
    rhs_t_into(p.alpha(), p.omega(), t, c, &mut out);
    out
}

fn rhs_t_into(alpha: f64, omega: f64, t: f64, c: &[Complex64], out: &mut [Complex64]) {
    let phase = Complex64::from_polar(1.0, 2.0 * omega * t);
    let phase_conj = phase.conj();
    let half_alpha = 0.5 * alpha;
    for m in 0..c.len() {
        let mut acc = Complex64::ZERO;
        if m >= 2 {
            acc += c[m - 2] * ((m * (m - 1)) as f64).sqrt() * phase;
        }
        if m + 2 < c.len() {
            acc -= c[m + 2] * (((m + 2) * (m + 1)) as f64).sqrt() * phase_conj;
        }
        out[m] = acc * half_alpha;
    }
}

/// dc_m/dτ in warped time, with the oscillating factors (τ/K)^{±iω/α}.
///
/// Chain-rule consistent with [`rhs_t`]: rhs_t = rhs_tau · dτ/dt.
pub fn rhs_tau(
    p: &OscillatorParams,
    tau: f64,
    c: &[Complex64],
) -> Result<Vec<Complex64>, DynamicsError> {
    if p.alpha() == 0.0 {
        return Err(DynamicsError::DampingRequired);
    }
    if p.warp_constant() <= 0.0 {
        return Err(DynamicsError::WarpConstantSign(p.warp_constant()));
    }
    if !(tau > 0.0) {
        return Err(DynamicsError::TauDomain(tau));
    }
    let phase = Complex64::from_polar(
        1.0,
        (p.omega() / p.alpha()) * (tau / p.warp_constant()).ln(),
    );
    let phase_conj = phase.conj();
    let pre = 1.0 / (4.0 * tau);
    let mut out = vec![Complex64::ZERO; c.len()];
    for m in 0..c.len() {
        let mut acc = Complex64::ZERO;
        if m >= 2 {
            acc += c[m - 2] * ((m * (m - 1)) as f64).sqrt() * phase;
        }
        if m + 2 < c.len() {
            acc -= c[m + 2] * (((m + 2) * (m + 1)) as f64).sqrt() * phase_conj;
        }
        out[m] = acc * pre;
    }
    Ok(out)
}

/// Truncated coefficient vector at one sample time.
#[derive(Clone, Debug)]
pub struct ModeAmplitudes {
    amplitudes: Vec<Complex64>,
    time: f64,
    initial_mode: usize,
    tail_estimate: f64,
}

impl ModeAmplitudes {
    /// Wrap an explicit coefficient vector (index m = 0..=M).
    pub fn new(amplitudes: Vec<Complex64>, time: f64, initial_mode: usize) -> Self {
        let tail_estimate = tail_occupation(&amplitudes);
        Self {
            amplitudes,
            time,
            initial_mode,
            tail_estimate,
        }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// c_m, zero beyond the truncation order.
    pub fn amplitude(&self, m: usize) -> Complex64 {
        self.amplitudes.get(m).copied().unwrap_or(Complex64::ZERO)
    }

    pub fn probability(&self, m: usize) -> f64 {
        self.amplitude(m).norm_sqr()
    }

    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn truncation(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn initial_mode(&self) -> usize {
        self.initial_mode
    }

    /// Running maximum of |c_M|² + |c_{M−1}|² seen up to this sample.
    pub fn tail_estimate(&self) -> f64 {
        self.tail_estimate
    }

    /// Whether the tail estimate exceeds [`TAIL_FLAG_THRESHOLD`]; flagged
    /// samples no longer guarantee Σ|c_m|² to represent the full state.
    pub fn tail_flagged(&self) -> bool {
        self.tail_estimate > TAIL_FLAG_THRESHOLD
    }
}

fn tail_occupation(c: &[Complex64]) -> f64 {
    let n = c.len();
    if n < 2 {
        return 0.0;
    }
    c[n - 1].norm_sqr() + c[n - 2].norm_sqr()
}

/// Controls for [`integrate`].
#[derive(Clone, Copy, Debug)]
pub struct IntegrateOptions {
    pub truncation: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Abort threshold for the tail monitor; see [`DEFAULT_TAIL_ABORT`].
    pub tail_abort: f64,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self {
            truncation: DEFAULT_TRUNCATION,
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            tail_abort: DEFAULT_TAIL_ABORT,
        }
    }
}

/// Adaptive integration of the coefficient equation from c_m(0) = δ_{m,n0},
/// with dense output at the requested sample times.
///
/// The truncation order must leave at least ten modes of headroom above the
/// initial mode and share its parity. Each sample carries a running tail
/// estimate; the run aborts with [`DynamicsError::TailOverflow`] once the
/// tail occupation crosses `opts.tail_abort`, since no truncated run can
/// represent a state that has spread to the wall.
///
/// ```
/// use dho_core::dynamics::{integrate, IntegrateOptions};
/// use dho_core::OscillatorParams;
///
/// let p = OscillatorParams::new(0.75, 1.0).unwrap();
/// let trajectory = integrate(&p, 0, &[0.0, 1.0], &IntegrateOptions::default()).unwrap();
/// assert!((trajectory[1].norm_sq() - 1.0).abs() < 1e-8);
/// assert_eq!(trajectory[1].amplitude(1).norm(), 0.0); // parity is exact
/// ```
pub fn integrate(
    p: &OscillatorParams,
    initial_mode: usize,
    sample_times: &[f64],
    opts: &IntegrateOptions,
) -> Result<Vec<ModeAmplitudes>, DynamicsError> {
    let truncation = opts.truncation;
    if truncation < initial_mode + 10 {
        return Err(DynamicsError::TruncationTooSmall {
            given: truncation,
            initial_mode,
            required: initial_mode + 10,
        });
    }
    if (truncation - initial_mode) % 2 != 0 {
        return Err(DynamicsError::TruncationParity {
            truncation,
            initial_mode,
        });
    }
    let mut y0 = vec![Complex64::ZERO; truncation + 1];
    y0[initial_mode] = Complex64::new(1.0, 0.0);
    integrate_state(p, y0, initial_mode, sample_times, opts)
}

/// Like [`integrate`] but starting from an arbitrary coefficient vector
/// (closed forms only exist for the Fock starts; the integrator does not
/// care). The vector length fixes the truncation order.
pub fn integrate_state(
    p: &OscillatorParams,
    initial: Vec<Complex64>,
    initial_mode: usize,
    sample_times: &[f64],
    opts: &IntegrateOptions,
) -> Result<Vec<ModeAmplitudes>, DynamicsError> {
    if p.alpha() == 0.0 {
        return Err(DynamicsError::DampingRequired);
    }
    if sample_times.is_empty()
        || sample_times.iter().any(|t| !t.is_finite() || *t < 0.0)
        || sample_times.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(DynamicsError::InvalidSampleTimes);
    }
    if initial.len() < 2 {
        return Err(DynamicsError::TruncationTooSmall {
            given: initial.len().saturating_sub(1),
            initial_mode,
            required: 1,
        });
    }
    let truncation = initial.len() - 1;
    let y0 = initial;
    let t_end = *sample_times.last().unwrap();
    let alpha = p.alpha();
    let omega = p.omega();
    let mut stepper = Dopri5::new(
        move |t, y, dy| rhs_t_into(alpha, omega, t, y, dy),
        0.0,
        t_end,
        y0,
        OdeOptions {
            rel_tol: opts.rel_tol,
            abs_tol: opts.abs_tol,
            ..Default::default()
        },
    );

    let mut out = Vec::with_capacity(sample_times.len());
    let mut next = 0;
    let mut running_tail = tail_occupation(stepper.y());
    while next < sample_times.len() && sample_times[next] <= 0.0 {
        out.push(ModeAmplitudes {
            amplitudes: stepper.y().to_vec(),
            time: sample_times[next],
            initial_mode,
            tail_estimate: running_tail,
        });
        next += 1;
    }

    let mut buf = vec![Complex64::ZERO; truncation + 1];
    while next < sample_times.len() {
        stepper.step()?;
        running_tail = running_tail.max(tail_occupation(stepper.y()));
        if running_tail > opts.tail_abort {
            return Err(DynamicsError::TailOverflow {
                t: stepper.t(),
                tail: running_tail,
                threshold: opts.tail_abort,
                truncation,
            });
        }
        while next < sample_times.len() && sample_times[next] <= stepper.t() {
            stepper.interpolate(sample_times[next], &mut buf);
            out.push(ModeAmplitudes {
                amplitudes: buf.clone(),
                time: sample_times[next],
                initial_mode,
                tail_estimate: running_tail.max(tail_occupation(&buf)),
            });
            next += 1;
        }
    }
    Ok(out)
}

/// (m−1)!!/√(m!) for even m, with (−1)!! = 1, built as a running product of
/// √((j−1)/j) so it never overflows.
fn double_factorial_ratio(m: usize) -> f64 {
    let mut r = 1.0;
    let mut j = 2;
    while j <= m {
        r *= ((j - 1) as f64 / j as f64).sqrt();
        j += 2;
    }
    r
}

/// Shared branch-safe pieces of the closed forms at one (ξ, ζ, t).
struct Kernel {
    /// sinh(ξαt)/cosh(ζ + ξαt); modulus < 1 in every regime.
    ratio: Complex64,
    /// 1/cosh(ζ + ξαt), single-valued.
    inv_cosh: Complex64,
    /// cosh(ζ + ξαt)^{-1/2} on the analytic branch that is continuous in t
    /// and equals ξ^{-1/2} (principal, matching √ξ) at t = 0.
    inv_sqrt_cosh: Complex64,
}

impl Kernel {
    fn new(constants: &ClosedFormConstants, p: &OscillatorParams, t: f64) -> Self {
        let xi = constants.xi;
        let v = xi * (p.alpha() * t);
        let u = constants.zeta + v;
        let em = (-u).exp();
        let em2 = em * em;
        let base = (Complex64::new(1.0, 0.0) + em2) * 0.5;
        let inv_sqrt_cosh = (-u * 0.5).exp() * base.powf(-0.5);
        let inv_cosh = em / base;
        let ratio = if v.re.abs() < 30.0 {
            let sinh_v = v.sinh();
            // cosh(zeta + v) = xi cosh v + i (omega/alpha) sinh v.
            let cosh_u =
                xi * v.cosh() + Complex64::new(0.0, p.omega() / p.alpha()) * sinh_v;
            sinh_v / cosh_u
        } else {
            // tanh saturates, avoiding e^{|v|} overflow at large overdamped t.
            let th = v.tanh();
            th / (xi + Complex64::new(0.0, p.omega() / p.alpha()) * th)
        };
        Self {
            ratio,
            inv_cosh,
            inv_sqrt_cosh,
        }
    }
}

/// Closed-form amplitude c_m(t) for the initial condition c_m(0) = δ_{m,0}.
///
/// Odd modes are identically zero. Near critical damping (|ξ| below
/// [`XI_CRITICAL_SWITCH`]) the evaluation delegates to [`critical_n0`].
pub fn closed_form_n0(
    p: &OscillatorParams,
    m: usize,
    t: f64,
) -> Result<Complex64, DynamicsError> {
    let constants = xi_zeta(p)?;
    if m % 2 == 1 {
        return Ok(Complex64::ZERO);
    }
    if constants.xi.norm() < XI_CRITICAL_SWITCH {
        return Ok(critical_n0(p, m, t));
    }
    let kernel = Kernel::new(&constants, p, t);
    let phase = Complex64::from_polar(1.0, (m as f64 + 0.5) * p.omega() * t);
    Ok(double_factorial_ratio(m)
        * constants.xi.sqrt()
        * phase
        * kernel.ratio.powi((m / 2) as i32)
        * kernel.inv_sqrt_cosh)
}

/// Critical-damping expansion of [`closed_form_n0`] about ξ = 0
/// (α = ω): c_m(t) = ((m−1)!!/√(m!)) e^{i(m+1/2)ωt} (ωt)^{m/2}/(1+iωt)^{(m+1)/2}.
///
/// Evaluated through the bounded ratio ωt/√(1+ω²t²) so arbitrary mode
/// indices stay finite.
pub fn critical_n0(p: &OscillatorParams, m: usize, t: f64) -> Complex64 {
    if m % 2 == 1 {
        return Complex64::ZERO;
    }
    let wt = p.omega() * t;
    let s = 1.0 + wt * wt;
    let q = wt / s.sqrt();
    let angle = (m as f64 + 0.5) * wt - (m as f64 + 1.0) * 0.5 * wt.atan();
    double_factorial_ratio(m) * q.powi((m / 2) as i32) * s.powf(-0.25)
        * Complex64::from_polar(1.0, angle)
}

/// Closed-form amplitude c_m(t) for the initial condition c_m(0) = δ_{m,2}.
///
/// The removable t → 0 singularity of the (mξ²/sinh − sinh) bracket is
/// eliminated analytically by distributing sinh^{m/2} over the bracket.
pub fn closed_form_n2(
    p: &OscillatorParams,
    m: usize,
    t: f64,
) -> Result<Complex64, DynamicsError> {
    let constants = xi_zeta(p)?;
    if m % 2 == 1 {
        return Ok(Complex64::ZERO);
    }
    if constants.xi.norm() < XI_CRITICAL_SWITCH {
        return Ok(critical_n2(p, m, t));
    }
    let kernel = Kernel::new(&constants, p, t);
    let phase = Complex64::from_polar(1.0, (m as f64 + 0.5) * p.omega() * t);
    let pref = double_factorial_ratio(m) / std::f64::consts::SQRT_2;
    // [m xi^2 sinh^{m/2-1} - sinh^{m/2+1}] / cosh^{(m+3)/2}, regrouped into
    // powers of ratio = sinh/cosh and the residual half-power factors.
    let bracket = if m == 0 {
        -kernel.ratio * kernel.inv_sqrt_cosh
    } else {
        let half = (m / 2) as i32;
        constants.xi * constants.xi * (m as f64)
            * kernel.ratio.powi(half - 1)
            * kernel.inv_cosh
            * kernel.inv_cosh
            * kernel.inv_sqrt_cosh
            - kernel.ratio.powi(half + 1) * kernel.inv_sqrt_cosh
    };
    Ok(pref * constants.xi.sqrt() * phase * bracket)
}

/// Critical-damping expansion of [`closed_form_n2`] about ξ = 0:
/// c_m(t) = ((m−1)!!/√(2m!)) e^{i(m+1/2)ωt} (m/ωt − ωt)(ωt)^{m/2}/(1+iωt)^{(m+3)/2},
/// with the t → 0 limit taken analytically.
pub fn critical_n2(p: &OscillatorParams, m: usize, t: f64) -> Complex64 {
    if m % 2 == 1 {
        return Complex64::ZERO;
    }
    let wt = p.omega() * t;
    let s = 1.0 + wt * wt;
    let q = wt / s.sqrt();
    let pref = double_factorial_ratio(m) / std::f64::consts::SQRT_2;
    // (m (wt)^{m/2-1} - (wt)^{m/2+1}) / (1+iwt)^{(m+3)/2} regrouped into
    // bounded ratio powers.
    let magnitude = if m == 0 {
        -q * s.powf(-0.25)
    } else {
        m as f64 * q.powi((m / 2) as i32 - 1) * s.powf(-1.25)
            - q.powi((m / 2) as i32 + 1) * s.powf(-0.25)
    };
    let angle = (m as f64 + 0.5) * wt - (m as f64 + 3.0) * 0.5 * wt.atan();
    pref * magnitude * Complex64::from_polar(1.0, angle)
}

/// Oscillation period π/√(ω² − α²) of the transition probabilities in the
/// underdamped regime.
pub fn oscillation_period(p: &OscillatorParams) -> Result<f64, DynamicsError> {
    let regime = classify_regime(p);
    if regime != DampingRegime::Underdamped {
        return Err(DynamicsError::NotUnderdamped { regime });
    }
    Ok(std::f64::consts::PI / (p.omega() * p.omega() - p.alpha() * p.alpha()).sqrt())
}
