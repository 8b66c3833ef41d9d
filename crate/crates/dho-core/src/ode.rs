//! Adaptive Dormand–Prince 5(4) integration for complex state vectors.
//!
//! This is the embedded explicit Runge–Kutta pair used by the
//! transition-amplitude evolution and the generalized warp solver. Dense
//! output between accepted steps is cubic Hermite interpolation from the
//! state and derivative at the step endpoints, so the interpolation error is
//! O(h⁴) while accepted steps carry the O(h⁵) pair accuracy.

use num_complex::Complex64;
use thiserror::Error;

/// Tolerances and limits for one integration run.
#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
    /// Starting step size; estimated from the initial derivative when `None`.
    pub initial_step: Option<f64>,
    pub max_step: Option<f64>,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_steps: 1_000_000,
            initial_step: None,
            max_step: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum OdeError {
    #[error("step size underflow at t = {t} (h = {h:.3e}); the system appears stiff")]
    StepSizeUnderflow { t: f64, h: f64 },
    #[error("integration exceeded {max_steps} accepted steps at t = {t}")]
    TooManySteps { t: f64, max_steps: usize },
}

const SAFETY: f64 = 0.9;
const MIN_SCALE: f64 = 0.2;
const MAX_SCALE: f64 = 5.0;

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// Error coefficients: 5th-order weights minus the embedded 4th-order weights.
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

/// One-step driver for the Dormand–Prince pair.
///
/// `step` advances past one accepted step; the previous endpoint is kept so
/// callers can interpolate output samples inside the step that was just
/// taken.
pub struct Dopri5<F>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    rhs: F,
    opts: OdeOptions,
    t_end: f64,
    t: f64,
    y: Vec<Complex64>,
    f: Vec<Complex64>,
    t_prev: f64,
    y_prev: Vec<Complex64>,
    f_prev: Vec<Complex64>,
    h: f64,
    stages: [Vec<Complex64>; 7],
    scratch: Vec<Complex64>,
    y_err: Vec<Complex64>,
    steps_taken: usize,
}

impl<F> Dopri5<F>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    pub fn new(mut rhs: F, t0: f64, t_end: f64, y0: Vec<Complex64>, opts: OdeOptions) -> Self {
        assert!(t_end >= t0, "integration runs forward in time");
        let dim = y0.len();
        let mut f0 = vec![Complex64::ZERO; dim];
        rhs(t0, &y0, &mut f0);
        let h = opts
            .initial_step
            .unwrap_or_else(|| initial_step_estimate(&mut rhs, t0, &y0, &f0, &opts, t_end))
            .min(t_end - t0)
            .max(f64::MIN_POSITIVE);
        Self {
            rhs,
            opts,
            t_end,
            t: t0,
            y: y0.clone(),
            f: f0.clone(),
            t_prev: t0,
            y_prev: y0,
            f_prev: f0,
            h,
            stages: std::array::from_fn(|_| vec![Complex64::ZERO; dim]),
            scratch: vec![Complex64::ZERO; dim],
            y_err: vec![Complex64::ZERO; dim],
            steps_taken: 0,
        }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[Complex64] {
        &self.y
    }

    pub fn prev_t(&self) -> f64 {
        self.t_prev
    }

    pub fn finished(&self) -> bool {
        self.t >= self.t_end
    }

    /// Take one accepted step (retrying with smaller h on error-test failure).
    pub fn step(&mut self) -> Result<(), OdeError> {
        self.step_toward(self.t_end)
    }

    /// Like [`Dopri5::step`] but never steps past `target`, so repeated calls
    /// land on it exactly; sample points hit this way carry full pair
    /// accuracy instead of the dense-output error.
    pub fn step_toward(&mut self, target: f64) -> Result<(), OdeError> {
        let limit = target.min(self.t_end);
        let dim = self.y.len();
        loop {
            if self.steps_taken >= self.opts.max_steps {
                return Err(OdeError::TooManySteps {
                    t: self.t,
                    max_steps: self.opts.max_steps,
                });
            }
            let mut h = self.h.min(limit - self.t);
            if let Some(h_max) = self.opts.max_step {
                h = h.min(h_max);
            }
            let clamped = h < self.h;
            if h < 1e-14 * (1.0 + self.t.abs()) {
                return Err(OdeError::StepSizeUnderflow { t: self.t, h });
            }

            // FSAL: stage 0 is the derivative at the current point.
            self.stages[0].copy_from_slice(&self.f);
            for s in 1..7 {
                for i in 0..dim {
                    let mut acc = Complex64::ZERO;
                    for (j, stage) in self.stages.iter().enumerate().take(s) {
                        if A[s][j] != 0.0 {
                            acc += stage[i] * A[s][j];
                        }
                    }
                    self.scratch[i] = self.y[i] + acc * h;
                }
                let ts = self.t + C[s] * h;
                let (_, tail) = self.stages.split_at_mut(s);
                (self.rhs)(ts, &self.scratch, &mut tail[0]);
            }
            // Stage 6 input is already the 5th-order solution (a7 row = b row),
            // so `scratch` now holds y_new and stages[6] holds f(t+h, y_new).
            for i in 0..dim {
                let mut err = Complex64::ZERO;
                for (j, stage) in self.stages.iter().enumerate() {
                    if E[j] != 0.0 {
                        err += stage[i] * E[j];
                    }
                }
                self.y_err[i] = err * h;
            }

            let mut err_norm_sq = 0.0;
            for i in 0..dim {
                let sc = self.opts.abs_tol
                    + self.opts.rel_tol * self.y[i].norm().max(self.scratch[i].norm());
                let e = self.y_err[i].norm() / sc;
                err_norm_sq += e * e;
            }
            let err = (err_norm_sq / dim as f64).sqrt();

            if err.is_finite() && err <= 1.0 {
                self.steps_taken += 1;
                self.t_prev = self.t;
                std::mem::swap(&mut self.y_prev, &mut self.y);
                std::mem::swap(&mut self.f_prev, &mut self.f);
                self.t += h;
                self.y.copy_from_slice(&self.scratch);
                self.f.copy_from_slice(&self.stages[6]);
                // A step that was only shortened to land on the target says
                // nothing about accuracy; keep the controller's proposal.
                if !clamped {
                    let scale = if err == 0.0 {
                        MAX_SCALE
                    } else {
                        (SAFETY * err.powf(-0.2)).clamp(MIN_SCALE, MAX_SCALE)
                    };
                    self.h = h * scale;
                }
                return Ok(());
            }

            let scale = if err.is_finite() {
                (SAFETY * err.powf(-0.2)).clamp(MIN_SCALE, 1.0)
            } else {
                MIN_SCALE
            };
            self.h = h * scale;
        }
    }

    /// Cubic Hermite interpolation inside the last accepted step.
    ///
    /// `t` must lie in `[prev_t(), t()]`.
    pub fn interpolate(&self, t: f64, out: &mut [Complex64]) {
        let h = self.t - self.t_prev;
        if h == 0.0 {
            out.copy_from_slice(&self.y);
            return;
        }
        let theta = (t - self.t_prev) / h;
        let t2 = theta * theta;
        let t3 = t2 * theta;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + theta;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        for i in 0..out.len() {
            out[i] = self.y_prev[i] * h00
                + self.f_prev[i] * (h10 * h)
                + self.y[i] * h01
                + self.f[i] * (h11 * h);
        }
    }
}

fn rms_norm(v: &[Complex64], y: &[Complex64], opts: &OdeOptions) -> f64 {
    let mut acc = 0.0;
    for i in 0..v.len() {
        let sc = opts.abs_tol + opts.rel_tol * y[i].norm();
        let e = v[i].norm() / sc;
        acc += e * e;
    }
    (acc / v.len() as f64).sqrt()
}

/// Hairer-style starting step estimate.
fn initial_step_estimate<F>(
    rhs: &mut F,
    t0: f64,
    y0: &[Complex64],
    f0: &[Complex64],
    opts: &OdeOptions,
    t_end: f64,
) -> f64
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    let span = (t_end - t0).max(f64::MIN_POSITIVE);
    let d0 = rms_norm(y0, y0, opts);
    let d1 = rms_norm(f0, y0, opts);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * (d0 / d1)
    }
    .min(span);

    let mut y1: Vec<Complex64> = y0.to_vec();
    for i in 0..y1.len() {
        y1[i] += f0[i] * h0;
    }
    let mut f1 = vec![Complex64::ZERO; y0.len()];
    rhs(t0 + h0, &y1, &mut f1);
    let mut df = f1;
    for i in 0..df.len() {
        df[i] -= f0[i];
    }
    let d2 = rms_norm(&df, y0, opts) / h0;

    let d_max = d1.max(d2);
    let h1 = if d_max <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d_max).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span)
}

/// Integrate and return the state at each requested sample time.
///
/// `samples` must be finite, non-decreasing and start at or after `t0`.
/// Values strictly inside a step are produced by the cubic Hermite dense
/// output.
pub fn solve_at<F>(
    rhs: F,
    t0: f64,
    y0: Vec<Complex64>,
    samples: &[f64],
    opts: OdeOptions,
) -> Result<Vec<Vec<Complex64>>, OdeError>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    let t_end = samples.last().copied().unwrap_or(t0).max(t0);
    let dim = y0.len();
    let mut stepper = Dopri5::new(rhs, t0, t_end, y0, opts);
    let mut out = Vec::with_capacity(samples.len());
    let mut next = 0;
    while next < samples.len() && samples[next] <= t0 {
        out.push(stepper.y().to_vec());
        next += 1;
    }
    while next < samples.len() {
        stepper.step()?;
        let mut buf = vec![Complex64::ZERO; dim];
        while next < samples.len() && samples[next] <= stepper.t() {
            stepper.interpolate(samples[next], &mut buf);
            out.push(buf.clone());
            next += 1;
        }
    }
    Ok(out)
}

/// Integrate landing exactly on every sample time, trading dense output for
/// full pair accuracy at the samples. Used where the samples themselves are
/// the deliverable (the sampled warp).
pub fn solve_on_grid<F>(
    rhs: F,
    t0: f64,
    y0: Vec<Complex64>,
    samples: &[f64],
    opts: OdeOptions,
) -> Result<Vec<Vec<Complex64>>, OdeError>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    let t_end = samples.last().copied().unwrap_or(t0).max(t0);
    let mut stepper = Dopri5::new(rhs, t0, t_end, y0, opts);
    let mut out = Vec::with_capacity(samples.len());
    for &target in samples {
        if target <= t0 {
            out.push(stepper.y().to_vec());
            continue;
        }
        while stepper.t() < target {
            stepper.step_toward(target)?;
        }
        out.push(stepper.y().to_vec());
    }
    Ok(out)
}
