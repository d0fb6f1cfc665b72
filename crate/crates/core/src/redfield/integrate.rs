//! Adaptive Dormand-Prince 5(4) time stepping of the Redfield equation.

use nalgebra::DMatrix;

use super::{heat_current, unvectorize, vectorize, RedfieldGenerator};
use crate::density::{hermiticity_deviation, DensityMatrix};
use crate::error::{Error, Result};
use crate::C64;

/// Largest trace or Hermiticity drift tolerated in a sampled state.
pub const DRIFT_TOL: f64 = 1e-8;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrateOptions {
    pub rtol: f64,
    pub atol: f64,
    /// First trial step; chosen automatically when `None`.
    pub initial_step: Option<f64>,
    pub max_steps: Option<u64>,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self { rtol: 1e-8, atol: 1e-10, initial_step: None, max_steps: None }
    }
}

impl IntegrateOptions {
    fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0) || !(self.atol > 0.0) {
            return Err(Error::InvalidParams(format!(
                "tolerances must be positive (rtol {}, atol {})",
                self.rtol, self.atol
            )));
        }
        if let Some(h) = self.initial_step {
            if !(h > 0.0) {
                return Err(Error::InvalidParams(format!("initial step must be positive, got {h}")));
            }
        }
        Ok(())
    }
}

/// Sampled states with the heat current of every bath at each sample.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    /// `currents[i][m]` is the current from bath `m` at `times[i]`.
    pub currents: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<&DensityMatrix> {
        self.states.last()
    }
}

/// Stepper that can be advanced piecewise, so callers may stop early.
pub struct Integrator<'g> {
    gen: &'g RedfieldGenerator,
    opts: IntegrateOptions,
    t: f64,
    y: Vec<C64>,
    f: Vec<C64>,
    h: f64,
    fac_old: f64,
    steps: u64,
    rejected: u64,
    k: [Vec<C64>; 6],
    ytmp: Vec<C64>,
    ynew: Vec<C64>,
}

impl<'g> Integrator<'g> {
    pub fn new(gen: &'g RedfieldGenerator, sigma0: &DensityMatrix, opts: IntegrateOptions) -> Result<Self> {
        opts.validate()?;
        if sigma0.dim() != gen.dim() {
            return Err(Error::DimensionMismatch { expected: gen.dim(), got: sigma0.dim() });
        }
        let y = vectorize(sigma0.matrix());
        let n = y.len();
        let zero = vec![C64::new(0.0, 0.0); n];
        let mut f = zero.clone();
        gen.total().apply_vec(&y, &mut f);
        let mut it = Self {
            gen,
            opts,
            t: 0.0,
            y,
            f,
            h: 0.0,
            fac_old: 1e-4,
            steps: 0,
            rejected: 0,
            k: std::array::from_fn(|_| zero.clone()),
            ytmp: zero.clone(),
            ynew: zero,
        };
        it.h = match opts.initial_step {
            Some(h) => h,
            None => it.initial_step(),
        };
        Ok(it)
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn rejected_steps(&self) -> u64 {
        self.rejected
    }

    pub fn matrix(&self) -> DMatrix<C64> {
        unvectorize(self.gen.dim(), &self.y)
    }

    /// Current state, failing if trace or Hermiticity drifted beyond [`DRIFT_TOL`].
    pub fn state(&self) -> Result<DensityMatrix> {
        let m = self.matrix();
        let tr = m.trace();
        if (tr.re - 1.0).abs() > DRIFT_TOL || tr.im.abs() > DRIFT_TOL {
            return Err(Error::IntegrationFailure {
                t: self.t,
                reason: format!("trace drifted to {}", tr.re),
            });
        }
        let dev = hermiticity_deviation(&m);
        if dev > DRIFT_TOL {
            return Err(Error::IntegrationFailure {
                t: self.t,
                reason: format!("Hermiticity drifted by {dev:e}"),
            });
        }
        DensityMatrix::with_tolerances(m, DRIFT_TOL, DRIFT_TOL)
    }

    fn scale(&self, i: usize, other: &[C64]) -> f64 {
        self.opts.atol + self.opts.rtol * self.y[i].norm().max(other[i].norm())
    }

    fn norm(&self, v: &[C64], reference: &[C64]) -> f64 {
        let n = v.len() as f64;
        (v.iter()
            .enumerate()
            .map(|(i, z)| {
                let s = self.scale(i, reference);
                (z.norm() / s).powi(2)
            })
            .sum::<f64>()
            / n)
            .sqrt()
    }

    fn initial_step(&mut self) -> f64 {
        let d0 = self.norm(&self.y, &self.y);
        let d1 = self.norm(&self.f, &self.y);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        for i in 0..self.y.len() {
            self.ytmp[i] = self.y[i] + self.f[i] * h0;
        }
        let mut f1 = vec![C64::new(0.0, 0.0); self.y.len()];
        self.gen.total().apply_vec(&self.ytmp, &mut f1);
        let diff: Vec<C64> = f1.iter().zip(&self.f).map(|(a, b)| a - b).collect();
        let d2 = self.norm(&diff, &self.y) / h0;
        let dmax = d1.max(d2);
        let h1 = if dmax <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / dmax).powf(0.2) };
        (100.0 * h0).min(h1)
    }

    fn rhs(&self, y: &[C64], out: &mut [C64]) {
        self.gen.total().apply_vec(y, out);
    }

    /// Attempts one step of size `h`, leaving the 5th-order solution in
    /// `ynew`, its derivative in `k[5]`, and returning the scaled error norm.
    fn attempt(&mut self, h: f64) -> f64 {
        let n = self.y.len();
        let mut k = std::mem::take(&mut self.k);
        let mut ytmp = std::mem::take(&mut self.ytmp);
        let mut ynew = std::mem::take(&mut self.ynew);
        let y = &self.y;
        let k1 = &self.f;

        for i in 0..n {
            ytmp[i] = y[i] + k1[i] * (h * A21);
        }
        self.rhs(&ytmp, &mut k[0]);
        for i in 0..n {
            ytmp[i] = y[i] + (k1[i] * A31 + k[0][i] * A32) * h;
        }
        self.rhs(&ytmp, &mut k[1]);
        for i in 0..n {
            ytmp[i] = y[i] + (k1[i] * A41 + k[0][i] * A42 + k[1][i] * A43) * h;
        }
        self.rhs(&ytmp, &mut k[2]);
        for i in 0..n {
            ytmp[i] = y[i] + (k1[i] * A51 + k[0][i] * A52 + k[1][i] * A53 + k[2][i] * A54) * h;
        }
        self.rhs(&ytmp, &mut k[3]);
        for i in 0..n {
            ytmp[i] = y[i] + (k1[i] * A61 + k[0][i] * A62 + k[1][i] * A63 + k[2][i] * A64 + k[3][i] * A65) * h;
        }
        self.rhs(&ytmp, &mut k[4]);
        for i in 0..n {
            ynew[i] = y[i] + (k1[i] * A71 + k[1][i] * A73 + k[2][i] * A74 + k[3][i] * A75 + k[4][i] * A76) * h;
        }
        self.rhs(&ynew, &mut k[5]);
        // k[0..5] hold stages 2..7; stage 2 carries no error weight
        for i in 0..n {
            ytmp[i] = (k1[i] * E1 + k[1][i] * E3 + k[2][i] * E4 + k[3][i] * E5 + k[4][i] * E6 + k[5][i] * E7) * h;
        }
        let err = self.norm(&ytmp, &ynew);

        self.k = k;
        self.ytmp = ytmp;
        self.ynew = ynew;
        if err.is_finite() {
            err
        } else {
            f64::INFINITY
        }
    }

    /// Integrates forward to exactly `t_target`.
    pub fn advance_to(&mut self, t_target: f64) -> Result<()> {
        if !t_target.is_finite() || t_target < self.t {
            return Err(Error::InvalidParams(format!(
                "cannot advance from t = {} to t = {t_target}",
                self.t
            )));
        }
        while self.t < t_target {
            if let Some(max) = self.opts.max_steps {
                if self.steps + self.rejected >= max {
                    return Err(Error::IntegrationFailure {
                        t: self.t,
                        reason: format!("step budget of {max} exhausted"),
                    });
                }
            }
            let h_min = 16.0 * f64::EPSILON * self.t.abs().max(1.0);
            if self.h < h_min {
                return Err(Error::IntegrationFailure {
                    t: self.t,
                    reason: format!("step size underflow (h = {:e})", self.h),
                });
            }
            let last = self.t + self.h >= t_target;
            let h = if last { t_target - self.t } else { self.h };
            let err = self.attempt(h);

            let fac11 = err.powf(0.2 - BETA * 0.75);
            if err <= 1.0 {
                let fac = (fac11 / self.fac_old.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
                self.fac_old = err.max(1e-4);
                self.t = if last { t_target } else { self.t + h };
                std::mem::swap(&mut self.y, &mut self.ynew);
                std::mem::swap(&mut self.f, &mut self.k[5]);
                self.steps += 1;
                let h_next = h / fac;
                // a step shortened to hit the target says little about the natural scale
                self.h = if last { h_next.max(self.h) } else { h_next };
            } else {
                let shrink = if err.is_finite() { (fac11 / SAFETY).min(1.0 / FAC_MIN) } else { 1.0 / FAC_MIN };
                self.h = h / shrink;
                self.rejected += 1;
            }
        }
        Ok(())
    }
}

/// Integrates from `t = 0` to `t_end` and samples `n_out` equally spaced
/// times including both ends. `t_end = 0` returns the initial state alone.
pub fn integrate(
    gen: &RedfieldGenerator,
    sigma0: &DensityMatrix,
    t_end: f64,
    n_out: usize,
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidParams(format!("t_end must be finite and >= 0, got {t_end}")));
    }
    if t_end == 0.0 {
        return integrate_at(gen, sigma0, &[0.0], opts);
    }
    if n_out < 2 {
        return Err(Error::InvalidParams(format!("need at least 2 output samples, got {n_out}")));
    }
    let times: Vec<f64> = (0..n_out)
        .map(|i| if i + 1 == n_out { t_end } else { t_end * i as f64 / (n_out - 1) as f64 })
        .collect();
    integrate_at(gen, sigma0, &times, opts)
}

/// Integrates from `t = 0` and samples at the given non-decreasing times.
pub fn integrate_at(
    gen: &RedfieldGenerator,
    sigma0: &DensityMatrix,
    times: &[f64],
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    if times.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
        return Err(Error::InvalidParams("sample times must be finite and >= 0".into()));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParams("sample times must be non-decreasing".into()));
    }
    let mut it = Integrator::new(gen, sigma0, *opts)?;
    let mut traj = Trajectory {
        times: Vec::with_capacity(times.len()),
        states: Vec::with_capacity(times.len()),
        currents: Vec::with_capacity(times.len()),
    };
    for &t in times {
        it.advance_to(t)?;
        let state = it.state()?;
        let currents = (0..gen.baths().len())
            .map(|m| heat_current(gen, m, &state))
            .collect::<Result<Vec<f64>>>()?;
        traj.times.push(t);
        traj.states.push(state);
        traj.currents.push(currents);
    }
    log::debug!(
        "integrated to t = {} in {} steps ({} rejected)",
        it.time(),
        it.steps(),
        it.rejected_steps()
    );
    Ok(traj)
}
