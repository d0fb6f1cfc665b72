use rayon::prelude::*;
use vheat_core::redfield::{entropy_production_rate, heat_current, IntegrateOptions, Integrator, Mode};
use vheat_core::vmodel::vmodel_generator;
use vheat_core::{rdm_eigenvalues, DensityMatrix, RedfieldGenerator, VModelParams};

use crate::config::{Grid, SweepConfig};
use crate::error::{core_err, ExpError, Result};
use crate::output::Table;

pub const ENTROPY_TOL: f64 = 1e-10;
pub const EIGENVALUE_TOL: f64 = 1e-10;
pub const EIGENVALUE_SUM_TOL: f64 = 1e-8;
pub const BALANCE_TOL: f64 = 1e-12;
pub const DEFAULT_ALPHAS: [f64; 3] = [-1.0, 0.5, 1.0];
pub const DEFAULT_HORIZON: f64 = 4e8;

#[derive(Debug, Clone, PartialEq)]
pub struct ThermoOptions {
    pub alphas: Vec<f64>,
    /// Decouple the cold bath; the hot bath alone must drive the state to Gibbs.
    pub single_bath: bool,
    /// Flip the sign of every dissipator. Falsifiability hook.
    pub negate_dissipator: bool,
    pub integrate: IntegrateOptions,
}

impl Default for ThermoOptions {
    fn default() -> Self {
        Self {
            alphas: DEFAULT_ALPHAS.to_vec(),
            single_bath: false,
            negate_dissipator: false,
            integrate: IntegrateOptions { rtol: 1e-10, atol: 1e-13, ..IntegrateOptions::default() },
        }
    }
}

/// `t = 0` followed by a log grid up to `horizon`.
pub fn default_times(horizon: f64) -> Grid {
    let mut v = vec![0.0];
    v.extend(Grid::Log { min: 1e-2, max: horizon, n: 160 }.values());
    Grid::List(v)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub alpha: f64,
    pub t: f64,
    pub check: &'static str,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub j_h: f64,
    pub j_c: f64,
    pub entropy_rate: f64,
    pub eigenvalues: Vec<f64>,
    pub state: DensityMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaAudit {
    pub alpha: f64,
    pub samples: Vec<Sample>,
    pub violations: Vec<Violation>,
}

impl AlphaAudit {
    pub fn final_balance(&self) -> Option<f64> {
        self.samples.last().map(|s| s.j_h + s.j_c)
    }

    pub fn min_entropy_rate(&self) -> f64 {
        self.samples.iter().map(|s| s.entropy_rate).fold(f64::INFINITY, f64::min)
    }

    pub fn eigenvalue_range(&self) -> (f64, f64) {
        self.samples.iter().flat_map(|s| s.eigenvalues.iter().copied()).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| {
            (lo.min(e), hi.max(e))
        })
    }

    pub fn max_trace_error(&self) -> f64 {
        self.samples.iter().map(|s| (s.eigenvalues.iter().sum::<f64>() - 1.0).abs()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThermoReport {
    pub audits: Vec<AlphaAudit>,
}

impl ThermoReport {
    pub fn passed(&self) -> bool {
        self.audits.iter().all(|a| a.violations.is_empty())
    }

    pub fn violations(&self) -> impl Iterator<Item = &Violation> {
        self.audits.iter().flat_map(|a| a.violations.iter())
    }

    pub fn summary(&self) -> Vec<String> {
        self.audits
            .iter()
            .map(|a| {
                let (lo, hi) = a.eigenvalue_range();
                let status = if a.violations.is_empty() { "PASS" } else { "FAIL" };
                let mut line = format!(
                    "[{status}] alpha = {}: {} samples, final j_h + j_c = {:.3e}, min entropy rate = {:.3e}, eigenvalues in [{:.3e}, {:.6}], max |sum - 1| = {:.3e}",
                    a.alpha,
                    a.samples.len(),
                    a.final_balance().unwrap_or(f64::NAN),
                    a.min_entropy_rate(),
                    lo,
                    hi,
                    a.max_trace_error()
                );
                for v in &a.violations {
                    line.push_str(&format!("; {} = {:.3e} at t = {}", v.check, v.value, v.t));
                }
                line
            })
            .collect()
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(
            ["alpha", "t", "s22", "s33", "s11", "s32_re", "s32_im", "j_h", "j_c", "entropy_rate", "eig_min", "eig_max", "eig_sum"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
        );
        for a in &self.audits {
            for s in &a.samples {
                let c = s.state.get(2, 1);
                t.push(vec![
                    a.alpha,
                    s.t,
                    s.state.population(1),
                    s.state.population(2),
                    s.state.population(0),
                    c.re,
                    c.im,
                    s.j_h,
                    s.j_c,
                    s.entropy_rate,
                    s.eigenvalues[0],
                    *s.eigenvalues.last().expect("nonempty"),
                    s.eigenvalues.iter().sum(),
                ]);
            }
        }
        t
    }
}

fn generator_for(p: &VModelParams, opts: &ThermoOptions) -> Result<RedfieldGenerator> {
    let gen = vmodel_generator(p, Mode::Nonsecular).map_err(core_err("building generator"))?;
    Ok(if opts.negate_dissipator { gen.with_scaled_dissipators(-1.0) } else { gen })
}

/// Audits one trajectory from the ground state; stops at the first violating sample.
pub fn audit_alpha(p: &VModelParams, times: &[f64], opts: &ThermoOptions) -> Result<AlphaAudit> {
    let gen = generator_for(p, opts)?;
    let alpha = p.alpha;
    let mut it = Integrator::new(&gen, &DensityMatrix::pure_level(3, 0), opts.integrate).map_err(core_err("integrator setup"))?;
    let mut audit = AlphaAudit { alpha, samples: Vec::new(), violations: Vec::new() };
    for &t in times {
        let ctx = format!("thermo-check at alpha = {alpha}, t = {t}");
        it.advance_to(t).map_err(core_err(ctx.clone()))?;
        let state = it.state().map_err(core_err(ctx.clone()))?;
        let eigenvalues = rdm_eigenvalues(&state);
        let (lo, hi) = (eigenvalues[0], *eigenvalues.last().expect("nonempty"));
        let sum: f64 = eigenvalues.iter().sum();
        let mut found = Vec::new();
        if lo < -EIGENVALUE_TOL {
            found.push(("min eigenvalue", lo));
        }
        if hi > 1.0 + EIGENVALUE_TOL {
            found.push(("max eigenvalue", hi));
        }
        if (sum - 1.0).abs() > EIGENVALUE_SUM_TOL {
            found.push(("eigenvalue sum", sum));
        }
        let entropy_rate = if found.is_empty() {
            let s = entropy_production_rate(&gen, &state).map_err(core_err(ctx.clone()))?;
            if s < -ENTROPY_TOL {
                found.push(("entropy rate", s));
            }
            s
        } else {
            f64::NAN
        };
        let j_h = heat_current(&gen, 0, &state).map_err(core_err(ctx.clone()))?;
        let j_c = heat_current(&gen, 1, &state).map_err(core_err(ctx))?;
        audit.samples.push(Sample { t, j_h, j_c, entropy_rate, eigenvalues, state });
        if !found.is_empty() {
            audit.violations.extend(found.into_iter().map(|(check, value)| Violation { alpha, t, check, value }));
            return Ok(audit);
        }
    }
    if let Some(balance) = audit.final_balance() {
        if balance.abs() >= BALANCE_TOL {
            audit.violations.push(Violation { alpha, t: *times.last().unwrap(), check: "final j_h + j_c", value: balance });
        }
    }
    if opts.single_bath {
        if let Some(s) = audit.samples.last() {
            if s.entropy_rate.abs() >= ENTROPY_TOL {
                audit.violations.push(Violation { alpha, t: s.t, check: "final single-bath entropy rate", value: s.entropy_rate });
            }
        }
    }
    Ok(audit)
}

pub fn thermo_check(cfg: &SweepConfig, opts: &ThermoOptions) -> Result<ThermoReport> {
    cfg.validate()?;
    if opts.alphas.is_empty() {
        return Err(ExpError::BadInput("no alpha values to audit".into()));
    }
    let times = cfg.grid.clone().unwrap_or_else(|| default_times(DEFAULT_HORIZON)).values();
    if times[0] < 0.0 {
        return Err(ExpError::BadInput(format!("times must be >= 0, got {}", times[0])));
    }
    let base = if opts.single_bath { cfg.params.with_gammas(cfg.params.gamma_hot, 0.0) } else { cfg.params };
    let audits = opts
        .alphas
        .par_iter()
        .map(|&a| audit_alpha(&base.with_alpha(a), &times, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(ThermoReport { audits })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn short(alphas: &[f64]) -> (SweepConfig, ThermoOptions) {
        let cfg = SweepConfig { grid: Some(default_times(2e5)), ..SweepConfig::default() };
        (cfg, ThermoOptions { alphas: alphas.to_vec(), ..ThermoOptions::default() })
    }

    #[test]
    fn physical_dynamics_pass() {
        let (cfg, opts) = short(&[-1.0, 0.5]);
        let r = thermo_check(&cfg, &opts).unwrap();
        assert!(r.passed(), "{:?}", r.summary());
        assert_eq!(r.table().rows.len(), 2 * 161);
    }

    #[test]
    fn negated_dissipator_fails() {
        let (cfg, mut opts) = short(&[0.5]);
        opts.negate_dissipator = true;
        let r = thermo_check(&cfg, &opts).unwrap();
        assert!(!r.passed());
        assert_eq!(r.audits[0].samples.len(), 1);
        assert!(r.summary()[0].starts_with("[FAIL]"));
    }

    #[test]
    fn unconverged_trajectory_fails_balance() {
        let cfg = SweepConfig { grid: Some("0,10".parse().unwrap()), ..SweepConfig::default() };
        let r = thermo_check(&cfg, &ThermoOptions { alphas: vec![-1.0], ..ThermoOptions::default() }).unwrap();
        assert_eq!(r.violations().next().unwrap().check, "final j_h + j_c");
    }

    #[test]
    fn single_bath_reaches_equilibrium() {
        let cfg = SweepConfig {
            params: VModelParams::default().with_delta(1e-3),
            grid: Some(default_times(3e6)),
            ..SweepConfig::default()
        };
        let opts = ThermoOptions { alphas: vec![0.5], single_bath: true, ..ThermoOptions::default() };
        let r = thermo_check(&cfg, &opts).unwrap();
        assert!(r.passed(), "{:?}", r.summary());
        let last = r.audits[0].samples.last().unwrap();
        assert!(last.entropy_rate.abs() < 1e-12);
        assert_eq!(last.j_c, 0.0);
    }
}
