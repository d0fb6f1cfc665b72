use rayon::prelude::*;
use vheat_core::analytic::{coherence_im_ss, coherence_re_ss, current_ss, populations_ss, secular_current_ss};
use vheat_core::redfield::{IntegrateOptions, Integrator};
use vheat_core::vmodel::vmodel_generator;
use vheat_core::{DensityMatrix, VModelParams};

use crate::config::{Engine, SweepConfig};
use crate::error::{core_err, ExpError, Result};
use crate::evaluate::{mode_of, state_row, steady_row};
use crate::output::{ResultRow, Table};

pub const DEFAULT_ALPHA_GRID: &str = "-3:3:41";
pub const DEFAULT_DELTA_GRID: &str = "log:1e-4:1e-2:21";
pub const DEFAULT_DT_GRID: &str = "0.5:5.5:11";
pub const DEFAULT_RECTIFY_ALPHAS: &str = "-1:1:11";

fn header(first: &str, rest: impl IntoIterator<Item = String>) -> Vec<String> {
    std::iter::once(first.to_string()).chain(rest).collect()
}

fn row_header(first: &str) -> Vec<String> {
    header(first, ResultRow::HEADER.iter().map(|s| s.to_string()))
}

fn row_values(r: &ResultRow) -> Vec<f64> {
    std::iter::once(r.x).chain(r.values()).collect()
}

/// Trajectory from the ground state sampled on the configured time grid.
pub fn transient(cfg: &SweepConfig, opts: &IntegrateOptions) -> Result<Table> {
    cfg.validate()?;
    let grid = cfg.grid.as_ref().ok_or_else(|| ExpError::BadInput("transient needs a time grid (--grid)".into()))?;
    let times = grid.values();
    if times[0] < 0.0 {
        return Err(ExpError::BadInput(format!("times must be >= 0, got {}", times[0])));
    }
    let mode = mode_of(cfg.engine)
        .ok_or_else(|| ExpError::BadInput(format!("transient needs a numeric engine, got {:?}", cfg.engine)))?;
    let p = &cfg.params;
    let gen = vmodel_generator(p, mode).map_err(core_err("building generator"))?;
    let rho0 = DensityMatrix::pure_level(3, 0);
    let mut it = Integrator::new(&gen, &rho0, *opts).map_err(core_err("integrator setup"))?;
    let mut table = Table::new(row_header("t"));
    for t in times {
        let ctx = format!("transient at alpha = {}, t = {t}", p.alpha);
        it.advance_to(t).map_err(core_err(ctx.clone()))?;
        let state = it.state().map_err(core_err(ctx))?;
        let row = state_row(&gen, &state, t)?;
        row.check()?;
        table.push(row_values(&row));
    }
    Ok(table)
}

/// Per alpha: the configured engine's steady row, the numeric secular
/// populations and current, and the closed forms side by side.
pub fn sweep_alpha(cfg: &SweepConfig) -> Result<Table> {
    cfg.validate()?;
    let alphas = cfg.grid_or(DEFAULT_ALPHA_GRID).values();
    let extra = [
        "secular_p_ex",
        "secular_j_h",
        "analytic_s32_re",
        "analytic_s32_im",
        "analytic_p_ex",
        "analytic_j_h",
        "analytic_secular_j_h",
    ];
    let rows: Vec<Vec<f64>> = alphas
        .par_iter()
        .map(|&a| -> Result<Vec<f64>> {
            let p = cfg.params.with_alpha(a);
            let main = steady_row(&p, cfg.engine, a)?;
            main.check()?;
            let sec = steady_row(&p, Engine::Secular, a)?;
            let ctx = || format!("closed forms at alpha = {a}");
            let (s22, s33, _) = populations_ss(&p).map_err(core_err(ctx()))?;
            let mut v = row_values(&main);
            v.extend([
                sec.excited_sum(),
                sec.j_h,
                coherence_re_ss(&p).map_err(core_err(ctx()))?,
                coherence_im_ss(&p).map_err(core_err(ctx()))?,
                s22 + s33,
                current_ss(&p).map_err(core_err(ctx()))?,
                secular_current_ss(&p).map_err(core_err(ctx()))?,
            ]);
            Ok(v)
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(header("alpha", ResultRow::HEADER.iter().chain(&extra).map(|s| s.to_string())));
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

/// Currents, coherence and excited population at `alpha = -1` and `alpha = 1` per splitting.
pub fn sweep_delta(cfg: &SweepConfig) -> Result<Table> {
    cfg.validate()?;
    let deltas = cfg.grid_or(DEFAULT_DELTA_GRID).values();
    let cols = ["j_h_alpha_m1", "j_h_alpha_p1", "s32_re_alpha_m1", "s32_re_alpha_p1", "p_ex_alpha_m1", "p_ex_alpha_p1"];
    let rows: Vec<Vec<f64>> = deltas
        .par_iter()
        .map(|&d| -> Result<Vec<f64>> {
            let p = cfg.params.with_delta(d);
            p.validate().map_err(core_err(format!("delta = {d}")))?;
            let m = steady_row(&p.with_alpha(-1.0), cfg.engine, d)?;
            let q = steady_row(&p.with_alpha(1.0), cfg.engine, d)?;
            m.check()?;
            q.check()?;
            Ok(vec![d, m.j_h, q.j_h, m.s32_re, q.s32_re, m.excited_sum(), q.excited_sum()])
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(header("delta", cols.iter().map(|s| s.to_string())));
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectifyPoint {
    pub alpha: f64,
    pub delta_t: f64,
    pub j_forward: f64,
    pub j_reverse: f64,
}

impl RectifyPoint {
    /// `|j(dT) / j(-dT)|`.
    pub fn ratio(&self) -> f64 {
        (self.j_forward / self.j_reverse).abs()
    }

    /// Ratio folded onto `>= 1`, independent of which bias is called forward.
    pub fn rectification(&self) -> f64 {
        let r = self.ratio();
        r.max(1.0 / r)
    }
}

/// Forward and reverse hot-bath currents at fixed mean temperature.
pub fn rectify_point(p: &VModelParams, engine: Engine, alpha: f64, delta_t: f64) -> Result<RectifyPoint> {
    let mean = 0.5 * (p.t_hot + p.t_cold);
    if !(delta_t > 0.0 && mean - 0.5 * delta_t > 0.0) {
        return Err(ExpError::BadInput(format!("need 0 < dT < 2 T_mean = {}, got dT = {delta_t}", 2.0 * mean)));
    }
    let (hi, lo) = (mean + 0.5 * delta_t, mean - 0.5 * delta_t);
    let base = p.with_alpha(alpha);
    let fwd = steady_row(&base.with_temperatures(hi, lo), engine, delta_t)?;
    let rev = steady_row(&base.with_temperatures(lo, hi), engine, delta_t)?;
    Ok(RectifyPoint { alpha, delta_t, j_forward: fwd.j_h, j_reverse: rev.j_h })
}

pub fn rectify_points(cfg: &SweepConfig, alphas: &[f64]) -> Result<Vec<RectifyPoint>> {
    cfg.validate()?;
    let dts = cfg.grid_or(DEFAULT_DT_GRID).values();
    let pairs: Vec<(f64, f64)> = alphas.iter().flat_map(|&a| dts.iter().map(move |&d| (a, d))).collect();
    pairs.par_iter().map(|&(a, d)| rectify_point(&cfg.params, cfg.engine, a, d)).collect()
}

/// Rectification table over the alpha list and the configured `dT` grid.
pub fn rectify(cfg: &SweepConfig, alphas: &[f64]) -> Result<Table> {
    let points = rectify_points(cfg, alphas)?;
    let mean = 0.5 * (cfg.params.t_hot + cfg.params.t_cold);
    let mut table = Table::new(
        ["alpha", "delta_t", "t_hot", "t_cold", "j_forward", "j_reverse", "ratio", "rectification"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
    );
    for pt in points {
        if !(pt.j_forward.is_finite() && pt.j_reverse.is_finite()) {
            return Err(ExpError::Invariant(format!("non-finite current at alpha {}, dT {}", pt.alpha, pt.delta_t)));
        }
        table.push(vec![
            pt.alpha,
            pt.delta_t,
            mean + 0.5 * pt.delta_t,
            mean - 0.5 * pt.delta_t,
            pt.j_forward,
            pt.j_reverse,
            pt.ratio(),
            pt.rectification(),
        ]);
    }
    Ok(table)
}
