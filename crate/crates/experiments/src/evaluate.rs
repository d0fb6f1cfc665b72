use vheat_core::analytic::{coherence_im_ss, coherence_re_ss, current_ss, populations_ss};
use vheat_core::redfield::{entropy_production_rate, heat_current, steady_state, Mode};
use vheat_core::vmodel::{quasi_degenerate_currents, solve_quasi_degenerate_ss, vmodel_generator};
use vheat_core::{DensityMatrix, QuasiDegenerateState, RedfieldGenerator, VModelParams};

use crate::config::Engine;
use crate::error::{core_err, Result};
use crate::output::ResultRow;

/// Row for a physical state under `gen`; bath 0 is hot, bath 1 cold.
pub fn state_row(gen: &RedfieldGenerator, state: &DensityMatrix, x: f64) -> Result<ResultRow> {
    let ctx = || format!("observables at {x}");
    let c = state.get(2, 1);
    Ok(ResultRow {
        x,
        s22: state.population(1),
        s33: state.population(2),
        s11: state.population(0),
        s32_re: c.re,
        s32_im: c.im,
        j_h: heat_current(gen, 0, state).map_err(core_err(ctx()))?,
        j_c: heat_current(gen, 1, state).map_err(core_err(ctx()))?,
        entropy_rate: entropy_production_rate(gen, state).map_err(core_err(ctx()))?,
        min_eigenvalue: state.min_eigenvalue(),
    })
}

pub fn mode_of(engine: Engine) -> Option<Mode> {
    match engine {
        Engine::Nonsecular => Some(Mode::Nonsecular),
        Engine::Secular => Some(Mode::Secular),
        Engine::Analytic | Engine::QuasiDegenerateLinear => None,
    }
}

fn excited_block_row(p: &VModelParams, q: QuasiDegenerateState, j_h: f64, j_c: f64, x: f64) -> Result<ResultRow> {
    let rho = q.to_density().map_err(core_err(format!("state at {x}")))?;
    Ok(ResultRow {
        x,
        s22: q.s22,
        s33: q.s33,
        s11: q.s11(),
        s32_re: q.s32_re,
        s32_im: q.s32_im,
        j_h,
        j_c,
        // stationary: the von Neumann entropy does not change
        entropy_rate: -j_h / p.t_hot - j_c / p.t_cold,
        min_eigenvalue: rho.min_eigenvalue(),
    })
}

/// Steady-state row of `engine` at parameters `p`, labelled with sweep value `x`.
pub fn steady_row(p: &VModelParams, engine: Engine, x: f64) -> Result<ResultRow> {
    let ctx = || format!("{engine:?} steady state at {x}");
    match engine {
        Engine::Nonsecular | Engine::Secular => {
            let mode = mode_of(engine).expect("numeric engine");
            let gen = vmodel_generator(p, mode).map_err(core_err(ctx()))?;
            let ss = steady_state(&gen).map_err(core_err(ctx()))?;
            state_row(&gen, &ss, x)
        }
        Engine::Analytic => {
            let (s22, s33, _) = populations_ss(p).map_err(core_err(ctx()))?;
            let q = QuasiDegenerateState {
                s22,
                s33,
                s32_re: coherence_re_ss(p).map_err(core_err(ctx()))?,
                s32_im: coherence_im_ss(p).map_err(core_err(ctx()))?,
            };
            let j = current_ss(p).map_err(core_err(ctx()))?;
            excited_block_row(p, q, j, -j, x)
        }
        Engine::QuasiDegenerateLinear => {
            let q = solve_quasi_degenerate_ss(p).map_err(core_err(ctx()))?;
            let (jh, jc) = quasi_degenerate_currents(p, &q);
            excited_block_row(p, q, jh, jc, x)
        }
    }
}
