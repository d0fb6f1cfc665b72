//! Generic Markovian Redfield machinery for an energy-basis system coupled to
//! any number of Ohmic baths.
//!
//! Density matrices are vectorised row-major, `vec[a * d + b] = sigma[a][b]`,
//! and every linear map on them is a `d^2 x d^2` complex [`Superoperator`].

mod integrate;
mod steady;

pub use integrate::{integrate, integrate_at, IntegrateOptions, Integrator, Trajectory};
pub use steady::steady_state;

use nalgebra::DMatrix;

use crate::bath::OhmicBath;
use crate::density::{self, DensityMatrix, POSITIVITY_TOL};
use crate::error::{Error, Result};
use crate::system::EnergyBasisSystem;
use crate::C64;

/// Relative tolerance for treating two Bohr frequencies as equal in secular mode.
pub const SECULAR_TOL: f64 = 1e-9;

/// Eigenvalue floor used for `ln(sigma)` in the entropy production rate.
pub const LOG_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Nonsecular,
    Secular,
}

/// A linear map on `d x d` matrices stored as a `d^2 x d^2` matrix, with its
/// nonzero entries cached for fast application.
#[derive(Debug, Clone)]
pub struct Superoperator {
    dim: usize,
    matrix: DMatrix<C64>,
    nonzeros: Vec<(usize, usize, C64)>,
}

impl Superoperator {
    fn from_matrix(dim: usize, matrix: DMatrix<C64>) -> Self {
        let mut nonzeros = Vec::new();
        for r in 0..matrix.nrows() {
            for c in 0..matrix.ncols() {
                let v = matrix[(r, c)];
                if v.re != 0.0 || v.im != 0.0 {
                    nonzeros.push((r, c, v));
                }
            }
        }
        Self { dim, matrix, nonzeros }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The `d^2 x d^2` matrix acting on row-major vectorised states.
    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn nnz(&self) -> usize {
        self.nonzeros.len()
    }

    pub(crate) fn apply_vec(&self, x: &[C64], out: &mut [C64]) {
        out.iter_mut().for_each(|o| *o = C64::new(0.0, 0.0));
        for &(r, c, v) in &self.nonzeros {
            out[r] += v * x[c];
        }
    }

    pub fn apply(&self, m: &DMatrix<C64>) -> DMatrix<C64> {
        let x = vectorize(m);
        let mut out = vec![C64::new(0.0, 0.0); x.len()];
        self.apply_vec(&x, &mut out);
        unvectorize(self.dim, &out)
    }

    fn scaled(&self, factor: f64) -> Self {
        Self::from_matrix(self.dim, &self.matrix * C64::new(factor, 0.0))
    }

    fn sum<'a>(dim: usize, parts: impl IntoIterator<Item = &'a Superoperator>) -> Self {
        let mut m = DMatrix::zeros(dim * dim, dim * dim);
        for p in parts {
            m += &p.matrix;
        }
        Self::from_matrix(dim, m)
    }
}

pub(crate) fn vectorize(m: &DMatrix<C64>) -> Vec<C64> {
    let d = m.nrows();
    (0..d * d).map(|i| m[(i / d, i % d)]).collect()
}

pub(crate) fn unvectorize(dim: usize, v: &[C64]) -> DMatrix<C64> {
    DMatrix::from_fn(dim, dim, |a, b| v[a * dim + b])
}

/// The precomputed Redfield map `sigma -> -i[H, sigma] + sum_m D_m(sigma)`.
#[derive(Debug, Clone)]
pub struct RedfieldGenerator {
    system: EnergyBasisSystem,
    baths: Vec<OhmicBath>,
    mode: Mode,
    unitary: Superoperator,
    dissipators: Vec<Superoperator>,
    total: Superoperator,
}

impl RedfieldGenerator {
    pub fn build(system: &EnergyBasisSystem, baths: &[OhmicBath], mode: Mode) -> Result<Self> {
        let d = system.dim();
        for bath in baths {
            if bath.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, got: bath.dim() });
            }
        }
        if mode == Mode::Secular {
            for a in 0..d {
                for b in (a + 1)..d {
                    if !bohr_distinct(system.bohr(a, b), 0.0) {
                        return Err(Error::DegenerateSecular { a, b });
                    }
                }
            }
        }

        let mut unitary = DMatrix::zeros(d * d, d * d);
        for a in 0..d {
            for b in 0..d {
                unitary[(a * d + b, a * d + b)] = C64::new(0.0, -system.bohr(a, b));
            }
        }
        let unitary = Superoperator::from_matrix(d, unitary);

        let dissipators: Vec<Superoperator> = baths
            .iter()
            .map(|bath| {
                let mut m = redfield_tensor(system, bath);
                if mode == Mode::Secular {
                    secular_filter(system, &mut m);
                }
                Superoperator::from_matrix(d, m)
            })
            .collect();

        let total = Superoperator::sum(d, std::iter::once(&unitary).chain(dissipators.iter()));
        Ok(Self { system: system.clone(), baths: baths.to_vec(), mode, unitary, dissipators, total })
    }

    pub fn system(&self) -> &EnergyBasisSystem {
        &self.system
    }

    pub fn baths(&self) -> &[OhmicBath] {
        &self.baths
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn dim(&self) -> usize {
        self.system.dim()
    }

    pub fn unitary_part(&self) -> &Superoperator {
        &self.unitary
    }

    pub fn dissipators(&self) -> &[Superoperator] {
        &self.dissipators
    }

    pub fn total(&self) -> &Superoperator {
        &self.total
    }

    /// `d sigma / dt` for an arbitrary (not necessarily physical) matrix.
    pub fn apply(&self, m: &DMatrix<C64>) -> Result<DMatrix<C64>> {
        self.check_dim(m.nrows())?;
        Ok(self.total.apply(m))
    }

    /// Contribution `D_m(sigma)` of bath `index`.
    pub fn dissipator(&self, index: usize, m: &DMatrix<C64>) -> Result<DMatrix<C64>> {
        let d = self.dissipators.get(index).ok_or_else(|| {
            Error::InvalidParams(format!("bath index {index} out of range ({} baths)", self.dissipators.len()))
        })?;
        self.check_dim(m.nrows())?;
        Ok(d.apply(m))
    }

    /// Copy with every dissipator multiplied by `factor`. A negative factor
    /// produces an unphysical generator, used to check that audits can fail.
    pub fn with_scaled_dissipators(&self, factor: f64) -> Self {
        let d = self.dim();
        let dissipators: Vec<Superoperator> = self.dissipators.iter().map(|s| s.scaled(factor)).collect();
        let total = Superoperator::sum(d, std::iter::once(&self.unitary).chain(dissipators.iter()));
        Self { dissipators, total, ..self.clone() }
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got });
        }
        Ok(())
    }
}

fn bohr_distinct(w1: f64, w2: f64) -> bool {
    (w1 - w2).abs() >= SECULAR_TOL * w1.abs().max(1.0)
}

/// Dissipator of one bath in tensor form,
///
/// ```text
/// D(s)_ab = - sum_cd { R_ac,cd(w_dc) s_db + R_bd,dc(w_cd) s_ac
///                      - [R_db,ac(w_ca) + R_ca,bd(w_db)] s_cd },
/// R_ab,cd(w) = S_ab S_cd k(w) / 2,
/// ```
///
/// with real rates so that `R* = R`.
fn redfield_tensor(system: &EnergyBasisSystem, bath: &OhmicBath) -> DMatrix<C64> {
    let d = system.dim();
    let s = bath.coupling_op();
    // half[(x, y)] = k(E_x - E_y) / 2
    let half = DMatrix::from_fn(d, d, |x, y| 0.5 * bath.rate(system.bohr(x, y)));
    let mut m = DMatrix::<f64>::zeros(d * d, d * d);
    let idx = |a: usize, b: usize| a * d + b;
    for a in 0..d {
        for b in 0..d {
            let row = idx(a, b);
            for c in 0..d {
                for e in 0..d {
                    m[(row, idx(e, b))] -= s[(a, c)] * s[(c, e)] * half[(e, c)];
                    m[(row, idx(a, c))] -= s[(b, e)] * s[(e, c)] * half[(c, e)];
                    m[(row, idx(c, e))] +=
                        s[(e, b)] * s[(a, c)] * half[(c, a)] + s[(c, a)] * s[(b, e)] * half[(e, b)];
                }
            }
        }
    }
    m.map(|v| C64::new(v, 0.0))
}

/// Drops every coupling between elements whose Bohr frequencies differ.
fn secular_filter(system: &EnergyBasisSystem, m: &mut DMatrix<C64>) {
    let d = system.dim();
    for r in 0..d * d {
        for c in 0..d * d {
            let w_row = system.bohr(r / d, r % d);
            let w_col = system.bohr(c / d, c % d);
            if bohr_distinct(w_row, w_col) {
                m[(r, c)] = C64::new(0.0, 0.0);
            }
        }
    }
}

/// `d sigma / dt` for a physical state.
pub fn apply_rhs(gen: &RedfieldGenerator, state: &DensityMatrix) -> Result<DMatrix<C64>> {
    gen.apply(state.matrix())
}

/// Heat current `Tr[H_S D_m(sigma)]` from bath `bath_index` into the system.
pub fn heat_current(gen: &RedfieldGenerator, bath_index: usize, state: &DensityMatrix) -> Result<f64> {
    heat_current_raw(gen, bath_index, state.matrix())
}

pub(crate) fn heat_current_raw(gen: &RedfieldGenerator, bath_index: usize, m: &DMatrix<C64>) -> Result<f64> {
    let dm = gen.dissipator(bath_index, m)?;
    Ok(gen.system.energies().iter().enumerate().map(|(a, e)| e * dm[(a, a)].re).sum())
}

/// Entropy production rate `-sum_m j_m / T_m - d/dt Tr[sigma ln sigma]`.
pub fn entropy_production_rate(gen: &RedfieldGenerator, state: &DensityMatrix) -> Result<f64> {
    let min_eigenvalue = state.min_eigenvalue();
    if min_eigenvalue < -POSITIVITY_TOL {
        return Err(Error::NotPositive { min_eigenvalue });
    }
    let mut rate = 0.0;
    for (i, bath) in gen.baths.iter().enumerate() {
        rate -= heat_current(gen, i, state)? / bath.temperature();
    }
    let sigma_dot = apply_rhs(gen, state)?;
    let log_sigma = density::hermitian_log(state.matrix(), LOG_FLOOR);
    // d/dt Tr[s ln s] = Tr[s' ln s] + Tr[s'], and Tr[s'] = 0
    rate -= (sigma_dot * log_sigma).trace().re;
    Ok(rate)
}

/// Ascending eigenvalues of the reduced density matrix.
pub fn rdm_eigenvalues(state: &DensityMatrix) -> Vec<f64> {
    state.eigenvalues()
}
