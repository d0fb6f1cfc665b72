//! Heat transport through a three-level V system coupled to two bosonic baths.
//!
//! The crate is split along the layers of the model:
//!
//! - [`bath`], [`system`], [`density`]: Ohmic bath physics, the energy-basis
//!   system Hamiltonian and validated reduced density matrices.
//! - [`redfield`]: a generic Redfield engine (nonsecular and secular) with
//!   adaptive integration, a direct steady-state solver, heat currents and
//!   entropy production.
//! - [`vmodel`]: the V model itself, its hand-written equations of motion and
//!   the quasi-degenerate steady-state linear system.
//! - [`analytic`]: closed-form steady-state coherences, populations and currents.
//! - [`basis`]: the local-site picture and the single-bath / `alpha = 1` reductions.
//!
//! Natural units are used throughout (`hbar = k_B = 1`).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod basis;
pub mod bath;
pub mod density;
pub mod error;
pub mod redfield;
pub mod system;
pub mod vmodel;

pub use bath::{bose_occupation, spectral_density, transition_rate, BathLabel, OhmicBath};
pub use density::DensityMatrix;
pub use error::{Error, Result};
pub use redfield::{
    entropy_production_rate, heat_current, integrate, rdm_eigenvalues, steady_state, IntegrateOptions,
    Integrator, Mode, RedfieldGenerator, Trajectory,
};
pub use system::EnergyBasisSystem;
pub use vmodel::{QuasiDegenerateState, SteadyLinearSystem, VModelParams};

/// Complex scalar used for density matrices and superoperators.
pub type C64 = num_complex::Complex64;
