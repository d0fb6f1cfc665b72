//! Reduced density matrices.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::system::EnergyBasisSystem;
use crate::C64;

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-10;

/// A Hermitian, unit-trace matrix. Positivity is checked on demand, never enforced.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn new(entries: DMatrix<C64>) -> Result<Self> {
        Self::with_tolerances(entries, HERMITIAN_TOL, TRACE_TOL)
    }

    /// Like [`DensityMatrix::new`] with caller-chosen tolerances, used for
    /// integrated states whose trace drifts at the integrator's accuracy.
    pub fn with_tolerances(entries: DMatrix<C64>, hermitian_tol: f64, trace_tol: f64) -> Result<Self> {
        if !entries.is_square() || entries.nrows() < 2 {
            return Err(Error::InvalidParams(format!(
                "density matrix must be square with dim >= 2, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParams("density matrix has non-finite entries".into()));
        }
        let deviation = hermiticity_deviation(&entries);
        if deviation > hermitian_tol {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = entries.trace();
        if (trace.re - 1.0).abs() > trace_tol || trace.im.abs() > trace_tol {
            return Err(Error::BadTrace { trace: trace.re });
        }
        Ok(Self { entries })
    }

    /// Pure state `|level><level|`.
    pub fn pure_level(dim: usize, level: usize) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        m[(level, level)] = C64::new(1.0, 0.0);
        Self { entries: m }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { entries: DMatrix::identity(dim, dim) * C64::new(1.0 / dim as f64, 0.0) }
    }

    pub fn from_populations(populations: &[f64]) -> Result<Self> {
        let n = populations.len();
        Self::new(DMatrix::from_fn(n, n, |a, b| {
            if a == b {
                C64::new(populations[a], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }))
    }

    /// Thermal state `exp(-H/T) / Z` of an energy-basis system.
    pub fn gibbs(system: &EnergyBasisSystem, temperature: f64) -> Result<Self> {
        if !(temperature > 0.0) {
            return Err(Error::Domain(format!("Gibbs state needs T > 0, got {temperature}")));
        }
        let e0 = system.energies().iter().cloned().fold(f64::INFINITY, f64::min);
        let weights: Vec<f64> = system.energies().iter().map(|e| (-(e - e0) / temperature).exp()).collect();
        let z: f64 = weights.iter().sum();
        let pops: Vec<f64> = weights.iter().map(|w| w / z).collect();
        Self::from_populations(&pops)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.entries
    }

    pub fn get(&self, a: usize, b: usize) -> C64 {
        self.entries[(a, b)]
    }

    pub fn population(&self, a: usize) -> f64 {
        self.entries[(a, a)].re
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.entries)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn is_positive(&self, tol: f64) -> bool {
        self.min_eigenvalue() >= -tol
    }

    /// Max-norm distance to another state of the same dimension.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        max_abs(&(&self.entries - &other.entries))
    }
}

pub(crate) fn hermiticity_deviation(m: &DMatrix<C64>) -> f64 {
    let mut dev = 0.0f64;
    for a in 0..m.nrows() {
        for b in a..m.ncols() {
            dev = dev.max((m[(a, b)] - m[(b, a)].conj()).norm());
        }
    }
    dev
}

pub(crate) fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Ascending eigenvalues of the Hermitian part of `m`.
pub(crate) fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let herm = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().cloned().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Matrix logarithm of a Hermitian matrix with eigenvalues clamped below at `floor`.
pub(crate) fn hermitian_log(m: &DMatrix<C64>, floor: f64) -> DMatrix<C64> {
    let herm = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let n = m.nrows();
    let logs = DMatrix::from_fn(n, n, |a, b| {
        if a == b {
            C64::new(eig.eigenvalues[a].max(floor).ln(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    &eig.eigenvectors * logs * eig.eigenvectors.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pure_and_mixed_spectra() {
        let e = DensityMatrix::pure_level(3, 0).eigenvalues();
        assert_eq!(e.len(), 3);
        assert!(e[0].abs() < 1e-15 && e[1].abs() < 1e-15);
        assert_relative_eq!(e[2], 1.0, epsilon = 1e-15);

        let e = DensityMatrix::maximally_mixed(3).eigenvalues();
        for v in e {
            assert_relative_eq!(v, 1.0 / 3.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn validation() {
        let mut m = DMatrix::from_element(2, 2, C64::new(0.0, 0.0));
        m[(0, 0)] = C64::new(0.5, 0.0);
        m[(1, 1)] = C64::new(0.5, 0.0);
        m[(0, 1)] = C64::new(0.1, 0.2);
        assert!(matches!(DensityMatrix::new(m.clone()), Err(Error::NotHermitian { .. })));
        m[(1, 0)] = C64::new(0.1, -0.2);
        assert!(DensityMatrix::new(m.clone()).is_ok());
        m[(1, 1)] = C64::new(0.6, 0.0);
        assert!(matches!(DensityMatrix::new(m), Err(Error::BadTrace { .. })));
    }

    #[test]
    fn positivity_is_checked_not_enforced() {
        let rho = DensityMatrix::from_populations(&[1.2, -0.2]).unwrap();
        assert!(!rho.is_positive(POSITIVITY_TOL));
        assert_relative_eq!(rho.min_eigenvalue(), -0.2, epsilon = 1e-14);
    }

    #[test]
    fn gibbs_weights() {
        let sys = EnergyBasisSystem::new(vec![0.0, 0.9999, 1.0]).unwrap();
        let g = DensityMatrix::gibbs(&sys, 2.0).unwrap();
        assert_relative_eq!(g.population(1) / g.population(0), (-0.9999f64 / 2.0).exp(), max_relative = 1e-14);
        assert_relative_eq!(g.population(2) / g.population(0), (-0.5f64).exp(), max_relative = 1e-14);
        assert_relative_eq!(g.trace(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn log_of_diagonal() {
        let rho = DensityMatrix::from_populations(&[0.5, 0.5, 0.0]).unwrap();
        let l = hermitian_log(rho.matrix(), 1e-14);
        assert_relative_eq!(l[(0, 0)].re, 0.5f64.ln(), epsilon = 1e-12);
        assert_relative_eq!(l[(2, 2)].re, 1e-14f64.ln(), epsilon = 1e-9);
    }
}
