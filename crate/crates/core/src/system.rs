use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::C64;

/// A system Hamiltonian that is diagonal in the working basis.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyBasisSystem {
    energies: Vec<f64>,
}

impl EnergyBasisSystem {
    pub fn new(energies: Vec<f64>) -> Result<Self> {
        if energies.len() < 2 {
            return Err(Error::InvalidParams(format!("need at least 2 levels, got {}", energies.len())));
        }
        if energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidParams("energies must be finite".into()));
        }
        Ok(Self { energies })
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Bohr frequency `E_a - E_b`.
    pub fn bohr(&self, a: usize, b: usize) -> f64 {
        self.energies[a] - self.energies[b]
    }

    pub fn hamiltonian(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.dim(), self.dim(), |a, b| {
            if a == b {
                C64::new(self.energies[a], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }
}
