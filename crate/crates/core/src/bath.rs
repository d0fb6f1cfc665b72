//! Ohmic bosonic baths: occupations, spectral densities and transition rates.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;

/// Bose-Einstein occupation `1 / (exp(omega / T) - 1)` for `omega > 0`.
pub fn bose_occupation(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::Domain(format!("bose occupation needs omega > 0, got {omega}")));
    }
    if !(temperature > 0.0) {
        return Err(Error::Domain(format!("bose occupation needs T > 0, got {temperature}")));
    }
    Ok(1.0 / (omega / temperature).exp_m1())
}

/// Ohmic spectral density `J(omega) = gamma * omega` on non-negative frequencies.
pub fn spectral_density(omega: f64, gamma: f64) -> Result<f64> {
    if !(omega >= 0.0) {
        return Err(Error::Domain(format!("spectral density needs omega >= 0, got {omega}")));
    }
    Ok(gamma * omega)
}

/// Full transition rate `k(omega)` of an Ohmic bath.
///
/// Positive frequencies are emission into the bath, `2 J(omega) [n(omega) + 1]`;
/// negative ones are absorption, `2 J(|omega|) n(|omega|)`. At `omega = 0` the
/// removable singularity is filled with its limit `2 gamma T`.
pub fn transition_rate(omega: f64, bath: &OhmicBath) -> f64 {
    ohmic_rate(omega, bath.temperature, bath.gamma)
}

pub(crate) fn ohmic_rate(omega: f64, temperature: f64, gamma: f64) -> f64 {
    let x = omega.abs() / temperature;
    if omega == 0.0 {
        return 2.0 * gamma * temperature;
    }
    // n(|w|) = 1 / expm1(x); stays finite and exact near x -> 0
    let n = 1.0 / x.exp_m1();
    let j = gamma * omega.abs();
    if omega > 0.0 {
        2.0 * j * (n + 1.0)
    } else {
        2.0 * j * n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BathLabel {
    Hot,
    Cold,
}

impl fmt::Display for BathLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BathLabel::Hot => write!(f, "h"),
            BathLabel::Cold => write!(f, "c"),
        }
    }
}

/// A thermal bath with Ohmic spectral density coupled through a real
/// symmetric system operator.
#[derive(Debug, Clone, PartialEq)]
pub struct OhmicBath {
    label: BathLabel,
    temperature: f64,
    gamma: f64,
    coupling_op: DMatrix<f64>,
}

impl OhmicBath {
    pub fn new(label: BathLabel, temperature: f64, gamma: f64, coupling_op: DMatrix<f64>) -> Result<Self> {
        if !(temperature > 0.0) || !temperature.is_finite() {
            return Err(Error::InvalidParams(format!("bath temperature must be > 0, got {temperature}")));
        }
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidParams(format!("bath coupling must be >= 0, got {gamma}")));
        }
        if !coupling_op.is_square() {
            return Err(Error::InvalidParams("coupling operator must be square".into()));
        }
        let asym = (&coupling_op - coupling_op.transpose()).amax();
        if asym > SYMMETRY_TOL {
            return Err(Error::InvalidParams(format!("coupling operator is not symmetric (deviation {asym:e})")));
        }
        Ok(Self { label, temperature, gamma, coupling_op })
    }

    pub fn label(&self) -> BathLabel {
        self.label
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn beta(&self) -> f64 {
        1.0 / self.temperature
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn coupling_op(&self) -> &DMatrix<f64> {
        &self.coupling_op
    }

    pub fn dim(&self) -> usize {
        self.coupling_op.nrows()
    }

    /// Shorthand for [`transition_rate`].
    pub fn rate(&self, omega: f64) -> f64 {
        transition_rate(omega, self)
    }

    /// Copy of this bath at another temperature.
    pub fn at_temperature(&self, temperature: f64) -> Result<Self> {
        Self::new(self.label, temperature, self.gamma, self.coupling_op.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn bath(t: f64) -> OhmicBath {
        OhmicBath::new(BathLabel::Hot, t, 0.0071, DMatrix::identity(2, 2)).unwrap()
    }

    #[test]
    fn occupation_values() {
        assert_relative_eq!(bose_occupation(1.0, 4.0).unwrap(), 1.0 / (0.25f64.exp() - 1.0), max_relative = 1e-14);
        assert!((bose_occupation(1.0, 4.0).unwrap() - 3.52082).abs() < 1e-5);
        assert!((bose_occupation(1.0, 2.0).unwrap() - 1.54149).abs() < 1e-5);
        assert_eq!(bose_occupation(1.0, 1e-6).unwrap(), 0.0);
    }

    #[test]
    fn occupation_domain() {
        assert!(matches!(bose_occupation(0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(bose_occupation(-1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(bose_occupation(1.0, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn occupation_monotone() {
        let ws: Vec<f64> = (1..40).map(|i| 0.1 * i as f64).collect();
        let ts: Vec<f64> = (1..40).map(|i| 0.2 * i as f64).collect();
        for &t in &ts {
            for w in ws.windows(2) {
                assert!(bose_occupation(w[0], t).unwrap() > bose_occupation(w[1], t).unwrap());
            }
        }
        for &w in &ws {
            for t in ts.windows(2) {
                assert!(bose_occupation(w, t[0]).unwrap() < bose_occupation(w, t[1]).unwrap());
            }
        }
    }

    #[test]
    fn spectral_density_is_linear() {
        assert_relative_eq!(spectral_density(1.0, 0.0071).unwrap(), 0.0071);
        assert_eq!(spectral_density(0.0, 0.0071).unwrap(), 0.0);
        assert_relative_eq!(spectral_density(2.0, 0.0071).unwrap(), 0.0142);
        assert!(spectral_density(-1.0, 0.0071).is_err());
    }

    #[test]
    fn rates_at_case_study_temperatures() {
        assert!((bath(4.0).rate(1.0) - 0.064196).abs() < 1e-6);
        assert!((bath(2.0).rate(1.0) - 0.036089).abs() < 1e-6);
        assert_relative_eq!(bath(2.0).rate(-1.0) / bath(2.0).rate(1.0), (-0.5f64).exp(), max_relative = 1e-13);
    }

    #[test]
    fn zero_frequency_limit() {
        for t in [0.5, 1.0, 2.0, 4.0] {
            let b = bath(t);
            let k0 = 2.0 * b.gamma() * t;
            assert_eq!(b.rate(0.0), k0);
            assert_relative_eq!(b.rate(1e-8), k0, max_relative = 1e-7);
            assert_relative_eq!(b.rate(-1e-8), k0, max_relative = 1e-7);
        }
    }

    #[test]
    fn rejects_bad_baths() {
        assert!(OhmicBath::new(BathLabel::Cold, 0.0, 0.1, DMatrix::identity(2, 2)).is_err());
        assert!(OhmicBath::new(BathLabel::Cold, 1.0, -0.1, DMatrix::identity(2, 2)).is_err());
        let asym = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.5, 0.0]);
        assert!(OhmicBath::new(BathLabel::Cold, 1.0, 0.1, asym).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn detailed_balance(w in 1e-3f64..20.0, t in 0.05f64..20.0, g in 1e-4f64..1.0) {
                let b = OhmicBath::new(BathLabel::Hot, t, g, DMatrix::identity(2, 2)).unwrap();
                let up = b.rate(-w);
                let down = b.rate(w);
                let lhs = down * (-w / t).exp();
                prop_assert!((lhs - up).abs() <= 1e-12 * up.abs().max(lhs.abs()).max(f64::MIN_POSITIVE));
            }
        }
    }
}
