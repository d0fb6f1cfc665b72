//! The three-level V model: one ground state and two quasi-degenerate excited
//! states, each excited level coupled to the ground state by a hot and a cold bath.

use nalgebra::{DMatrix, Matrix3, Vector3};

use crate::bath::{ohmic_rate, BathLabel, OhmicBath};
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::redfield::{Mode, RedfieldGenerator};
use crate::system::EnergyBasisSystem;
use crate::C64;

/// Splitting-to-gap ratio above which the quasi-degenerate equations are flagged.
pub const QUASI_DEGENERATE_WARN: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VModelParams {
    pub nu: f64,
    pub delta: f64,
    pub alpha: f64,
    pub t_hot: f64,
    pub t_cold: f64,
    pub gamma_hot: f64,
    pub gamma_cold: f64,
}

impl Default for VModelParams {
    fn default() -> Self {
        Self { nu: 1.0, delta: 1e-4, alpha: 1.0, t_hot: 4.0, t_cold: 2.0, gamma_hot: 0.0071, gamma_cold: 0.0071 }
    }
}

impl VModelParams {
    /// Equal coupling `gamma` to both baths.
    pub fn new(nu: f64, delta: f64, alpha: f64, t_hot: f64, t_cold: f64, gamma: f64) -> Result<Self> {
        let p = Self { nu, delta, alpha, t_hot, t_cold, gamma_hot: gamma, gamma_cold: gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.nu, self.delta, self.alpha, self.t_hot, self.t_cold, self.gamma_hot, self.gamma_cold]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParams(format!("non-finite parameter in {self:?}")));
        }
        if !(self.nu > 0.0) {
            return Err(Error::InvalidParams(format!("nu must be > 0, got {}", self.nu)));
        }
        if !(self.delta >= 0.0 && self.delta < self.nu) {
            return Err(Error::InvalidParams(format!("need 0 <= delta < nu, got delta = {}", self.delta)));
        }
        if !(self.t_hot > 0.0 && self.t_cold > 0.0) {
            return Err(Error::InvalidParams(format!(
                "temperatures must be > 0, got T_h = {}, T_c = {}",
                self.t_hot, self.t_cold
            )));
        }
        if !(self.gamma_hot >= 0.0 && self.gamma_cold >= 0.0) {
            return Err(Error::InvalidParams("couplings must be >= 0".into()));
        }
        Ok(())
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        Self { alpha, ..self }
    }

    pub fn with_delta(self, delta: f64) -> Self {
        Self { delta, ..self }
    }

    pub fn with_temperatures(self, t_hot: f64, t_cold: f64) -> Self {
        Self { t_hot, t_cold, ..self }
    }

    pub fn with_gamma(self, gamma: f64) -> Self {
        Self { gamma_hot: gamma, gamma_cold: gamma, ..self }
    }

    pub fn with_gammas(self, gamma_hot: f64, gamma_cold: f64) -> Self {
        Self { gamma_hot, gamma_cold, ..self }
    }

    /// Boltzmann factor `exp(-nu / T_h)`.
    pub fn boltzmann_hot(&self) -> f64 {
        (-self.nu / self.t_hot).exp()
    }

    pub fn boltzmann_cold(&self) -> f64 {
        (-self.nu / self.t_cold).exp()
    }

    /// Decay rates of both baths evaluated at the gap `nu`.
    pub fn rates_at_nu(&self) -> NuRates {
        NuRates {
            kh: ohmic_rate(self.nu, self.t_hot, self.gamma_hot),
            kc: ohmic_rate(self.nu, self.t_cold, self.gamma_cold),
            eh: self.boltzmann_hot(),
            ec: self.boltzmann_cold(),
        }
    }

    pub fn energies(&self) -> [f64; 3] {
        [0.0, self.nu - self.delta, self.nu]
    }
}

/// Decay rates `k_h, k_c` at `nu` and the Boltzmann factors `e_h, e_c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NuRates {
    pub kh: f64,
    pub kc: f64,
    pub eh: f64,
    pub ec: f64,
}

pub fn hot_coupling() -> DMatrix<f64> {
    DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 1.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0])
}

pub fn cold_coupling(alpha: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(3, 3, &[0.0, 1.0, alpha, 1.0, 0.0, 0.0, alpha, 0.0, 0.0])
}

/// Energy-basis system and the (hot, cold) baths.
pub fn build_vmodel(p: &VModelParams) -> Result<(EnergyBasisSystem, Vec<OhmicBath>)> {
    p.validate()?;
    let system = EnergyBasisSystem::new(p.energies().to_vec())?;
    let hot = OhmicBath::new(BathLabel::Hot, p.t_hot, p.gamma_hot, hot_coupling())?;
    let cold = OhmicBath::new(BathLabel::Cold, p.t_cold, p.gamma_cold, cold_coupling(p.alpha))?;
    Ok((system, vec![hot, cold]))
}

/// Generic Redfield generator of the V model; bath 0 is hot, bath 1 is cold.
pub fn vmodel_generator(p: &VModelParams, mode: Mode) -> Result<RedfieldGenerator> {
    let (system, baths) = build_vmodel(p)?;
    RedfieldGenerator::build(&system, &baths, mode)
}

struct ArmRates {
    s2: f64,
    s3: f64,
    down21: f64,
    down31: f64,
    up21: f64,
    up31: f64,
}

/// Hand-written nonsecular V-model equations of motion with rates at the
/// two distinct transition frequencies.
pub fn full_rhs(p: &VModelParams, state: &DensityMatrix) -> Result<DMatrix<C64>> {
    p.validate()?;
    if state.dim() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, got: state.dim() });
    }
    let w21 = p.nu - p.delta;
    let w31 = p.nu;
    let arm = |t: f64, g: f64, s3: f64| ArmRates {
        s2: 1.0,
        s3,
        down21: ohmic_rate(w21, t, g),
        down31: ohmic_rate(w31, t, g),
        up21: ohmic_rate(-w21, t, g),
        up31: ohmic_rate(-w31, t, g),
    };
    let arms = [arm(p.t_hot, p.gamma_hot, 1.0), arm(p.t_cold, p.gamma_cold, p.alpha)];

    let s = state.matrix();
    let (s11, s22, s33) = (s[(0, 0)], s[(1, 1)], s[(2, 2)]);
    let (s32, s12, s13, s21, s31) = (s[(2, 1)], s[(0, 1)], s[(0, 2)], s[(1, 0)], s[(2, 0)]);
    let r32 = s32.re;
    let i = C64::new(0.0, 1.0);

    let mut d32 = -i * p.delta * s32;
    let mut d22 = C64::new(0.0, 0.0);
    let mut d33 = C64::new(0.0, 0.0);
    let mut d12 = -i * (-w21) * s12;
    let mut d13 = -i * (-w31) * s13;
    for a in &arms {
        let (s2, s3) = (a.s2, a.s3);
        d32 += -0.5 * (s3 * s3 * a.down31 + s2 * s2 * a.down21) * s32 - 0.5 * s2 * s3 * a.down21 * s22
            - 0.5 * s2 * s3 * a.down31 * s33
            + 0.5 * s2 * s3 * (a.up31 + a.up21) * s11;
        d22 += -s2 * s2 * a.down21 * s22 + s2 * s2 * a.up21 * s11 - s2 * s3 * a.down31 * r32;
        d33 += -s3 * s3 * a.down31 * s33 + s3 * s3 * a.up31 * s11 - s2 * s3 * a.down21 * r32;

        // ground-excited coherences, half rates
        let (gd21, gd31, gu21, gu31) = (0.5 * a.down21, 0.5 * a.down31, 0.5 * a.up21, 0.5 * a.up31);
        d12 += -(s2 * s2 * gu21 + s3 * s3 * gu31 + s2 * s2 * gd21) * s12 - s2 * s3 * gd31 * s13
            + s2 * s2 * (gd21 + gu21) * s21
            + s2 * s3 * (gd31 + gu21) * s31;
        d13 += -(s2 * s2 * gu21 + s3 * s3 * gu31 + s3 * s3 * gd31) * s13 - s2 * s3 * gd21 * s12
            + s2 * s3 * (gd21 + gu31) * s21
            + s3 * s3 * (gd31 + gu31) * s31;
    }

    let mut out = DMatrix::zeros(3, 3);
    out[(1, 1)] = d22;
    out[(2, 2)] = d33;
    out[(0, 0)] = -(d22 + d33);
    out[(2, 1)] = d32;
    out[(1, 2)] = d32.conj();
    out[(0, 1)] = d12;
    out[(1, 0)] = d12.conj();
    out[(0, 2)] = d13;
    out[(2, 0)] = d13.conj();
    Ok(out)
}

/// Excited-block variables of the quasi-degenerate model; `s11 = 1 - s22 - s33`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiDegenerateState {
    pub s22: f64,
    pub s33: f64,
    pub s32_re: f64,
    pub s32_im: f64,
}

impl QuasiDegenerateState {
    pub fn ground() -> Self {
        Self { s22: 0.0, s33: 0.0, s32_re: 0.0, s32_im: 0.0 }
    }

    pub fn s11(&self) -> f64 {
        1.0 - self.s22 - self.s33
    }

    pub fn excited_sum(&self) -> f64 {
        self.s22 + self.s33
    }

    /// Populations in `[0, 1]` and `|s32|^2 <= s22 s33`, both within `tol`.
    pub fn is_physical(&self, tol: f64) -> bool {
        let in_unit = |x: f64| (-tol..=1.0 + tol).contains(&x);
        in_unit(self.s11())
            && in_unit(self.s22)
            && in_unit(self.s33)
            && self.s32_re.powi(2) + self.s32_im.powi(2) <= self.s22 * self.s33 + tol
    }

    pub fn from_density(state: &DensityMatrix) -> Self {
        let c = state.get(2, 1);
        Self { s22: state.population(1), s33: state.population(2), s32_re: c.re, s32_im: c.im }
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        let z = C64::new(0.0, 0.0);
        let c = C64::new(self.s32_re, self.s32_im);
        let m = DMatrix::from_row_slice(
            3,
            3,
            &[C64::new(self.s11(), 0.0), z, z, z, C64::new(self.s22, 0.0), c.conj(), z, c, C64::new(self.s33, 0.0)],
        );
        DensityMatrix::new(m)
    }

    fn as_array(&self) -> [f64; 4] {
        [self.s22, self.s33, self.s32_re, self.s32_im]
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.as_array().iter().zip(other.as_array()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// `xi = (alpha^2 + 1) k_c / 2 + k_h`, the damping of the excited coherence.
pub(crate) fn xi_of(p: &VModelParams, r: &NuRates) -> f64 {
    (p.alpha * p.alpha + 1.0) * r.kc / 2.0 + r.kh
}

fn warn_if_not_quasi_degenerate(p: &VModelParams) {
    if p.delta / p.nu > QUASI_DEGENERATE_WARN {
        log::warn!("delta/nu = {} exceeds {QUASI_DEGENERATE_WARN}; quasi-degenerate rates are inaccurate", p.delta / p.nu);
    }
}

/// Time derivative of the quasi-degenerate model, all rates at `nu`.
pub fn quasi_degenerate_rhs(p: &VModelParams, q: &QuasiDegenerateState) -> QuasiDegenerateState {
    warn_if_not_quasi_degenerate(p);
    let r = p.rates_at_nu();
    let a = p.alpha;
    let xi = xi_of(p, &r);
    let s11 = q.s11();
    let mix = r.kh + a * r.kc;
    QuasiDegenerateState {
        s22: -(r.kh + r.kc) * q.s22 + (r.kh * r.eh + r.kc * r.ec) * s11 - mix * q.s32_re,
        s33: -(r.kh + a * a * r.kc) * q.s33 + (r.kh * r.eh + a * a * r.kc * r.ec) * s11 - mix * q.s32_re,
        s32_re: p.delta * q.s32_im - xi * q.s32_re - 0.5 * mix * (q.s22 + q.s33)
            + (r.kh * r.eh + a * r.kc * r.ec) * s11,
        s32_im: -p.delta * q.s32_re - xi * q.s32_im,
    }
}

/// Heat currents `(j_h, j_c)` into the system in the quasi-degenerate model.
pub fn quasi_degenerate_currents(p: &VModelParams, q: &QuasiDegenerateState) -> (f64, f64) {
    let r = p.rates_at_nu();
    let a = p.alpha;
    let s11 = q.s11();
    let rr = q.s32_re;
    let h22 = -r.kh * q.s22 + r.kh * r.eh * s11 - r.kh * rr;
    let h33 = -r.kh * q.s33 + r.kh * r.eh * s11 - r.kh * rr;
    let c22 = -r.kc * q.s22 + r.kc * r.ec * s11 - a * r.kc * rr;
    let c33 = -a * a * r.kc * q.s33 + a * a * r.kc * r.ec * s11 - a * r.kc * rr;
    let e2 = p.nu - p.delta;
    (p.nu * h33 + e2 * h22, p.nu * c33 + e2 * c22)
}

/// The steady quasi-degenerate model as `0 = M v + d`, `v = (s22, s33, s32_re)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyLinearSystem {
    pub m: Matrix3<f64>,
    pub d: Vector3<f64>,
}

impl SteadyLinearSystem {
    pub fn solve(&self) -> Result<Vector3<f64>> {
        let scale = self.m.abs().max();
        let det = self.m.determinant();
        if !(scale > 0.0) || det.abs() <= 1e-14 * scale.powi(3) {
            return Err(Error::Singular(format!("steady matrix has determinant {det:e}")));
        }
        self.m
            .lu()
            .solve(&(-self.d))
            .ok_or_else(|| Error::Singular("steady matrix is singular".into()))
    }
}

/// Builds `M` and `d`. The third row follows from the real part of the
/// coherence equation after eliminating `s32_im` and `s11`.
pub fn steady_linear_system(p: &VModelParams) -> Result<SteadyLinearSystem> {
    p.validate()?;
    if !(p.delta > 0.0) {
        return Err(Error::InvalidParams("steady linear system needs delta > 0".into()));
    }
    let r = p.rates_at_nu();
    let a = p.alpha;
    let xi = xi_of(p, &r);
    if !(xi > 0.0) {
        return Err(Error::Singular(format!("xi = {xi} vanishes, no bath is coupled ({p:?})")));
    }
    let (kh, kc, eh, ec) = (r.kh, r.kc, r.eh, r.ec);
    let mix = kh + a * kc;
    let row3 = kh * (1.0 + 2.0 * eh) / 2.0 + a * kc * (1.0 + 2.0 * ec) / 2.0;
    let m = -Matrix3::new(
        (1.0 + eh) * kh + (1.0 + ec) * kc,
        eh * kh + ec * kc,
        mix,
        eh * kh + a * a * ec * kc,
        (1.0 + eh) * kh + a * a * (1.0 + ec) * kc,
        mix,
        row3,
        row3,
        xi + p.delta * p.delta / xi,
    );
    let d = Vector3::new(eh * kh + ec * kc, eh * kh + a * a * ec * kc, eh * kh + a * ec * kc);
    Ok(SteadyLinearSystem { m, d })
}

/// Steady state of the quasi-degenerate model, `s32_im = -delta s32_re / xi`.
pub fn solve_quasi_degenerate_ss(p: &VModelParams) -> Result<QuasiDegenerateState> {
    warn_if_not_quasi_degenerate(p);
    let sys = steady_linear_system(p)?;
    let v = sys.solve().map_err(|e| match e {
        Error::Singular(msg) => Error::Singular(format!("{msg} at {p:?}")),
        other => other,
    })?;
    let xi = xi_of(p, &p.rates_at_nu());
    Ok(QuasiDegenerateState { s22: v[0], s33: v[1], s32_re: v[2], s32_im: -p.delta * v[2] / xi })
}
