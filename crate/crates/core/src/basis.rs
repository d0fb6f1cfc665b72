//! Limiting pictures of the V model: the local (site) basis, the single-bath
//! equilibrium limit and the effective single bath at `alpha = 1`.

use nalgebra::{DMatrix, Matrix3, Matrix4, Vector4};

use crate::bath::{ohmic_rate, spectral_density};
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::vmodel::{build_vmodel, QuasiDegenerateState, VModelParams};
use crate::C64;

/// The fixed real orthogonal map from the energy basis to the site basis.
/// Symmetric, self-inverse, with determinant -1.
pub fn local_unitary() -> Matrix3<f64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Matrix3::new(1.0, 0.0, 0.0, 0.0, -h, h, 0.0, h, h)
}

/// Rows are `|1>, |a>, |b>` written in the energy basis: `|a>` is the site the
/// hot bath couples to, `|b>` the one it does not.
pub fn local_basis() -> Matrix3<f64> {
    let u = local_unitary();
    Matrix3::from_rows(&[u.row(0), u.row(2), u.row(1)])
}

/// Site-basis Hamiltonian and couplings. The couplings are normalised so that
/// the hot bath reads `|1><a| + h.c.`; the physical operators are
/// `coupling_scale` times these.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalPicture {
    pub h_local: Matrix3<f64>,
    pub s_h_local: Matrix3<f64>,
    pub s_c_local: Matrix3<f64>,
    pub coupling_scale: f64,
}

fn to_fixed(m: &DMatrix<f64>) -> Matrix3<f64> {
    Matrix3::from_fn(|a, b| m[(a, b)])
}

pub fn to_local(p: &VModelParams) -> Result<LocalPicture> {
    let (system, baths) = build_vmodel(p)?;
    let w = local_basis();
    let h = Matrix3::from_diagonal(&nalgebra::Vector3::from_column_slice(system.energies()));
    let scale = std::f64::consts::SQRT_2;
    let rotate = |s: &DMatrix<f64>| w * to_fixed(s) * w.transpose() / scale;
    Ok(LocalPicture {
        h_local: w * h * w.transpose(),
        s_h_local: rotate(baths[0].coupling_op()),
        s_c_local: rotate(baths[1].coupling_op()),
        coupling_scale: scale,
    })
}

fn complex(m: &Matrix3<f64>) -> DMatrix<C64> {
    DMatrix::from_fn(3, 3, |a, b| C64::new(m[(a, b)], 0.0))
}

/// Rotates an energy-basis state into the site basis.
pub fn state_to_local(state: &DensityMatrix) -> Result<DMatrix<C64>> {
    if state.dim() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, got: state.dim() });
    }
    let w = complex(&local_basis());
    Ok(&w * state.matrix() * w.transpose())
}

/// Heat current from bath `bath_index` (0 hot, 1 cold) evaluated entirely in
/// the site basis, with the dissipator in operator form
/// `D(s) = -[S, L s] + [S, s L^T]`, `L_cd = S_cd k(E_c - E_d) / 2` rotated alongside.
pub fn local_heat_current(p: &VModelParams, bath_index: usize, state: &DensityMatrix) -> Result<f64> {
    let (system, baths) = build_vmodel(p)?;
    let bath = baths.get(bath_index).ok_or_else(|| Error::InvalidParams(format!("bath index {bath_index}")))?;
    let pic = to_local(p)?;
    let s_norm = if bath_index == 0 { &pic.s_h_local } else { &pic.s_c_local };
    let s_loc = complex(&(s_norm * pic.coupling_scale));

    let s = bath.coupling_op();
    let lam = Matrix3::from_fn(|c, d| s[(c, d)] * 0.5 * bath.rate(system.bohr(d, c)));
    let w = local_basis();
    let lam_loc = complex(&(w * lam * w.transpose()));

    let rho = state_to_local(state)?;
    let lr = &lam_loc * &rho;
    let rl = &rho * lam_loc.transpose();
    let diss = -(&s_loc * &lr - &lr * &s_loc) + (&s_loc * &rl - &rl * &s_loc);
    Ok((complex(&pic.h_local) * diss).trace().re)
}

/// `P = (s22 + s33) / 2` and the excited coherence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedState {
    pub p: f64,
    pub r: f64,
    pub i: f64,
}

impl From<&QuasiDegenerateState> for ReducedState {
    fn from(q: &QuasiDegenerateState) -> Self {
        Self { p: 0.5 * (q.s22 + q.s33), r: q.s32_re, i: q.s32_im }
    }
}

/// Symmetric single-bath dynamics in terms of a decay rate `k` and
/// `phi = (1 + 2 e^{-beta nu}) k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedModel {
    pub k: f64,
    pub phi: f64,
    pub delta: f64,
}

impl ReducedModel {
    pub fn rhs(&self, s: &ReducedState) -> ReducedState {
        let drive = 0.5 * (self.phi - self.k);
        ReducedState {
            p: -self.k * s.r - self.phi * s.p + drive,
            r: -self.k * s.r - self.phi * s.p + self.delta * s.i + drive,
            i: -self.k * s.i - self.delta * s.r,
        }
    }

    pub fn steady_p(&self) -> f64 {
        (self.phi - self.k) / (2.0 * self.phi)
    }

    pub fn steady_state(&self) -> ReducedState {
        ReducedState { p: self.steady_p(), r: 0.0, i: 0.0 }
    }
}

/// Single hot bath split into pumping `r = 2 J n` and spontaneous decay `2 J`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleBathMapping {
    pub r: f64,
    pub gamma_sp: f64,
    pub model: ReducedModel,
}

impl SingleBathMapping {
    /// `v' = M v + d` for `v = (s22, s33, s32_re, s32_im)`.
    pub fn matrix_form(&self) -> (Matrix4<f64>, Vector4<f64>) {
        let (r, g, dl) = (self.r, self.gamma_sp, self.model.delta);
        let m = Matrix4::new(
            -(2.0 * r + g),
            -r,
            -(r + g),
            0.0,
            -r,
            -(2.0 * r + g),
            -(r + g),
            0.0,
            -0.5 * (3.0 * r + g),
            -0.5 * (3.0 * r + g),
            -(r + g),
            dl,
            0.0,
            0.0,
            -dl,
            -(r + g),
        );
        (m, Vector4::new(r, r, r, 0.0))
    }

    pub fn solve_matrix_form(&self) -> Result<Vector4<f64>> {
        let (m, d) = self.matrix_form();
        m.lu().solve(&(-d)).ok_or_else(|| Error::Singular("single-bath matrix".into()))
    }
}

/// Requires the cold bath to be switched off.
pub fn single_bath_mapping(p: &VModelParams) -> Result<SingleBathMapping> {
    p.validate()?;
    if p.gamma_cold != 0.0 {
        return Err(Error::InvalidParams(format!("single-bath mapping needs gamma_cold = 0, got {}", p.gamma_cold)));
    }
    if !(p.gamma_hot > 0.0) {
        return Err(Error::InvalidParams("single-bath mapping needs gamma_hot > 0".into()));
    }
    let k = ohmic_rate(p.nu, p.t_hot, p.gamma_hot);
    let e = p.boltzmann_hot();
    let gamma_sp = 2.0 * spectral_density(p.nu, p.gamma_hot)?;
    Ok(SingleBathMapping {
        r: k * e,
        gamma_sp,
        model: ReducedModel { k, phi: (1.0 + 2.0 * e) * k, delta: p.delta },
    })
}

/// At `alpha = 1` both baths act as one with `k = k_h + k_c` and
/// `phi = (1 + 2 e_h) k_h + (1 + 2 e_c) k_c`.
pub fn alpha_one_mapping(p: &VModelParams) -> Result<ReducedModel> {
    p.validate()?;
    if p.alpha != 1.0 {
        return Err(Error::InvalidParams(format!("alpha-one mapping needs alpha = 1, got {}", p.alpha)));
    }
    let r = p.rates_at_nu();
    let k = r.kh + r.kc;
    if !(k > 0.0) {
        return Err(Error::InvalidParams("alpha-one mapping needs a coupled bath".into()));
    }
    Ok(ReducedModel { k, phi: (1.0 + 2.0 * r.eh) * r.kh + (1.0 + 2.0 * r.ec) * r.kc, delta: p.delta })
}
