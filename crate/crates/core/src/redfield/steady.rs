use nalgebra::{DMatrix, DVector};

use super::RedfieldGenerator;
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::C64;

/// Singular-value ratio below which the steady-state system counts as rank deficient.
pub const RANK_TOL: f64 = 1e-13;

const STEADY_HERMITIAN_TOL: f64 = 1e-12;
const STEADY_TRACE_TOL: f64 = 1e-12;

// Real coordinates of a Hermitian matrix: the d populations, then Re and Im
// of each upper-triangle element in row order.
fn to_coords(m: &DMatrix<C64>) -> DVector<f64> {
    let d = m.nrows();
    let mut v = DVector::zeros(d * d);
    for a in 0..d {
        v[a] = m[(a, a)].re;
    }
    let mut k = d;
    for a in 0..d {
        for b in (a + 1)..d {
            v[k] = m[(a, b)].re;
            v[k + 1] = m[(a, b)].im;
            k += 2;
        }
    }
    v
}

fn from_coords(d: usize, v: &DVector<f64>) -> DMatrix<C64> {
    let mut m = DMatrix::zeros(d, d);
    for a in 0..d {
        m[(a, a)] = C64::new(v[a], 0.0);
    }
    let mut k = d;
    for a in 0..d {
        for b in (a + 1)..d {
            let z = C64::new(v[k], v[k + 1]);
            m[(a, b)] = z;
            m[(b, a)] = z.conj();
            k += 2;
        }
    }
    m
}

/// Unique trace-one fixed point of the generator.
///
/// The generator is written as a real map on Hermitian coordinates and the
/// equation for the first population is replaced by `Tr sigma = 1`.
pub fn steady_state(gen: &RedfieldGenerator) -> Result<DensityMatrix> {
    let d = gen.dim();
    let n = d * d;
    let mut a = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut e = DVector::zeros(n);
        e[j] = 1.0;
        let col = to_coords(&gen.total().apply(&from_coords(d, &e)));
        a.set_column(j, &col);
    }
    for j in 0..n {
        a[(0, j)] = if j < d { 1.0 } else { 0.0 };
    }
    let mut rhs = DVector::zeros(n);
    rhs[0] = 1.0;

    let sv = a.singular_values();
    let smax = sv.max();
    let smin = sv.min();
    let ratio = if smax > 0.0 { smin / smax } else { 0.0 };
    if ratio < RANK_TOL {
        return Err(Error::RankDeficient { ratio });
    }
    let x = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Singular("steady-state system".into()))?;
    log::debug!("steady state solved, singular value ratio {ratio:e}");
    DensityMatrix::with_tolerances(from_coords(d, &x), STEADY_HERMITIAN_TOL, STEADY_TRACE_TOL)
}
