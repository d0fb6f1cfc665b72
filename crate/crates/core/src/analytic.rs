//! Closed-form steady-state results of the quasi-degenerate V model. Every
//! expression evaluates both baths' rates at the gap `nu` and is accurate to
//! leading order in `delta`.

use crate::error::{Error, Result};
use crate::vmodel::{xi_of, NuRates, VModelParams};

/// Closed forms are flagged unreliable for `|alpha - 1| < SPIKE_WIDTH * delta / nu`.
pub const SPIKE_WIDTH: f64 = 10.0;

fn rates(p: &VModelParams) -> Result<NuRates> {
    p.validate()?;
    Ok(p.rates_at_nu())
}

fn nonzero(x: f64, what: &str, p: &VModelParams) -> Result<f64> {
    if x == 0.0 || !x.is_finite() {
        return Err(Error::Singular(format!("{what} vanishes at {p:?}")));
    }
    Ok(x)
}

/// `xi = (alpha^2 + 1) k_c / 2 + k_h`; zero when both baths are decoupled.
pub fn xi(p: &VModelParams) -> f64 {
    xi_of(p, &p.rates_at_nu())
}

/// `Psi`, the coefficient of `delta^2` in the coherence denominator.
pub fn psi(p: &VModelParams) -> Result<f64> {
    let r = rates(p)?;
    let (kh, kc, eh, ec) = (r.kh, r.kc, r.eh, r.ec);
    let a2 = p.alpha * p.alpha;
    let inner = kc * kh + 2.0 * eh * kh * kh + kh * kh + a2 * kc * kc + 2.0 * a2 * ec * kc * kc + ec * kc * kh
        + eh * kc * kh
        + a2 * kc * kh
        + a2 * ec * kc * kh
        + a2 * eh * kc * kh;
    Ok(2.0 * xi_of(p, &r) * inner / nonzero(kh * kc, "k_h k_c", p)?)
}

/// Real part of the steady excited-state coherence `sigma_32`.
pub fn coherence_re_ss(p: &VModelParams) -> Result<f64> {
    let r = rates(p)?;
    let (kh, kc, eh, ec) = (r.kh, r.kc, r.eh, r.ec);
    let a = p.alpha;
    let am1 = (a - 1.0).powi(2);
    let num = (eh - ec) * (kh - a * kc) * am1;
    let lead = am1 * ((a * a + 1.0) * kc + 2.0 * kh) * (ec + eh + 1.0);
    let tail = if p.delta == 0.0 { 0.0 } else { psi(p)? * p.delta * p.delta };
    if num == 0.0 {
        return Ok(0.0);
    }
    Ok(num / nonzero(lead + tail, "coherence denominator", p)?)
}

/// Imaginary part, locked to the real part by `-delta Re = xi Im`.
pub fn coherence_im_ss(p: &VModelParams) -> Result<f64> {
    let re = coherence_re_ss(p)?;
    if p.delta == 0.0 || re == 0.0 {
        return Ok(0.0);
    }
    Ok(-p.delta * re / nonzero(xi(p), "xi", p)?)
}

/// Leading-order populations `(s22, s33, s11)`.
pub fn populations_ss(p: &VModelParams) -> Result<(f64, f64, f64)> {
    let r = rates(p)?;
    let (kh, kc, eh, ec) = (r.kh, r.kc, r.eh, r.ec);
    let a2 = p.alpha * p.alpha;
    let den = nonzero(((a2 + 1.0) * kc + 2.0 * kh) * (ec + eh + 1.0), "population denominator", p)?;
    let s22 = (kc * (a2 * eh + ec) + kh * (ec + eh)) / den;
    let s33 = (kc * (eh + a2 * ec) + kh * (ec + eh)) / den;
    Ok((s22, s33, 1.0 - s22 - s33))
}

/// Total excited population, independent of `alpha` and of the couplings.
pub fn excited_sum_ss(p: &VModelParams) -> f64 {
    let (eh, ec) = (p.boltzmann_hot(), p.boltzmann_cold());
    (eh + ec) / (eh + ec + 1.0)
}

/// Leading-order nonsecular steady heat current from the hot bath.
pub fn current_ss(p: &VModelParams) -> Result<f64> {
    let r = rates(p)?;
    let (kh, kc, eh, ec) = (r.kh, r.kc, r.eh, r.ec);
    let a = p.alpha;
    if kh == 0.0 || kc == 0.0 {
        return Ok(0.0);
    }
    let den = ((a * a + 1.0) * kc + 2.0 * kh) * (ec + eh + 1.0);
    Ok(p.nu * (1.0 + a).powi(2) * kh * kc * (eh - ec) / den)
}

/// Leading-order secular steady heat current from the hot bath.
pub fn secular_current_ss(p: &VModelParams) -> Result<f64> {
    let r = rates(p)?;
    let (kh, kc, eh, ec) = (r.kh, r.kc, r.eh, r.ec);
    let a2 = p.alpha * p.alpha;
    if kh == 0.0 || kc == 0.0 {
        return Ok(0.0);
    }
    let num = p.nu * kh * kc * (eh - ec) * (kh * (a2 + 1.0) + 2.0 * a2 * kc);
    let den = (kh + kc) * (kh + a2 * kc)
        + eh * (2.0 * kh * kh + kc * kh + a2 * kc * kh)
        + ec * (2.0 * a2 * kc * kc + kc * kh + a2 * kc * kh);
    Ok(num / nonzero(den, "secular current denominator", p)?)
}

/// The secular current specialised to `alpha^2 = 1`; ignores `p.alpha`.
pub fn secular_current_unit_alpha(p: &VModelParams) -> Result<f64> {
    let r = rates(p)?;
    let (kh, kc, eh, ec) = (r.kh, r.kc, r.eh, r.ec);
    if kh == 0.0 || kc == 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * p.nu * kh * kc * (eh - ec) / (kh * (1.0 + 2.0 * eh) + kc * (1.0 + 2.0 * ec)))
}

/// Secular steady populations `(s22, s33)`.
pub fn secular_populations_ss(p: &VModelParams) -> Result<(f64, f64)> {
    let r = rates(p)?;
    let (kh, kc, eh, ec) = (r.kh, r.kc, r.eh, r.ec);
    let a2 = p.alpha * p.alpha;
    let det = (kh * (1.0 + eh) + kc * (1.0 + ec)) * (kh * (1.0 + eh) + a2 * kc * (1.0 + ec))
        - (kh * eh + kc * ec) * (kh * eh + a2 * kc * ec);
    let det = nonzero(det, "secular determinant", p)?;
    Ok(((kc * a2 + kh) * (ec * kc + eh * kh) / det, (kc + kh) * (ec * kc * a2 + eh * kh) / det))
}

/// `alpha = k_h / k_c`, where one pathway is equilibrium-like and the coherence vanishes.
pub fn special_point_alpha(p: &VModelParams) -> Result<f64> {
    let r = rates(p)?;
    Ok(r.kh / nonzero(r.kc, "k_c", p)?)
}

/// False inside the narrow window around `alpha = 1` where the closed forms break down.
pub fn closed_form_reliable(p: &VModelParams) -> bool {
    (p.alpha - 1.0).abs() >= SPIKE_WIDTH * p.delta / p.nu
}
