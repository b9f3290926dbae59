//! Per-term weights for power-law MGF terms.
//!
//! If the MGF of H contains a term `s^{-2t}`, the matching term of every
//! derived quantity is obtained by the maps below (γ = ρH² is the SNR).
//! Series expansions and asymptotic forms share them.

use crate::specfun::{ln_gamma, ln_pochhammer};

const LN_SQRT_PI: f64 = 0.572_364_942_924_700_1;

fn lg(x: f64) -> f64 {
    ln_gamma(x).expect("positive argument")
}

fn lpoch(x: f64, n: f64) -> f64 {
    ln_pochhammer(x, n).expect("positive arguments").0
}

/// MGF of H: s^{-2t}.
pub fn mgf_h(s: f64, t: f64) -> f64 {
    (-2.0 * t * s.ln()).exp()
}

/// PDF of H: h^{2t-1} / Γ(2t).
pub fn pdf_h(h: f64, t: f64) -> f64 {
    ((2.0 * t - 1.0) * h.ln() - lg(2.0 * t)).exp()
}

/// CDF of H: h^{2t} / Γ(2t+1).
pub fn cdf_h(h: f64, t: f64) -> f64 {
    (2.0 * t * h.ln() - lg(2.0 * t + 1.0)).exp()
}

/// MGF of γ: (ρs)^{-t} / (2 (t)_t).
pub fn snr_mgf(rho: f64, s: f64, t: f64) -> f64 {
    0.5 * (-t * (rho * s).ln() - lpoch(t, t)).exp()
}

/// Outage P(γ ≤ γ_th): (γ_th/ρ)^t / (2 (t)_t Γ(t+1)).
pub fn outage(gamma_th: f64, rho: f64, t: f64) -> f64 {
    0.5 * (t * (gamma_th / rho).ln() - lpoch(t, t) - lg(t + 1.0)).exp()
}

/// Symbol error rate for Pe(γ) = α Q(√(2gγ)): α (t+1)_{-1/2} (ρg)^{-t} / (4√π (t)_t).
pub fn aser(alpha: f64, g: f64, rho: f64, t: f64) -> f64 {
    0.25 * alpha * (lpoch(t + 1.0, -0.5) - LN_SQRT_PI - lpoch(t, t) - t * (rho * g).ln()).exp()
}
