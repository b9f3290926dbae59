//! High-SNR (large-s) forms: M_H(s) ≈ g s^{-2t'} with t' = Σ_n m_{1,n}.

use crate::error::{Error, Result};
use crate::nakagami::NakagamiParams;
use crate::specfun::pochhammer;

use super::weights;

/// Leading power-law term `gain · s^{-2 exponent}` of an MGF as s → ∞.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticForm {
    pub gain: f64,
    pub exponent: f64,
}

impl AsymptoticForm {
    /// Builds the form for a set of branches (each sorted ascending by m).
    ///
    /// Per branch the gain is `2 (m_1)_{m_1} Π_{l≥2} (m_l)_{-m_1} Π_l Ω_l^{m_1}`;
    /// branch gains multiply and exponents add. The shapes after the first
    /// must exceed m_1 strictly, otherwise E[X_l^{-2m_1}] diverges.
    pub fn from_columns(columns: &[Vec<NakagamiParams>]) -> Result<Self> {
        let mut ln_gain = 0.0;
        let mut exponent = 0.0;
        for col in columns {
            let m1 = col[0].m();
            let mut g = 2.0 * pochhammer(m1, m1)?;
            let mut ln_omega = col[0].omega().ln();
            for x in &col[1..] {
                if x.m() <= m1 {
                    return Err(Error::DegenerateOrder(format!(
                        "shape {} does not exceed the branch minimum {m1}",
                        x.m()
                    )));
                }
                g *= pochhammer(x.m(), -m1)?;
                ln_omega += x.omega().ln();
            }
            ln_gain += g.ln() + m1 * ln_omega;
            exponent += m1;
        }
        Ok(Self { gain: ln_gain.exp(), exponent })
    }

    pub fn mgf(&self, s: f64) -> f64 {
        self.gain * weights::mgf_h(s, self.exponent)
    }

    pub fn pdf(&self, h: f64) -> f64 {
        if !(h > 0.0) {
            return 0.0;
        }
        self.gain * weights::pdf_h(h, self.exponent)
    }

    pub fn cdf(&self, h: f64) -> f64 {
        if !(h > 0.0) {
            return 0.0;
        }
        self.gain * weights::cdf_h(h, self.exponent)
    }

    /// MGF of γ = ρH² at s.
    pub fn snr_mgf(&self, rho: f64, s: f64) -> f64 {
        self.gain * weights::snr_mgf(rho, s, self.exponent)
    }

    /// P(ρH² ≤ γ_th).
    pub fn outage(&self, gamma_th: f64, rho: f64) -> f64 {
        if !(gamma_th > 0.0) {
            return 0.0;
        }
        self.gain * weights::outage(gamma_th, rho, self.exponent)
    }

    /// E[α Q(√(2gρH²))].
    pub fn aser(&self, alpha: f64, g: f64, rho: f64) -> f64 {
        self.gain * weights::aser(alpha, g, rho, self.exponent)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(m: f64, w: f64) -> NakagamiParams {
        NakagamiParams::new(m, w).unwrap()
    }

    #[test]
    fn single_amplitude_reduces_to_the_nakagami_bound() {
        let x = p(1.7, 0.6);
        let a = AsymptoticForm::from_columns(&[vec![x]]).unwrap();
        for &s in &[0.3, 2.0, 40.0] {
            assert_relative_eq!(a.mgf(s), x.mgf_upper(s).unwrap(), max_relative = 1e-13);
        }
        let two = AsymptoticForm::from_columns(&[vec![x], vec![p(0.9, 2.0)]]).unwrap();
        assert_relative_eq!(two.mgf(3.0), x.mgf_upper(3.0).unwrap() * p(0.9, 2.0).mgf_upper(3.0).unwrap(), max_relative = 1e-13);
    }

    #[test]
    fn two_hop_example() {
        let a = AsymptoticForm::from_columns(&[vec![p(1.0, 1.0), p(2.0, 1.0)]]).unwrap();
        assert_relative_eq!(a.gain, 2.0, max_relative = 1e-14);
        assert_eq!(a.exponent, 1.0);
        assert_relative_eq!(a.mgf(3.0), 2.0 / 9.0, max_relative = 1e-14);
        assert_relative_eq!(a.pdf(0.1), 0.2, max_relative = 1e-14);
        // SNR MGF with ρ = 1: [2 (1)_1 (2)_{-1}] s^{-1} / (2 (1)_1) = 1/s.
        assert_relative_eq!(a.snr_mgf(1.0, 4.0), 0.25, max_relative = 1e-14);
    }

    #[test]
    fn ties_are_rejected() {
        let r = AsymptoticForm::from_columns(&[vec![p(1.0, 1.0), p(1.0, 2.0)]]);
        assert!(matches!(r, Err(Error::DegenerateOrder(_))));
    }
}
