//! Single Nakagami-m amplitude.
//!
//! Parameterised by shape `m` and a rate-style scale `Ω = m / E[X²]`, so the
//! density is `2Ω^m/Γ(m) x^{2m-1} e^{-Ωx²}`. Note that this Ω is the inverse
//! of the textbook "spread" parameter; use [`NakagamiParams::from_mean_power`]
//! to build from E[X²].

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{invalid, Result};
use crate::specfun::{ln_gamma, pochhammer, MeijerG2L, MellinBarnesConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NakagamiParams {
    m: f64,
    omega: f64,
}

impl NakagamiParams {
    /// Shape `m > 0` (m ≥ 1/2 is the physical range) and rate `Ω > 0`.
    pub fn new(m: f64, omega: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(invalid(format!("Nakagami shape must be positive, got {m}")));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(invalid(format!("Nakagami rate must be positive, got {omega}")));
        }
        Ok(Self { m, omega })
    }

    /// Builds the law with E[X²] = `power`, i.e. Ω = m / power.
    pub fn from_mean_power(m: f64, power: f64) -> Result<Self> {
        if !(power > 0.0 && power.is_finite()) {
            return Err(invalid(format!("mean power must be positive, got {power}")));
        }
        Self::new(m, m / power)
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// E[X²] = m/Ω.
    pub fn mean_power(&self) -> f64 {
        self.m / self.omega
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return 0.0;
        }
        let m = self.m;
        let lg = ln_gamma(m).expect("m > 0");
        (std::f64::consts::LN_2 + m * self.omega.ln() - lg + (2.0 * m - 1.0) * x.ln() - self.omega * x * x).exp()
    }

    /// P(X ≤ x), the regularised lower incomplete gamma P(m, Ωx²).
    pub fn cdf(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return 0.0;
        }
        statrs::function::gamma::gamma_lr(self.m, self.omega * x * x)
    }

    /// E[X^k] = (m)_{k/2} / Ω^{k/2}; finite for m + k/2 > 0.
    pub fn moment(&self, k: f64) -> Result<f64> {
        if !(self.m + k / 2.0 > 0.0) {
            return Err(invalid(format!("moment of order {k} diverges for m = {}", self.m)));
        }
        Ok(pochhammer(self.m, k / 2.0)? / self.omega.powf(k / 2.0))
    }

    /// Reusable sampler: X = √G with G ~ Gamma(shape m, rate Ω).
    pub fn sampler(&self) -> NakagamiSampler {
        NakagamiSampler {
            gamma: Gamma::new(self.m, 1.0 / self.omega).expect("validated parameters"),
        }
    }

    /// One draw. For many draws prefer [`NakagamiParams::sampler`].
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sampler().sample(rng)
    }

    /// E[e^{-sX}] for s ≥ 0 through the L = 1 Meijer G form
    /// `G^{2,1}_{1,2}[s²/(4Ω) | 1-m ; 0, 1/2] / (√π Γ(m))`.
    pub fn mgf_exact(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(invalid(format!("MGF argument must be ≥ 0, got {s}")));
        }
        if s == 0.0 {
            return Ok(1.0);
        }
        let g = MeijerG2L::new(&[self.m], MellinBarnesConfig::default())?;
        Ok(g.eval(s * s / (4.0 * self.omega))? / g.limit_at_zero())
    }

    /// Upper bound `2 (m)_m Ω^m / s^{2m}` on the MGF, tight as s → ∞.
    pub fn mgf_upper(&self, s: f64) -> Result<f64> {
        if !(s > 0.0) {
            return Err(invalid(format!("MGF bound needs s > 0, got {s}")));
        }
        let m = self.m;
        Ok(2.0 * pochhammer(m, m)? * (m * self.omega.ln() - 2.0 * m * s.ln()).exp())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct NakagamiSampler {
    gamma: Gamma<f64>,
}

impl Distribution<f64> for NakagamiSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.gamma.sample(rng).sqrt()
    }
}
