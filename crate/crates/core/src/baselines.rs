//! Two-moment approximations of H used for comparison curves: a normal law
//! truncated at zero and a gamma law, both fitted to E[H] and Var[H].

use std::f64::consts::PI;

use statrs::function::gamma::gamma_lr;

use crate::error::{invalid, Error, Result};
use crate::irs::{aser_from_cdf, ModulationSpec};
use crate::nakagami::NakagamiParams;
use crate::specfun::{gaussian_q, ln_gamma};
use crate::sumprod::{branch_moments, SumProductModel};

/// Normal fit N(μ, σ²) to H, restricted to h ≥ 0 and renormalised.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CltApprox {
    pub mu: f64,
    pub sigma: f64,
}

impl CltApprox {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !(mu > 0.0 && sigma > 0.0 && mu.is_finite() && sigma.is_finite()) {
            return Err(invalid(format!("normal fit needs μ, σ > 0, got μ={mu}, σ={sigma}")));
        }
        Ok(Self { mu, sigma })
    }

    pub fn from_columns(columns: &[Vec<NakagamiParams>]) -> Result<Self> {
        let (mean, var) = branch_moments(columns)?;
        if !(var > 0.0) {
            return Err(Error::DegenerateVariance);
        }
        Self::new(mean, var.sqrt())
    }

    /// Mass of the untruncated normal below zero, P(N ≤ 0).
    pub fn floor_mass(&self) -> f64 {
        gaussian_q(self.mu / self.sigma)
    }

    fn kept_mass(&self) -> f64 {
        gaussian_q(-self.mu / self.sigma)
    }

    pub fn pdf(&self, h: f64) -> f64 {
        if h < 0.0 {
            return 0.0;
        }
        let z = (h - self.mu) / self.sigma;
        (-0.5 * z * z).exp() / ((2.0 * PI).sqrt() * self.sigma * self.kept_mass())
    }

    pub fn cdf(&self, h: f64) -> f64 {
        if h <= 0.0 {
            return 0.0;
        }
        let z0 = -self.mu / self.sigma;
        let z = (h - self.mu) / self.sigma;
        // Φ(z) − Φ(z0) written with upper tails to keep the left tail accurate.
        let num = if z <= 0.0 {
            gaussian_q(-z) - gaussian_q(-z0)
        } else {
            gaussian_q(z0) - gaussian_q(z)
        };
        (num / self.kept_mass()).clamp(0.0, 1.0)
    }

    /// E[e^{-sH}] = e^{-sμ + s²σ²/2} Φ(μ/σ − sσ) / Φ(μ/σ).
    pub fn mgf(&self, s: f64) -> f64 {
        let (mu, sg) = (self.mu, self.sigma);
        let ln = -s * mu + 0.5 * s * s * sg * sg + gaussian_q(s * sg - mu / sg).ln() - self.kept_mass().ln();
        ln.exp()
    }

    /// Leading behaviour of the ASER for large ρ. The truncated density is
    /// positive at h = 0, so the ASER falls only as ρ^{-1/2}:
    /// `α f(0) / (√(2π) √(2gρ))`.
    pub fn aser_high_snr(&self, modulation: &ModulationSpec, rho: f64) -> f64 {
        modulation.alpha * self.pdf(0.0) / ((2.0 * PI).sqrt() * (2.0 * modulation.g * rho).sqrt())
    }
}

/// Gamma fit to H with shape k and scale θ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaApprox {
    pub shape: f64,
    pub scale: f64,
}

impl GammaApprox {
    /// Matches mean μ and variance σ².
    pub fn from_moments(mean: f64, variance: f64) -> Result<Self> {
        if !(variance > 0.0 && variance.is_finite()) {
            return Err(Error::DegenerateVariance);
        }
        if !(mean > 0.0) {
            return Err(invalid(format!("gamma fit needs a positive mean, got {mean}")));
        }
        Ok(Self { shape: mean * mean / variance, scale: variance / mean })
    }

    pub fn from_columns(columns: &[Vec<NakagamiParams>]) -> Result<Self> {
        let (mean, var) = branch_moments(columns)?;
        Self::from_moments(mean, var)
    }

    pub fn mean(&self) -> f64 {
        self.shape * self.scale
    }

    pub fn variance(&self) -> f64 {
        self.shape * self.scale * self.scale
    }

    /// (1 + θs)^{-k}.
    pub fn mgf(&self, s: f64) -> f64 {
        (-self.shape * (self.scale * s).ln_1p()).exp()
    }

    pub fn pdf(&self, h: f64) -> f64 {
        if h <= 0.0 {
            return 0.0;
        }
        let k = self.shape;
        let x = h / self.scale;
        ((k - 1.0) * x.ln() - x - ln_gamma(k).unwrap_or(f64::INFINITY)).exp() / self.scale
    }

    pub fn cdf(&self, h: f64) -> f64 {
        if h <= 0.0 {
            return 0.0;
        }
        gamma_lr(self.shape, h / self.scale)
    }
}

pub fn fit_clt(model: &SumProductModel) -> Result<CltApprox> {
    CltApprox::from_columns(model.columns())
}

pub fn fit_gamma(model: &SumProductModel) -> Result<GammaApprox> {
    GammaApprox::from_columns(model.columns())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Baseline {
    Clt(CltApprox),
    Gamma(GammaApprox),
}

impl Baseline {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Clt(_) => "clt",
            Self::Gamma(_) => "gamma",
        }
    }

    pub fn pdf(&self, h: f64) -> f64 {
        match self {
            Self::Clt(a) => a.pdf(h),
            Self::Gamma(a) => a.pdf(h),
        }
    }

    pub fn mgf(&self, s: f64) -> f64 {
        match self {
            Self::Clt(a) => a.mgf(s),
            Self::Gamma(a) => a.mgf(s),
        }
    }

    pub fn cdf(&self, h: f64) -> f64 {
        match self {
            Self::Clt(a) => a.cdf(h),
            Self::Gamma(a) => a.cdf(h),
        }
    }

    /// P(ρH² ≤ γ_th).
    pub fn outage(&self, gamma_th: f64, rho: f64) -> Result<f64> {
        if !(rho > 0.0) || !(gamma_th >= 0.0) {
            return Err(invalid("outage needs ρ > 0 and γ_th ≥ 0"));
        }
        Ok(self.cdf((gamma_th / rho).sqrt()))
    }

    pub fn aser(&self, modulation: &ModulationSpec, rho: f64) -> Result<f64> {
        if !(rho > 0.0) {
            return Err(invalid("ASER needs ρ > 0"));
        }
        aser_from_cdf(|h| Ok(self.cdf(h)), modulation, rho)
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Metric<'a> {
    Outage { gamma_th: f64, rho: f64 },
    Aser { modulation: &'a ModulationSpec, rho: f64 },
}

pub fn baseline_metric(approx: &Baseline, metric: Metric<'_>) -> Result<f64> {
    match metric {
        Metric::Outage { gamma_th, rho } => approx.outage(gamma_th, rho),
        Metric::Aser { modulation, rho } => approx.aser(modulation, rho),
    }
}
