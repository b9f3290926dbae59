//! The sum-of-products variable H = Σ_n Π_l X_{l,n}.
//!
//! * exact MGF as a product of per-branch Meijer G values,
//! * PDF and CDF by numerical Laplace inversion of that MGF,
//! * the power series for two-factor i.i.d. branches ([`series`]),
//! * the large-s power law ([`AsymptoticForm`]),
//! * sampling and moments.

mod asymptotic;
pub mod series;
pub mod weights;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::Distribution;

pub use asymptotic::AsymptoticForm;
pub use series::{mgf_series, pdf_series, series_accumulate, DoubleIidModel, Series, SeriesConfig, SeriesPdf, SeriesTerm};

use crate::error::{invalid, Error, Result};
use crate::nakagami::{NakagamiParams, NakagamiSampler};
use crate::specfun::{bessel_k, ln_gamma, try_inverse_laplace, InvLaplaceConfig, MeijerG2L, MellinBarnesConfig};

/// L × N grid of Nakagami laws; column n is the n-th product branch.
#[derive(Debug, Clone, PartialEq)]
pub struct SumProductModel {
    columns: Vec<Vec<NakagamiParams>>,
}

fn sort_column(col: &mut [NakagamiParams]) {
    col.sort_by(|a, b| a.m().total_cmp(&b.m()));
}

impl SumProductModel {
    /// Builds from branches; every branch must have the same length L ≥ 1.
    /// Each branch is sorted ascending by shape.
    pub fn new(mut columns: Vec<Vec<NakagamiParams>>) -> Result<Self> {
        if columns.is_empty() {
            return Err(invalid("need at least one branch"));
        }
        let l = columns[0].len();
        if l == 0 || columns.iter().any(|c| c.len() != l) {
            return Err(invalid("every branch needs the same number L ≥ 1 of factors"));
        }
        columns.iter_mut().for_each(|c| sort_column(c));
        Ok(Self { columns })
    }

    /// N identical branches.
    pub fn iid(column: &[NakagamiParams], n: usize) -> Result<Self> {
        Self::new(vec![column.to_vec(); n])
    }

    pub fn l(&self) -> usize {
        self.columns[0].len()
    }

    pub fn n(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Vec<NakagamiParams>] {
        &self.columns
    }

    /// E[H] = Σ_n Π_l (m)_{1/2}/√Ω.
    pub fn mean(&self) -> Result<f64> {
        branch_moments(&self.columns).map(|(m, _)| m)
    }

    /// Var[H] = Σ_n [Π_l m/Ω − (Π_l (m)_{1/2}/√Ω)²].
    pub fn variance(&self) -> Result<f64> {
        branch_moments(&self.columns).map(|(_, v)| v)
    }

    pub fn exact(&self) -> Result<ExactEngine> {
        ExactEngine::new(&self.columns, MellinBarnesConfig::default(), InvLaplaceConfig::default())
    }

    /// E[e^{-sH}] from the Meijer G form.
    pub fn mgf_exact(&self, s: f64) -> Result<f64> {
        self.exact()?.mgf(s)
    }

    /// Density of H by numerical inversion of the exact MGF.
    pub fn pdf_numeric(&self, h: f64, cfg: &InvLaplaceConfig) -> Result<f64> {
        ExactEngine::new(&self.columns, MellinBarnesConfig::default(), *cfg)?.pdf(h)
    }

    pub fn asymptotic(&self) -> Result<AsymptoticForm> {
        AsymptoticForm::from_columns(&self.columns)
    }

    pub fn mgf_asymptotic(&self, s: f64) -> Result<f64> {
        Ok(self.asymptotic()?.mgf(s))
    }

    pub fn pdf_asymptotic(&self, h: f64) -> Result<f64> {
        Ok(self.asymptotic()?.pdf(h))
    }

    pub fn sampler(&self) -> HSampler {
        HSampler::new(&self.columns)
    }

    /// One draw of H. For many draws prefer [`SumProductModel::sampler`].
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sampler().sample(rng)
    }
}

/// (E[H], Var[H]) for independent branches.
pub fn branch_moments(columns: &[Vec<NakagamiParams>]) -> Result<(f64, f64)> {
    let mut mean = 0.0;
    let mut var = 0.0;
    for col in columns {
        let mut first = 1.0;
        let mut second = 1.0;
        for x in col {
            first *= x.moment(1.0)?;
            second *= x.moment(2.0)?;
        }
        mean += first;
        var += second - first * first;
    }
    Ok((mean, var))
}

/// E[e^{-sX}] for one branch X = Π_l X_l,
/// `G^{2,L}_{L,2}[s²/(4ΠΩ_l) | 1−m_l ; 0, 1/2] / (√π ΠΓ(m_l))`.
pub fn branch_mgf_exact(column: &[NakagamiParams], s: f64) -> Result<f64> {
    let mut col = column.to_vec();
    sort_column(&mut col);
    Branch::new(&col, MellinBarnesConfig::default())?.mgf(Complex64::new(s, 0.0)).map(|v| v.re)
}

#[derive(Debug)]
struct Branch {
    g: MeijerG2L,
    ln_four_omega: f64,
    ln_norm: f64,
}

impl Branch {
    fn new(col: &[NakagamiParams], cfg: MellinBarnesConfig) -> Result<Self> {
        let shapes: Vec<f64> = col.iter().map(|x| x.m()).collect();
        let g = MeijerG2L::new(&shapes, cfg)?;
        let ln_four_omega = 4f64.ln() + col.iter().map(|x| x.omega().ln()).sum::<f64>();
        let ln_norm = g.limit_at_zero().ln();
        Ok(Self { g, ln_four_omega, ln_norm })
    }

    fn mgf(&self, s: Complex64) -> Result<Complex64> {
        if s.re == 0.0 && s.im == 0.0 {
            return Ok(Complex64::new(1.0, 0.0));
        }
        let ln_x = 2.0 * s.ln() - self.ln_four_omega;
        Ok(self.g.eval_log(ln_x)? * (-self.ln_norm).exp())
    }
}

/// Exact evaluator for a sum of independent product branches. Branches may
/// have different lengths (a direct path is a branch with one factor);
/// identical branches are evaluated once.
#[derive(Debug)]
pub struct ExactEngine {
    branches: Vec<(Branch, u32)>,
    inv: InvLaplaceConfig,
}

impl ExactEngine {
    pub fn new(columns: &[Vec<NakagamiParams>], mb: MellinBarnesConfig, inv: InvLaplaceConfig) -> Result<Self> {
        inv.validate()?;
        if columns.is_empty() {
            return Err(invalid("need at least one branch"));
        }
        let mut unique: Vec<(Vec<NakagamiParams>, u32)> = Vec::new();
        for col in columns {
            if col.is_empty() {
                return Err(invalid("empty branch"));
            }
            let mut c = col.clone();
            sort_column(&mut c);
            match unique.iter_mut().find(|(u, _)| *u == c) {
                Some((_, k)) => *k += 1,
                None => unique.push((c, 1)),
            }
        }
        let branches = unique
            .into_iter()
            .map(|(c, k)| Branch::new(&c, mb.clone()).map(|b| (b, k)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { branches, inv })
    }

    /// MGF at a complex argument (analytic continuation off the real axis).
    pub fn mgf_complex(&self, s: Complex64) -> Result<Complex64> {
        let mut acc = Complex64::new(1.0, 0.0);
        for (b, k) in &self.branches {
            acc *= b.mgf(s)?.powu(*k);
        }
        Ok(acc)
    }

    pub fn mgf(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(invalid(format!("MGF argument must be ≥ 0, got {s}")));
        }
        Ok(self.mgf_complex(Complex64::new(s, 0.0))?.re)
    }

    /// Density at h > 0, clamped at zero against inversion round-off.
    pub fn pdf(&self, h: f64) -> Result<f64> {
        if !(h > 0.0) {
            return Err(invalid(format!("PDF needs h > 0, got {h}")));
        }
        Ok(try_inverse_laplace(|s| self.mgf_complex(s), h, &self.inv)?.max(0.0))
    }

    /// P(H ≤ h), clamped to [0, 1].
    pub fn cdf(&self, h: f64) -> Result<f64> {
        if !(h > 0.0) {
            return Ok(0.0);
        }
        match try_inverse_laplace(|s| Ok(self.mgf_complex(s)? / s), h, &self.inv) {
            Ok(v) => Ok(v.clamp(0.0, 1.0)),
            // A probability already pinned below the f64 resolution of 1 is usable
            // even when its own relative tolerance is not met.
            Err(Error::NonConvergence { estimate, discrepancy, .. }) if discrepancy < CDF_ABS_FLOOR => {
                Ok(estimate.clamp(0.0, 1.0))
            }
            Err(e) => Err(e),
        }
    }
}

/// Absolute discrepancy accepted for CDF values.
pub const CDF_ABS_FLOOR: f64 = 1e-15;

/// Density of X₁X₂ for independent Nakagami amplitudes,
/// `4 x^{m₁+m₂−1} b^{m₁+m₂} K_{m₁−m₂}(2bx) / (Γ(m₁)Γ(m₂))` with b = √(Ω₁Ω₂).
pub fn double_product_pdf_closed(m1: f64, m2: f64, omega1: f64, omega2: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(invalid(format!("density argument must be > 0, got {x}")));
    }
    for v in [m1, m2, omega1, omega2] {
        if !(v > 0.0) {
            return Err(invalid("shapes and rates must be positive"));
        }
    }
    let b = (omega1 * omega2).sqrt();
    let k = bessel_k(m1 - m2, 2.0 * b * x)?;
    if k == 0.0 {
        return Ok(0.0);
    }
    let ln = 4f64.ln() + (m1 + m2 - 1.0) * x.ln() + (m1 + m2) * b.ln() + k.ln() - ln_gamma(m1)? - ln_gamma(m2)?;
    Ok(ln.exp())
}

/// Draws H for a fixed set of branches.
#[derive(Debug, Clone)]
pub struct HSampler {
    cells: Vec<Vec<NakagamiSampler>>,
}

impl HSampler {
    pub fn new(columns: &[Vec<NakagamiParams>]) -> Self {
        Self { cells: columns.iter().map(|c| c.iter().map(|x| x.sampler()).collect()).collect() }
    }
}

impl Distribution<f64> for HSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.cells
            .iter()
            .map(|col| col.iter().map(|x| x.sample(rng)).product::<f64>())
            .sum()
    }
}
