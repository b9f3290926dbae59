//! Power-series expansion of the MGF of a sum of N i.i.d. two-factor products.
//!
//! One product X₁X₂ has the Bessel-K density; expanding K_ν through
//! I_{±ν} and transforming term by term gives
//!
//! ```text
//! M(s) ≈ c Σ_{i=0}^{I} [ A_i s^{-2(i+m₂)} − B_i s^{-2(i+m₁)} ]
//! c = 2π csc(νπ) / (Γ(m₁)Γ(m₂)),  ν = m₁ − m₂
//! A_i = h(i+m₂),  B_i = h(i+m₁),  h(μ) = (Ω₁Ω₂)^μ Γ(2μ) / (Γ(1+μ−m₁) Γ(1+μ−m₂))
//! ```
//!
//! Raising this to the N-th power with the multinomial and binomial theorems
//! yields terms indexed by a composition k₀..k_I of N and inner indices
//! 0 ≤ n_i ≤ k_i, with coefficient Π_i C(k_i, n_i) A_i^{k_i−n_i} (−B_i)^{n_i}
//! and exponent t = Σ_i [n_i ν + k_i (i+m₂)]. Each binomial factor carries its
//! own sign (−1)^{n_i}.
//!
//! The expansion is asymptotic in s: it converges only for s > 2√(Ω₁Ω₂), and
//! truncation at order I is accurate only well inside that region.
//!
//! For integer ν, csc(νπ) is singular. The smaller shape is then offset by
//! ε; because c ≈ 2/(ε Γ(m₁)Γ(m₂)), the expanded sum cancels terms of size
//! c^N and loses about N·log10(1/ε) digits in double precision.

use crate::error::{invalid, Error, Result};
use crate::specfun::{ln_gamma, rgamma, sin_pi};

use super::weights;

/// Largest admissible truncation order.
pub const MAX_ORDER: usize = 8;
/// Largest number of expanded terms evaluated before refusing.
pub const MAX_TERMS: u128 = 50_000_000;

/// N i.i.d. branches of X₁X₂ with X_j ~ Nakagami(m_j, Ω_j), stored with m₁ ≤ m₂.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleIidModel {
    pub m1: f64,
    pub m2: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub n: usize,
}

impl DoubleIidModel {
    pub fn new(m1: f64, m2: f64, omega1: f64, omega2: f64, n: usize) -> Result<Self> {
        for (name, v) in [("m1", m1), ("m2", m2), ("omega1", omega1), ("omega2", omega2)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if n == 0 {
            return Err(invalid("N must be at least 1"));
        }
        Ok(if m1 <= m2 {
            Self { m1, m2, omega1, omega2, n }
        } else {
            Self { m1: m2, m2: m1, omega1: omega2, omega2: omega1, n }
        })
    }

    /// ν = m₁ − m₂.
    pub fn nu(&self) -> f64 {
        self.m1 - self.m2
    }

    /// b = √(Ω₁Ω₂); the series converges for s > 2b.
    pub fn b(&self) -> f64 {
        (self.omega1 * self.omega2).sqrt()
    }

    /// Whether ν is (numerically) an integer, so the ε offset is needed.
    pub fn needs_offset(&self) -> bool {
        let nu = self.nu();
        (nu - nu.round()).abs() < 1e-9
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesConfig {
    /// Truncation order I.
    pub order_i: usize,
    /// Shift applied to m₁ when ν is an integer.
    pub epsilon_offset: f64,
    /// Average the results at +ε and −ε to cancel the first-order offset error.
    pub symmetric_offset: bool,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self { order_i: 4, epsilon_offset: 1e-4, symmetric_offset: false }
    }
}

/// One term of the expanded N-th power.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesTerm {
    /// Composition k₀..k_I of N.
    pub k: Vec<usize>,
    /// Inner indices, n_i ≤ k_i.
    pub n: Vec<usize>,
    /// N! / Π k_i!.
    pub multinomial: f64,
    /// Π_i C(k_i, n_i) A_i^{k_i−n_i} (−B_i)^{n_i}.
    pub kappa: f64,
    /// t = Σ_i [n_i ν + k_i (i + m₂)].
    pub exponent: f64,
}

/// Number of expanded terms, C(N + 2I + 1, N).
pub fn term_count(n: usize, order_i: usize) -> u128 {
    let top = (n + 2 * order_i + 1) as u128;
    let k = n.min(2 * order_i + 1) as u128;
    let mut acc: u128 = 1;
    for j in 0..k {
        acc = acc.saturating_mul(top - j) / (j + 1);
    }
    acc
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|j| j as f64).product()
}

fn binomial(k: usize, n: usize) -> f64 {
    factorial(k) / (factorial(n) * factorial(k - n))
}

/// Expansion at one (possibly offset) value of m₁.
#[derive(Debug, Clone)]
pub struct SeriesExpansion {
    m1: f64,
    m2: f64,
    n: usize,
    c: f64,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl SeriesExpansion {
    fn new(m1: f64, m2: f64, omega1: f64, omega2: f64, n: usize, order_i: usize) -> Result<Self> {
        let nu = m1 - m2;
        let sn = sin_pi(nu);
        if sn == 0.0 {
            return Err(invalid("integer ν reached the series without an offset"));
        }
        let c = 2.0 * std::f64::consts::PI / (sn * (ln_gamma(m1)? + ln_gamma(m2)?).exp());
        let ln_b2 = (omega1 * omega2).ln();
        let h = |mu: f64| -> Result<f64> {
            Ok((mu * ln_b2 + ln_gamma(2.0 * mu)?).exp() * rgamma(1.0 + mu - m1) * rgamma(1.0 + mu - m2))
        };
        let mut a = Vec::with_capacity(order_i + 1);
        let mut b = Vec::with_capacity(order_i + 1);
        for i in 0..=order_i {
            a.push(h(i as f64 + m2)?);
            b.push(h(i as f64 + m1)?);
        }
        Ok(Self { m1, m2, n, c, a, b })
    }

    pub fn order(&self) -> usize {
        self.a.len() - 1
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Truncated single-branch series c Σ_i [A_i w(i+m₂) − B_i w(i+m₁)].
    pub fn branch<W: Fn(f64) -> f64>(&self, w: W) -> f64 {
        let mut acc = 0.0;
        for i in 0..=self.order() {
            acc += self.a[i] * w(i as f64 + self.m2) - self.b[i] * w(i as f64 + self.m1);
        }
        self.c * acc
    }

    /// Iterator over all expanded terms of the N-th power.
    pub fn terms(&self) -> SeriesTerms<'_> {
        SeriesTerms::new(self)
    }

    /// c^N Σ multinomial · κ · w(t) over all terms.
    pub fn accumulate<W: Fn(f64) -> f64>(&self, w: W) -> f64 {
        let mut acc = 0.0;
        self.dfs(0, self.n, 1.0, 0.0, &w, &mut acc);
        acc * factorial(self.n) * self.c.powi(self.n as i32)
    }

    /// |c|^N Σ |multinomial · κ · w(t)|, the scale against which cancellation in
    /// [`SeriesExpansion::accumulate`] is measured.
    pub fn accumulate_abs<W: Fn(f64) -> f64>(&self, w: W) -> f64 {
        let mut abs = 0.0;
        for term in self.terms() {
            abs += (term.multinomial * term.kappa * w(term.exponent)).abs();
        }
        abs * self.c.abs().powi(self.n as i32)
    }

    fn dfs<W: Fn(f64) -> f64>(&self, part: usize, remaining: usize, coef: f64, t: f64, w: &W, acc: &mut f64) {
        let nu = self.m1 - self.m2;
        let base = part as f64 + self.m2;
        let last = part == self.order();
        let ks: Vec<usize> = if last { vec![remaining] } else { (0..=remaining).collect() };
        for k in ks {
            let kf = factorial(k);
            for n in 0..=k {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                let c2 = coef * binomial(k, n) * self.a[part].powi((k - n) as i32) * sign * self.b[part].powi(n as i32) / kf;
                let t2 = t + n as f64 * nu + k as f64 * base;
                if last {
                    *acc += c2 * w(t2);
                } else {
                    self.dfs(part + 1, remaining - k, c2, t2, w, acc);
                }
            }
        }
    }
}

/// Explicit enumeration of [`SeriesTerm`]s, in lexicographic order of (k, n).
pub struct SeriesTerms<'a> {
    exp: &'a SeriesExpansion,
    k: Vec<usize>,
    n: Vec<usize>,
    done: bool,
}

impl<'a> SeriesTerms<'a> {
    fn new(exp: &'a SeriesExpansion) -> Self {
        let parts = exp.order() + 1;
        let mut k = vec![0; parts];
        k[parts - 1] = exp.n;
        Self { exp, k, n: vec![0; parts], done: false }
    }

    fn advance(&mut self) {
        // Inner indices first (odometer over n_i ≤ k_i), then the composition.
        for i in (0..self.n.len()).rev() {
            if self.n[i] < self.k[i] {
                self.n[i] += 1;
                for j in i + 1..self.n.len() {
                    self.n[j] = 0;
                }
                return;
            }
        }
        self.n.iter_mut().for_each(|v| *v = 0);
        // Next composition: reverse-lexicographic successor on k₀..k_{I-1}.
        let parts = self.k.len();
        if parts == 1 {
            self.done = true;
            return;
        }
        let rest = self.k[parts - 1];
        if rest > 0 {
            self.k[parts - 2] += 1;
            self.k[parts - 1] = rest - 1;
            return;
        }
        // Tail is empty: carry from the rightmost non-zero part before it.
        let mut i = parts - 2;
        loop {
            if i == 0 {
                self.done = true;
                return;
            }
            if self.k[i] > 0 {
                let moved = self.k[i];
                self.k[i] = 0;
                self.k[i - 1] += 1;
                self.k[parts - 1] = moved - 1;
                return;
            }
            i -= 1;
        }
    }
}

impl Iterator for SeriesTerms<'_> {
    type Item = SeriesTerm;

    fn next(&mut self) -> Option<SeriesTerm> {
        if self.done {
            return None;
        }
        let e = self.exp;
        let nu = e.m1 - e.m2;
        let mut multinomial = factorial(e.n);
        let mut kappa = 1.0;
        let mut t = 0.0;
        for i in 0..self.k.len() {
            let (k, n) = (self.k[i], self.n[i]);
            multinomial /= factorial(k);
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            kappa *= binomial(k, n) * e.a[i].powi((k - n) as i32) * sign * e.b[i].powi(n as i32);
            t += n as f64 * nu + k as f64 * (i as f64 + e.m2);
        }
        let term = SeriesTerm { k: self.k.clone(), n: self.n.clone(), multinomial, kappa, exponent: t };
        self.advance();
        Some(term)
    }
}

/// The series for a model and configuration, with the ε handling applied.
#[derive(Debug, Clone)]
pub struct Series {
    expansions: Vec<SeriesExpansion>,
    offset: Option<f64>,
}

/// Series PDF value; negative truncation artefacts are clamped to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPdf {
    pub value: f64,
    pub raw: f64,
}

impl SeriesPdf {
    pub fn clamped(&self) -> bool {
        self.raw < 0.0
    }
}

impl Series {
    pub fn new(model: &DoubleIidModel, cfg: &SeriesConfig) -> Result<Self> {
        if cfg.order_i > MAX_ORDER {
            return Err(invalid(format!("series order {} exceeds the cap {MAX_ORDER}", cfg.order_i)));
        }
        let count = term_count(model.n, cfg.order_i);
        if count > MAX_TERMS {
            return Err(Error::TermCountOverflow { count, limit: MAX_TERMS });
        }
        let mk = |m1: f64| SeriesExpansion::new(m1, model.m2, model.omega1, model.omega2, model.n, cfg.order_i);
        if model.needs_offset() {
            let eps = cfg.epsilon_offset;
            if !(eps > 0.0 && eps < 0.5) {
                return Err(invalid(format!("epsilon_offset must be in (0, 0.5), got {eps}")));
            }
            let mut expansions = vec![mk(model.m1 + eps)?];
            if cfg.symmetric_offset {
                if model.m1 - eps <= 0.0 {
                    return Err(invalid("m1 − ε must stay positive for the symmetric offset"));
                }
                expansions.push(mk(model.m1 - eps)?);
            }
            Ok(Self { expansions, offset: Some(eps) })
        } else {
            Ok(Self { expansions: vec![mk(model.m1)?], offset: None })
        }
    }

    /// The ε applied to m₁, if any.
    pub fn offset(&self) -> Option<f64> {
        self.offset
    }

    pub fn expansions(&self) -> &[SeriesExpansion] {
        &self.expansions
    }

    /// c^N Σ multinomial · κ · w(t), averaged over the offset expansions.
    pub fn accumulate<W: Fn(f64) -> f64>(&self, w: W) -> f64 {
        let total: f64 = self.expansions.iter().map(|e| e.accumulate(&w)).sum();
        total / self.expansions.len() as f64
    }

    pub fn mgf(&self, s: f64) -> f64 {
        self.accumulate(|t| weights::mgf_h(s, t))
    }

    /// [truncated single-branch series]^N, the factorised form of [`Series::mgf`].
    pub fn mgf_factorised(&self, s: f64) -> f64 {
        let total: f64 = self
            .expansions
            .iter()
            .map(|e| e.branch(|t| weights::mgf_h(s, t)).powi(e.n as i32))
            .sum();
        total / self.expansions.len() as f64
    }

    pub fn pdf(&self, h: f64) -> SeriesPdf {
        if !(h > 0.0) {
            return SeriesPdf { value: 0.0, raw: 0.0 };
        }
        let raw = self.accumulate(|t| weights::pdf_h(h, t));
        SeriesPdf { value: raw.max(0.0), raw }
    }

    pub fn cdf(&self, h: f64) -> f64 {
        if !(h > 0.0) {
            return 0.0;
        }
        self.accumulate(|t| weights::cdf_h(h, t))
    }
}

/// Evaluates the expanded series with a caller-supplied per-term weight.
pub fn series_accumulate<W: Fn(f64) -> f64>(model: &DoubleIidModel, cfg: &SeriesConfig, weight: W) -> Result<f64> {
    Ok(Series::new(model, cfg)?.accumulate(weight))
}

/// Series approximation of E[e^{-sH}].
pub fn mgf_series(model: &DoubleIidModel, cfg: &SeriesConfig, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(invalid(format!("series MGF needs s > 0, got {s}")));
    }
    Ok(Series::new(model, cfg)?.mgf(s))
}

/// Series approximation of the density of H.
pub fn pdf_series(model: &DoubleIidModel, cfg: &SeriesConfig, h: f64) -> Result<SeriesPdf> {
    if !(h > 0.0) {
        return Err(invalid(format!("series PDF needs h > 0, got {h}")));
    }
    Ok(Series::new(model, cfg)?.pdf(h))
}
