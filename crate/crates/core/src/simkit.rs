//! Seeded Monte-Carlo estimates of H-based metrics.
//!
//! Trials are split into fixed-size chunks. Chunk `c` of grid point `p` draws
//! from a ChaCha8 stream seeded by the master seed with stream id
//! `(p << 32) | c`, and chunk results are combined in index order, so the
//! output does not depend on the number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::irs::{IrsModel, ModulationSpec};
use crate::nakagami::NakagamiParams;
use crate::specfun::gaussian_q;
use crate::sumprod::{branch_moments, HSampler, SumProductModel};

/// Trials per chunk (one RNG stream each).
pub const CHUNK: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub master_seed: u64,
    pub trials: u64,
    pub histogram_bins: usize,
    /// Grid-point index selecting the substream family.
    pub point: u32,
}

impl Default for McConfig {
    fn default() -> Self {
        Self { master_seed: 0, trials: 10_000, histogram_bins: 50, point: 0 }
    }
}

impl McConfig {
    pub fn new(master_seed: u64, trials: u64, histogram_bins: usize) -> Result<Self> {
        let cfg = Self { master_seed, trials, histogram_bins, point: 0 };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 100 {
            return Err(invalid(format!("need at least 100 trials, got {}", self.trials)));
        }
        if self.histogram_bins == 0 {
            return Err(invalid("histogram_bins must be positive"));
        }
        Ok(())
    }

    pub fn at_point(mut self, point: u32) -> Self {
        self.point = point;
        self
    }

    fn chunk_rng(&self, chunk: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(((self.point as u64) << 32) | chunk);
        rng
    }
}

/// Anything that defines the branch layout of H.
pub trait ChannelColumns {
    fn channel_columns(&self) -> Vec<Vec<NakagamiParams>>;
}

impl ChannelColumns for SumProductModel {
    fn channel_columns(&self) -> Vec<Vec<NakagamiParams>> {
        self.columns().to_vec()
    }
}

impl ChannelColumns for IrsModel {
    fn channel_columns(&self) -> Vec<Vec<NakagamiParams>> {
        self.columns()
    }
}

impl ChannelColumns for [Vec<NakagamiParams>] {
    fn channel_columns(&self) -> Vec<Vec<NakagamiParams>> {
        self.to_vec()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
}

/// Running mean and centred second moment (mergeable).
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Self) -> Self {
        if o.n == 0.0 {
            return self;
        }
        if self.n == 0.0 {
            return o;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Self { n, mean: self.mean + d * o.n / n, m2: self.m2 + o.m2 + d * d * self.n * o.n / n }
    }

    fn estimate(&self) -> McEstimate {
        let var = if self.n > 1.0 { self.m2 / (self.n - 1.0) } else { 0.0 };
        McEstimate { estimate: self.mean, std_error: (var.max(0.0) / self.n).sqrt() }
    }
}

/// Runs `body(rng, sampler, n)` on every chunk in parallel and returns the
/// chunk results in index order.
fn run_chunks<T, F>(columns: &[Vec<NakagamiParams>], cfg: &McConfig, body: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, &HSampler, u64) -> T + Sync,
{
    cfg.validate()?;
    let sampler = HSampler::new(columns);
    let chunks = cfg.trials.div_ceil(CHUNK);
    Ok((0..chunks)
        .into_par_iter()
        .map(|c| {
            let n = CHUNK.min(cfg.trials - c * CHUNK);
            let mut rng = cfg.chunk_rng(c);
            body(&mut rng, &sampler, n)
        })
        .collect())
}

/// Mean of `f(H)` with its standard error.
pub fn mc_expectation<M, F>(model: &M, cfg: &McConfig, f: F) -> Result<McEstimate>
where
    M: ChannelColumns + ?Sized,
    F: Fn(f64) -> f64 + Sync,
{
    let parts = run_chunks(&model.channel_columns(), cfg, |rng, smp, n| {
        let mut m = Moments::default();
        for _ in 0..n {
            m.push(f(smp.sample(rng)));
        }
        m
    })?;
    Ok(parts.into_iter().fold(Moments::default(), Moments::merge).estimate())
}

/// E[e^{-sH}].
pub fn mc_mgf<M: ChannelColumns + ?Sized>(model: &M, s: f64, cfg: &McConfig) -> Result<McEstimate> {
    mc_expectation(model, cfg, |h| (-s * h).exp())
}

/// Fraction of draws with ρH² ≤ γ_th, with binomial standard error.
pub fn mc_outage<M: ChannelColumns + ?Sized>(model: &M, gamma_th: f64, rho: f64, cfg: &McConfig) -> Result<McEstimate> {
    if !(rho > 0.0) || !(gamma_th >= 0.0) {
        return Err(invalid("outage needs ρ > 0 and γ_th ≥ 0"));
    }
    let hits: u64 = run_chunks(&model.channel_columns(), cfg, |rng, smp, n| {
        (0..n).filter(|_| {
            let h = smp.sample(rng);
            rho * h * h <= gamma_th
        })
        .count() as u64
    })?
    .into_iter()
    .sum();
    Ok(binomial(hits, cfg.trials))
}

fn binomial(hits: u64, trials: u64) -> McEstimate {
    let p = hits as f64 / trials as f64;
    McEstimate { estimate: p, std_error: (p * (1.0 - p) / trials as f64).sqrt() }
}

/// Semi-analytic ASER: the conditional error α Q(√(2gρH²)) averaged over draws.
pub fn mc_aser<M: ChannelColumns + ?Sized>(
    model: &M,
    modulation: &ModulationSpec,
    rho: f64,
    cfg: &McConfig,
) -> Result<McEstimate> {
    if !(rho >= 0.0) {
        return Err(invalid("ASER needs ρ ≥ 0"));
    }
    let kappa = (2.0 * modulation.g * rho).sqrt();
    let mut e = mc_expectation(model, cfg, |h| modulation.alpha * gaussian_q(kappa * h))?;
    e.estimate = e.estimate.clamp(0.0, 1.0);
    Ok(e)
}

/// BPSK symbol-error counting: one ±1 symbol per draw through y = √ρ H x + w
/// with w ~ N(0, 1/2). Cross-check for [`mc_aser`] only.
pub fn mc_ser_bpsk_symbols<M: ChannelColumns + ?Sized>(model: &M, rho: f64, cfg: &McConfig) -> Result<McEstimate> {
    if !(rho >= 0.0) {
        return Err(invalid("SER needs ρ ≥ 0"));
    }
    let amp = rho.sqrt();
    let noise = std::f64::consts::FRAC_1_SQRT_2;
    let errors: u64 = run_chunks(&model.channel_columns(), cfg, |rng, smp, n| {
        let mut errs = 0u64;
        for i in 0..n {
            let h = smp.sample(rng);
            let x = if i % 2 == 0 { 1.0 } else { -1.0 };
            let w: f64 = StandardNormal.sample(rng);
            let y = amp * h * x + noise * w;
            if y * x <= 0.0 {
                errs += 1;
            }
        }
        errs
    })?
    .into_iter()
    .sum();
    Ok(binomial(errors, cfg.trials))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    /// `bins + 1` edges.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// count / (trials · width).
    pub density: Vec<f64>,
    /// Poisson error of each density value.
    pub std_error: Vec<f64>,
    pub trials: u64,
    /// Draws above the last edge.
    pub overflow: u64,
}

impl Histogram {
    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    pub fn width(&self) -> f64 {
        self.edges[1] - self.edges[0]
    }

    /// Σ density · width.
    pub fn mass(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.width()
    }
}

/// Density histogram of H on [lo, hi]. Without a range, [0, E[H] + 10 sd] is used.
pub fn mc_histogram<M: ChannelColumns + ?Sized>(
    model: &M,
    cfg: &McConfig,
    range: Option<(f64, f64)>,
) -> Result<Histogram> {
    let columns = model.channel_columns();
    let (lo, hi) = match range {
        Some(r) => r,
        None => {
            let (mean, var) = branch_moments(&columns)?;
            (0.0, mean + 10.0 * var.sqrt())
        }
    };
    if !(hi > lo && lo >= 0.0) {
        return Err(invalid(format!("histogram range must satisfy 0 ≤ lo < hi, got [{lo}, {hi}]")));
    }
    let bins = cfg.histogram_bins;
    let width = (hi - lo) / bins as f64;
    let parts = run_chunks(&columns, cfg, |rng, smp, n| {
        let mut counts = vec![0u64; bins];
        let (mut under, mut over) = (0u64, 0u64);
        for _ in 0..n {
            let h = smp.sample(rng);
            if h < lo {
                under += 1;
            } else if h >= hi {
                over += 1;
            } else {
                counts[(((h - lo) / width) as usize).min(bins - 1)] += 1;
            }
        }
        (counts, under, over)
    })?;
    let mut counts = vec![0u64; bins];
    let mut overflow = 0;
    for (c, _, o) in parts {
        for (a, b) in counts.iter_mut().zip(c) {
            *a += b;
        }
        overflow += o;
    }
    let norm = cfg.trials as f64 * width;
    let density = counts.iter().map(|&c| c as f64 / norm).collect();
    let std_error = counts.iter().map(|&c| (c as f64).sqrt() / norm).collect();
    let edges = (0..=bins).map(|i| lo + width * i as f64).collect();
    Ok(Histogram { edges, counts, density, std_error, trials: cfg.trials, overflow })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::irs::{IrsEvaluator, MetricMethod};
    use approx::assert_relative_eq;

    fn p(m: f64, w: f64) -> NakagamiParams {
        NakagamiParams::new(m, w).unwrap()
    }

    fn cfg(trials: u64) -> McConfig {
        McConfig::new(7, trials, 40).unwrap()
    }

    #[test]
    fn config_rules() {
        assert!(McConfig::new(1, 99, 10).is_err());
        assert!(McConfig::new(1, 100, 0).is_err());
        assert_eq!(McConfig::default().trials, 10_000);
    }

    #[test]
    fn zero_threshold() {
        let m = IrsModel::new(2, 1, p(2.0, 2.0), p(1.0, 1.0), None).unwrap();
        let e = mc_outage(&m, 0.0, 1.0, &cfg(1000)).unwrap();
        assert_eq!((e.estimate, e.std_error), (0.0, 0.0));
    }

    #[test]
    fn zero_snr_aser() {
        let m = IrsModel::new(2, 1, p(2.0, 2.0), p(1.0, 1.0), None).unwrap();
        let q = ModulationSpec::qpsk();
        let e = mc_aser(&m, &q, 0.0, &cfg(1000)).unwrap();
        assert_relative_eq!(e.estimate, 1.0);
        let b = mc_aser(&m, &ModulationSpec::bpsk(), 0.0, &cfg(1000)).unwrap();
        assert_relative_eq!(b.estimate, 0.5);
    }

    #[test]
    fn standard_error_follows_root_n() {
        let m = IrsModel::new(3, 1, p(2.0, 2.0), p(1.0, 1.0), None).unwrap();
        let b = ModulationSpec::bpsk();
        let a = mc_aser(&m, &b, 1.0, &cfg(200_000)).unwrap();
        let c = mc_aser(&m, &b, 1.0, &cfg(800_000)).unwrap();
        assert!((a.std_error / c.std_error / 2.0 - 1.0).abs() < 0.1);
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let m = IrsModel::new(2, 1, p(2.0, 2.0), p(1.0, 1.0), None).unwrap();
        let c = cfg(300_000).at_point(3);
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| (mc_outage(&m, 1.0, 2.0, &c).unwrap(), mc_histogram(&m, &c, None).unwrap()))
        };
        let (a, ha) = run(1);
        let (b, hb) = run(4);
        assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
        assert_eq!(ha, hb);
        let other = mc_outage(&m, 1.0, 2.0, &cfg(300_000).at_point(4)).unwrap();
        assert_ne!(a.estimate, other.estimate);
    }

    #[test]
    fn rayleigh_histogram() {
        let m = SumProductModel::iid(&[p(1.0, 1.0)], 1).unwrap();
        let h = mc_histogram(&m, &cfg(400_000), Some((0.0, 6.0))).unwrap();
        assert_eq!(h.overflow, 0);
        assert_relative_eq!(h.mass(), 1.0, max_relative = 1e-12);
        for (x, d) in h.centers().iter().zip(&h.density) {
            // Bin-average of 2x e^{-x²}.
            let (a, b) = (x - h.width() / 2.0, x + h.width() / 2.0);
            let want = ((-a * a).exp() - (-b * b).exp()) / h.width();
            let se = (want / (h.trials as f64 * h.width())).sqrt();
            assert!((d - want).abs() <= 4.0 * se + 1e-12, "{x}: {d} vs {want}");
        }
    }

    #[test]
    fn aser_matches_exact() {
        let m = IrsModel::new(3, 1, p(2.0, 2.0), p(1.0, 1.0), None).unwrap();
        let b = ModulationSpec::bpsk();
        let rho = 10.0;
        let e = mc_aser(&m, &b, rho, &cfg(1_000_000)).unwrap();
        let x = IrsEvaluator::with_defaults(&m).unwrap().aser(&b, rho, MetricMethod::ExactNumeric).unwrap();
        assert!((e.estimate - x).abs() < 3.0 * e.std_error, "{} ± {} vs {x}", e.estimate, e.std_error);
    }

    #[test]
    fn semi_analytic_beats_symbol_counting() {
        let m = IrsModel::new(1, 1, p(2.0, 2.0), p(1.0, 1.0), None).unwrap();
        let rho = 2.0;
        let c = cfg(400_000);
        let semi = mc_aser(&m, &ModulationSpec::bpsk(), rho, &c).unwrap();
        let sym = mc_ser_bpsk_symbols(&m, rho, &c).unwrap();
        assert!(semi.std_error < sym.std_error);
        let tol = 3.0 * (semi.std_error.powi(2) + sym.std_error.powi(2)).sqrt();
        assert!((semi.estimate - sym.estimate).abs() < tol);
    }
}
