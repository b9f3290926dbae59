//! Link metrics for a reflecting surface with N elements between a source
//! and a destination.
//!
//! With optimally aligned element phases the end-to-end SNR is
//! γ = ρ H², where H = Σ_n |h_SI,n| |h_ID,n| (plus |h_SD| when the direct
//! path is present) and ρ is the average SNR. M transmit antennas with
//! maximum-ratio transmission act as N·M independent elements.

use std::cell::Cell;
use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::nakagami::NakagamiParams;
use crate::specfun::{gaussian_q, quad, InvLaplaceConfig, MellinBarnesConfig};
use crate::sumprod::{AsymptoticForm, DoubleIidModel, ExactEngine, Series, SeriesConfig, SumProductModel};

/// Conditional error probability Pe(γ) = α Q(√(2gγ)).
#[derive(Debug, Clone, PartialEq)]
pub struct ModulationSpec {
    pub name: String,
    pub alpha: f64,
    pub g: f64,
    pub constellation_size: Option<u32>,
}

impl ModulationSpec {
    pub fn new(name: impl Into<String>, alpha: f64, g: f64) -> Result<Self> {
        if !(alpha > 0.0 && g > 0.0) {
            return Err(invalid("modulation needs α > 0 and g > 0"));
        }
        Ok(Self { name: name.into(), alpha, g, constellation_size: None })
    }

    fn sized(name: &str, alpha: f64, g: f64, m: u32) -> Self {
        Self { name: name.into(), alpha, g, constellation_size: Some(m) }
    }

    pub fn bfsk() -> Self {
        Self { name: "bfsk".into(), alpha: 1.0, g: 0.5, constellation_size: Some(2) }
    }

    pub fn bpsk() -> Self {
        Self { name: "bpsk".into(), alpha: 1.0, g: 1.0, constellation_size: Some(2) }
    }

    pub fn qpsk() -> Self {
        Self { name: "qpsk".into(), alpha: 2.0, g: 0.5, constellation_size: Some(4) }
    }

    pub fn mpam(m: u32) -> Result<Self> {
        check_order(m)?;
        let mf = m as f64;
        Ok(Self::sized("mpam", 2.0 * (mf - 1.0) / mf, 3.0 / (mf * mf - 1.0), m))
    }

    pub fn mpsk(m: u32) -> Result<Self> {
        check_order(m)?;
        Ok(Self::sized("mpsk", 2.0, (PI / m as f64).sin().powi(2), m))
    }

    /// Rectangular M-QAM (union-bound form).
    pub fn mqam_rect(m: u32) -> Result<Self> {
        check_order(m)?;
        let mf = m as f64;
        Ok(Self::sized("mqam_rect", 4.0 * (mf.sqrt() - 1.0) / mf.sqrt(), 1.5 / (mf - 1.0), m))
    }

    /// Non-rectangular M-QAM (union-bound form).
    pub fn mqam_nonrect(m: u32) -> Result<Self> {
        check_order(m)?;
        Ok(Self::sized("mqam_nonrect", 4.0, 1.5 / (m as f64 - 1.0), m))
    }

    /// Looks up a scheme by name; `m` is required for the M-ary families.
    pub fn from_name(name: &str, m: Option<u32>) -> Result<Self> {
        let need = || m.ok_or_else(|| invalid(format!("modulation {name} needs a constellation size")));
        match name.to_ascii_lowercase().as_str() {
            "bfsk" => Ok(Self::bfsk()),
            "bpsk" => Ok(Self::bpsk()),
            "qpsk" | "4qam" => Ok(Self::qpsk()),
            "mpam" => Self::mpam(need()?),
            "mpsk" => Self::mpsk(need()?),
            "mqam" | "mqam_rect" => Self::mqam_rect(need()?),
            "mqam_nonrect" => Self::mqam_nonrect(need()?),
            other => Err(invalid(format!("unknown modulation {other}"))),
        }
    }

    pub fn error_probability(&self, gamma: f64) -> f64 {
        (self.alpha * gaussian_q((2.0 * self.g * gamma.max(0.0)).sqrt())).min(1.0)
    }
}

fn check_order(m: u32) -> Result<()> {
    if m < 2 {
        return Err(invalid(format!("constellation size must be at least 2, got {m}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetricMethod {
    /// Power series in the two-hop i.i.d. case (no direct path).
    ExactSeries,
    /// Numerical evaluation from the exact Meijer G MGF.
    ExactNumeric,
    /// High-SNR power law; an upper bound for large ρ.
    UpperBound,
}

impl MetricMethod {
    pub fn name(&self) -> &'static str {
        match self {
            Self::ExactSeries => "series",
            Self::ExactNumeric => "exact",
            Self::UpperBound => "upper",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IrsModel {
    pub elements_n: usize,
    pub antennas_m: usize,
    pub si: NakagamiParams,
    pub id: NakagamiParams,
    pub direct: Option<NakagamiParams>,
}

impl IrsModel {
    /// Requires m_SI ≥ m_ID (the ordering convention of the link parameters).
    pub fn new(
        elements_n: usize,
        antennas_m: usize,
        si: NakagamiParams,
        id: NakagamiParams,
        direct: Option<NakagamiParams>,
    ) -> Result<Self> {
        if elements_n == 0 || antennas_m == 0 {
            return Err(invalid("N and M must be at least 1"));
        }
        if si.m() < id.m() {
            return Err(invalid(format!("need m_SI ≥ m_ID, got {} < {}", si.m(), id.m())));
        }
        Ok(Self { elements_n, antennas_m, si, id, direct })
    }

    /// N·M.
    pub fn effective_elements(&self) -> usize {
        self.elements_n * self.antennas_m
    }

    /// The N·M reflected branches [ID, SI] followed by [SD] if present.
    pub fn columns(&self) -> Vec<Vec<NakagamiParams>> {
        let mut cols = vec![vec![self.id, self.si]; self.effective_elements()];
        if let Some(sd) = self.direct {
            cols.push(vec![sd]);
        }
        cols
    }

    /// The reflected part as a sum-of-products model.
    pub fn reflected(&self) -> SumProductModel {
        SumProductModel::iid(&[self.id, self.si], self.effective_elements()).expect("valid by construction")
    }

    /// Two-factor i.i.d. description for the series path.
    pub fn double_iid(&self) -> Result<DoubleIidModel> {
        if self.direct.is_some() {
            return Err(Error::MethodUnavailable {
                method: MetricMethod::ExactSeries.name().into(),
                reason: "the series covers only the reflected link without a direct path".into(),
            });
        }
        DoubleIidModel::new(self.id.m(), self.si.m(), self.id.omega(), self.si.omega(), self.effective_elements())
    }

    pub fn asymptotic(&self) -> Result<AsymptoticForm> {
        AsymptoticForm::from_columns(&self.columns())
    }

    /// N·M·m_ID, plus m_SD with a direct path.
    pub fn diversity_order(&self) -> Result<f64> {
        if self.si.m() == self.id.m() {
            return Err(Error::DegenerateOrder("m_SI = m_ID: the power-law bound does not exist".into()));
        }
        let base = self.effective_elements() as f64 * self.id.m();
        Ok(base + self.direct.map_or(0.0, |d| d.m()))
    }
}

/// Reusable metric evaluator for one [`IrsModel`].
#[derive(Debug)]
pub struct IrsEvaluator {
    model: IrsModel,
    exact: ExactEngine,
    series: Option<Series>,
    series_cfg: SeriesConfig,
}

impl IrsEvaluator {
    pub fn new(model: &IrsModel, series_cfg: SeriesConfig, inv: InvLaplaceConfig) -> Result<Self> {
        let exact = ExactEngine::new(&model.columns(), MellinBarnesConfig::default(), inv)?;
        Ok(Self { model: model.clone(), exact, series: None, series_cfg })
            .map(|mut e| {
                e.series = e.model.double_iid().ok().and_then(|d| Series::new(&d, &series_cfg).ok());
                e
            })
    }

    pub fn with_defaults(model: &IrsModel) -> Result<Self> {
        Self::new(model, SeriesConfig::default(), InvLaplaceConfig::default())
    }

    pub fn model(&self) -> &IrsModel {
        &self.model
    }

    pub fn exact(&self) -> &ExactEngine {
        &self.exact
    }

    /// The ε applied by the series path, if any.
    pub fn series_offset(&self) -> Option<f64> {
        self.series.as_ref().and_then(|s| s.offset())
    }

    fn series(&self) -> Result<&Series> {
        match &self.series {
            Some(s) => Ok(s),
            None => {
                // Reproduce the precise reason.
                let d = self.model.double_iid()?;
                Series::new(&d, &self.series_cfg)?;
                Err(Error::MethodUnavailable { method: "series".into(), reason: "series construction failed".into() })
            }
        }
    }

    /// E[e^{-sγ}].
    pub fn snr_mgf(&self, rho: f64, s: f64, method: MetricMethod) -> Result<f64> {
        check_rho(rho)?;
        if !(s >= 0.0) {
            return Err(invalid(format!("MGF argument must be ≥ 0, got {s}")));
        }
        if s == 0.0 && method != MetricMethod::UpperBound {
            return Ok(1.0);
        }
        match method {
            MetricMethod::ExactSeries => Ok(self.series()?.accumulate(|t| crate::sumprod::weights::snr_mgf(rho, s, t))),
            MetricMethod::ExactNumeric => snr_mgf_from_cdf(|h| self.exact.cdf(h), rho, s),
            MetricMethod::UpperBound => Ok(self.model.asymptotic()?.snr_mgf(rho, s)),
        }
    }

    /// P(γ ≤ γ_th).
    pub fn outage(&self, gamma_th: f64, rho: f64, method: MetricMethod) -> Result<f64> {
        check_rho(rho)?;
        if !(gamma_th >= 0.0) {
            return Err(invalid(format!("threshold must be ≥ 0, got {gamma_th}")));
        }
        if gamma_th == 0.0 {
            return Ok(0.0);
        }
        match method {
            MetricMethod::ExactSeries => Ok(self.series()?.accumulate(|t| crate::sumprod::weights::outage(gamma_th, rho, t))),
            MetricMethod::ExactNumeric => self.exact.cdf((gamma_th / rho).sqrt()),
            MetricMethod::UpperBound => Ok(self.model.asymptotic()?.outage(gamma_th, rho)),
        }
    }

    /// Average symbol error rate E[α Q(√(2gγ))].
    pub fn aser(&self, modulation: &ModulationSpec, rho: f64, method: MetricMethod) -> Result<f64> {
        check_rho(rho)?;
        let (alpha, g) = (modulation.alpha, modulation.g);
        match method {
            MetricMethod::ExactSeries => Ok(self.series()?.accumulate(|t| crate::sumprod::weights::aser(alpha, g, rho, t))),
            MetricMethod::ExactNumeric => aser_from_cdf(|h| self.exact.cdf(h), modulation, rho),
            MetricMethod::UpperBound => Ok(self.model.asymptotic()?.aser(alpha, g, rho)),
        }
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(invalid(format!("average SNR must be positive, got {rho}")));
    }
    Ok(())
}

/// ∫₀^V v^p e^{-v²/2} F(v/κ) dv with relative accuracy, for p ∈ {0, 1}.
fn gauss_weighted_cdf<F: Fn(f64) -> Result<f64>>(cdf: F, kappa: f64, p: i32) -> Result<f64> {
    const V_MAX: f64 = 14.0;
    let failure: Cell<Option<Error>> = Cell::new(None);
    let f = |v: f64| -> f64 {
        if v <= 0.0 {
            return 0.0;
        }
        match cdf(v / kappa) {
            Ok(c) => v.powi(p) * (-0.5 * v * v).exp() * c,
            Err(e) => {
                let prev = failure.take();
                failure.set(Some(prev.unwrap_or(e)));
                0.0
            }
        }
    };
    let scale = (1..=10).map(|i| f(i as f64 * 0.8)).fold(0.0, f64::max);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    if scale == 0.0 {
        return Ok(0.0);
    }
    let v = quad::integrate_panels(|v| f(v) / scale, 0.0, V_MAX, 2, 1e-9)?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(v * scale)
}

/// ASER of γ = ρH² from the CDF of H:
/// `α/√(2π) ∫₀^∞ F_H(v/κ) e^{-v²/2} dv`, κ = √(2gρ) (integration by parts of E[αQ(κH)]).
pub fn aser_from_cdf<F: Fn(f64) -> Result<f64>>(cdf: F, modulation: &ModulationSpec, rho: f64) -> Result<f64> {
    let kappa = (2.0 * modulation.g * rho).sqrt();
    let v = gauss_weighted_cdf(cdf, kappa, 0)?;
    Ok((modulation.alpha * v / (2.0 * PI).sqrt()).min(1.0))
}

/// E[e^{-sρH²}] from the CDF of H: `∫₀^∞ v e^{-v²/2} F_H(v/√(2sρ)) dv`.
pub fn snr_mgf_from_cdf<F: Fn(f64) -> Result<f64>>(cdf: F, rho: f64, s: f64) -> Result<f64> {
    if s == 0.0 {
        return Ok(1.0);
    }
    gauss_weighted_cdf(cdf, (2.0 * s * rho).sqrt(), 1)
}

/// MGF method: `α/π ∫₀^{π/2} M_γ(g / sin²φ) dφ`.
pub fn aser_mgf_method<F: Fn(f64) -> Result<f64>>(mgf: F, modulation: &ModulationSpec) -> Result<f64> {
    let failure: Cell<Option<Error>> = Cell::new(None);
    let f = |phi: f64| -> f64 {
        let sn = phi.sin();
        if sn <= 0.0 {
            return 0.0;
        }
        match mgf(modulation.g / (sn * sn)) {
            Ok(v) => v,
            Err(e) => {
                let prev = failure.take();
                failure.set(Some(prev.unwrap_or(e)));
                0.0
            }
        }
    };
    let v = quad::integrate(f, 0.0, PI / 2.0, 1e-14)?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(modulation.alpha / PI * v)
}

/// MGF of γ under `method`, as a function of s.
pub fn snr_mgf(model: &IrsModel, rho: f64, method: MetricMethod) -> Result<impl Fn(f64) -> Result<f64>> {
    check_rho(rho)?;
    let ev = IrsEvaluator::with_defaults(model)?;
    match method {
        MetricMethod::ExactSeries => {
            ev.series()?;
        }
        MetricMethod::UpperBound => {
            model.asymptotic()?;
        }
        MetricMethod::ExactNumeric => {}
    }
    Ok(move |s: f64| ev.snr_mgf(rho, s, method))
}

pub fn outage_probability(model: &IrsModel, gamma_th: f64, rho: f64, method: MetricMethod) -> Result<f64> {
    IrsEvaluator::with_defaults(model)?.outage(gamma_th, rho, method)
}

pub fn aser(model: &IrsModel, modulation: &ModulationSpec, rho: f64, method: MetricMethod) -> Result<f64> {
    IrsEvaluator::with_defaults(model)?.aser(modulation, rho, method)
}

pub fn diversity_order(model: &IrsModel) -> Result<f64> {
    model.diversity_order()
}

/// Least-squares slope of log10(metric) against log10(ρ), negated, using only
/// points with metric < 1e-3. `curve` holds (ρ linear, metric) pairs.
pub fn empirical_diversity_slope(curve: &[(f64, f64)]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = curve
        .iter()
        .filter(|(r, v)| *r > 0.0 && *v > 0.0 && *v < 1e-3)
        .map(|(r, v)| (r.log10(), v.log10()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientRegime(format!(
            "{} of {} points have metric < 1e-3; need at least 3",
            pts.len(),
            curve.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientRegime("all points share one ρ".into()));
    }
    Ok(-sxy / sxx)
}

/// Bound-to-exact ratios along a ρ grid, with the crossover beyond which the
/// bound dominates and the ratio no longer increases.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundGap {
    pub rho: Vec<f64>,
    pub ratio: Vec<f64>,
    /// Index of the first grid point of the trustworthy region.
    pub crossover: Option<usize>,
}

impl BoundGap {
    pub fn new(rho: Vec<f64>, bound: &[f64], exact: &[f64]) -> Self {
        let ratio: Vec<f64> = bound.iter().zip(exact).map(|(b, e)| b / e).collect();
        let mut crossover = None;
        for i in (0..ratio.len()).rev() {
            let ok_here = ratio[i] >= 1.0;
            let ok_next = i + 1 == ratio.len() || ratio[i] >= ratio[i + 1] * (1.0 - 1e-9);
            if ok_here && ok_next {
                crossover = Some(i);
            } else {
                break;
            }
        }
        Self { rho, ratio, crossover }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(m: f64, w: f64) -> NakagamiParams {
        NakagamiParams::new(m, w).unwrap()
    }

    fn two_hop(n: usize) -> IrsModel {
        IrsModel::new(n, 1, p(2.0, 1.0), p(1.0, 1.0), None).unwrap()
    }

    #[test]
    fn modulation_table() {
        assert_eq!((ModulationSpec::bpsk().alpha, ModulationSpec::bpsk().g), (1.0, 1.0));
        assert_eq!((ModulationSpec::bfsk().alpha, ModulationSpec::bfsk().g), (1.0, 0.5));
        assert_eq!((ModulationSpec::qpsk().alpha, ModulationSpec::qpsk().g), (2.0, 0.5));
        let pam = ModulationSpec::mpam(4).unwrap();
        assert_relative_eq!(pam.alpha, 1.5);
        assert_relative_eq!(pam.g, 0.2);
        let psk = ModulationSpec::mpsk(8).unwrap();
        assert_relative_eq!(psk.g, (PI / 8.0).sin().powi(2));
        let qam = ModulationSpec::mqam_rect(16).unwrap();
        assert_relative_eq!(qam.alpha, 3.0);
        assert_relative_eq!(qam.g, 0.1);
        assert_eq!(ModulationSpec::mqam_nonrect(32).unwrap().alpha, 4.0);
        assert!(ModulationSpec::from_name("mpsk", None).is_err());
        assert_eq!(ModulationSpec::from_name("BPSK", None).unwrap(), ModulationSpec::bpsk());
        assert_eq!(ModulationSpec::bpsk().error_probability(0.0), 0.5);
    }

    #[test]
    fn model_rules() {
        assert!(IrsModel::new(2, 1, p(1.0, 1.0), p(2.0, 1.0), None).is_err());
        let m = IrsModel::new(2, 3, p(2.0, 1.0), p(1.0, 1.0), Some(p(1.0, 1.0))).unwrap();
        assert_eq!(m.effective_elements(), 6);
        assert_eq!(m.columns().len(), 7);
        assert!(matches!(m.double_iid(), Err(Error::MethodUnavailable { .. })));
    }

    #[test]
    fn diversity_examples() {
        assert_eq!(IrsModel::new(3, 1, p(2.0, 1.0), p(1.0, 1.0), None).unwrap().diversity_order().unwrap(), 3.0);
        assert_eq!(IrsModel::new(2, 2, p(2.0, 1.0), p(1.5, 1.0), None).unwrap().diversity_order().unwrap(), 6.0);
        assert_eq!(
            IrsModel::new(2, 1, p(2.0, 1.0), p(1.0, 1.0), Some(p(1.0, 1.0))).unwrap().diversity_order().unwrap(),
            3.0
        );
        assert!(matches!(
            IrsModel::new(2, 1, p(1.0, 1.0), p(1.0, 1.0), None).unwrap().diversity_order(),
            Err(Error::DegenerateOrder(_))
        ));
    }

    #[test]
    fn upper_bound_snr_mgf_example() {
        let f = snr_mgf(&two_hop(1), 1.0, MetricMethod::UpperBound).unwrap();
        for &s in &[0.5, 2.0, 10.0] {
            assert_relative_eq!(f(s).unwrap(), 1.0 / s, max_relative = 1e-13);
        }
    }

    #[test]
    fn exact_methods_are_normalised() {
        let ev = IrsEvaluator::with_defaults(&two_hop(2)).unwrap();
        assert_eq!(ev.snr_mgf(3.0, 0.0, MetricMethod::ExactSeries).unwrap(), 1.0);
        assert_eq!(ev.snr_mgf(3.0, 0.0, MetricMethod::ExactNumeric).unwrap(), 1.0);
        assert_eq!(ev.outage(0.0, 3.0, MetricMethod::ExactNumeric).unwrap(), 0.0);
        assert!(ev.outage(1e-12, 3.0, MetricMethod::ExactNumeric).unwrap() < 1e-10);
    }

    #[test]
    fn numeric_snr_mgf_matches_direct_integral() {
        let ev = IrsEvaluator::with_defaults(&two_hop(1)).unwrap();
        let (rho, s) = (2.0, 0.7);
        let e = ev.exact();
        let want = quad::integrate_to_inf(|h| (-s * rho * h * h).exp() * e.pdf(h).unwrap(), 1e-12, 1.0, 1e-12).unwrap();
        assert_relative_eq!(ev.snr_mgf(rho, s, MetricMethod::ExactNumeric).unwrap(), want, max_relative = 1e-6);
    }

    #[test]
    fn series_aser_is_mgf_method_on_series_mgf() {
        let ev = IrsEvaluator::with_defaults(&IrsModel::new(2, 1, p(2.5, 1.0), p(1.0, 1.0), None).unwrap()).unwrap();
        let bpsk = ModulationSpec::bpsk();
        let rho = 100.0;
        let closed = ev.aser(&bpsk, rho, MetricMethod::ExactSeries).unwrap();
        let via = aser_mgf_method(|s| ev.snr_mgf(rho, s, MetricMethod::ExactSeries), &bpsk).unwrap();
        assert_relative_eq!(closed, via, max_relative = 1e-6);
    }

    #[test]
    fn by_parts_aser_matches_definition() {
        let ev = IrsEvaluator::with_defaults(&two_hop(2)).unwrap();
        let qpsk = ModulationSpec::qpsk();
        let rho = 10.0;
        let e = ev.exact();
        let want = quad::integrate_to_inf(
            |h| qpsk.error_probability(rho * h * h) * e.pdf(h).unwrap(),
            1e-12,
            1.0,
            1e-12,
        )
        .unwrap();
        assert_relative_eq!(ev.aser(&qpsk, rho, MetricMethod::ExactNumeric).unwrap(), want, max_relative = 1e-6);
    }

    #[test]
    fn mgf_method_on_bound() {
        let ev = IrsEvaluator::with_defaults(&two_hop(3)).unwrap();
        let bpsk = ModulationSpec::bpsk();
        let rho = 1e3;
        let closed = ev.aser(&bpsk, rho, MetricMethod::UpperBound).unwrap();
        let via = aser_mgf_method(|s| ev.snr_mgf(rho, s, MetricMethod::UpperBound), &bpsk).unwrap();
        assert_relative_eq!(closed, via, max_relative = 1e-8);
    }

    #[test]
    fn miso_is_index_expansion() {
        let a = IrsEvaluator::with_defaults(&IrsModel::new(2, 2, p(2.0, 1.0), p(1.0, 1.0), None).unwrap()).unwrap();
        let b = IrsEvaluator::with_defaults(&IrsModel::new(4, 1, p(2.0, 1.0), p(1.0, 1.0), None).unwrap()).unwrap();
        for m in [MetricMethod::ExactNumeric, MetricMethod::UpperBound, MetricMethod::ExactSeries] {
            assert_eq!(a.outage(3.0, 10.0, m).unwrap().to_bits(), b.outage(3.0, 10.0, m).unwrap().to_bits());
        }
    }

    #[test]
    fn direct_link_factorises() {
        let sd = p(1.0, 1.0);
        let with = IrsModel::new(2, 1, p(2.0, 1.0), p(1.0, 1.0), Some(sd)).unwrap();
        let ev = IrsEvaluator::with_defaults(&with).unwrap();
        let refl = with.reflected().exact().unwrap();
        for &s in &[0.1, 1.0, 5.0] {
            let want = refl.mgf(s).unwrap() * sd.mgf_exact(s).unwrap();
            assert_relative_eq!(ev.exact().mgf(s).unwrap(), want, max_relative = 1e-8);
        }
        assert!(matches!(ev.outage(1.0, 1.0, MetricMethod::ExactSeries), Err(Error::MethodUnavailable { .. })));
    }

    #[test]
    fn slope_fit() {
        let curve: Vec<(f64, f64)> = (0..6).map(|i| {
            let r = 10f64.powf(3.0 + 0.3 * i as f64);
            (r, 7.0 * r.powi(-3))
        }).collect();
        assert_relative_eq!(empirical_diversity_slope(&curve).unwrap(), 3.0, max_relative = 1e-12);
        let early = [(1.0, 0.5), (2.0, 0.3), (3.0, 0.1), (4.0, 1e-4)];
        assert!(matches!(empirical_diversity_slope(&early), Err(Error::InsufficientRegime(_))));
    }

    #[test]
    fn bound_gap_crossover() {
        let g = BoundGap::new(vec![1.0, 2.0, 3.0, 4.0], &[0.5, 3.0, 2.0, 1.5], &[1.0, 1.0, 1.0, 1.0]);
        assert_eq!(g.crossover, Some(1));
    }
}
