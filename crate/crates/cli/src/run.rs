//! Sweep evaluation: turns a validated configuration into CSV rows.

use rayon::prelude::*;

use cascade::baselines::{Baseline, CltApprox, GammaApprox};
use cascade::irs::{empirical_diversity_slope, BoundGap, IrsEvaluator, MetricMethod};
use cascade::nakagami::NakagamiParams;
use cascade::simkit::{self, McConfig};
use cascade::specfun::InvLaplaceConfig;
use cascade::sumprod::{AsymptoticForm, DoubleIidModel, ExactEngine, Series, SeriesConfig};
use cascade::Error;

use crate::config::{Method, ModelInstance, Scenario, Validated};

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub rho_db: Option<f64>,
    pub gamma_th_db: Option<f64>,
    pub n: usize,
    pub m: Option<usize>,
    pub method: String,
    pub value: Option<f64>,
    pub std_error: Option<f64>,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ErrorEntry {
    pub point: usize,
    pub n: usize,
    pub method: String,
    pub x: Option<f64>,
    pub message: String,
}

#[derive(Debug, Default)]
pub struct RunOutput {
    pub rows: Vec<Row>,
    pub errors: Vec<ErrorEntry>,
}

#[derive(Debug, Clone)]
enum Outcome {
    Value { value: f64, std_error: Option<f64>, flags: Vec<String> },
    Unavailable,
    Failed(String),
}

impl Outcome {
    fn plain(v: f64) -> Self {
        Self::Value { value: v, std_error: None, flags: Vec::new() }
    }

    fn from_result(r: Result<f64, Error>) -> Self {
        match r {
            Ok(v) => Self::plain(v),
            Err(e) => Self::from_error(e),
        }
    }

    fn from_error(e: Error) -> Self {
        match e {
            Error::MethodUnavailable { .. } | Error::DegenerateOrder(_) => Self::Unavailable,
            other => Self::Failed(other.to_string()),
        }
    }

    fn value(&self) -> Option<f64> {
        match self {
            Self::Value { value, .. } => Some(*value),
            _ => None,
        }
    }
}

fn db(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

/// Per-model evaluators, built once.
struct Context {
    columns: Vec<Vec<NakagamiParams>>,
    irs: Option<IrsEvaluator>,
    exact: Result<ExactEngine, Error>,
    series: Result<Series, Error>,
    asymptotic: Result<AsymptoticForm, Error>,
    clt: Result<Baseline, Error>,
    gamma: Result<Baseline, Error>,
}

impl Context {
    fn new(model: &ModelInstance, series_cfg: &SeriesConfig) -> Self {
        let inv = InvLaplaceConfig::default();
        let (columns, irs, double) = match model {
            ModelInstance::Irs(m) => {
                (m.columns(), IrsEvaluator::new(m, *series_cfg, inv).ok(), m.double_iid())
            }
            ModelInstance::SumProduct(m) => {
                let d = if m.l() == 2 {
                    let c = &m.columns()[0];
                    DoubleIidModel::new(c[0].m(), c[1].m(), c[0].omega(), c[1].omega(), m.n())
                } else {
                    Err(Error::MethodUnavailable {
                        method: "series".into(),
                        reason: format!("the series needs two links per branch, model has {}", m.l()),
                    })
                };
                (m.columns().to_vec(), None, d)
            }
        };
        let exact = ExactEngine::new(&columns, Default::default(), inv);
        let series = double.and_then(|d| Series::new(&d, series_cfg));
        let asymptotic = AsymptoticForm::from_columns(&columns);
        let clt = CltApprox::from_columns(&columns).map(Baseline::Clt);
        let gamma = GammaApprox::from_columns(&columns).map(Baseline::Gamma);
        Self { columns, irs, exact, series, asymptotic, clt, gamma }
    }

    fn irs(&self) -> Result<&IrsEvaluator, Error> {
        self.irs.as_ref().ok_or_else(|| match &self.exact {
            Err(e) => e.clone(),
            Ok(_) => Error::MethodUnavailable { method: "irs".into(), reason: "not an IRS model".into() },
        })
    }

    fn baseline(&self, m: Method) -> Result<&Baseline, Error> {
        match m {
            Method::Clt => self.clt.as_ref().map_err(Clone::clone),
            _ => self.gamma.as_ref().map_err(Clone::clone),
        }
    }

    fn series_flags(&self) -> Vec<String> {
        match self.series.as_ref().ok().and_then(|s| s.offset()) {
            Some(e) => vec![format!("eps={e:e}")],
            None => Vec::new(),
        }
    }

    fn metric_method(m: Method) -> MetricMethod {
        match m {
            Method::Series => MetricMethod::ExactSeries,
            Method::Upper => MetricMethod::UpperBound,
            _ => MetricMethod::ExactNumeric,
        }
    }

    /// OP (`modulation == None`) or ASER at one ρ.
    fn link_metric(&self, v: &Validated, method: Method, rho: f64, mc: &McConfig) -> Outcome {
        let gth = v.config.gamma_th_db.map(db);
        let modulation = v.modulation.as_ref();
        let out = match method {
            Method::Exact | Method::Series | Method::Upper => {
                let mm = Self::metric_method(method);
                self.irs().and_then(|e| match modulation {
                    Some(md) if v.config.scenario == Scenario::Aser => e.aser(md, rho, mm),
                    _ => e.outage(gth.unwrap_or(0.0), rho, mm),
                })
            }
            Method::Clt | Method::Gamma => self.baseline(method).and_then(|b| match modulation {
                Some(md) if v.config.scenario == Scenario::Aser => b.aser(md, rho),
                _ => b.outage(gth.unwrap_or(0.0), rho),
            }),
            Method::Mc => {
                let est = match modulation {
                    Some(md) if v.config.scenario == Scenario::Aser => {
                        simkit::mc_aser(self.columns.as_slice(), md, rho, mc)
                    }
                    _ => simkit::mc_outage(self.columns.as_slice(), gth.unwrap_or(0.0), rho, mc),
                };
                return match est {
                    Ok(e) => Outcome::Value { value: e.estimate, std_error: Some(e.std_error), flags: Vec::new() },
                    Err(e) => Outcome::from_error(e),
                };
            }
        };
        let mut o = Outcome::from_result(out);
        if method == Method::Series {
            if let Outcome::Value { flags, .. } = &mut o {
                *flags = self.series_flags();
            }
        }
        o
    }

    fn pdf(&self, method: Method, h: f64) -> Outcome {
        match method {
            Method::Exact => Outcome::from_result(self.exact.as_ref().map_err(Clone::clone).and_then(|e| e.pdf(h))),
            Method::Series => match &self.series {
                Ok(s) => {
                    let p = s.pdf(h);
                    let mut flags = self.series_flags();
                    if p.clamped() {
                        flags.push("clamped".into());
                    }
                    Outcome::Value { value: p.value, std_error: None, flags }
                }
                Err(e) => Outcome::from_error(e.clone()),
            },
            Method::Upper => Outcome::from_result(self.asymptotic.as_ref().map(|a| a.pdf(h)).map_err(Clone::clone)),
            Method::Clt | Method::Gamma => {
                Outcome::from_result(self.baseline(method).map(|b| b.pdf(h)))
            }
            Method::Mc => unreachable!("histograms are built per model"),
        }
    }

    fn mgf(&self, method: Method, s: f64, mc: &McConfig) -> Outcome {
        match method {
            Method::Exact => Outcome::from_result(self.exact.as_ref().map_err(Clone::clone).and_then(|e| e.mgf(s))),
            Method::Series => match &self.series {
                Ok(x) => Outcome::Value { value: x.mgf(s), std_error: None, flags: self.series_flags() },
                Err(e) => Outcome::from_error(e.clone()),
            },
            Method::Upper => Outcome::from_result(self.asymptotic.as_ref().map(|a| a.mgf(s)).map_err(Clone::clone)),
            Method::Clt | Method::Gamma => {
                Outcome::from_result(self.baseline(method).map(|b| b.mgf(s)))
            }
            Method::Mc => match simkit::mc_mgf(self.columns.as_slice(), s, mc) {
                Ok(e) => Outcome::Value { value: e.estimate, std_error: Some(e.std_error), flags: Vec::new() },
                Err(e) => Outcome::from_error(e),
            },
        }
    }
}

struct Sink<'a> {
    v: &'a Validated,
    out: RunOutput,
}

impl Sink<'_> {
    /// Appends a row for `o`; `x` is the abscissa used in error records.
    fn push(&mut self, model: &ModelInstance, method: &str, rho_db: Option<f64>, x: Option<f64>, extra: Vec<String>, o: Outcome) {
        let point = self.out.rows.len();
        let (value, std_error, mut flags) = match o {
            Outcome::Value { value, std_error, flags } => (Some(value), std_error, {
                let mut f = vec!["ok".to_string()];
                f.extend(flags);
                f
            }),
            Outcome::Unavailable => (None, None, vec!["unavailable".to_string()]),
            Outcome::Failed(msg) => {
                self.out.errors.push(ErrorEntry { point, n: model.n(), method: method.into(), x, message: msg });
                (None, None, vec!["error".to_string()])
            }
        };
        flags.extend(extra);
        let gamma_th_db = match self.v.config.scenario {
            Scenario::Op | Scenario::Diversity => self.v.config.gamma_th_db,
            _ => None,
        };
        self.out.rows.push(Row {
            rho_db,
            gamma_th_db,
            n: model.n(),
            m: model.antennas(),
            method: method.into(),
            value,
            std_error,
            flags,
        });
    }
}

pub fn execute(v: &Validated) -> RunOutput {
    let contexts: Vec<Context> = v.models.par_iter().map(|m| Context::new(m, &v.series)).collect();
    let mut sink = Sink { v, out: RunOutput::default() };
    let methods = &v.config.methods;
    match v.config.scenario {
        Scenario::Op | Scenario::Aser | Scenario::Diversity => link_sweep(v, &contexts, &mut sink),
        Scenario::Pdf => {
            let grid = v.config.h_grid.expect("validated");
            let hs = grid.values();
            let step = grid.step();
            for (j, (model, ctx)) in v.models.iter().zip(&contexts).enumerate() {
                for (k, &method) in methods.iter().enumerate() {
                    let (points, outcomes): (Vec<f64>, Vec<Outcome>) = if method == Method::Mc {
                        let cfg = McConfig { histogram_bins: hs.len(), ..v.mc.at_point(point_id(j, k, 0, methods.len(), 1)) };
                        let range = (hs[0] - 0.5 * step, hs[hs.len() - 1] + 0.5 * step);
                        match simkit::mc_histogram(ctx.columns.as_slice(), &cfg, Some(range)) {
                            Ok(hist) => (
                                hist.centers(),
                                hist.density
                                    .iter()
                                    .zip(&hist.std_error)
                                    .map(|(&d, &e)| Outcome::Value { value: d, std_error: Some(e), flags: Vec::new() })
                                    .collect(),
                            ),
                            Err(e) => (hs.clone(), vec![Outcome::from_error(e); hs.len()]),
                        }
                    } else {
                        (hs.clone(), hs.par_iter().map(|&h| ctx.pdf(method, h)).collect())
                    };
                    let mut mass = 0.0;
                    let mut complete = true;
                    for (h, o) in points.iter().zip(outcomes) {
                        match o.value() {
                            Some(d) => mass += d * step,
                            None => complete = false,
                        }
                        sink.push(model, method.name(), None, Some(*h), vec![format!("h={h:e}")], o);
                    }
                    let mo = if complete { Outcome::plain(mass) } else { Outcome::Unavailable };
                    sink.push(model, method.name(), None, None, vec!["mass".into()], mo);
                }
            }
        }
        Scenario::Mgf => {
            let ss = v.config.s_grid.clone().expect("validated");
            for (j, (model, ctx)) in v.models.iter().zip(&contexts).enumerate() {
                for (k, &method) in methods.iter().enumerate() {
                    let outcomes: Vec<Outcome> = ss
                        .par_iter()
                        .enumerate()
                        .map(|(i, &s)| ctx.mgf(method, s, &v.mc.at_point(point_id(j, k, i, methods.len(), ss.len()))))
                        .collect();
                    for (s, o) in ss.iter().zip(outcomes) {
                        sink.push(model, method.name(), None, Some(*s), vec![format!("s={s:e}")], o);
                    }
                }
            }
        }
    }
    sink.out
}

fn point_id(j: usize, k: usize, i: usize, methods: usize, grid: usize) -> u32 {
    ((j * methods + k) * grid + i) as u32
}

fn link_sweep(v: &Validated, contexts: &[Context], sink: &mut Sink<'_>) {
    let methods = &v.config.methods;
    let grid = &v.config.rho_grid_db;
    for (j, (model, ctx)) in v.models.iter().zip(contexts).enumerate() {
        let mut curves: Vec<(Method, Vec<Outcome>)> = Vec::new();
        for (k, &method) in methods.iter().enumerate() {
            let outcomes: Vec<Outcome> = grid
                .par_iter()
                .enumerate()
                .map(|(i, &r)| ctx.link_metric(v, method, db(r), &v.mc.at_point(point_id(j, k, i, methods.len(), grid.len()))))
                .collect();
            for (&r, o) in grid.iter().zip(&outcomes) {
                let extra = if method == Method::Upper { vec!["bound".to_string()] } else { Vec::new() };
                sink.push(model, method.name(), Some(r), Some(r), extra, o.clone());
            }
            curves.push((method, outcomes));
        }
        let find = |m: Method| curves.iter().find(|(x, _)| *x == m).map(|(_, o)| o);
        if let (Some(ex), Some(up)) = (find(Method::Exact), find(Method::Upper)) {
            let both: Vec<(f64, f64, f64)> = grid
                .iter()
                .zip(ex.iter().zip(up))
                .filter_map(|(&r, (e, u))| Some((r, e.value()?, u.value()?)))
                .collect();
            let gap = BoundGap::new(
                both.iter().map(|x| x.0).collect(),
                &both.iter().map(|x| x.2).collect::<Vec<_>>(),
                &both.iter().map(|x| x.1).collect::<Vec<_>>(),
            );
            for (i, (&r, &q)) in gap.rho.iter().zip(&gap.ratio).enumerate() {
                let mut extra = Vec::new();
                if gap.crossover == Some(i) {
                    extra.push("crossover".to_string());
                }
                if gap.crossover.is_some_and(|c| i >= c) {
                    extra.push("trusted".to_string());
                }
                sink.push(model, "upper_ratio", Some(r), Some(r), extra, Outcome::plain(q));
            }
        }
        if v.config.scenario == Scenario::Diversity {
            for (method, outcomes) in &curves {
                let curve: Vec<(f64, f64)> =
                    grid.iter().zip(outcomes).filter_map(|(&r, o)| Some((db(r), o.value()?))).collect();
                let o = match empirical_diversity_slope(&curve) {
                    Ok(s) => Outcome::plain(s),
                    Err(Error::InsufficientRegime(_)) => Outcome::Unavailable,
                    Err(e) => Outcome::from_error(e),
                };
                let extra = if matches!(o, Outcome::Unavailable) { vec!["insufficient_regime".into()] } else { Vec::new() };
                sink.push(model, &format!("{}_slope", method.name()), None, None, extra, o);
            }
            let theory = match model {
                ModelInstance::Irs(m) => Outcome::from_result(m.diversity_order()),
                ModelInstance::SumProduct(_) => Outcome::Unavailable,
            };
            sink.push(model, "diversity_order", None, None, Vec::new(), theory);
        }
    }
}
