//! Run configuration (JSON) and its validation.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use cascade::irs::{IrsModel, ModulationSpec};
use cascade::nakagami::NakagamiParams;
use cascade::simkit::McConfig;
use cascade::sumprod::{SeriesConfig, SumProductModel};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Pdf,
    Op,
    Aser,
    Mgf,
    Diversity,
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Pdf => "pdf",
            Self::Op => "op",
            Self::Aser => "aser",
            Self::Mgf => "mgf",
            Self::Diversity => "diversity",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Series,
    Upper,
    Clt,
    Gamma,
    Mc,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::Series => "series",
            Self::Upper => "upper",
            Self::Clt => "clt",
            Self::Gamma => "gamma",
            Self::Mc => "mc",
        }
    }
}

/// One Nakagami link: `m` plus exactly one of `omega` (rate, m / E[X²]) or `mean_power` (E[X²]).
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkBlock {
    pub m: f64,
    pub omega: Option<f64>,
    pub mean_power: Option<f64>,
}

impl LinkBlock {
    pub fn params(&self, what: &str) -> Result<NakagamiParams, CliError> {
        let r = match (self.omega, self.mean_power) {
            (Some(w), None) => NakagamiParams::new(self.m, w),
            (None, Some(p)) => NakagamiParams::from_mean_power(self.m, p),
            _ => return Err(CliError::schema(format!("{what}: give exactly one of omega or mean_power"))),
        };
        r.map_err(|e| CliError::schema(format!("{what}: {e}")))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(usize),
    Many(Vec<usize>),
}

impl OneOrMany {
    pub fn values(&self) -> Vec<usize> {
        match self {
            Self::One(n) => vec![*n],
            Self::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelBlock {
    Irs {
        n: OneOrMany,
        #[serde(default = "one")]
        antennas: usize,
        si: LinkBlock,
        id: LinkBlock,
        direct: Option<LinkBlock>,
    },
    /// N i.i.d. branches, each the product of the links in `column`.
    SumProduct { n: OneOrMany, column: Vec<LinkBlock> },
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulationBlock {
    pub name: String,
    pub order: Option<u32>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl GridBlock {
    pub fn values(&self) -> Vec<f64> {
        let step = self.step();
        (0..self.points).map(|i| self.start + step * i as f64).collect()
    }

    pub fn step(&self) -> f64 {
        (self.stop - self.start) / (self.points - 1) as f64
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesBlock {
    #[serde(default = "default_order")]
    pub order_i: usize,
    #[serde(default = "default_eps")]
    pub epsilon_offset: f64,
    #[serde(default)]
    pub symmetric_offset: bool,
}

fn default_order() -> usize {
    4
}

fn default_eps() -> f64 {
    1e-4
}

impl Default for SeriesBlock {
    fn default() -> Self {
        Self { order_i: default_order(), epsilon_offset: default_eps(), symmetric_offset: false }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McBlock {
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default = "default_bins")]
    pub histogram_bins: usize,
}

fn default_trials() -> u64 {
    10_000
}

fn default_bins() -> usize {
    50
}

impl Default for McBlock {
    fn default() -> Self {
        Self { master_seed: 0, trials: default_trials(), histogram_bins: default_bins() }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub csv: PathBuf,
    pub plot_script: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub scenario: Scenario,
    pub model: ModelBlock,
    pub methods: Vec<Method>,
    #[serde(default)]
    pub rho_grid_db: Vec<f64>,
    pub gamma_th_db: Option<f64>,
    pub modulation: Option<ModulationBlock>,
    pub h_grid: Option<GridBlock>,
    pub s_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub series: SeriesBlock,
    #[serde(default)]
    pub mc: McBlock,
    pub output: OutputBlock,
}

/// A model instance for one value of N.
#[derive(Debug, Clone)]
pub enum ModelInstance {
    Irs(IrsModel),
    SumProduct(SumProductModel),
}

impl ModelInstance {
    pub fn n(&self) -> usize {
        match self {
            Self::Irs(m) => m.elements_n,
            Self::SumProduct(m) => m.n(),
        }
    }

    /// Antenna count, reported in the `m` CSV column.
    pub fn antennas(&self) -> Option<usize> {
        match self {
            Self::Irs(m) => Some(m.antennas_m),
            Self::SumProduct(_) => None,
        }
    }
}

/// A validated configuration with resolved paths and domain objects.
#[derive(Debug, Clone)]
pub struct Validated {
    pub config: RunConfig,
    pub models: Vec<ModelInstance>,
    pub modulation: Option<ModulationSpec>,
    pub series: SeriesConfig,
    pub mc: McConfig,
    pub csv_path: PathBuf,
    pub plot_path: Option<PathBuf>,
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite()) && v.windows(2).all(|w| w[1] > w[0])
}

pub fn load(path: &Path) -> Result<Validated, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    let config: RunConfig =
        serde_json::from_str(&text).map_err(|e| CliError::schema(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    validate(config, base)
}

/// Checks `config`; relative output paths are resolved against `base`.
pub fn validate(config: RunConfig, base: &Path) -> Result<Validated, CliError> {
    let schema = CliError::schema;
    if config.schema_version != SCHEMA_VERSION {
        return Err(schema(format!(
            "schema_version {} is not supported (expected {SCHEMA_VERSION})",
            config.schema_version
        )));
    }
    if config.methods.is_empty() {
        return Err(schema("methods: at least one method is required".into()));
    }
    for (i, m) in config.methods.iter().enumerate() {
        if config.methods[..i].contains(m) {
            return Err(schema(format!("methods: {} listed twice", m.name())));
        }
    }
    let sc = config.scenario;
    let needs_rho = matches!(sc, Scenario::Op | Scenario::Aser | Scenario::Diversity);
    if needs_rho {
        if config.rho_grid_db.is_empty() {
            return Err(schema("rho_grid_db: must be non-empty".into()));
        }
        if !strictly_increasing(&config.rho_grid_db) {
            return Err(schema("rho_grid_db: must be finite and strictly increasing".into()));
        }
    } else if !config.rho_grid_db.is_empty() {
        return Err(schema(format!("rho_grid_db: not used by the {} scenario", sc.name())));
    }
    if matches!(sc, Scenario::Op | Scenario::Diversity) {
        match config.gamma_th_db {
            Some(g) if g.is_finite() => {}
            _ => return Err(schema("gamma_th_db: required for op and diversity".into())),
        }
    }
    let modulation = match (sc, &config.modulation) {
        (Scenario::Aser, Some(m)) => {
            Some(ModulationSpec::from_name(&m.name, m.order).map_err(|e| schema(format!("modulation: {e}")))?)
        }
        (Scenario::Aser, None) => return Err(schema("modulation: required for aser".into())),
        _ => None,
    };
    if sc == Scenario::Pdf {
        let g = config.h_grid.ok_or_else(|| schema("h_grid: required for pdf".into()))?;
        if !(g.points >= 2 && g.start >= 0.0 && g.stop > g.start && g.stop.is_finite()) {
            return Err(schema("h_grid: need 0 ≤ start < stop and points ≥ 2".into()));
        }
        if config.methods.contains(&Method::Mc) && g.start < 0.5 * g.step() {
            return Err(schema("h_grid: with mc, start must be at least half a step so bins fit above 0".into()));
        }
    }
    if sc == Scenario::Mgf {
        let s = config.s_grid.as_deref().unwrap_or(&[]);
        if s.is_empty() || !strictly_increasing(s) || s[0] < 0.0 {
            return Err(schema("s_grid: required for mgf; non-negative, non-empty, strictly increasing".into()));
        }
    }
    let ns = match &config.model {
        ModelBlock::Irs { n, .. } | ModelBlock::SumProduct { n, .. } => n.values(),
    };
    if ns.is_empty() || ns.contains(&0) {
        return Err(schema("model.n: need one or more positive values".into()));
    }
    let mut models = Vec::new();
    match &config.model {
        ModelBlock::Irs { antennas, si, id, direct, .. } => {
            let si = si.params("model.si")?;
            let id = id.params("model.id")?;
            let direct = direct.map(|d| d.params("model.direct")).transpose()?;
            for &n in &ns {
                models.push(ModelInstance::Irs(
                    IrsModel::new(n, *antennas, si, id, direct).map_err(|e| schema(format!("model: {e}")))?,
                ));
            }
        }
        ModelBlock::SumProduct { column, .. } => {
            if needs_rho {
                return Err(schema(format!("model: the {} scenario needs kind \"irs\"", sc.name())));
            }
            if column.is_empty() {
                return Err(schema("model.column: at least one link".into()));
            }
            let col = column
                .iter()
                .enumerate()
                .map(|(i, l)| l.params(&format!("model.column[{i}]")))
                .collect::<Result<Vec<_>, _>>()?;
            for &n in &ns {
                models.push(ModelInstance::SumProduct(
                    SumProductModel::iid(&col, n).map_err(|e| schema(format!("model: {e}")))?,
                ));
            }
        }
    }
    let s = config.series;
    if s.order_i > cascade::sumprod::series::MAX_ORDER || !(s.epsilon_offset > 0.0 && s.epsilon_offset < 0.5) {
        return Err(schema(format!(
            "series: order_i must be ≤ {} and epsilon_offset in (0, 0.5)",
            cascade::sumprod::series::MAX_ORDER
        )));
    }
    let series = SeriesConfig { order_i: s.order_i, epsilon_offset: s.epsilon_offset, symmetric_offset: s.symmetric_offset };
    let mc = McConfig::new(config.mc.master_seed, config.mc.trials, config.mc.histogram_bins)
        .map_err(|e| schema(format!("mc: {e}")))?;
    let csv_path = base.join(&config.output.csv);
    let plot_path = config.output.plot_script.as_ref().map(|p| base.join(p));
    Ok(Validated { config, models, modulation, series, mc, csv_path, plot_path })
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn check(v: serde_json::Value) -> Result<Validated, CliError> {
        validate(serde_json::from_value(v).unwrap(), Path::new("/tmp"))
    }

    fn pdf() -> serde_json::Value {
        json!({
            "schema_version": 1,
            "scenario": "pdf",
            "model": {"kind": "sum_product", "n": [1, 3], "column": [{"m": 1, "omega": 1}, {"m": 2, "omega": 1}]},
            "methods": ["exact", "mc"],
            "h_grid": {"start": 0.05, "stop": 4.0, "points": 80},
            "output": {"csv": "o.csv"}
        })
    }

    #[test]
    fn resolves_models_and_paths() {
        let v = check(pdf()).unwrap();
        assert_eq!(v.models.len(), 2);
        assert_eq!(v.models[1].n(), 3);
        assert_eq!(v.csv_path, PathBuf::from("/tmp/o.csv"));
        assert_eq!(v.mc.trials, 10_000);
        assert_eq!(v.series.order_i, 4);
    }

    #[test]
    fn histogram_bins_must_fit_above_zero() {
        let mut c = pdf();
        c["h_grid"]["start"] = json!(0.0);
        assert!(matches!(check(c), Err(CliError::Schema(_))));
    }

    #[test]
    fn link_scenarios_need_an_irs_model() {
        let mut c = pdf();
        c["scenario"] = json!("op");
        c["rho_grid_db"] = json!([0, 1]);
        c["gamma_th_db"] = json!(5);
        let Err(CliError::Schema(m)) = check(c) else { panic!() };
        assert!(m.contains("irs"));
    }

    #[test]
    fn aser_needs_modulation() {
        let c = json!({
            "schema_version": 1,
            "scenario": "aser",
            "model": {"kind": "irs", "n": 1, "si": {"m": 2, "omega": 2}, "id": {"m": 1, "omega": 1}},
            "methods": ["exact"],
            "rho_grid_db": [0],
            "output": {"csv": "o.csv"}
        });
        assert!(check(c.clone()).is_err());
        let mut ok = c;
        ok["modulation"] = json!({"name": "mpsk", "order": 8});
        assert_eq!(check(ok).unwrap().modulation.unwrap().constellation_size, Some(8));
    }
}
