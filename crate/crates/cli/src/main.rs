//! `cascade`: batch sweeps and single-point queries for sum-of-products
//! Nakagami channels and reflecting-surface links.

mod config;
mod output;
mod plot;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::config::{Scenario, Validated};
use crate::run::ErrorEntry;

#[derive(Debug)]
pub enum CliError {
    Schema(String),
    Evaluator(Vec<ErrorEntry>),
    Io(String),
}

impl CliError {
    pub fn schema(msg: impl Into<String>) -> Self {
        Self::Schema(msg.into())
    }

    pub fn io(msg: impl Into<String>) -> Self {
        Self::Io(msg.into())
    }

    fn code(&self) -> u8 {
        match self {
            Self::Schema(_) => 2,
            Self::Evaluator(_) => 3,
            Self::Io(_) => 4,
        }
    }

    fn record(&self) -> serde_json::Value {
        match self {
            Self::Schema(m) => json!({"status": "error", "kind": "schema", "exit_code": 2, "message": m}),
            Self::Evaluator(errs) => json!({
                "status": "error",
                "kind": "evaluator",
                "exit_code": 3,
                "message": format!("{} point(s) failed", errs.len()),
                "errors": errs,
            }),
            Self::Io(m) => json!({"status": "error", "kind": "io", "exit_code": 4, "message": m}),
        }
    }
}

#[derive(Parser)]
#[command(name = "cascade", version, about = "Sum-of-products Nakagami statistics and reflecting-surface link metrics")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a run configuration without evaluating it.
    Validate { config: PathBuf },
    /// Evaluate a configuration and write its CSV (and plot script, if configured).
    Run {
        config: PathBuf,
        /// Worker threads (default: all cores). Output does not depend on this.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Write a matplotlib script for an existing CSV.
    Plot {
        csv: PathBuf,
        #[arg(long, value_enum)]
        scenario: ScenarioArg,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Evaluate one metric at one point and print JSON.
    Query(QueryArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioArg {
    Pdf,
    Op,
    Aser,
    Mgf,
    Diversity,
}

impl ScenarioArg {
    fn scenario(self) -> Scenario {
        match self {
            Self::Pdf => Scenario::Pdf,
            Self::Op => Scenario::Op,
            Self::Aser => Scenario::Aser,
            Self::Mgf => Scenario::Mgf,
            Self::Diversity => Scenario::Diversity,
        }
    }
}

#[derive(clap::Args)]
struct QueryArgs {
    /// op, aser, mgf or diversity.
    #[arg(value_enum)]
    metric: QueryMetric,
    /// Number of reflecting elements.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    antennas: usize,
    /// Source-surface link as `m:omega` (omega = m / E[X²]).
    #[arg(long, value_parser = parse_link)]
    si: (f64, f64),
    /// Surface-destination link as `m:omega`.
    #[arg(long, value_parser = parse_link)]
    id: (f64, f64),
    /// Optional direct link as `m:omega`.
    #[arg(long, value_parser = parse_link)]
    sd: Option<(f64, f64)>,
    #[arg(long, default_value = "exact")]
    method: String,
    #[arg(long)]
    rho_db: Option<f64>,
    #[arg(long)]
    gamma_th_db: Option<f64>,
    #[arg(long)]
    modulation: Option<String>,
    #[arg(long)]
    order: Option<u32>,
    /// MGF argument.
    #[arg(long)]
    s: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum QueryMetric {
    Op,
    Aser,
    Mgf,
    Diversity,
}

fn parse_link(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected m:omega, got {s}"))?;
    let m = a.trim().parse::<f64>().map_err(|e| format!("{a}: {e}"))?;
    let w = b.trim().parse::<f64>().map_err(|e| format!("{b}: {e}"))?;
    Ok((m, w))
}

fn set_threads(threads: Option<usize>) -> Result<(), CliError> {
    if let Some(t) = threads {
        if t == 0 {
            return Err(CliError::schema("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::io(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn run_validated(v: &Validated) -> Result<(), CliError> {
    let out = run::execute(v);
    output::write_csv_file(&v.csv_path, &out.rows)?;
    if let Some(p) = &v.plot_path {
        plot::emit(&v.csv_path, v.config.scenario, p)?;
    }
    if out.errors.is_empty() {
        Ok(())
    } else {
        Err(CliError::Evaluator(out.errors))
    }
}

fn query(q: &QueryArgs) -> Result<(), CliError> {
    let link = |(m, w): (f64, f64)| json!({"m": m, "omega": w});
    let mut model = json!({"kind": "irs", "n": q.n, "antennas": q.antennas, "si": link(q.si), "id": link(q.id)});
    if let Some(sd) = q.sd {
        model["direct"] = link(sd);
    }
    if let QueryMetric::Diversity = q.metric {
        let cfg = json!({
            "schema_version": config::SCHEMA_VERSION, "scenario": "op", "model": model, "methods": ["exact"],
            "rho_grid_db": [0.0], "gamma_th_db": 0.0, "output": {"csv": "-"}
        });
        let v = config::validate(serde_json::from_value(cfg).map_err(|e| CliError::schema(e.to_string()))?, ".".as_ref())?;
        let config::ModelInstance::Irs(m) = &v.models[0] else { unreachable!() };
        let rec = match m.diversity_order() {
            Ok(d) => json!({"metric": "diversity", "value": d, "flags": ["ok"]}),
            Err(e) => json!({"metric": "diversity", "value": null, "flags": ["unavailable"], "message": e.to_string()}),
        };
        println!("{rec}");
        return Ok(());
    }
    let mut cfg = json!({
        "schema_version": config::SCHEMA_VERSION,
        "model": model,
        "methods": [q.method],
        "mc": {"master_seed": q.seed, "trials": q.trials},
        "output": {"csv": "-"},
    });
    let rho = || q.rho_db.ok_or_else(|| CliError::schema("--rho-db is required"));
    match q.metric {
        QueryMetric::Op => {
            cfg["scenario"] = json!("op");
            cfg["rho_grid_db"] = json!([rho()?]);
            cfg["gamma_th_db"] = json!(q.gamma_th_db.ok_or_else(|| CliError::schema("--gamma-th-db is required"))?);
        }
        QueryMetric::Aser => {
            cfg["scenario"] = json!("aser");
            cfg["rho_grid_db"] = json!([rho()?]);
            let name = q.modulation.clone().ok_or_else(|| CliError::schema("--modulation is required"))?;
            cfg["modulation"] = json!({"name": name, "order": q.order});
        }
        QueryMetric::Mgf => {
            cfg["scenario"] = json!("mgf");
            cfg["s_grid"] = json!([q.s.ok_or_else(|| CliError::schema("--s is required"))?]);
        }
        QueryMetric::Diversity => unreachable!(),
    }
    let rc = serde_json::from_value(cfg).map_err(|e| CliError::schema(e.to_string()))?;
    let v = config::validate(rc, ".".as_ref())?;
    let out = run::execute(&v);
    if let Some(r) = out.rows.first() {
        println!(
            "{}",
            json!({"metric": v.config.scenario.name(), "method": r.method, "value": r.value, "std_error": r.std_error, "flags": r.flags})
        );
    }
    if out.errors.is_empty() {
        Ok(())
    } else {
        Err(CliError::Evaluator(out.errors))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Validate { config } => config::load(config).map(|v| {
            println!("{}", json!({"status": "ok", "scenario": v.config.scenario.name(), "models": v.models.len()}));
        }),
        Cmd::Run { config, threads } => set_threads(*threads).and_then(|_| config::load(config)).and_then(|v| run_validated(&v)),
        Cmd::Plot { csv, scenario, out } => plot::emit(csv, scenario.scenario(), out),
        Cmd::Query(q) => query(q),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.code())
        }
    }
}
