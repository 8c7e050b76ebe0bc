//! `bifront`: critical speeds, fronts and limit profiles from the command line.
//!
//! Exit codes: 0 success, 2 configuration error, 3 solver error,
//! 4 deviation from reference values or a failed invariant.

mod config;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use bifront::golden::appendix_table;
use bifront::profile::{critical_front, make_limit_profile, LimitProfile};
use bifront::reaction::{classify, ReactionCalculus, DEFAULT_GRID};
use bifront::reduction::{Diffusion, ModelParams};
use bifront::speed::{compute_bounds, compute_speed};
use bifront::sweep::run_sweep;
use bifront::validate::run_validation;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use config::{ConfigError, Format, ReactionBlock, RunConfig};
use output::{emit, fmt_opt, fmt_sig, Table};

#[derive(Parser)]
#[command(name = "bifront", version, about = "Traveling fronts with Born-Infeld diffusion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Every applicable analytic speed bound.
    Bounds,
    /// Critical speed (or the reference table with `--golden appendix`).
    Speed,
    /// Critical profile samples `z, v, v'`.
    Profile,
    /// Limit profile of a corner regime.
    Limit,
    /// Parameter study along a coupling.
    Sweep,
    /// Cross-module invariant suite.
    Validate,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Golden {
    Appendix,
}

#[derive(Args)]
struct Global {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Run a reference table instead of a single solve.
    #[arg(long, global = true, value_enum)]
    golden: Option<Golden>,
    /// Accepted for reproducibility scripts; nothing here is random.
    #[arg(long, global = true)]
    seedless: bool,
    /// Worker threads for parallel subcommands.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Print the effective configuration and exit.
    #[arg(long, global = true)]
    dump_config: bool,
    /// Catalog reaction name (overrides the config).
    #[arg(long, global = true)]
    reaction: Option<String>,
    /// Catalog reaction parameter.
    #[arg(long, global = true)]
    reaction_param: Option<f64>,
    #[arg(long, global = true)]
    a: Option<f64>,
    #[arg(long, global = true)]
    b: Option<f64>,
    /// Limit regime (kebab-case, e.g. singular-perturbation).
    #[arg(long, global = true)]
    regime: Option<String>,
    /// Significant digits of printed numbers.
    #[arg(long, global = true)]
    digits: Option<usize>,
}

enum Failure {
    Config(ConfigError),
    Solver(bifront::Error),
    Deviation(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<bifront::Error> for Failure {
    fn from(e: bifront::Error) -> Self {
        Failure::Solver(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Config(ConfigError::new("output.path", e.to_string()))
    }
}

/// Flags > config file > defaults.
fn effective_config(g: &Global) -> Result<RunConfig, ConfigError> {
    let mut cfg = match &g.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(name) = &g.reaction {
        cfg.reaction = Some(ReactionBlock::Catalog { catalog: name.clone(), param: g.reaction_param });
    } else if let Some(p) = g.reaction_param {
        match &mut cfg.reaction {
            Some(ReactionBlock::Catalog { param, .. }) => *param = Some(p),
            _ => return Err(ConfigError::new("reaction", "--reaction-param needs a catalog reaction")),
        }
    }
    if g.a.is_some() || g.b.is_some() {
        cfg.model.a = g.a.or(cfg.model.a);
        cfg.model.b = g.b.or(cfg.model.b);
    }
    if let Some(r) = &g.regime {
        cfg.limit.regime = serde_json::from_value(json!(r))
            .map_err(|_| ConfigError::new("limit.regime", format!("unknown regime '{r}'")))?;
    }
    if let Some(f) = g.format {
        cfg.output.format = f;
    }
    if let Some(o) = &g.out {
        cfg.output.path = Some(o.clone());
    }
    if let Some(d) = g.digits {
        cfg.output.digits = d;
    }
    cfg.validate_solver()?;
    Ok(cfg)
}

fn calculus(cfg: &RunConfig) -> Result<ReactionCalculus<f64>, Failure> {
    let spec = cfg.reaction_spec()?;
    classify::<f64>(&spec, DEFAULT_GRID).map_err(|e| match e {
        bifront::Error::Unbounded => Failure::Solver(e),
        other => Failure::Config(ConfigError::new("reaction", other.to_string())),
    })
}

fn params(cfg: &RunConfig) -> Result<ModelParams<f64>, Failure> {
    let (a, b) = cfg.point()?;
    ModelParams::new(a, b).map_err(|e| Failure::Config(ConfigError::new("model", e.to_string())))
}

struct Outcome {
    table: Table,
    json: serde_json::Value,
    deviation: Option<String>,
}

fn cmd_bounds(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let calc = calculus(cfg)?;
    let p = params(cfg)?;
    let bounds = compute_bounds(&calc, &p)?;
    let d = cfg.output.digits;
    let mut table = Table::new(vec!["bound", "value"]);
    for (name, v) in bounds.named() {
        table.push(vec![name.into(), fmt_opt(v, d)]);
    }
    table.push(vec!["best_lower".into(), fmt_sig(bounds.best_lower(), d)]);
    table.push(vec!["best_upper".into(), fmt_sig(bounds.best_upper(), d)]);
    let json = json!({ "reaction": calc.name, "a": p.a(), "b": p.b(), "bounds": bounds });
    Ok(Outcome { table, json, deviation: None })
}

fn cmd_speed(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let calc = calculus(cfg)?;
    let p = params(cfg)?;
    let r = compute_speed(&calc, &p, &cfg.solver)?;
    let d = cfg.output.digits;
    let mut table = Table::new(vec![
        "reaction",
        "a",
        "b",
        "c_star",
        "best_lower",
        "best_upper",
        "iterations",
        "matching_residual",
        "attained_lower_bound",
    ]);
    table.push(vec![
        calc.name.clone(),
        fmt_sig(p.a(), d),
        fmt_sig(p.b(), d),
        fmt_sig(r.c_star, d),
        fmt_sig(r.bounds.best_lower(), d),
        fmt_sig(r.bounds.best_upper(), d),
        r.iterations.to_string(),
        fmt_sig(r.matching_residual, d),
        r.attained_lower_bound.to_string(),
    ]);
    let json = json!({ "reaction": calc.name, "a": p.a(), "b": p.b(), "result": r });
    Ok(Outcome { table, json, deviation: None })
}

#[derive(Serialize)]
struct GoldenRow {
    row: &'static str,
    parameter: f64,
    a: f64,
    b: f64,
    expected: f64,
    c_star: Option<f64>,
    deviation: Option<f64>,
    tolerance: f64,
    pass: bool,
    error: Option<String>,
}

fn cmd_golden(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let rows: Vec<GoldenRow> = appendix_table()
        .par_iter()
        .map(|cell| {
            let solved = classify::<f64>(&cell.reaction, DEFAULT_GRID)
                .and_then(|calc| compute_speed(&calc, &ModelParams::new(cell.a, cell.b)?, &cfg.solver));
            let (c_star, error) = match solved {
                Ok(r) => (Some(r.c_star), None),
                Err(e) => (None, Some(e.to_string())),
            };
            GoldenRow {
                row: cell.row,
                parameter: cell.parameter,
                a: cell.a,
                b: cell.b,
                expected: cell.expected,
                c_star,
                deviation: c_star.map(|c| c - cell.expected),
                tolerance: cell.tolerance(),
                pass: c_star.is_some_and(|c| cell.accepts(c)),
                error,
            }
        })
        .collect();
    let d = cfg.output.digits;
    let mut table = Table::new(vec![
        "row",
        "parameter",
        "a",
        "b",
        "expected",
        "c_star",
        "c_star_3",
        "deviation",
        "tolerance",
        "pass",
        "error",
    ]);
    for r in &rows {
        table.push(vec![
            r.row.into(),
            fmt_sig(r.parameter, d),
            fmt_sig(r.a, d),
            fmt_sig(r.b, d),
            format!("{:.3}", r.expected),
            fmt_opt(r.c_star, d),
            r.c_star.map(|c| format!("{c:.3}")).unwrap_or_default(),
            fmt_opt(r.deviation, d),
            fmt_sig(r.tolerance, d),
            r.pass.to_string(),
            r.error.clone().unwrap_or_default(),
        ]);
    }
    let passed = rows.iter().filter(|r| r.pass).count();
    let deviation = (passed < rows.len()).then(|| format!("{passed}/{} reference cells within tolerance", rows.len()));
    Ok(Outcome { table, json: json!({ "cells": rows, "passed": passed }), deviation })
}

fn cmd_profile(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let calc = calculus(cfg)?;
    let p = params(cfg)?;
    let (speed, _, prof) = critical_front(&calc, &Diffusion::born_infeld(p), &cfg.solver)?;
    let d = cfg.output.digits;
    let mut table = Table::new(vec!["z", "v", "dv"]);
    for s in &prof.samples {
        table.push(vec![fmt_sig(s.z, d), fmt_sig(s.v, d), fmt_sig(s.dv, d)]);
    }
    let json = json!({
        "reaction": calc.name,
        "a": p.a(),
        "b": p.b(),
        "c_star": speed.c_star,
        "v0": prof.v0,
        "samples": prof.samples,
    });
    Ok(Outcome { table, json, deviation: None })
}

fn cmd_limit(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let calc = calculus(cfg)?;
    let v0 = cfg.limit.v0.unwrap_or_else(|| calc.normalization());
    let lp = make_limit_profile(&calc, cfg.limit.regime, v0, &cfg.solver)?;
    let (lo, hi) = cfg.limit.window;
    let n = cfg.limit.points.max(2);
    let mut zs: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let kink = match &lp {
        LimitProfile::GluedLi { glue_z, .. } => Some(*glue_z),
        LimitProfile::SteadyBalanced { alpha } => Some(-*alpha),
        _ => None,
    };
    if let Some(k) = kink.filter(|k| *k > lo && *k < hi) {
        if !zs.contains(&k) {
            zs.push(k);
            zs.sort_by(f64::total_cmp);
        }
    }
    let d = cfg.output.digits;
    let mut table = Table::new(vec!["z", "v", "kink"]);
    for &z in &zs {
        let is_kink = kink == Some(z);
        table.push(vec![fmt_sig(z, d), fmt_sig(lp.eval(z), d), u8::from(is_kink).to_string()]);
    }
    let glue = lp.glue_slopes(&calc);
    let json = json!({
        "reaction": calc.name,
        "regime": cfg.limit.regime,
        "limit": lp.summary(),
        "glue_slopes": glue,
        "samples": zs.iter().map(|&z| (z, lp.eval(z))).collect::<Vec<_>>(),
    });
    Ok(Outcome { table, json, deviation: None })
}

fn cmd_sweep(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let plan = cfg.sweep_plan()?;
    let mut report = run_sweep::<f64>(&plan, &cfg.solver)?;
    if cfg.sweep.fit || cfg.sweep.expected_order.is_some() {
        report.fit(cfg.sweep.expected_order)?;
    }
    let d = cfg.output.digits;
    let mut table = Table::new(vec![
        "value",
        "a",
        "b",
        "c_star",
        "best_lower",
        "best_upper",
        "iterations",
        "max_slope",
        "distance",
        "error",
    ]);
    for r in &report.rows {
        table.push(vec![
            fmt_sig(r.value, d),
            fmt_sig(r.a, d),
            fmt_sig(r.b, d),
            fmt_opt(r.speed.as_ref().map(|s| s.c_star), d),
            fmt_opt(r.bounds.as_ref().map(|b| b.best_lower()), d),
            fmt_opt(r.bounds.as_ref().map(|b| b.best_upper()), d),
            r.speed.as_ref().map(|s| s.iterations.to_string()).unwrap_or_default(),
            fmt_opt(r.max_slope, d),
            fmt_opt(r.distance, d),
            r.error.clone().unwrap_or_default(),
        ]);
    }
    if report.open {
        eprintln!("note: open regime, no limit profile is asserted");
    }
    if let Some(fit) = &report.fitted_order {
        eprintln!("fitted order {} (rms residual {})", fmt_sig(fit.slope, d), fmt_sig(fit.residual, 3));
    }
    let json = serde_json::to_value(&report).expect("report serializes");
    Ok(Outcome { table, json, deviation: None })
}

fn cmd_validate(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let report = run_validation(&cfg.solver);
    let d = cfg.output.digits;
    let mut table = Table::new(vec!["check", "passed", "worst", "threshold", "detail"]);
    for c in &report.checks {
        table.push(vec![
            c.name.clone(),
            c.passed.to_string(),
            fmt_sig(c.worst, d),
            fmt_sig(c.threshold, d),
            c.detail.clone(),
        ]);
    }
    let deviation = (!report.all_passed()).then(|| {
        let names: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
        format!("invariant violations: {}", names.join("; "))
    });
    Ok(Outcome { table, json: serde_json::to_value(&report).expect("report serializes"), deviation })
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let cfg = effective_config(&cli.global)?;
    if cli.global.dump_config {
        let _ = writeln!(std::io::stdout(), "{}", cfg.to_json());
        return Ok(());
    }
    if let Some(n) = cli.global.jobs {
        // a second initialization only happens in-process (tests); the first pool wins
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let outcome = match (cli.command, cli.global.golden) {
        (Command::Speed, Some(Golden::Appendix)) => cmd_golden(&cfg)?,
        (_, Some(_)) => return Err(ConfigError::new("--golden", "only valid with the speed subcommand").into()),
        (Command::Bounds, None) => cmd_bounds(&cfg)?,
        (Command::Speed, None) => cmd_speed(&cfg)?,
        (Command::Profile, None) => cmd_profile(&cfg)?,
        (Command::Limit, None) => cmd_limit(&cfg)?,
        (Command::Sweep, None) => cmd_sweep(&cfg)?,
        (Command::Validate, None) => cmd_validate(&cfg)?,
    };
    let mut sink: Box<dyn Write> = match &cfg.output.path {
        Some(p) => Box::new(std::fs::File::create(p)?),
        None => Box::new(std::io::stdout().lock()),
    };
    emit(sink.as_mut(), cfg.output.format, &outcome.table, &outcome.json)?;
    sink.flush()?;
    match outcome.deviation {
        Some(msg) => Err(Failure::Deviation(msg)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Solver(e)) => {
            eprintln!("solver error: {e}");
            ExitCode::from(3)
        }
        Err(Failure::Deviation(msg)) => {
            eprintln!("deviation: {msg}");
            ExitCode::from(4)
        }
    }
}
