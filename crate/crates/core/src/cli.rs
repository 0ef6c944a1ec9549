//! Command-line front end: solve, simulate, sweep, verify, and plot.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage/validation
//! error, 3 solver no-solution.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::oracle::{self, OracleReport};
use crate::params::{Stage1Params, Stage2Params, Stage3Params};
use crate::shocks::generate_path;
use crate::stage3::Stage3SweepParam;
use crate::svg::{render_line_chart, Series};
use crate::{sim, stage1, stage2, stage3};

#[derive(Parser)]
#[command(
    name = "olg-health",
    about = "Overlapping-generations health-investment economies: policies, simulation, verification, plots"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one stage's optimal policy at a point
    Solve(SolveArgs),
    /// Simulate a trajectory under a seeded adversity path, writing CSV
    Simulate(SimulateArgs),
    /// Sweep a parameter and tabulate policies and thresholds
    Sweep(SweepArgs),
    /// Run the brute-force oracle suite against the closed forms
    Verify(VerifyArgs),
    /// Render columns of a simulation CSV as an SVG line chart
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StageName {
    Stage1,
    Stage2,
    Stage3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SimStage {
    Stage1,
    Stage2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VerifyStage {
    Stage1,
    Stage2,
    Stage3,
    All,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(value_enum)]
    stage: StageName,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Population level (stages 1 and 2)
    #[arg(long, short = 'L')]
    l: Option<f64>,
    /// Health productivity (stage 1)
    #[arg(long)]
    lambda: Option<f64>,
    /// Environmental adversity (stage 1)
    #[arg(long)]
    a: Option<f64>,
    /// Total factor productivity (stage 3)
    #[arg(long = "A")]
    a_tfp: Option<f64>,
    /// Override a parameter field, e.g. --set gamma=0.5 (repeatable)
    #[arg(long, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Also append the solution as a CSV row to this file
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(value_enum)]
    stage: SimStage,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the shock seed
    #[arg(long)]
    seed: Option<u64>,
    /// Number of periods T (records cover t = 0..=T)
    #[arg(long, short = 'T')]
    horizon: Option<usize>,
    #[arg(long)]
    l0: Option<f64>,
    #[arg(long)]
    lambda0: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(value_enum)]
    stage: StageName,
    /// Parameter to sweep (stage1: a|lambda|phi|alpha|gamma|p|c_hat;
    /// stage2: delta|l|alpha|beta|gamma|p; stage3: gamma|alpha|a|p)
    #[arg(long)]
    param: String,
    #[arg(long)]
    from: f64,
    #[arg(long)]
    to: f64,
    #[arg(long)]
    steps: usize,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Fixed population for per-point policies
    #[arg(long, short = 'L')]
    l: Option<f64>,
    /// Fixed stage-1 productivity
    #[arg(long)]
    lambda: Option<f64>,
    /// Fixed stage-1 adversity
    #[arg(long)]
    a: Option<f64>,
    /// Fixed stage-2 mortality
    #[arg(long)]
    delta: Option<f64>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    stage: VerifyStage,
    /// Override the pass tolerance for every comparison
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Grid points per axis for the grid oracles
    #[arg(long, default_value_t = 1_000_000)]
    grid: usize,
}

#[derive(Args)]
struct PlotArgs {
    /// Input CSV (as written by `simulate` or `sweep`)
    #[arg(long)]
    input: PathBuf,
    /// Comma-separated column names to plot
    #[arg(long)]
    columns: String,
    #[arg(long)]
    out: PathBuf,
    /// Column used for the horizontal axis (default `t`; falls back to the
    /// row index when absent)
    #[arg(long, default_value = "t")]
    x: String,
    #[arg(long)]
    title: Option<String>,
}

/// Parses and dispatches; returns the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Plot(a) => cmd_plot(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::NoRoot { .. } | Error::NoThreshold | Error::Perturbation(_) => 3,
        _ => 2,
    }
}

fn parse_overrides(set: &[String]) -> Result<Vec<(String, f64)>> {
    set.iter()
        .map(|s| {
            let (k, v) = s
                .split_once('=')
                .ok_or_else(|| Error::config(format!("bad --set `{s}`, expected KEY=VALUE")))?;
            let v: f64 = v
                .parse()
                .map_err(|_| Error::config(format!("bad value in --set `{s}`")))?;
            Ok((k.to_string(), v))
        })
        .collect()
}

fn apply_stage1(p: &mut Stage1Params, key: &str, v: f64) -> Result<()> {
    match key {
        "phi" => p.phi = v,
        "alpha" => p.alpha = v,
        "gamma" => p.gamma = v,
        "p" => p.p = v,
        "c_hat" => p.c_hat = v,
        "mu" => p.mu = v,
        "kappa" => p.kappa = v,
        other => return Err(Error::config(format!("unknown stage1 parameter `{other}`"))),
    }
    Ok(())
}

fn apply_stage2(p: &mut Stage2Params, key: &str, v: f64) -> Result<()> {
    match key {
        "phi" => p.phi = v,
        "alpha" => p.alpha = v,
        "beta" => p.beta = v,
        "gamma" => p.gamma = v,
        "p" => p.p = v,
        "lambda_fixed" => p.lambda_fixed = v,
        "delta0" => p.delta0 = v,
        "delta1" => p.delta1 = v,
        "delta_min" => p.delta_min = v,
        "delta_max" => p.delta_max = v,
        other => return Err(Error::config(format!("unknown stage2 parameter `{other}`"))),
    }
    Ok(())
}

fn apply_stage3(p: &mut Stage3Params, key: &str, v: f64) -> Result<()> {
    match key {
        "A" => p.a_tfp = v,
        "alpha" => p.alpha = v,
        "gamma" => p.gamma = v,
        "p" => p.p = v,
        other => return Err(Error::config(format!("unknown stage3 parameter `{other}`"))),
    }
    Ok(())
}

fn write_or_print(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn cmd_solve(args: SolveArgs) -> Result<i32> {
    let cfg = RunConfig::load(args.config.as_deref())?;
    let overrides = parse_overrides(&args.set)?;
    match args.stage {
        StageName::Stage1 => {
            let mut p = cfg.stage1_params();
            for (k, v) in &overrides {
                apply_stage1(&mut p, k, *v)?;
            }
            let p = p.validate()?;
            let lambda = args.lambda.unwrap_or(1.0);
            let a = args.a.unwrap_or(0.0);
            let l = args.l.unwrap_or(1.0);
            let pol = stage1::solve(&p, lambda, a, l)?;
            println!("stage1 policy (lambda={lambda}, a={a}, L={l})");
            println!("  x*     = {}", pol.x_star);
            println!("  y*     = {}", pol.y_star);
            println!("  n*     = {}", pol.n_star);
            println!("  regime = {}", pol.regime.as_str());
            match stage1::population_threshold_g(&p, lambda, a) {
                Ok(g) => println!("  g      = {g}"),
                Err(Error::NoThreshold) => println!("  g      = none (gamma < p)"),
                Err(e) => return Err(e),
            }
            if let Some(out) = &args.out {
                let row = format!(
                    "x_star,y_star,n_star,regime\n{},{},{},{}\n",
                    pol.x_star,
                    pol.y_star,
                    pol.n_star,
                    pol.regime.as_str()
                );
                std::fs::write(out, row)?;
            }
        }
        StageName::Stage2 => {
            let mut p = cfg.stage2_params();
            for (k, v) in &overrides {
                apply_stage2(&mut p, k, *v)?;
            }
            let p = p.validate()?;
            let l = args.l.unwrap_or(1.0);
            let pol = stage2::optimal_policy2(&p, l)?;
            println!("stage2 policy (L={l})");
            println!("  x*     = {}", pol.x_star);
            println!("  y      = {}", pol.y);
            println!("  n*     = {}", pol.n_star);
            println!("  c*     = {}", pol.c_star);
            if let Some(out) = &args.out {
                let row = format!(
                    "x_star,y,n_star,c_star\n{},{},{},{}\n",
                    pol.x_star, pol.y, pol.n_star, pol.c_star
                );
                std::fs::write(out, row)?;
            }
        }
        StageName::Stage3 => {
            let mut p = cfg.stage3_params();
            if let Some(a) = args.a_tfp {
                p.a_tfp = a;
            }
            for (k, v) in &overrides {
                apply_stage3(&mut p, k, *v)?;
            }
            let p = p.validate()?;
            let sol = stage3::solve_health_investment3(&p)?;
            println!("stage3 solution (A={})", p.a_tfp);
            println!("  x*      = {}", sol.x_star);
            println!("  n*      = {}", sol.n_star);
            println!("  utility = {}", sol.utility_value);
            println!("  n >= 1  = {}", sol.n_at_least_one);
            println!("  roots   = {}", sol.root_candidates.len());
            for c in &sol.root_candidates {
                println!("    x = {:<22} u = {}", c.x, c.utility);
            }
            if let Some(out) = &args.out {
                let row = format!(
                    "x_star,n_star,utility,n_ge_1\n{},{},{},{}\n",
                    sol.x_star, sol.n_star, sol.utility_value, sol.n_at_least_one
                );
                std::fs::write(out, row)?;
            }
        }
    }
    Ok(0)
}

fn cmd_simulate(args: SimulateArgs) -> Result<i32> {
    let cfg = RunConfig::load(args.config.as_deref())?;
    let run = cfg.run.clone().unwrap_or_default();
    let mut shock = cfg.shock_config();
    if let Some(seed) = args.seed.or(run.seed) {
        shock.seed = seed;
    }
    let horizon = args.horizon.or(run.horizon).unwrap_or(100);
    let path = generate_path(&shock, horizon)?;
    let series = match args.stage {
        SimStage::Stage1 => {
            let p = cfg.stage1_params().validate()?;
            let l0 = args.l0.or(run.l0).unwrap_or(0.3);
            let lambda0 = args.lambda0.or(run.lambda0).unwrap_or(1.0);
            sim::run_stage1(&p, &path, l0, lambda0)?
        }
        SimStage::Stage2 => {
            let p = cfg.stage2_params().validate()?;
            let l0 = args.l0.or(run.l0).unwrap_or(1.0);
            sim::run_stage2(&p, &path, l0)?
        }
    };
    let default_out = PathBuf::from(match args.stage {
        SimStage::Stage1 => "stage1_series.csv",
        SimStage::Stage2 => "stage2_series.csv",
    });
    let out = args.out.or(run.out).unwrap_or(default_out);
    std::fs::write(&out, series.to_csv())?;
    let last = series.records.last().expect("at least one record");
    println!("wrote {} records to {}", series.records.len(), out.display());
    println!("termination: {}", series.termination.as_str());
    println!(
        "final: t={} a={} lambda={} x={} y={} n={} L={}",
        last.t, last.a, last.lambda, last.x_star, last.y_star, last.n_star, last.big_l
    );
    Ok(0)
}

fn sweep_grid(from: f64, to: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 1 || !from.is_finite() || !to.is_finite() {
        return Err(Error::config("sweep needs steps >= 1 and finite bounds"));
    }
    if steps == 1 {
        return Ok(vec![from]);
    }
    let h = (to - from) / (steps - 1) as f64;
    Ok((0..steps).map(|i| from + i as f64 * h).collect())
}

fn cmd_sweep(args: SweepArgs) -> Result<i32> {
    let cfg = RunConfig::load(args.config.as_deref())?;
    let grid = sweep_grid(args.from, args.to, args.steps)?;
    let mut out = String::new();
    match args.stage {
        StageName::Stage1 => {
            let base = cfg.stage1_params();
            let lambda = args.lambda.unwrap_or(1.0);
            let a = args.a.unwrap_or(0.0);
            let l = args.l.unwrap_or(1.0);
            out.push_str("param,value,x_star,y_star,n_star,g\n");
            for &v in &grid {
                let mut p = base;
                let (mut lam, mut adv) = (lambda, a);
                match args.param.as_str() {
                    "a" => adv = v,
                    "lambda" => lam = v,
                    key => apply_stage1(&mut p, key, v)?,
                }
                let p = p.validate()?;
                let pol = stage1::solve(&p, lam, adv, l)?;
                let g = match stage1::population_threshold_g(&p, lam, adv) {
                    Ok(g) => format!("{g}"),
                    Err(Error::NoThreshold) => "none".to_string(),
                    Err(e) => return Err(e),
                };
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    args.param, v, pol.x_star, pol.y_star, pol.n_star, g
                ));
            }
        }
        StageName::Stage2 => {
            let base = cfg.stage2_params();
            let l = args.l.unwrap_or(1.0);
            let delta = args.delta.unwrap_or(0.5);
            out.push_str("param,value,x_star,n_star,c_star,l_tilde,l_tilde_prime\n");
            for &v in &grid {
                let mut p = base;
                let (mut pop, mut d) = (l, delta);
                match args.param.as_str() {
                    "delta" => d = v,
                    "l" | "L" => pop = v,
                    key => apply_stage2(&mut p, key, v)?,
                }
                let p = p.validate()?;
                let pol = stage2::optimal_policy2(&p, pop)?;
                let ss = stage2::steady_state(&p, d)?;
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    args.param, v, pol.x_star, pol.n_star, pol.c_star, ss.l_tilde, ss.l_tilde_prime
                ));
            }
        }
        StageName::Stage3 => {
            let base = cfg.stage3_params();
            let which = match args.param.as_str() {
                "gamma" => Some(Stage3SweepParam::Gamma),
                "alpha" => Some(Stage3SweepParam::Alpha),
                _ => None,
            };
            let h = if grid.len() > 1 {
                ((args.to - args.from).abs() / (args.steps - 1) as f64 / 10.0).max(1e-6)
            } else {
                1e-4
            };
            out.push_str("param,value,x_star,n_star,utility,dx_dparam,sign\n");
            for &v in &grid {
                let mut p = base;
                match args.param.as_str() {
                    "A" | "a" => p.a_tfp = v,
                    key => apply_stage3(&mut p, key, v)?,
                }
                let p = p.validate()?;
                match stage3::solve_health_investment3(&p) {
                    Ok(sol) => {
                        let (deriv, sign) = match which {
                            Some(w) => match stage3::comparative_statics3(&p, w, h) {
                                Ok(d) => {
                                    let s = if d > 0.0 { "+" } else if d < 0.0 { "-" } else { "0" };
                                    (format!("{d}"), s.to_string())
                                }
                                Err(Error::Perturbation(_)) | Err(Error::NoRoot { .. }) => {
                                    ("nan".to_string(), "undefined".to_string())
                                }
                                Err(e) => return Err(e),
                            },
                            None => ("".to_string(), "".to_string()),
                        };
                        out.push_str(&format!(
                            "{},{},{},{},{},{},{}\n",
                            args.param, v, sol.x_star, sol.n_star, sol.utility_value, deriv, sign
                        ));
                    }
                    Err(Error::NoRoot { .. }) => {
                        out.push_str(&format!("{},{},nan,nan,nan,nan,no-root\n", args.param, v));
                    }
                    Err(e) => return Err(e),
                }
            }
        }
    }
    write_or_print(args.out.as_deref(), &out)?;
    Ok(0)
}

fn cmd_verify(args: VerifyArgs) -> Result<i32> {
    let cfg = RunConfig::load(args.config.as_deref())?;
    let grid = args.grid;
    let mut reports: Vec<OracleReport> = Vec::new();
    let do_stage = |s: VerifyStage| args.stage == VerifyStage::All || args.stage == s;

    if do_stage(VerifyStage::Stage1) {
        let p = cfg.stage1_params().validate()?;
        reports.push(oracle::grid_argmax_stage1(&p, 1.0, 0.0, 1.0, grid)?);
        reports.push(oracle::grid_argmax_stage1(&p, 1.0, 0.3, 1.0, grid)?);
        reports.push(oracle::grid_argmax_stage1(&p, 2.0, 0.5, 1.0, grid)?);
        reports.push(oracle::bisect_threshold(&p, 1.0, 0.0)?);
        reports.push(oracle::bisect_threshold(&p, 1.0, 0.3)?);
    }
    if do_stage(VerifyStage::Stage2) {
        let p = cfg.stage2_params().validate()?;
        let g2 = grid.clamp(100, 500);
        let (rx, rn) = oracle::grid_argmax_utility2(&p, 1.0, g2)?;
        reports.push(rx);
        reports.push(rn);
        let (rx, rn) = oracle::grid_argmax_utility2(&p, 100.0, g2)?;
        reports.push(rx);
        reports.push(rn);
    }
    if do_stage(VerifyStage::Stage3) {
        let p = cfg.stage3_params().validate()?;
        reports.push(oracle::grid_argmax_utility3(&p, grid)?);
    }

    if let Some(tol) = args.tolerance {
        for r in &mut reports {
            r.tolerance = tol;
            r.pass = r.abs_error <= tol;
        }
    }

    let mut out = String::new();
    out.push_str(OracleReport::csv_header());
    out.push('\n');
    for r in &reports {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    write_or_print(args.out.as_deref(), &out)?;
    let all_pass = reports.iter().all(|r| r.pass);
    if !all_pass {
        eprintln!(
            "verification failed: {}/{} comparisons out of tolerance",
            reports.iter().filter(|r| !r.pass).count(),
            reports.len()
        );
    }
    Ok(if all_pass { 0 } else { 1 })
}

struct Table {
    headers: Vec<String>,
    columns: Vec<Vec<String>>,
}

fn read_table(path: &Path) -> Result<Table> {
    let text = std::fs::read_to_string(path)?;
    let mut headers: Vec<String> = Vec::new();
    let mut columns: Vec<Vec<String>> = Vec::new();
    for line in text.lines() {
        let line = line.trim_end();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if headers.is_empty() {
            headers = cells.iter().map(|s| s.to_string()).collect();
            columns = vec![Vec::new(); headers.len()];
            continue;
        }
        for (i, cell) in cells.iter().enumerate().take(headers.len()) {
            columns[i].push(cell.to_string());
        }
    }
    if headers.is_empty() {
        return Err(Error::config(format!(
            "{}: no header row found",
            path.display()
        )));
    }
    Ok(Table { headers, columns })
}

impl Table {
    fn numeric_column(&self, name: &str) -> Result<Vec<f64>> {
        let idx = self
            .headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::config(format!("missing column `{name}`")))?;
        self.columns[idx]
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| Error::config(format!("column `{name}` has non-numeric value `{s}`")))
            })
            .collect()
    }
}

fn cmd_plot(args: PlotArgs) -> Result<i32> {
    let table = read_table(&args.input)?;
    let xs: Vec<f64> = if table.headers.iter().any(|h| h == &args.x) {
        table.numeric_column(&args.x)?
    } else {
        (0..table.columns.first().map(|c| c.len()).unwrap_or(0))
            .map(|i| i as f64)
            .collect()
    };
    if xs.is_empty() {
        return Err(Error::config("input CSV has no data rows"));
    }
    let names: Vec<&str> = args
        .columns
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if names.is_empty() {
        return Err(Error::config("no columns requested"));
    }
    let mut ys: Vec<Vec<f64>> = Vec::new();
    for name in &names {
        ys.push(table.numeric_column(name)?);
    }
    let series: Vec<Series<'_>> = names
        .iter()
        .zip(ys.iter())
        .map(|(label, y)| Series {
            label,
            xs: &xs,
            ys: y,
        })
        .collect();
    let title = args
        .title
        .clone()
        .unwrap_or_else(|| format!("{} over {}", args.columns, args.x));
    let svg = render_line_chart(&title, &args.x, &series)?;
    std::fs::write(&args.out, svg)?;
    println!("wrote {}", args.out.display());
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn override_parsing() {
        let ov = parse_overrides(&["gamma=0.5".to_string(), "p=0.3".to_string()]).unwrap();
        assert_eq!(ov, vec![("gamma".to_string(), 0.5), ("p".to_string(), 0.3)]);
        assert!(parse_overrides(&["gamma".to_string()]).is_err());
        assert!(parse_overrides(&["gamma=x".to_string()]).is_err());
    }

    #[test]
    fn sweep_grid_endpoints() {
        let g = sweep_grid(0.0, 1.0, 5).unwrap();
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(sweep_grid(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn exit_codes_by_error_kind() {
        assert_eq!(exit_code_for(&Error::Range("x")), 2);
        assert_eq!(exit_code_for(&Error::config("c")), 2);
        assert_eq!(
            exit_code_for(&Error::NoRoot {
                max_residual: -1.0,
                at: 0.5
            }),
            3
        );
        assert_eq!(exit_code_for(&Error::NoThreshold), 3);
    }
}
