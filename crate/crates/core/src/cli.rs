//! Command-line front end. [`run`] parses arguments, executes one
//! subcommand and returns the process exit code: 0 on success, 1 when a
//! computation or a check fails, 2 on a usage error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::contraction::ContractionTable;
use crate::density::Pauli::{self, *};
use crate::dynamics::{ergodicity_report, quench_series_with, stationary_record, uniform_times, final_equilibrium_record};
use crate::error::Error;
use crate::oracle::{correlator, ground_state, FiniteChain};
use crate::params::{ModelParams, MAX_SUPPORTED_TIME};
use crate::quadrature::{QuadratureConfig, DEFAULT_TOLERANCE};
use crate::scan::{Cell, Format, ScanIoError, ScanResult};
use crate::threesite::{
    block_entropy_from_g0, mermin_lower_bound, mermin_max, mermin_upper_bound, three_site_tensor_from_table,
};
use crate::twosite::{assemble_two_site, chsh_max, concurrence, two_site_tensor_from_table};

/// Grid points closer than this to the critical field are moved off it.
pub const CRITICAL_OFFSET: f64 = 1e-6;
pub const MIN_ED_SITES: usize = 4;
pub const MAX_ED_SITES: usize = 14;
pub const DEFAULT_ED_MAX_DIFF: f64 = 1e-3;
pub const QUENCH_TAIL_FRACTION: f64 = 0.5;

#[derive(Debug, Parser)]
#[command(name = "xychain", version, about = "Entanglement and Bell nonlocality in the infinite XY chain")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads for grid points (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    /// Absolute quadrature tolerance.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,
}

#[derive(Debug, Args)]
pub struct FieldGrid {
    #[arg(long, default_value_t = 0.0)]
    pub h_min: f64,
    #[arg(long, default_value_t = 3.0)]
    pub h_max: f64,
    #[arg(long, default_value_t = 301)]
    pub h_steps: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Maximal CHSH value and concurrence of site pairs in equilibrium.
    ChshScan {
        #[arg(long)]
        gamma: f64,
        #[command(flatten)]
        grid: FieldGrid,
        /// Pair separation (repeatable).
        #[arg(long = "r", default_values_t = [1usize, 2, 3])]
        r: Vec<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Maximal Mermin value with its bounds and the block entropy.
    MerminScan {
        /// Anisotropy (repeatable).
        #[arg(long, required = true)]
        gamma: Vec<f64>,
        #[command(flatten)]
        grid: FieldGrid,
        /// Site separations `a,b` (repeatable).
        #[arg(long, value_parser = parse_config, default_values = ["1,1", "1,2", "2,2"])]
        config: Vec<(usize, usize)>,
        #[command(flatten)]
        output: Output,
    },
    /// Nearest-neighbour time series after a field quench h0 → hf.
    Quench {
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        h0: f64,
        #[arg(long)]
        hf: f64,
        #[arg(long, default_value_t = MAX_SUPPORTED_TIME)]
        t_max: f64,
        #[arg(long, default_value_t = 2001)]
        samples: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Exact diagonalization of a finite ring against the infinite-chain formulas.
    EdCheck {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        h: f64,
        /// Largest accepted |ed − formula|.
        #[arg(long, default_value_t = DEFAULT_ED_MAX_DIFF)]
        max_diff: f64,
        #[command(flatten)]
        output: Output,
    },
}

fn parse_config(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected a,b but got {s:?}"))?;
    let parse = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
    let (a, b) = (parse(a)?, parse(b)?);
    if a == 0 || b == 0 {
        return Err("separations must be positive".into());
    }
    Ok((a, b))
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Compute(#[from] Error),
    #[error(transparent)]
    Output(#[from] ScanIoError),
    #[error("{failed} of {total} checks exceed the tolerance")]
    CheckFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code. Diagnostics go to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: &Command) -> Result<(), CliError> {
    let output = match command {
        Command::ChshScan { output, .. }
        | Command::MerminScan { output, .. }
        | Command::Quench { output, .. }
        | Command::EdCheck { output, .. } => output,
    };
    if !(output.tolerance > 0.0 && output.tolerance.is_finite()) {
        return Err(usage(format!("tolerance must be positive, got {}", output.tolerance)));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(output.workers)
        .build()
        .map_err(|e| usage(format!("cannot start {} workers: {e}", output.workers)))?;
    let result = pool.install(|| compute(command))?;
    let checks_failed = failed_checks(&result);
    write_result(&result, output)?;
    match checks_failed {
        Some(failed) if failed > 0 => Err(CliError::CheckFailed {
            failed,
            total: result.rows.len(),
        }),
        _ => Ok(()),
    }
}

/// Builds the [`ScanResult`] of a command without writing it.
pub fn compute(command: &Command) -> Result<ScanResult, CliError> {
    match command {
        Command::ChshScan { gamma, grid, r, output } => chsh_scan(*gamma, grid, r, output),
        Command::MerminScan {
            gamma,
            grid,
            config,
            output,
        } => mermin_scan(gamma, grid, config, output),
        Command::Quench {
            gamma,
            h0,
            hf,
            t_max,
            samples,
            output,
        } => quench(*gamma, *h0, *hf, *t_max, *samples, output),
        Command::EdCheck {
            n,
            gamma,
            h,
            max_diff,
            output,
        } => ed_check(*n, *gamma, *h, *max_diff, output),
    }
}

fn failed_checks(result: &ScanResult) -> Option<usize> {
    if !result.columns.iter().any(|c| c == "pass") {
        return None;
    }
    Some(
        result
            .rows
            .iter()
            .filter(|r| r.get("pass") != Some(&Cell::from("true")))
            .count(),
    )
}

fn write_result(result: &ScanResult, output: &Output) -> Result<(), CliError> {
    match &output.out {
        Some(path) => {
            let file = File::create(path).map_err(ScanIoError::from)?;
            let mut w = BufWriter::new(file);
            result.write(output.format, &mut w)?;
            w.flush().map_err(ScanIoError::from)?;
        }
        None => {
            let stdout = io::stdout();
            result.write(output.format, stdout.lock())?;
        }
    }
    Ok(())
}

/// The field grid with any point on the critical field moved to `1 + 1e-6`.
pub fn field_grid(grid: &FieldGrid) -> Result<Vec<f64>, CliError> {
    let FieldGrid { h_min, h_max, h_steps } = *grid;
    if !(h_min.is_finite() && h_max.is_finite()) {
        return Err(usage("field bounds must be finite"));
    }
    if h_steps == 0 || h_min > h_max || (h_steps > 1 && h_min == h_max) {
        return Err(usage(format!(
            "empty field range [{h_min}, {h_max}] with {h_steps} steps"
        )));
    }
    if h_min < 0.0 {
        return Err(usage(format!("field must be non-negative, got {h_min}")));
    }
    let points = (0..h_steps).map(|k| {
        if h_steps == 1 {
            h_min
        } else {
            h_min + (h_max - h_min) * k as f64 / (h_steps - 1) as f64
        }
    });
    Ok(points
        .map(|h| if (h - 1.0).abs() < 1e-12 { 1.0 + CRITICAL_OFFSET } else { h })
        .collect())
}

fn base_metadata(command: &str, output: &Output) -> indexmap::IndexMap<String, Value> {
    let mut m = indexmap::IndexMap::new();
    m.insert("command".into(), json!(command));
    m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    m.insert("quadrature_tolerance".into(), json!(output.tolerance));
    m
}

fn chsh_scan(gamma: f64, grid: &FieldGrid, rs: &[usize], output: &Output) -> Result<ScanResult, CliError> {
    let hs = field_grid(grid)?;
    if rs.is_empty() || rs.contains(&0) {
        return Err(usage("separations must be positive"));
    }
    ModelParams::ground_state(gamma, hs[0]).map_err(|e| usage(e.to_string()))?;
    let config = QuadratureConfig::with_tolerance(output.tolerance);
    let rmax = *rs.iter().max().expect("nonempty");

    let blocks = hs
        .par_iter()
        .map(|&h| -> Result<Vec<Vec<Cell>>, Error> {
            let p = ModelParams::ground_state(gamma, h)?;
            let table = ContractionTable::with_config(&p, rmax, config)?;
            rs.iter()
                .map(|&r| {
                    let t = two_site_tensor_from_table(r, &table)?;
                    let c = concurrence(&assemble_two_site(&t)?)?;
                    Ok(vec![
                        gamma.into(),
                        h.into(),
                        r.into(),
                        chsh_max(&t).into(),
                        c.into(),
                        (0.5 * table.g(0)).into(),
                        t.txy.into(),
                    ])
                })
                .collect()
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut result = ScanResult::new(["gamma", "h", "r", "chsh_max", "concurrence", "mz", "t_xy"]);
    result.metadata = base_metadata("chsh-scan", output);
    result.metadata.insert("gamma".into(), json!(gamma));
    insert_grid(&mut result, grid);
    result.metadata.insert("r".into(), json!(rs));
    blocks.into_iter().flatten().for_each(|row| result.push(row));
    Ok(result)
}

fn insert_grid(result: &mut ScanResult, grid: &FieldGrid) {
    result.metadata.insert("h_min".into(), json!(grid.h_min));
    result.metadata.insert("h_max".into(), json!(grid.h_max));
    result.metadata.insert("h_steps".into(), json!(grid.h_steps));
}

fn mermin_scan(
    gammas: &[f64],
    grid: &FieldGrid,
    configs: &[(usize, usize)],
    output: &Output,
) -> Result<ScanResult, CliError> {
    let hs = field_grid(grid)?;
    if gammas.is_empty() || configs.is_empty() {
        return Err(usage("need at least one gamma and one configuration"));
    }
    for &g in gammas {
        ModelParams::ground_state(g, hs[0]).map_err(|e| usage(e.to_string()))?;
    }
    let config = QuadratureConfig::with_tolerance(output.tolerance);
    let rmax = configs.iter().map(|(a, b)| a + b).max().expect("nonempty");
    let points: Vec<(f64, f64)> = gammas
        .iter()
        .flat_map(|&g| hs.iter().map(move |&h| (g, h)))
        .collect();

    let blocks = points
        .par_iter()
        .map(|&(gamma, h)| -> Result<Vec<Vec<Cell>>, Error> {
            let p = ModelParams::ground_state(gamma, h)?;
            let table = ContractionTable::with_config(&p, rmax, config)?;
            let g0 = table.g(0);
            configs
                .iter()
                .map(|&(a, b)| {
                    let t = three_site_tensor_from_table(a, b, &table)?;
                    Ok(vec![
                        gamma.into(),
                        h.into(),
                        a.into(),
                        b.into(),
                        mermin_max(&t)?.into(),
                        mermin_lower_bound(&t).into(),
                        mermin_upper_bound(&t).into(),
                        block_entropy_from_g0(g0).into(),
                        (0.5 * g0).into(),
                    ])
                })
                .collect()
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut result = ScanResult::new([
        "gamma",
        "h",
        "a",
        "b",
        "mermin_max",
        "mermin_lb",
        "mermin_ub",
        "s_vn",
        "mz",
    ]);
    result.metadata = base_metadata("mermin-scan", output);
    result.metadata.insert("gamma".into(), json!(gammas));
    insert_grid(&mut result, grid);
    result.metadata.insert(
        "config".into(),
        json!(configs.iter().map(|(a, b)| format!("{a},{b}")).collect::<Vec<_>>()),
    );
    blocks.into_iter().flatten().for_each(|row| result.push(row));
    Ok(result)
}

fn quench(gamma: f64, h0: f64, hf: f64, t_max: f64, samples: usize, output: &Output) -> Result<ScanResult, CliError> {
    if samples < 2 {
        return Err(usage(format!("need at least 2 samples, got {samples}")));
    }
    if !(t_max > 0.0 && t_max <= MAX_SUPPORTED_TIME) {
        return Err(usage(format!("t-max must lie in (0, {MAX_SUPPORTED_TIME}], got {t_max}")));
    }
    let params = ModelParams::quench(gamma, h0, hf, 0.0).map_err(|e| usage(e.to_string()))?;
    let times = uniform_times(t_max, samples)?;
    let config = QuadratureConfig::with_tolerance(output.tolerance);
    let series = quench_series_with(&params, &times, config)?;

    let mut result = ScanResult::new(["t", "chsh_max", "concurrence", "mz", "t_xy"]);
    result.metadata = base_metadata("quench", output);
    for (k, v) in [("gamma", gamma), ("h0", h0), ("hf", hf), ("t_max", t_max)] {
        result.metadata.insert(k.into(), json!(v));
    }
    result.metadata.insert("samples".into(), json!(samples));
    result.metadata.insert("tail_fraction".into(), json!(QUENCH_TAIL_FRACTION));
    for r in &series.records {
        result.push([r.t.into(), r.chsh_max.into(), r.concurrence.into(), r.mz.into(), r.txy.into()]);
    }

    let equilibrium = final_equilibrium_record(&params)?.chsh_max;
    let stationary = stationary_record(&params)?.chsh_max;
    match ergodicity_report(&series, QUENCH_TAIL_FRACTION) {
        Ok(rep) => {
            result.report.insert("tail_average".into(), json!(rep.time_average));
            result.report.insert("tail_start".into(), json!(rep.tail_start));
            result.report.insert("tail_samples".into(), json!(rep.tail_samples));
            result.report.insert("equilibrium_value".into(), json!(equilibrium));
            result.report.insert("stationary_value".into(), json!(stationary));
            result.report.insert("gap".into(), json!(rep.gap));
        }
        Err(Error::InsufficientWindow { samples, required }) => {
            eprintln!("warning: tail of {samples} samples is shorter than {required}; no tail average reported");
            result.report.insert("equilibrium_value".into(), json!(equilibrium));
            result.report.insert("stationary_value".into(), json!(stationary));
        }
        Err(e) => return Err(e.into()),
    }
    Ok(result)
}

/// Pauli strings compared by `ed-check`: a label and `(site, operator)` pairs.
pub fn ed_check_quantities(n: usize) -> Vec<(String, Vec<(usize, Pauli)>)> {
    let mut q = vec![("z".to_string(), vec![(0, Z)])];
    for r in (1..=2).filter(|&r| 2 * r <= n) {
        for (u, v) in [(X, X), (Y, Y), (Z, Z), (X, Y)] {
            q.push((format!("{}{}(R={r})", u.label(), v.label()), vec![(0, u), (r, v)]));
        }
    }
    for (a, b) in [(1, 1), (1, 2), (2, 2)].into_iter().filter(|(a, b)| a + b < n) {
        for (u, v, w) in [(X, X, Z), (X, Z, X), (Z, X, X), (Z, Z, Z)] {
            q.push((
                format!("{}{}{}({a},{b})", u.label(), v.label(), w.label()),
                vec![(0, u), (a, v), (a + b, w)],
            ));
        }
    }
    q
}

fn ed_check(n: usize, gamma: f64, h: f64, max_diff: f64, output: &Output) -> Result<ScanResult, CliError> {
    if !(MIN_ED_SITES..=MAX_ED_SITES).contains(&n) {
        return Err(usage(format!("n must lie in {MIN_ED_SITES}..={MAX_ED_SITES}, got {n}")));
    }
    if !(max_diff > 0.0) {
        return Err(usage("max-diff must be positive"));
    }
    let chain = FiniteChain::new(n, gamma, h).map_err(|e| usage(e.to_string()))?;
    let params = ModelParams::ground_state(gamma, h).map_err(|e| usage(e.to_string()))?;
    let gs = ground_state(&chain)?;
    let table = ContractionTable::with_config(&params, 4, QuadratureConfig::with_tolerance(output.tolerance))?;

    let mut result = ScanResult::new(["quantity", "ed", "formula", "abs_diff", "pass"]);
    result.metadata = base_metadata("ed-check", output);
    for (k, v) in [("gamma", gamma), ("h", h), ("max_diff", max_diff)] {
        result.metadata.insert(k.into(), json!(v));
    }
    result.metadata.insert("n".into(), json!(n));
    result.metadata.insert("ground_energy".into(), json!(gs.energy));

    for (label, ops) in ed_check_quantities(n) {
        let ed = correlator(&gs.state, &ops)?;
        let formula = formula_value(&ops, &table)?;
        let diff = (ed - formula).abs();
        let pass = if diff <= max_diff { "true" } else { "false" };
        result.push([label.as_str().into(), ed.into(), formula.into(), diff.into(), pass.into()]);
    }
    Ok(result)
}

fn formula_value(ops: &[(usize, Pauli)], table: &ContractionTable) -> Result<f64, Error> {
    match ops {
        [(_, Z)] => Ok(table.g(0)),
        [(_, u), (r, v)] => {
            let t = two_site_tensor_from_table(*r, table)?;
            Ok(match (u, v) {
                (X, X) => t.txx,
                (Y, Y) => t.tyy,
                (Z, Z) => t.tzz,
                _ => t.txy,
            })
        }
        [(_, u), (a, v), (ab, _)] => {
            let t = three_site_tensor_from_table(*a, ab - a, table)?;
            Ok(match (u, v) {
                (X, X) => t.txxz,
                (X, Z) => t.txzx,
                (Z, X) => t.tzxx,
                _ => t.tzzz,
            })
        }
        _ => Err(Error::InvalidParameter(format!("unsupported Pauli string {ops:?}"))),
    }
}
