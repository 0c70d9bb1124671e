//! Experiment harness behind the `uzawa-cavity` binary.
//!
//! Every command reads a flat `key=value` configuration (file via `--config`,
//! overrides via repeated `--set key=value`) and emits CSV whose first lines
//! are `# key=value` comments listing the effective configuration.
//!
//! Exit codes: 0 converged, 1 usage or configuration error, 2 non-convergence
//! or divergence, 3 internal abort.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::iterate::{check_sufficient_condition, run, IterationConfig, IterationHistory, Outcome, Step1};
use crate::oracle::{companion_spectral_radius, schur_spectrum};
use crate::saddle::{Extreme, InnerSolve};
use crate::stokes::{build_mac_stokes, LidProfile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

/// Largest mesh for which `spectrum` reports the oracle spectral radius.
pub const ORACLE_MESH_LIMIT: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mesh_n: usize,
    pub alpha2: f64,
    pub beta: f64,
    pub tol: f64,
    pub max_outer: usize,
    pub inner_tol: f64,
    pub inner_max: usize,
    pub lid: LidProfile,
    pub step1: Step1,
    /// `None` means `1/λ_max(A)`.
    pub richardson_omega: Option<f64>,
    pub seed: u64,
    pub mesh_list: Vec<usize>,
    pub beta_list: Vec<f64>,
    pub eig_tol: f64,
    pub eig_max_iter: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mesh_n: 10,
            alpha2: 1.5,
            beta: 0.0,
            tol: 1e-6,
            max_outer: 500,
            inner_tol: 1e-12,
            inner_max: 20_000,
            lid: LidProfile::Regularized,
            step1: Step1::Exact,
            richardson_omega: None,
            seed: 1,
            mesh_list: vec![10, 20, 40],
            beta_list: vec![0.0, 1e-4, 1e-2, 0.1],
            eig_tol: 1e-6,
            eig_max_iter: 5000,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse::<T>()
        .map_err(|_| Error::invalid(format!("cannot parse `{value}` for key `{key}`")))
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    let items: Vec<T> = value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_num(key, s))
        .collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(Error::invalid(format!("`{key}` must be a non-empty list")));
    }
    Ok(items)
}

/// Shortest round-trip form, switching to exponent notation for small or large magnitudes.
pub fn fmt_param(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-3..1e6).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// 17 significant digits.
pub fn fmt_value(v: f64) -> String {
    format!("{v:.16e}")
}

fn join<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "mesh_n" => self.mesh_n = parse_num(key, value)?,
            "alpha2" => self.alpha2 = parse_num(key, value)?,
            "beta" => self.beta = parse_num(key, value)?,
            "tol" => self.tol = parse_num(key, value)?,
            "max_outer" => self.max_outer = parse_num(key, value)?,
            "inner_tol" => self.inner_tol = parse_num(key, value)?,
            "inner_max" => self.inner_max = parse_num(key, value)?,
            "lid" => self.lid = value.parse()?,
            "step1" => self.step1 = value.parse()?,
            "richardson_omega" => {
                self.richardson_omega = if value == "auto" { None } else { Some(parse_num(key, value)?) };
            }
            "seed" => self.seed = parse_num(key, value)?,
            "mesh_list" => self.mesh_list = parse_list(key, value)?,
            "beta_list" => self.beta_list = parse_list(key, value)?,
            "eig_tol" => self.eig_tol = parse_num(key, value)?,
            "eig_max_iter" => self.eig_max_iter = parse_num(key, value)?,
            other => return Err(Error::invalid(format!("unknown configuration key `{other}`"))),
        }
        Ok(())
    }

    /// Applies a `key=value` assignment.
    pub fn apply_assignment(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| Error::invalid(format!("expected key=value, got `{assignment}`")))?;
        self.set(k, v)
    }

    /// Applies a flat configuration text: `key=value` lines, `#` comments, blank lines ignored.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            self.apply_assignment(line)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.mesh_n < 3 {
            return Err(Error::invalid(format!("mesh_n must be at least 3, got {}", self.mesh_n)));
        }
        if let Some(&n) = self.mesh_list.iter().find(|&&n| n < 3) {
            return Err(Error::invalid(format!("mesh_list entry {n} is below 3")));
        }
        if !(self.eig_tol > 0.0) {
            return Err(Error::invalid("eig_tol must be positive"));
        }
        self.iteration_config().validate()?;
        for &b in &self.beta_list {
            IterationConfig { beta: b, ..self.iteration_config() }.validate()?;
        }
        Ok(())
    }

    pub fn iteration_config(&self) -> IterationConfig {
        IterationConfig {
            alpha2: self.alpha2,
            beta: self.beta,
            tol: self.tol,
            max_outer: self.max_outer,
            step1: match self.step1 {
                Step1::Exact => Step1::Exact,
                Step1::Richardson { .. } => Step1::Richardson { omega: self.richardson_omega },
            },
            inner: InnerSolve { tol: self.inner_tol, max_iter: self.inner_max },
        }
    }

    /// `# key=value` lines for every effective setting.
    pub fn metadata(&self) -> String {
        let omega = self.richardson_omega.map_or("auto".to_string(), fmt_param);
        let pairs = [
            ("mesh_n", self.mesh_n.to_string()),
            ("alpha2", fmt_param(self.alpha2)),
            ("beta", fmt_param(self.beta)),
            ("tol", fmt_param(self.tol)),
            ("max_outer", self.max_outer.to_string()),
            ("inner_tol", fmt_param(self.inner_tol)),
            ("inner_max", self.inner_max.to_string()),
            ("lid", self.lid.to_string()),
            ("step1", self.step1.to_string()),
            ("richardson_omega", omega),
            ("seed", self.seed.to_string()),
            ("mesh_list", join(&self.mesh_list, |n| n.to_string())),
            ("beta_list", join(&self.beta_list, |b| fmt_param(*b))),
            ("eig_tol", fmt_param(self.eig_tol)),
            ("eig_max_iter", self.eig_max_iter.to_string()),
        ];
        let mut out = String::new();
        for (k, v) in pairs {
            let _ = writeln!(out, "# {k}={v}");
        }
        out
    }
}

/// Result of one harness command.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    /// CSV document (metadata comments included), if the command produces one.
    pub csv: Option<String>,
    /// Human-readable summary printed to stdout.
    pub report: String,
    pub exit_code: i32,
}

fn exit_for(outcome: Outcome) -> i32 {
    match outcome {
        Outcome::Converged => EXIT_OK,
        Outcome::MaxIterations | Outcome::Diverged => EXIT_NOT_CONVERGED,
    }
}

fn status(outcome: Outcome) -> &'static str {
    match outcome {
        Outcome::Converged => "converged",
        Outcome::MaxIterations => "max_iterations",
        Outcome::Diverged => "diverged",
    }
}

fn internal(csv: Option<String>, err: &Error) -> CommandOutput {
    CommandOutput { csv, report: format!("error: {err}"), exit_code: EXIT_INTERNAL }
}

/// Runs one cavity problem with the configured lid.
pub fn run_cavity(cfg: &RunConfig, mesh_n: usize, lid: LidProfile, beta: f64) -> Result<IterationHistory> {
    let sys = build_mac_stokes(mesh_n, lid)?;
    let it = IterationConfig { beta, ..cfg.iteration_config() };
    run(sys.problem(), &it, None)
}

pub fn cmd_run(cfg: &RunConfig) -> CommandOutput {
    let hist = match run_cavity(cfg, cfg.mesh_n, cfg.lid, cfg.beta) {
        Ok(h) => h,
        Err(e) => return internal(None, &e),
    };
    let mut csv = cfg.metadata();
    csv.push_str("iter,u_inc,p_inc,div_norm\n");
    for (k, r) in hist.records.iter().enumerate() {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            k + 1,
            fmt_value(r.u_increment),
            fmt_value(r.p_increment),
            fmt_value(r.div_norm)
        );
    }
    let report = format!(
        "converged={} iterations={} final_div_norm={} tol={} status={}",
        hist.converged(),
        hist.iterations,
        hist.final_div_norm().map_or("n/a".to_string(), fmt_value),
        fmt_param(cfg.tol),
        status(hist.outcome)
    );
    CommandOutput { csv: Some(csv), report, exit_code: exit_for(hist.outcome) }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub mesh_n: usize,
    pub beta: f64,
    pub alpha2: f64,
    pub iterations: usize,
    pub converged: bool,
    pub final_div_norm: f64,
}

/// Runs every `(mesh, β)` pair in parallel; results are in list order.
pub fn sweep(cfg: &RunConfig) -> Vec<Result<SweepRow>> {
    let pairs: Vec<(usize, f64)> = cfg
        .mesh_list
        .iter()
        .flat_map(|&n| cfg.beta_list.iter().map(move |&b| (n, b)))
        .collect();
    pairs
        .par_iter()
        .map(|&(mesh_n, beta)| {
            let hist = run_cavity(cfg, mesh_n, cfg.lid, beta)?;
            Ok(SweepRow {
                mesh_n,
                beta,
                alpha2: cfg.alpha2,
                iterations: hist.iterations,
                converged: hist.converged(),
                final_div_norm: hist.final_div_norm().unwrap_or(f64::NAN),
            })
        })
        .collect()
}

pub fn cmd_sweep(cfg: &RunConfig) -> CommandOutput {
    let mut csv = cfg.metadata();
    csv.push_str("mesh_n,beta,alpha2,iterations,converged,final_div_norm\n");
    let mut all_converged = true;
    let mut count = 0;
    for row in sweep(cfg) {
        match row {
            Ok(r) => {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{}",
                    r.mesh_n,
                    fmt_param(r.beta),
                    fmt_param(r.alpha2),
                    r.iterations,
                    r.converged,
                    fmt_value(r.final_div_norm)
                );
                all_converged &= r.converged;
                count += 1;
            }
            Err(e) => return internal(Some(csv), &e),
        }
    }
    let report = format!("runs={count} all_converged={all_converged}");
    let exit_code = if all_converged { EXIT_OK } else { EXIT_NOT_CONVERGED };
    CommandOutput { csv: Some(csv), report, exit_code }
}

/// Divergence-norm traces for both lids on the same mesh.
pub fn cmd_divnorm(cfg: &RunConfig) -> CommandOutput {
    let runs: Vec<Result<IterationHistory>> = [LidProfile::Regularized, LidProfile::Unit]
        .par_iter()
        .map(|&lid| run_cavity(cfg, cfg.mesh_n, lid, cfg.beta))
        .collect();
    let mut hists = Vec::with_capacity(2);
    for r in runs {
        match r {
            Ok(h) => hists.push(h),
            Err(e) => return internal(None, &e),
        }
    }
    let (reg, unit) = (&hists[0], &hists[1]);
    let mut csv = cfg.metadata();
    csv.push_str("iter,div_norm_regularized,div_norm_unit\n");
    let rows = reg.records.len().max(unit.records.len());
    let cell = |h: &IterationHistory, k: usize| h.records.get(k).map_or(String::new(), |r| fmt_value(r.div_norm));
    for k in 0..rows {
        let _ = writeln!(csv, "{},{},{}", k + 1, cell(reg, k), cell(unit, k));
    }
    let summary = |name: &str, h: &IterationHistory| {
        format!(
            "{name}: converged={} iterations={} final_div_norm={}",
            h.converged(),
            h.iterations,
            h.final_div_norm().map_or("n/a".to_string(), fmt_value)
        )
    };
    let report = format!("{}\n{}", summary("regularized", reg), summary("unit", unit));
    let exit_code = if reg.converged() && unit.converged() { EXIT_OK } else { EXIT_NOT_CONVERGED };
    CommandOutput { csv: Some(csv), report, exit_code }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub m: f64,
    pub m_converged: bool,
    pub big_m: f64,
    pub big_m_converged: bool,
    pub sufficient: bool,
    pub predicted_rho: Option<f64>,
}

impl SpectrumReport {
    pub fn line(&self) -> String {
        format!(
            "m={} M={} one_over_M={} sufficient={} predicted_rho={} m_converged={} M_converged={}",
            fmt_value(self.m),
            fmt_value(self.big_m),
            fmt_value(1.0 / self.big_m),
            self.sufficient,
            self.predicted_rho.map_or("n/a".to_string(), fmt_value),
            self.m_converged,
            self.big_m_converged
        )
    }
}

pub fn spectrum(cfg: &RunConfig) -> Result<SpectrumReport> {
    let sys = build_mac_stokes(cfg.mesh_n, cfg.lid)?;
    let prob = sys.problem().clone().with_inner(InnerSolve { tol: cfg.inner_tol, max_iter: cfg.inner_max });
    let (top, low) = rayon::join(
        || prob.estimate_extreme_eigen(Extreme::Max, cfg.eig_tol, cfg.eig_max_iter, cfg.seed),
        || prob.estimate_extreme_eigen(Extreme::Min, cfg.eig_tol, cfg.eig_max_iter, cfg.seed),
    );
    let (top, low) = (top?, low?);
    let predicted_rho = if cfg.mesh_n <= ORACLE_MESH_LIMIT {
        let eigs = schur_spectrum(&prob)?;
        Some(companion_spectral_radius(&eigs, cfg.alpha2, cfg.beta)?)
    } else {
        None
    };
    Ok(SpectrumReport {
        m: low.value,
        m_converged: low.converged,
        big_m: top.value,
        big_m_converged: top.converged,
        sufficient: check_sufficient_condition(cfg.alpha2, cfg.beta, top.value),
        predicted_rho,
    })
}

pub fn cmd_spectrum(cfg: &RunConfig) -> CommandOutput {
    match spectrum(cfg) {
        Ok(rep) => {
            let line = rep.line();
            let mut doc = cfg.metadata();
            doc.push_str(&line);
            doc.push('\n');
            let exit_code = if rep.m_converged && rep.big_m_converged { EXIT_OK } else { EXIT_NOT_CONVERGED };
            CommandOutput { csv: Some(doc), report: line, exit_code }
        }
        Err(e) => internal(None, &e),
    }
}

#[derive(Debug, Parser)]
#[command(name = "uzawa-cavity", about = "Uzawa-type pressure iterations on the lid-driven cavity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Single run: per-iteration increments and divergence norm.
    Run(CommonArgs),
    /// Iteration counts over mesh_list × beta_list.
    Sweep(CommonArgs),
    /// Divergence-norm traces for the regularized and unit lids.
    Divnorm(CommonArgs),
    /// Schur complement bounds m, M and the sufficient condition.
    Spectrum(CommonArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Flat key=value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one setting (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Builds the effective configuration for a subcommand.
pub fn resolve_config(command: &str, config: Option<&Path>, sets: &[String]) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if command == "divnorm" {
        cfg.mesh_n = 40;
        cfg.alpha2 = 1.5;
        cfg.beta = 0.05;
    }
    if let Some(path) = config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::invalid(format!("cannot read config {}: {e}", path.display())))?;
        cfg.apply_text(&text)?;
    }
    for s in sets {
        cfg.apply_assignment(s)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Entry point shared by the binary and the tests.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            if code == EXIT_OK {
                let _ = write!(stdout, "{}", e.render());
            } else {
                let _ = write!(stderr, "{}", e.render());
            }
            return code;
        }
    };
    let (name, args) = match &cli.command {
        Command::Run(a) => ("run", a),
        Command::Sweep(a) => ("sweep", a),
        Command::Divnorm(a) => ("divnorm", a),
        Command::Spectrum(a) => ("spectrum", a),
    };
    let cfg = match resolve_config(name, args.config.as_deref(), &args.set) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let out = match name {
        "run" => cmd_run(&cfg),
        "sweep" => cmd_sweep(&cfg),
        "divnorm" => cmd_divnorm(&cfg),
        _ => cmd_spectrum(&cfg),
    };

    if let Some(csv) = &out.csv {
        match &args.out {
            Some(path) => {
                if let Err(e) = std::fs::write(path, csv) {
                    let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
                    return EXIT_INTERNAL;
                }
            }
            None if name != "spectrum" => {
                let _ = stdout.write_all(csv.as_bytes());
            }
            None => {}
        }
    }
    if out.exit_code == EXIT_INTERNAL {
        let _ = writeln!(stderr, "{}", out.report);
    } else {
        let _ = writeln!(stdout, "{}", out.report);
    }
    out.exit_code
}
