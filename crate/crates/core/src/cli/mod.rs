//! Command-line front end.
//!
//! Settings come from an optional JSON config file, overridden field by field
//! by command-line flags. Exit codes: 0 success, 1 configuration or I/O
//! error, 2 function text that fails to parse, 3 numeric failure.

mod commands;
mod reproduce;

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::analysis::{DEFAULT_FD_STEP, DEFAULT_SURFACE_GRID};
use crate::bivariate::BivariateParams;
use crate::error::Error;
use crate::field::ScalarField;
use crate::moduli::DEFAULT_MODULUS_GRID;
use crate::special_functions::DEFAULT_QUAD_NODES;
use crate::univariate::UnivariateParams;

pub use reproduce::{reproduce, ReproduceSummary, RunSummary};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "FRAC_KANT_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Eval,
    Moments,
    Surface,
    Converge,
    Voronovskaya,
    Covariance,
    Bounds,
    Reproduce,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Example1,
    Example2,
    Example3,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Example1 => "example1",
            Preset::Example2 => "example2",
            Preset::Example3 => "example3",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// A function given either as expression text or as a catalog name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctionSpec {
    Expr(String),
    Builtin(String),
}

impl FunctionSpec {
    pub fn resolve(&self) -> Result<ScalarField, CliError> {
        match self {
            FunctionSpec::Expr(src) => ScalarField::parse(src)
                .map_err(|e| CliError::Parse(format!("cannot parse function {src:?}: {e}"))),
            FunctionSpec::Builtin(name) => ScalarField::builtin(name)
                .ok_or_else(|| CliError::Config(format!("unknown builtin function {name:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsConfig {
    pub n: usize,
    pub m: usize,
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub quad_nodes: usize,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        Self {
            n: 10,
            m: 10,
            alpha1: 0.5,
            alpha2: 0.5,
            beta1: 0.5,
            beta2: 0.5,
            quad_nodes: DEFAULT_QUAD_NODES,
        }
    }
}

impl ParamsConfig {
    pub fn bivariate(&self) -> Result<BivariateParams, CliError> {
        Ok(
            BivariateParams::new(self.n, self.m, self.alpha1, self.alpha2, self.beta1, self.beta2)?
                .with_quad_nodes(self.quad_nodes)?,
        )
    }

    /// The `x`-axis parameters, used for univariate functions.
    pub fn univariate(&self) -> Result<UnivariateParams, CliError> {
        Ok(UnivariateParams::new(self.n, self.alpha1, self.beta1)?.with_quad_nodes(self.quad_nodes)?)
    }

    pub fn from_bivariate(p: &BivariateParams) -> Self {
        Self {
            n: p.n,
            m: p.m,
            alpha1: p.alpha1,
            alpha2: p.alpha2,
            beta1: p.beta1,
            beta2: p.beta2,
            quad_nodes: p.quad_nodes,
        }
    }
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<CommandKind>,
    pub preset: Option<Preset>,
    pub function: Option<FunctionSpec>,
    pub second_function: Option<FunctionSpec>,
    pub params: ParamsConfig,
    pub x: f64,
    pub y: f64,
    pub grid: usize,
    pub ladder: Vec<usize>,
    pub fd_step: f64,
    pub modulus_grid: usize,
    pub probe: usize,
    pub lipschitz_m: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub paper_ank: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: None,
            preset: None,
            function: None,
            second_function: None,
            params: ParamsConfig::default(),
            x: 0.5,
            y: 0.5,
            grid: DEFAULT_SURFACE_GRID,
            ladder: vec![8, 16, 32],
            fd_step: DEFAULT_FD_STEP,
            modulus_grid: DEFAULT_MODULUS_GRID,
            probe: 5,
            lipschitz_m: 1.0,
            gamma1: 1.0,
            gamma2: 1.0,
            output_path: None,
            format: Format::Csv,
            paper_ank: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let command = self
            .command
            .ok_or_else(|| CliError::Config("no command given".into()))?;
        if self.grid < 2 {
            return Err(CliError::Config(format!("grid must be at least 2, got {}", self.grid)));
        }
        if self.modulus_grid < 2 || self.probe < 2 {
            return Err(CliError::Config("modulus_grid and probe must be at least 2".into()));
        }
        let needs_function = !matches!(command, CommandKind::Reproduce | CommandKind::Moments);
        if needs_function && self.function.is_none() {
            return Err(CliError::Config(
                "this command needs a function (--fn EXPR or --builtin NAME)".into(),
            ));
        }
        if command == CommandKind::Covariance && self.second_function.is_none() {
            return Err(CliError::Config(
                "covariance needs a second function (--fn2 EXPR or --builtin2 NAME)".into(),
            ));
        }
        if command == CommandKind::Reproduce && self.preset.is_none() {
            return Err(CliError::Config(
                "reproduce needs a preset: example1, example2 or example3".into(),
            ));
        }
        Ok(())
    }
}

/// Command-line flags; every flag overrides the corresponding config entry.
#[derive(Debug, Parser)]
#[command(name = "frac-kantorovich", version, about = "Fractional α-Bernstein–Kantorovich operators")]
pub struct Args {
    /// Command to run
    #[arg(value_enum)]
    pub command: Option<CommandKind>,
    /// Preset for `reproduce`
    #[arg(value_enum)]
    pub preset: Option<Preset>,

    /// Function as expression text in x and y
    #[arg(long = "fn", value_name = "EXPR", conflicts_with = "builtin")]
    pub function: Option<String>,
    /// Function from the builtin catalog
    #[arg(long, value_name = "NAME")]
    pub builtin: Option<String>,
    /// Second function for `covariance`
    #[arg(long = "fn2", value_name = "EXPR", conflicts_with = "builtin2")]
    pub function2: Option<String>,
    #[arg(long, value_name = "NAME")]
    pub builtin2: Option<String>,

    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub alpha1: Option<f64>,
    #[arg(long)]
    pub alpha2: Option<f64>,
    #[arg(long)]
    pub beta1: Option<f64>,
    #[arg(long)]
    pub beta2: Option<f64>,
    #[arg(long)]
    pub quad_nodes: Option<usize>,

    #[arg(long, allow_negative_numbers = true)]
    pub x: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub y: Option<f64>,
    /// Points per axis of evaluation grids
    #[arg(long)]
    pub grid: Option<usize>,
    /// Degrees n = m for ladder studies, comma separated
    #[arg(long, value_delimiter = ',')]
    pub ladder: Option<Vec<usize>>,
    #[arg(long)]
    pub fd_step: Option<f64>,
    /// Points per axis for modulus estimates
    #[arg(long)]
    pub modulus_grid: Option<usize>,
    /// Points per axis of the probe grid for `bounds`
    #[arg(long)]
    pub probe: Option<usize>,
    #[arg(long)]
    pub lipschitz_m: Option<f64>,
    #[arg(long)]
    pub gamma1: Option<f64>,
    #[arg(long)]
    pub gamma2: Option<f64>,

    /// Output file (directory for `reproduce`); stdout when absent
    #[arg(long = "out", value_name = "PATH")]
    pub output_path: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// JSON config file; flags take precedence over its entries
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Use the printed affine coefficients k(n+1)(β+1)/(n(kβ+1)) in `A`
    #[arg(long)]
    pub paper_ank: bool,
    /// Print the effective config as JSON and exit
    #[arg(long)]
    pub dump_config: bool,
}

impl Args {
    /// Applies the flags on top of `base`.
    pub fn merge_into(&self, mut cfg: RunConfig) -> RunConfig {
        macro_rules! set {
            ($($flag:ident => $($field:ident).+),* $(,)?) => {
                $(if let Some(v) = self.$flag.clone() { cfg.$($field).+ = v; })*
            };
        }
        set! {
            n => params.n, m => params.m,
            alpha1 => params.alpha1, alpha2 => params.alpha2,
            beta1 => params.beta1, beta2 => params.beta2,
            quad_nodes => params.quad_nodes,
            x => x, y => y, grid => grid, ladder => ladder, fd_step => fd_step,
            modulus_grid => modulus_grid, probe => probe,
            lipschitz_m => lipschitz_m, gamma1 => gamma1, gamma2 => gamma2,
            format => format,
        }
        if self.command.is_some() {
            cfg.command = self.command;
        }
        if self.preset.is_some() {
            cfg.preset = self.preset;
        }
        if let Some(src) = &self.function {
            cfg.function = Some(FunctionSpec::Expr(src.clone()));
        } else if let Some(name) = &self.builtin {
            cfg.function = Some(FunctionSpec::Builtin(name.clone()));
        }
        if let Some(src) = &self.function2 {
            cfg.second_function = Some(FunctionSpec::Expr(src.clone()));
        } else if let Some(name) = &self.builtin2 {
            cfg.second_function = Some(FunctionSpec::Builtin(name.clone()));
        }
        if self.output_path.is_some() {
            cfg.output_path = self.output_path.clone();
        }
        cfg.paper_ank |= self.paper_ank;
        cfg
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config(String),
    Parse(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) => CliError::Config(e.to_string()),
            Error::Parse(_) => CliError::Parse(e.to_string()),
            Error::Domain { .. } | Error::NonFinite { .. } | Error::NoConvergence { .. } => {
                CliError::Numeric(e.to_string())
            }
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Config(format!("{}: {e}", path.display()))
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| io_error(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| io_error(path, e))
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: invalid config: {e}", path.display())))
}

/// Builds the effective configuration from parsed flags.
pub fn resolve_config(args: &Args) -> Result<RunConfig, CliError> {
    let base = match &args.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    Ok(args.merge_into(base))
}

/// Runs a validated configuration, writing to the configured output or `out`.
pub fn run(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    cfg.validate()?;
    let text = match cfg.command.expect("validated") {
        CommandKind::Reproduce => {
            let dir = cfg
                .output_path
                .clone()
                .unwrap_or_else(|| PathBuf::from(cfg.preset.expect("validated").name()));
            let summary = reproduce(cfg.preset.expect("validated"), cfg, &dir)?;
            let mut listing = String::new();
            for file in &summary.files {
                listing.push_str(&format!("wrote {}\n", dir.join(file).display()));
            }
            out.write_all(listing.as_bytes())
                .map_err(|e| CliError::Config(format!("stdout: {e}")))?;
            return Ok(());
        }
        other => commands::execute(other, cfg)?,
    };
    match &cfg.output_path {
        Some(path) => write_file(path, &text),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Config(format!("stdout: {e}"))),
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t >= 1)
        .ok_or_else(|| CliError::Config(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot configure thread pool: {e}")))
}

/// Entry point shared by the binary; returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = configure_threads().and_then(|()| {
        let cfg = resolve_config(&args)?;
        let stdout = std::io::stdout();
        let mut lock = stdout.lock();
        if args.dump_config {
            let text = serde_json::to_string_pretty(&cfg)
                .map_err(|e| CliError::Config(format!("cannot serialize config: {e}")))?;
            return writeln!(lock, "{text}").map_err(|e| CliError::Config(format!("stdout: {e}")));
        }
        run(&cfg, &mut lock)?;
        lock.flush().map_err(|e| CliError::Config(format!("stdout: {e}")))
    });
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(list: &[&str]) -> Args {
        Args::try_parse_from(std::iter::once("frac-kantorovich").chain(list.iter().copied())).unwrap()
    }

    #[test]
    fn flags_override_config() {
        let base = RunConfig {
            grid: 7,
            x: 0.1,
            params: ParamsConfig {
                n: 4,
                ..ParamsConfig::default()
            },
            ..RunConfig::default()
        };
        let cfg = args(&["surface", "--builtin", "ts", "--n", "9", "--x", "0.9"]).merge_into(base);
        assert_eq!(cfg.command, Some(CommandKind::Surface));
        assert_eq!(cfg.params.n, 9);
        assert_eq!(cfg.grid, 7);
        assert_eq!(cfg.x, 0.9);
        assert_eq!(cfg.function, Some(FunctionSpec::Builtin("ts".into())));
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = args(&["converge", "--fn", "x*y", "--ladder", "4,8", "--paper-ank"])
            .merge_into(RunConfig::default());
        let text = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.ladder, vec![4, 8]);
        assert!(back.paper_ank);
    }

    #[test]
    fn partial_config_uses_defaults() {
        let cfg: RunConfig = serde_json::from_str(r#"{"command":"eval","params":{"n":3}}"#).unwrap();
        assert_eq!(cfg.params.n, 3);
        assert_eq!(cfg.params.m, 10);
        assert_eq!(cfg.grid, DEFAULT_SURFACE_GRID);
        assert!(serde_json::from_str::<RunConfig>(r#"{"bogus":1}"#).is_err());
    }

    #[test]
    fn validation_and_exit_codes() {
        let cfg = args(&["surface"]).merge_into(RunConfig::default());
        assert_eq!(cfg.validate().unwrap_err().exit_code(), 1);
        let cfg = args(&["reproduce"]).merge_into(RunConfig::default());
        assert_eq!(cfg.validate().unwrap_err().exit_code(), 1);
        let bad = FunctionSpec::Expr("x +* y".into()).resolve().unwrap_err();
        assert_eq!(bad.exit_code(), 2);
        assert_eq!(FunctionSpec::Builtin("nope".into()).resolve().unwrap_err().exit_code(), 1);
        let numeric: CliError = Error::NonFinite { point: "x = 0".into() }.into();
        assert_eq!(numeric.exit_code(), 3);
        assert_eq!(main_with_args(["frac-kantorovich", "--no-such-flag"]), 1);
    }
}
