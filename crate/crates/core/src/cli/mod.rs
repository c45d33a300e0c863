//! Command-line front end. The binary is a thin wrapper around
//! [`main_with_args`].
//!
//! Exit codes: 0 success, 2 validation error, 3 numerical failure, 4 I/O.
//! Errors go to standard error prefixed with `E<code>:`.

mod commands;
mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::{
    emit, execute, render, BacktestReport, CalibrateReport, CalibrationRow, Command, PlanSummary,
    PriceReport, Report, SimulateReport, StrategyRisk, SurfaceReport, SurfaceRow,
};
pub use config::{
    BacktestPlan, BacktestSpec, BudgetSpec, Comparison, McSpec, ModelSpec, OptionSpec,
    OutputFormat, OutputSpec, PriceSpec, RunConfig, SimulateSpec, SurfaceSpec,
};

use crate::efficient_hedging::{DMode, LossSpec};
use crate::error::{Error, ErrorKind, Result};

#[derive(Debug, Parser)]
#[command(
    name = "effhedge",
    version,
    about = "Efficient hedging of European calls"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum CliCommand {
    /// Perfect-hedge price, optionally with a Monte Carlo check.
    Price,
    /// Calibrate the efficient-hedging plan to the budget.
    Calibrate,
    /// Tabulate plan value and hedge ratio over a (t, x) grid.
    HedgeSurface,
    /// Shortfall risk of the plan against comparison strategies.
    Simulate,
    /// Replication error of discrete rebalancing as the grid is refined.
    Backtest,
}

impl From<CliCommand> for Command {
    fn from(c: CliCommand) -> Self {
        match c {
            CliCommand::Price => Command::Price,
            CliCommand::Calibrate => Command::Calibrate,
            CliCommand::HedgeSurface => Command::HedgeSurface,
            CliCommand::Simulate => Command::Simulate,
            CliCommand::Backtest => Command::Backtest,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LossArg {
    Power,
    Linear,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DModeArg {
    Min,
    Max,
}

/// Flags applied on top of the config file (or the defaults).
#[derive(Debug, Default, Args)]
pub struct Overrides {
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// `standard:m=..,sigma=..`, `fractional:m=..,sigma=..,hurst=..` or `curve:<file.csv>`.
    #[arg(long, global = true)]
    pub model: Option<String>,
    /// Initial (discounted) price x_0.
    #[arg(long, global = true)]
    pub spot: Option<f64>,
    /// Call strike K.
    #[arg(long, global = true)]
    pub strike: Option<f64>,
    /// Maturity T in years.
    #[arg(long, global = true)]
    pub horizon: Option<f64>,
    /// Loss function.
    #[arg(long, global = true, value_enum)]
    pub loss: Option<LossArg>,
    /// Power-loss exponent; implies `--loss power`.
    #[arg(long, global = true)]
    pub p: Option<f64>,
    /// Budget as a fraction of the perfect-hedge price.
    #[arg(long, global = true, conflicts_with = "budget")]
    pub budget_frac: Option<f64>,
    /// Budget in currency.
    #[arg(long, global = true)]
    pub budget: Option<f64>,
    /// Threshold rule for the linear-loss plan.
    #[arg(long, global = true, value_enum)]
    pub d_mode: Option<DModeArg>,
    /// Monte Carlo path count.
    #[arg(long, global = true)]
    pub paths: Option<u64>,
    /// Time steps per path.
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    /// Base RNG seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Use antithetic pairs.
    #[arg(long, global = true)]
    pub antithetic: bool,
    /// Add a Monte Carlo check to `price`.
    #[arg(long, global = true)]
    pub mc_check: bool,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Report format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<FormatArg>,
    /// Write simulated paths as `path_id,t,X` CSV.
    #[arg(long, global = true)]
    pub dump_paths: Option<PathBuf>,
}

impl Overrides {
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_path(path)?,
            None => RunConfig::default(),
        };
        if let Some(text) = &self.model {
            cfg.model = ModelSpec::parse(text)?;
        }
        if let Some(v) = self.spot {
            cfg.option.spot = v;
        }
        if let Some(v) = self.strike {
            cfg.option.strike = v;
        }
        if let Some(v) = self.horizon {
            cfg.option.horizon = v;
        }
        match (self.loss, self.p) {
            (Some(LossArg::Linear), Some(_)) => {
                return Err(Error::param("p", "--p applies to power loss only"));
            }
            (Some(LossArg::Linear), None) => cfg.loss = LossSpec::Linear,
            (_, Some(p)) => cfg.loss = LossSpec::Power { p },
            (Some(LossArg::Power), None) => {
                if cfg.loss == LossSpec::Linear {
                    cfg.loss = LossSpec::Power { p: 2.0 };
                }
            }
            (None, None) => {}
        }
        if let Some(f) = self.budget_frac {
            cfg.budget = BudgetSpec::Fraction(f);
        }
        if let Some(b) = self.budget {
            cfg.budget = BudgetSpec::Absolute(b);
        }
        if let Some(m) = self.d_mode {
            cfg.d_mode = match m {
                DModeArg::Min => DMode::Min,
                DModeArg::Max => DMode::Max,
            };
        }
        if let Some(v) = self.paths {
            cfg.mc.n_paths = v;
        }
        if let Some(v) = self.steps {
            cfg.mc.steps = v;
        }
        if let Some(v) = self.seed {
            cfg.mc.seed = v;
        }
        if let Some(v) = self.workers {
            cfg.mc.workers = v;
        }
        if self.antithetic {
            cfg.mc.antithetic = true;
        }
        if self.mc_check {
            cfg.price.mc_check = true;
        }
        if let Some(v) = &self.out {
            cfg.output.path = Some(v.clone());
        }
        if let Some(f) = self.format {
            cfg.output.format = match f {
                FormatArg::Csv => OutputFormat::Csv,
                FormatArg::Json => OutputFormat::Json,
            };
        }
        if let Some(v) = &self.dump_paths {
            cfg.output.dump_paths = Some(v.clone());
        }
        Ok(cfg)
    }
}

/// Resolves the config, runs the command and writes its output.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    let cfg = cli.overrides.resolve()?;
    let report = execute(cli.command.into(), &cfg)?;
    let bytes = render(&cfg, &report)?;
    emit(&cfg, &bytes, stdout)
}

/// Entry point shared by the binary and tests; returns the exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = write!(stdout, "{e}");
            return 0;
        }
        Err(e) => {
            let code = ErrorKind::Validation.code();
            let _ = write!(stderr, "E{code}: {e}");
            return code;
        }
    };
    match run(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let code = e.kind().code();
            let _ = writeln!(stderr, "E{code}: {e}");
            code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = main_with_args(
            std::iter::once("effhedge").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn price_at_the_money() {
        let (code, out, _) = run_args(&["price", "--format", "csv"]);
        assert_eq!(code, 0);
        assert!(out.contains("7.9655674554058"), "{out}");
    }

    #[test]
    fn full_budget_is_a_validation_error() {
        let (code, _, err) = run_args(&["calibrate", "--budget-frac", "1.0"]);
        assert_eq!(code, 2);
        assert!(err.starts_with("E2:"), "{err}");
        let (code, _, err) = run_args(&["calibrate", "--budget", "7.97"]);
        assert_eq!(code, 2);
        assert!(err.contains("perfect hedge affordable"), "{err}");
    }

    #[test]
    fn usage_errors_are_prefixed() {
        let (code, _, err) = run_args(&["frobnicate"]);
        assert_eq!(code, 2);
        assert!(err.starts_with("E2:"));
        let (code, _, err) = run_args(&["price", "--model", "heston:v=1"]);
        assert_eq!(code, 2);
        assert!(err.starts_with("E2:"));
    }

    #[test]
    fn missing_config_file_is_io() {
        let (code, _, err) = run_args(&["price", "--config", "/nonexistent/cfg.json"]);
        assert_eq!(code, 4);
        assert!(err.starts_with("E4:"));
    }

    #[test]
    fn fractional_backtest_rejected() {
        let (code, _, err) = run_args(&[
            "backtest",
            "--model",
            "fractional:m=0.08,sigma=0.2,hurst=0.7",
            "--paths",
            "10",
        ]);
        assert_eq!(code, 2);
        assert!(
            err.contains("pathwise backtest unsupported for H != 1/2"),
            "{err}"
        );
    }

    #[test]
    fn surface_outside_domain() {
        let mut cfg = RunConfig::default();
        cfg.surface.times = vec![1.0];
        assert!(matches!(
            execute(Command::HedgeSurface, &cfg),
            Err(Error::OutsideDomain { .. })
        ));
    }

    #[test]
    fn linear_calibration_reports_both_modes() {
        let cfg = RunConfig {
            loss: LossSpec::Linear,
            ..RunConfig::default()
        };
        let Report::Calibrate(r) = execute(Command::Calibrate, &cfg).unwrap() else {
            panic!()
        };
        assert_eq!(r.results.len(), 2);
        assert!(r
            .results
            .iter()
            .all(|row| row.plan.is_some() || row.error.is_some()));
        assert!(r.results[0].plan.is_some());
    }
}
