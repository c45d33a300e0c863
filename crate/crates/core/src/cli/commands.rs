use std::fs::File;
use std::io::{BufWriter, Write};

use serde::Serialize;

use super::config::{BacktestPlan, Comparison, OutputFormat, RunConfig};
use crate::analytic_pricing::perfect_hedge_price;
use crate::efficient_hedging::{
    calibrate_linear, calibrate_power, DMode, HedgePlan, LossSpec, PlanConstant,
};
use crate::error::{Error, Result};
use crate::monte_carlo::{
    generator_for, mc_price, refinement_study, shortfall_samples, write_paths_csv, CappedClaim,
    HedgeMode, HedgeStrategy, McEstimate, Measure, PathGenerator, PathGrid, RefinementRow,
    ScaledPerfectHedge,
};
use crate::term_structure::MarketModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Price,
    Calibrate,
    HedgeSurface,
    Simulate,
    Backtest,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Report {
    Price(PriceReport),
    Calibrate(CalibrateReport),
    HedgeSurface(SurfaceReport),
    Simulate(SimulateReport),
    Backtest(BacktestReport),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PriceReport {
    pub model: &'static str,
    pub t: f64,
    pub x: f64,
    pub price: f64,
    pub mc: Option<McEstimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanSummary {
    pub constant: PlanConstant,
    /// Plan value at `(0, x_0)`.
    pub value: f64,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationRow {
    pub d_mode: Option<DMode>,
    pub plan: Option<PlanSummary>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrateReport {
    pub loss: LossSpec,
    pub budget: f64,
    pub perfect_price: f64,
    pub results: Vec<CalibrationRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfaceRow {
    pub t: f64,
    pub x: f64,
    pub value: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfaceReport {
    pub budget: f64,
    pub rows: Vec<SurfaceRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyRisk {
    pub strategy: String,
    pub initial_capital: f64,
    pub risk: McEstimate,
    /// This strategy's risk minus the plan's, over common paths.
    pub excess_over_plan: McEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulateReport {
    pub mode: HedgeMode,
    pub loss: LossSpec,
    pub budget: f64,
    pub perfect_price: f64,
    pub steps: usize,
    pub rows: Vec<StrategyRisk>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BacktestReport {
    pub plan: BacktestPlan,
    pub loss: LossSpec,
    pub budget: f64,
    pub perfect_price: f64,
    pub rows: Vec<RefinementRow>,
}

fn plan_for(cfg: &RunConfig, model: &MarketModel, budget: f64, d_mode: DMode) -> Result<HedgePlan> {
    match cfg.loss {
        LossSpec::Power { p } => calibrate_power(model, p, budget),
        LossSpec::Linear => calibrate_linear(model, budget, d_mode),
    }
}

fn summarize(plan: &HedgePlan) -> Result<PlanSummary> {
    Ok(PlanSummary {
        constant: *plan.constant(),
        value: plan.value_and_delta(0.0, plan.model().spot())?.0,
        iterations: plan.calibration().iterations,
        residual: plan.calibration().residual,
    })
}

pub fn execute(command: Command, cfg: &RunConfig) -> Result<Report> {
    let model = cfg.validate()?;
    let perfect_price = perfect_hedge_price(&model, 0.0, model.spot())?;
    let budget = cfg.budget_amount(perfect_price);
    match command {
        Command::Price => price(cfg, &model).map(Report::Price),
        Command::Calibrate => {
            let modes: Vec<Option<DMode>> = match cfg.loss {
                LossSpec::Power { .. } => vec![None],
                LossSpec::Linear => vec![Some(DMode::Max), Some(DMode::Min)],
            };
            let mut results = Vec::new();
            for mode in modes {
                let outcome = plan_for(cfg, &model, budget, mode.unwrap_or(cfg.d_mode))
                    .and_then(|p| summarize(&p));
                let row = match outcome {
                    Ok(plan) => CalibrationRow {
                        d_mode: mode,
                        plan: Some(plan),
                        error: None,
                    },
                    // The configured mode must succeed; the other is informational.
                    Err(e) if mode.is_some() && mode != Some(cfg.d_mode) => CalibrationRow {
                        d_mode: mode,
                        plan: None,
                        error: Some(e.to_string()),
                    },
                    Err(e) => return Err(e),
                };
                results.push(row);
            }
            Ok(Report::Calibrate(CalibrateReport {
                loss: cfg.loss,
                budget,
                perfect_price,
                results,
            }))
        }
        Command::HedgeSurface => {
            let plan = plan_for(cfg, &model, budget, cfg.d_mode)?;
            let mut rows = Vec::new();
            for &t in &cfg.surface.times {
                if !(t >= 0.0 && t < model.horizon()) {
                    return Err(Error::OutsideDomain {
                        time: t,
                        domain_end: model.horizon(),
                    });
                }
                for x in cfg.surface.prices(model.strike()) {
                    let (value, delta) = plan.value_and_delta(t, x)?;
                    rows.push(SurfaceRow { t, x, value, delta });
                }
            }
            Ok(Report::HedgeSurface(SurfaceReport { budget, rows }))
        }
        Command::Simulate => simulate(cfg, &model, budget, perfect_price).map(Report::Simulate),
        Command::Backtest => {
            let plan = match cfg.backtest.plan {
                BacktestPlan::Calibrated => plan_for(cfg, &model, budget, cfg.d_mode)?,
                BacktestPlan::Perfect => {
                    let p = match cfg.loss {
                        LossSpec::Power { p } => p,
                        LossSpec::Linear => 2.0,
                    };
                    HedgePlan::power_with_level(&model, p, model.strike())?
                }
            };
            let rows = refinement_study(&plan, cfg.loss, &cfg.mc.config(), &cfg.backtest.steps)?;
            if let Some(&steps) = cfg.backtest.steps.last() {
                dump_paths(cfg, &model, steps)?;
            }
            Ok(Report::Backtest(BacktestReport {
                plan: cfg.backtest.plan,
                loss: cfg.loss,
                budget: plan.budget(),
                perfect_price,
                rows,
            }))
        }
    }
}

fn price(cfg: &RunConfig, model: &MarketModel) -> Result<PriceReport> {
    let t = cfg.price.t;
    let x = cfg.price.x.unwrap_or(model.spot());
    let price = perfect_hedge_price(model, t, x)?;
    let mc = if cfg.price.mc_check {
        if t != 0.0 {
            return Err(Error::param(
                "price.mc_check",
                "Monte Carlo check is only offered at t = 0",
            ));
        }
        let model = model.with_spot(x)?;
        let grid = PathGrid::uniform(model.horizon(), cfg.mc.steps)?;
        let generator = generator_for(&model, grid, Measure::RiskNeutral)?;
        let strike = model.strike();
        Some(mc_price(&cfg.mc.config(), generator.as_ref(), |p| {
            (p.terminal() - strike).max(0.0)
        })?)
    } else {
        None
    };
    Ok(PriceReport {
        model: model.kind().name(),
        t,
        x,
        price,
        mc,
    })
}

fn simulate(
    cfg: &RunConfig,
    model: &MarketModel,
    budget: f64,
    perfect_price: f64,
) -> Result<SimulateReport> {
    let plan = plan_for(cfg, model, budget, cfg.d_mode)?;
    let mut strategies: Vec<(String, Box<dyn HedgeStrategy>)> =
        vec![("efficient_plan".into(), Box::new(plan.clone()))];
    for c in &cfg.simulate.comparisons {
        match *c {
            Comparison::NaiveFraction => strategies.push((
                "naive_fraction".into(),
                Box::new(ScaledPerfectHedge::with_budget(model, budget)?),
            )),
            Comparison::FlatCap => strategies.push((
                "flat_cap".into(),
                Box::new(CappedClaim::calibrate(model, 0.0, budget)?),
            )),
            Comparison::Capped { multiple } => {
                let PlanConstant::Level { exponent, .. } = *plan.constant() else {
                    return Err(Error::param(
                        "simulate.comparisons",
                        "capped comparisons need power loss",
                    ));
                };
                strategies.push((
                    format!("capped_x{multiple}"),
                    Box::new(CappedClaim::calibrate(model, multiple * exponent, budget)?),
                ));
            }
        }
    }

    let grid = PathGrid::uniform(model.horizon(), cfg.mc.steps)?;
    let generator = generator_for(model, grid, Measure::Physical)?;
    let mc = cfg.mc.config();
    let samples: Vec<Vec<f64>> = strategies
        .iter()
        .map(|(_, s)| {
            shortfall_samples(
                &mc,
                generator.as_ref(),
                s.as_ref(),
                cfg.loss,
                cfg.simulate.mode,
            )
        })
        .collect::<Result<_>>()?;
    dump_paths_with(cfg, generator.as_ref())?;

    let rows = strategies
        .iter()
        .zip(&samples)
        .map(|((name, s), losses)| StrategyRisk {
            strategy: name.clone(),
            initial_capital: s.initial_capital(),
            risk: McEstimate::from_samples(losses, mc.seed, mc.antithetic),
            excess_over_plan: McEstimate::paired_difference(
                losses,
                &samples[0],
                mc.seed,
                mc.antithetic,
            ),
        })
        .collect();
    Ok(SimulateReport {
        mode: cfg.simulate.mode,
        loss: cfg.loss,
        budget,
        perfect_price,
        steps: cfg.mc.steps,
        rows,
    })
}

fn dump_paths(cfg: &RunConfig, model: &MarketModel, steps: usize) -> Result<()> {
    if cfg.output.dump_paths.is_none() {
        return Ok(());
    }
    let grid = PathGrid::uniform(model.horizon(), steps)?;
    dump_paths_with(cfg, generator_for(model, grid, Measure::Physical)?.as_ref())
}

fn dump_paths_with<G: PathGenerator + ?Sized>(cfg: &RunConfig, generator: &G) -> Result<()> {
    let Some(path) = &cfg.output.dump_paths else {
        return Ok(());
    };
    let file = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    write_paths_csv(
        generator,
        &cfg.mc.config(),
        cfg.output.dump_limit,
        BufWriter::new(file),
    )
}

#[derive(Serialize)]
struct Envelope<'a> {
    config: &'a RunConfig,
    report: &'a Report,
}

/// Renders the report in the configured format.
pub fn render(cfg: &RunConfig, report: &Report) -> Result<Vec<u8>> {
    match cfg.output.format {
        OutputFormat::Json => {
            let mut text = serde_json::to_string_pretty(&Envelope {
                config: cfg,
                report,
            })
            .map_err(|e| Error::Io(e.to_string()))?;
            text.push('\n');
            Ok(text.into_bytes())
        }
        OutputFormat::Csv => report_csv(report),
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn report_csv(report: &Report) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    match report {
        Report::Price(r) => {
            w.write_record([
                "model",
                "t",
                "x",
                "price",
                "mc_mean",
                "mc_std_error",
                "n_paths",
                "seed",
            ])
            .map_err(io)?;
            w.write_record([
                r.model.to_string(),
                r.t.to_string(),
                r.x.to_string(),
                r.price.to_string(),
                opt(r.mc.map(|m| m.mean)),
                opt(r.mc.map(|m| m.std_error)),
                r.mc.map(|m| m.n_paths.to_string()).unwrap_or_default(),
                r.mc.map(|m| m.seed.to_string()).unwrap_or_default(),
            ])
            .map_err(io)?;
        }
        Report::Calibrate(r) => {
            w.write_record([
                "d_mode",
                "budget",
                "perfect_price",
                "constant",
                "value",
                "iterations",
                "residual",
                "d",
                "error",
            ])
            .map_err(io)?;
            for row in &r.results {
                let mode = match row.d_mode {
                    Some(DMode::Min) => "min",
                    Some(DMode::Max) => "max",
                    None => "",
                };
                let (constant, d) = match row.plan.as_ref().map(|p| p.constant) {
                    Some(PlanConstant::Level { level, .. }) => (Some(level), None),
                    Some(PlanConstant::ATilde { a_tilde, d, .. }) => (Some(a_tilde), Some(d)),
                    None => (None, None),
                };
                w.write_record([
                    mode.to_string(),
                    r.budget.to_string(),
                    r.perfect_price.to_string(),
                    opt(constant),
                    opt(row.plan.as_ref().map(|p| p.value)),
                    row.plan
                        .as_ref()
                        .map(|p| p.iterations.to_string())
                        .unwrap_or_default(),
                    opt(row.plan.as_ref().map(|p| p.residual)),
                    opt(d),
                    row.error.clone().unwrap_or_default(),
                ])
                .map_err(io)?;
            }
        }
        Report::HedgeSurface(r) => {
            w.write_record(["t", "x", "value", "delta"]).map_err(io)?;
            for row in &r.rows {
                w.write_record([
                    row.t.to_string(),
                    row.x.to_string(),
                    row.value.to_string(),
                    row.delta.to_string(),
                ])
                .map_err(io)?;
            }
        }
        Report::Simulate(r) => {
            w.write_record([
                "strategy",
                "initial_capital",
                "risk",
                "std_error",
                "excess_over_plan",
                "excess_std_error",
                "n_paths",
                "seed",
            ])
            .map_err(io)?;
            for row in &r.rows {
                w.write_record([
                    row.strategy.clone(),
                    row.initial_capital.to_string(),
                    row.risk.mean.to_string(),
                    row.risk.std_error.to_string(),
                    row.excess_over_plan.mean.to_string(),
                    row.excess_over_plan.std_error.to_string(),
                    row.risk.n_paths.to_string(),
                    row.risk.seed.to_string(),
                ])
                .map_err(io)?;
            }
        }
        Report::Backtest(r) => {
            w.write_record([
                "steps",
                "rms_error",
                "rms_std_error",
                "mean_error",
                "backtest_risk",
                "terminal_risk",
                "gap",
                "gap_std_error",
                "n_paths",
                "seed",
            ])
            .map_err(io)?;
            for row in &r.rows {
                w.write_record([
                    row.steps.to_string(),
                    row.rms_error.to_string(),
                    row.rms_std_error.to_string(),
                    row.mean_error.to_string(),
                    row.backtest_risk.mean.to_string(),
                    row.terminal_risk.mean.to_string(),
                    row.gap.mean.to_string(),
                    row.gap.std_error.to_string(),
                    row.gap.n_paths.to_string(),
                    row.gap.seed.to_string(),
                ])
                .map_err(io)?;
            }
        }
    }
    w.into_inner().map_err(|e| Error::Io(e.to_string()))
}

/// Writes rendered output to the configured path or to `stdout`.
pub fn emit(cfg: &RunConfig, bytes: &[u8], stdout: &mut dyn Write) -> Result<()> {
    match &cfg.output.path {
        Some(path) => {
            std::fs::write(path, bytes).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
        }
        None => Ok(stdout.write_all(bytes)?),
    }
}
