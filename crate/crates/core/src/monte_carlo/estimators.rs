use serde::{Deserialize, Serialize};

use super::paths::generator_for;
use super::{McConfig, McEstimate, Measure, PathGenerator, PathGrid, SimulatedPath};
use crate::analytic_pricing::{call_delta, call_value};
use crate::efficient_hedging::{
    calibrate_level, capped_claim_payoff, delta_capped, value_capped, HedgePlan, LossSpec,
};
use crate::error::{Error, Result};
use crate::term_structure::MarketModel;

/// A hedging strategy for the call: initial capital, holdings in the stock,
/// and the terminal claim it aims to replicate.
pub trait HedgeStrategy: Sync {
    fn model(&self) -> &MarketModel;
    fn initial_capital(&self) -> f64;
    /// Stock holdings at `(t, x)` for `0 <= t < T`.
    fn hedge_ratio(&self, t: f64, x: f64) -> Result<f64>;
    fn terminal_claim(&self, x_terminal: f64) -> f64;
}

impl HedgeStrategy for HedgePlan {
    fn model(&self) -> &MarketModel {
        HedgePlan::model(self)
    }

    fn initial_capital(&self) -> f64 {
        self.budget()
    }

    fn hedge_ratio(&self, t: f64, x: f64) -> Result<f64> {
        Ok(self.value_and_delta(t, x)?.1)
    }

    fn terminal_claim(&self, x_terminal: f64) -> f64 {
        HedgePlan::terminal_claim(self, x_terminal)
    }
}

/// Perfect hedge of a fixed fraction of the call.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledPerfectHedge {
    model: MarketModel,
    fraction: f64,
    price: f64,
}

impl ScaledPerfectHedge {
    pub fn new(model: &MarketModel, fraction: f64) -> Result<Self> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(Error::param(
                "fraction",
                format!("must lie in (0, 1], got {fraction}"),
            ));
        }
        let price = call_value(&model.window(0.0)?, model.spot(), model.strike())?;
        Ok(Self {
            model: model.clone(),
            fraction,
            price,
        })
    }

    /// Spends `budget` on `budget / U_0` units of the perfect hedge.
    pub fn with_budget(model: &MarketModel, budget: f64) -> Result<Self> {
        let price = call_value(&model.window(0.0)?, model.spot(), model.strike())?;
        Self::new(model, budget / price)
    }

    pub fn fraction(&self) -> f64 {
        self.fraction
    }
}

impl HedgeStrategy for ScaledPerfectHedge {
    fn model(&self) -> &MarketModel {
        &self.model
    }

    fn initial_capital(&self) -> f64 {
        self.fraction * self.price
    }

    fn hedge_ratio(&self, t: f64, x: f64) -> Result<f64> {
        Ok(self.fraction * call_delta(&self.model.window(t)?, x, self.model.strike())?)
    }

    fn terminal_claim(&self, x_terminal: f64) -> f64 {
        self.fraction * (x_terminal - self.model.strike()).max(0.0)
    }
}

/// Perfect hedge of `(X_T - K - (L - K)(L / X_T)^a)^+` for an arbitrary
/// exponent `a >= 0`. With `a = 0` this is the flat cap `(X_T - L)^+`.
#[derive(Debug, Clone, PartialEq)]
pub struct CappedClaim {
    model: MarketModel,
    level: f64,
    exponent: f64,
    budget: f64,
}

impl CappedClaim {
    /// Chooses the level so the claim costs `budget` at time 0.
    pub fn calibrate(model: &MarketModel, exponent: f64, budget: f64) -> Result<Self> {
        let (level, _) = calibrate_level(model, exponent, budget)?;
        Ok(Self {
            model: model.clone(),
            level,
            exponent,
            budget,
        })
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }
}

impl HedgeStrategy for CappedClaim {
    fn model(&self) -> &MarketModel {
        &self.model
    }

    fn initial_capital(&self) -> f64 {
        self.budget
    }

    fn hedge_ratio(&self, t: f64, x: f64) -> Result<f64> {
        delta_capped(
            &self.model.window(t)?,
            x,
            self.model.strike(),
            self.level,
            self.exponent,
        )
    }

    fn terminal_claim(&self, x_terminal: f64) -> f64 {
        capped_claim_payoff(x_terminal, self.model.strike(), self.level, self.exponent)
    }
}

impl CappedClaim {
    /// Time-`t` value of the claim at price `x`.
    pub fn value(&self, t: f64, x: f64) -> Result<f64> {
        value_capped(
            &self.model.window(t)?,
            x,
            self.model.strike(),
            self.level,
            self.exponent,
        )
    }
}

/// Where terminal wealth comes from when measuring shortfall.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HedgeMode {
    /// `V_T` is the strategy's terminal claim, as under continuous trading.
    TerminalClaim,
    /// `V_T = V_0 + sum xi(t_i, X_i)(X_{i+1} - X_i)` on the path grid.
    Backtest,
}

fn check_backtest_model(model: &MarketModel) -> Result<()> {
    if model.is_fractional() && model.hurst() != 0.5 {
        return Err(Error::FractionalBacktest);
    }
    Ok(())
}

/// Self-financing discrete rebalancing at the grid times. Returns terminal
/// wealth and replication error (wealth minus the strategy's claim).
pub fn backtest_hedge<S: HedgeStrategy + ?Sized>(
    strategy: &S,
    path: &SimulatedPath,
) -> Result<(f64, f64)> {
    check_backtest_model(strategy.model())?;
    let mut wealth = strategy.initial_capital();
    for (&t, step) in path.grid.times().iter().zip(path.prices.windows(2)) {
        let ratio = strategy.hedge_ratio(t, step[0])?;
        wealth += ratio * (step[1] - step[0]);
    }
    Ok((wealth, wealth - strategy.terminal_claim(path.terminal())))
}

/// Monte Carlo price of a path functional under the pricing measure.
pub fn mc_price<G, F>(mc: &McConfig, generator: &G, payoff: F) -> Result<McEstimate>
where
    G: PathGenerator + ?Sized,
    F: Fn(&SimulatedPath) -> f64 + Sync + Send,
{
    if generator.measure() != Measure::RiskNeutral {
        return Err(Error::MeasureMismatch { expected: "P*" });
    }
    mc.estimate(generator, payoff)
}

/// Per-path losses `l((H - V_T)^+)` under the physical measure.
pub fn shortfall_samples<G, S>(
    mc: &McConfig,
    generator: &G,
    strategy: &S,
    loss: LossSpec,
    mode: HedgeMode,
) -> Result<Vec<f64>>
where
    G: PathGenerator + ?Sized,
    S: HedgeStrategy + ?Sized,
{
    loss.validate()?;
    if generator.measure() != Measure::Physical {
        return Err(Error::MeasureMismatch { expected: "P" });
    }
    if strategy.model() != generator.model() {
        return Err(Error::ModelMismatch);
    }
    if mode == HedgeMode::Backtest {
        check_backtest_model(strategy.model())?;
    }
    let strike = generator.model().strike();
    mc.map_paths(generator, |path| {
        let x_terminal = path.terminal();
        let wealth = match mode {
            HedgeMode::TerminalClaim => strategy.terminal_claim(x_terminal),
            HedgeMode::Backtest => backtest_hedge(strategy, path)?.0,
        };
        let claim = (x_terminal - strike).max(0.0);
        Ok(loss.loss((claim - wealth).max(0.0)))
    })?
    .into_iter()
    .collect()
}

/// Shortfall risk `E[l((H - V_T)^+)]` under the physical measure.
pub fn shortfall_risk<G, S>(
    mc: &McConfig,
    generator: &G,
    strategy: &S,
    loss: LossSpec,
    mode: HedgeMode,
) -> Result<McEstimate>
where
    G: PathGenerator + ?Sized,
    S: HedgeStrategy + ?Sized,
{
    let samples = shortfall_samples(mc, generator, strategy, loss, mode)?;
    Ok(McEstimate::from_samples(&samples, mc.seed, mc.antithetic))
}

/// One row of a discretization study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RefinementRow {
    pub steps: usize,
    /// Root mean square replication error.
    pub rms_error: f64,
    /// Delta-method standard error of `rms_error`.
    pub rms_std_error: f64,
    pub mean_error: f64,
    pub backtest_risk: McEstimate,
    pub terminal_risk: McEstimate,
    /// Backtest minus terminal-claim risk over common paths.
    pub gap: McEstimate,
}

/// Backtests `strategy` on uniform grids with each step count under `P`.
pub fn refinement_study<S: HedgeStrategy + ?Sized>(
    strategy: &S,
    loss: LossSpec,
    mc: &McConfig,
    step_counts: &[usize],
) -> Result<Vec<RefinementRow>> {
    loss.validate()?;
    let model = strategy.model();
    check_backtest_model(model)?;
    let strike = model.strike();
    step_counts
        .iter()
        .map(|&steps| {
            let grid = PathGrid::uniform(model.horizon(), steps)?;
            let generator = generator_for(model, grid, Measure::Physical)?;
            let per_path: Vec<(f64, f64, f64)> = mc
                .map_paths(generator.as_ref(), |path| {
                    let (wealth, error) = backtest_hedge(strategy, path)?;
                    let claim = (path.terminal() - strike).max(0.0);
                    let terminal = strategy.terminal_claim(path.terminal());
                    Ok((
                        error,
                        loss.loss((claim - wealth).max(0.0)),
                        loss.loss((claim - terminal).max(0.0)),
                    ))
                })?
                .into_iter()
                .collect::<Result<_>>()?;
            let errors: Vec<f64> = per_path.iter().map(|r| r.0).collect();
            let squared: Vec<f64> = errors.iter().map(|e| e * e).collect();
            let backtest: Vec<f64> = per_path.iter().map(|r| r.1).collect();
            let terminal: Vec<f64> = per_path.iter().map(|r| r.2).collect();
            let (seed, anti) = (mc.seed, mc.antithetic);
            let mse = McEstimate::from_samples(&squared, seed, anti);
            let rms_error = mse.mean.sqrt();
            Ok(RefinementRow {
                steps,
                rms_error,
                rms_std_error: if rms_error > 0.0 {
                    mse.std_error / (2.0 * rms_error)
                } else {
                    0.0
                },
                mean_error: McEstimate::from_samples(&errors, seed, anti).mean,
                backtest_risk: McEstimate::from_samples(&backtest, seed, anti),
                terminal_risk: McEstimate::from_samples(&terminal, seed, anti),
                gap: McEstimate::paired_difference(&backtest, &terminal, seed, anti),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic_pricing::perfect_hedge_price;
    use crate::efficient_hedging::calibrate_power;
    use crate::monte_carlo::{simulate_fractional, simulate_standard};

    fn standard() -> MarketModel {
        MarketModel::standard(0.08, 0.2, 100.0, 100.0, 1.0).unwrap()
    }

    fn grid(steps: usize) -> PathGrid {
        PathGrid::uniform(1.0, steps).unwrap()
    }

    #[test]
    fn call_price_matches_closed_form() {
        let model = standard();
        let generator = simulate_standard(&model, grid(1), Measure::RiskNeutral).unwrap();
        let est = mc_price(&McConfig::new(100_000, 17), &generator, |p| {
            (p.terminal() - 100.0).max(0.0)
        })
        .unwrap();
        let u0 = perfect_hedge_price(&model, 0.0, 100.0).unwrap();
        assert!(est.z_score(u0) < 3.0, "{est:?} vs {u0}");
    }

    #[test]
    fn constant_payoffs_are_exact() {
        let generator = simulate_standard(&standard(), grid(2), Measure::RiskNeutral).unwrap();
        let mc = McConfig::new(1000, 1);
        let zero = mc_price(&mc, &generator, |_| 0.0).unwrap();
        assert_eq!((zero.mean, zero.std_error), (0.0, 0.0));
        let c = mc_price(&mc, &generator, |_| 3.25).unwrap();
        assert_eq!((c.mean, c.std_error), (3.25, 0.0));
    }

    #[test]
    fn pricing_needs_pricing_measure() {
        let generator = simulate_standard(&standard(), grid(2), Measure::Physical).unwrap();
        assert!(matches!(
            mc_price(&McConfig::new(10, 1), &generator, |p| p.terminal()),
            Err(Error::MeasureMismatch { .. })
        ));
    }

    #[test]
    fn perfect_hedge_has_no_terminal_shortfall() {
        let model = standard();
        let plan = HedgePlan::power_with_level(&model, 2.0, 100.0).unwrap();
        let generator = simulate_standard(&model, grid(4), Measure::Physical).unwrap();
        let risk = shortfall_risk(
            &McConfig::new(5000, 3),
            &generator,
            &plan,
            LossSpec::Power { p: 2.0 },
            HedgeMode::TerminalClaim,
        )
        .unwrap();
        assert_eq!((risk.mean, risk.std_error), (0.0, 0.0));
    }

    #[test]
    fn shortfall_guards() {
        let model = standard();
        let plan = HedgePlan::power_with_level(&model, 2.0, 100.0).unwrap();
        let mc = McConfig::new(10, 1);
        let loss = LossSpec::Power { p: 2.0 };
        let q = simulate_standard(&model, grid(2), Measure::RiskNeutral).unwrap();
        assert!(matches!(
            shortfall_risk(&mc, &q, &plan, loss, HedgeMode::TerminalClaim),
            Err(Error::MeasureMismatch { .. })
        ));
        let other = MarketModel::standard(0.08, 0.25, 100.0, 100.0, 1.0).unwrap();
        let p = simulate_standard(&other, grid(2), Measure::Physical).unwrap();
        assert!(matches!(
            shortfall_risk(&mc, &p, &plan, loss, HedgeMode::TerminalClaim),
            Err(Error::ModelMismatch)
        ));
    }

    #[test]
    fn fractional_backtest_rejected() {
        let model = MarketModel::fractional(0.08, 0.2, 0.75, 100.0, 100.0, 1.0).unwrap();
        let plan = HedgePlan::power_with_level(&model, 2.0, 100.0).unwrap();
        let generator = simulate_fractional(&model, grid(8), Measure::Physical).unwrap();
        let path = generator.path(1, 0, false);
        assert!(matches!(
            backtest_hedge(&plan, &path),
            Err(Error::FractionalBacktest)
        ));
        let loss = LossSpec::Power { p: 2.0 };
        assert!(matches!(
            shortfall_risk(
                &McConfig::new(10, 1),
                &generator,
                &plan,
                loss,
                HedgeMode::Backtest
            ),
            Err(Error::FractionalBacktest)
        ));
        assert!(shortfall_risk(
            &McConfig::new(10, 1),
            &generator,
            &plan,
            loss,
            HedgeMode::TerminalClaim
        )
        .is_ok());
    }

    #[test]
    fn zero_volatility_backtest_replicates() {
        let model = MarketModel::zero_volatility_test_mode(0.05, 110.0, 100.0, 1.0).unwrap();
        let plan = HedgePlan::power_with_level(&model, 2.0, 100.0).unwrap();
        let generator = simulate_standard(&model, grid(64), Measure::Physical).unwrap();
        let (wealth, error) = backtest_hedge(&plan, &generator.path(0, 0, false)).unwrap();
        assert!(error.abs() < 1e-12, "{error}");
        assert!((wealth - (110.0 * 0.05f64.exp() - 100.0)).abs() < 1e-12);
    }

    #[test]
    fn efficient_plan_beats_naive_fraction() {
        let model = standard();
        let u0 = perfect_hedge_price(&model, 0.0, 100.0).unwrap();
        let plan = calibrate_power(&model, 2.0, 0.8 * u0).unwrap();
        let naive = ScaledPerfectHedge::with_budget(&model, 0.8 * u0).unwrap();
        let generator = simulate_standard(&model, grid(1), Measure::Physical).unwrap();
        let mc = McConfig::new(100_000, 21);
        let loss = LossSpec::Power { p: 2.0 };
        let a = shortfall_samples(&mc, &generator, &plan, loss, HedgeMode::TerminalClaim).unwrap();
        let b = shortfall_samples(&mc, &generator, &naive, loss, HedgeMode::TerminalClaim).unwrap();
        let diff = McEstimate::paired_difference(&b, &a, mc.seed, false);
        assert!(diff.mean > 3.0 * diff.std_error, "{diff:?}");
    }

    #[test]
    fn capped_claim_costs_its_budget() {
        let model = standard();
        let claim = CappedClaim::calibrate(&model, 0.0, 4.0).unwrap();
        assert!((claim.value(0.0, 100.0).unwrap() - 4.0).abs() < 1e-9);
        assert_eq!(claim.terminal_claim(claim.level() + 1.0), 1.0);
    }

    #[test]
    fn refinement_reduces_replication_error() {
        let model = standard();
        let plan = HedgePlan::power_with_level(&model, 2.0, 100.0).unwrap();
        let rows = refinement_study(
            &plan,
            LossSpec::Power { p: 2.0 },
            &McConfig::new(2000, 8),
            &[4, 16, 64],
        )
        .unwrap();
        assert!(
            rows.windows(2).all(|w| w[1].rms_error < w[0].rms_error),
            "{rows:?}"
        );
    }

    #[test]
    fn results_do_not_depend_on_worker_count() {
        let model = standard();
        let generator = simulate_standard(&model, grid(8), Measure::RiskNeutral).unwrap();
        let payoff = |p: &SimulatedPath| (p.terminal() - 100.0).max(0.0);
        let one = mc_price(&McConfig::new(4001, 5), &generator, payoff).unwrap();
        let four = mc_price(&McConfig::new(4001, 5).with_workers(4), &generator, payoff).unwrap();
        assert_eq!(one, four);
        assert_eq!(one.mean.to_bits(), four.mean.to_bits());
    }
}
