//! Efficient hedging of a European call `H = (X_T - K)^+` with capital below
//! the perfect-hedge price.
//!
//! Minimizing the shortfall risk `E[l((H - V_T)^+)]` under a budget is the
//! same as perfectly hedging a modified claim `phi H`:
//!
//! * power loss `l(x) = x^p / p`: `phi H = (H - c rho^(1/(p-1)))^+`. The cap is
//!   a power of the terminal price, so the claim is
//!   `(X_T - K - (L - K) (L / X_T)^a)^+` with `a = alpha_T / (p - 1)` and a
//!   level `L >= K` where the claim starts paying.
//! * linear loss `l(x) = x`: `phi H = H 1{rho < 1 / a_tilde}`, a knock-in call.
//!
//! Plans are calibrated so the time-0 value of `phi H` equals the budget.

use serde::{Deserialize, Serialize};

use crate::analytic_pricing::{call_delta, call_value, d_pm, ln_norm_cdf, norm_cdf, norm_pdf};
use crate::error::{ensure_finite, ensure_positive, Error, Result};
use crate::root::{bisect, Midpoint};
use crate::term_structure::{IntegratedQuantities, MarketModel};

/// Relative tolerance on the calibrated value.
pub const CALIBRATION_TOLERANCE: f64 = 1e-10;

/// Upper end of the level bracket, as a multiple of the strike.
pub const MAX_LEVEL_MULTIPLE: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LossSpec {
    /// `l(x) = x^p / p`, `p > 1`.
    Power { p: f64 },
    /// `l(x) = x`.
    Linear,
}

impl LossSpec {
    pub fn power(p: f64) -> Result<Self> {
        check_power(p)?;
        Ok(LossSpec::Power { p })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            LossSpec::Power { p } => check_power(*p),
            LossSpec::Linear => Ok(()),
        }
    }

    /// `l(shortfall)` for a nonnegative shortfall.
    pub fn loss(&self, shortfall: f64) -> f64 {
        match self {
            LossSpec::Power { p } => shortfall.powf(*p) / p,
            LossSpec::Linear => shortfall,
        }
    }
}

fn check_power(p: f64) -> Result<()> {
    if p.is_finite() && p > 1.0 {
        Ok(())
    } else {
        Err(Error::param(
            "p",
            format!("power loss needs p > 1, got {p}"),
        ))
    }
}

/// How the threshold `D` of the linear-loss value function combines its
/// strike branch and its `a_tilde` branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DMode {
    /// `D = min(strike branch, a_tilde branch)`.
    Min,
    /// `D = max(strike branch, a_tilde branch)`, the value of
    /// `(X_T - K)^+ 1{rho < 1 / a_tilde}`.
    #[default]
    Max,
}

impl DMode {
    fn combine(self, a: f64, b: f64) -> f64 {
        match self {
            DMode::Min => a.min(b),
            DMode::Max => a.max(b),
        }
    }
}

fn power_exponent(iq: &IntegratedQuantities, p: f64) -> Result<f64> {
    check_power(p)?;
    if iq.alpha() < 0.0 {
        return Err(Error::NegativeDrift(iq.alpha()));
    }
    Ok(iq.alpha() / (p - 1.0))
}

fn check_level_inputs(iq: &IntegratedQuantities, x: f64, strike: f64, level: f64) -> Result<()> {
    ensure_positive("x", x)?;
    ensure_positive("strike", strike)?;
    ensure_positive("level", level)?;
    if level < strike {
        return Err(Error::InvalidLevel { level, strike });
    }
    if iq.sigma_total() == 0.0 {
        return Err(Error::DegenerateWindow);
    }
    Ok(())
}

/// `ln` of the third term of the value function,
/// `(L - K) (L/x)^a exp(sigma^2 a (a + 1) / 2) Phi(d_-(x, L) - a sigma)`.
fn ln_cap_term(
    iq: &IntegratedQuantities,
    x: f64,
    strike: f64,
    level: f64,
    exponent: f64,
) -> Result<f64> {
    let s = iq.sigma_total();
    let d = d_pm(x, level, iq)?;
    Ok((level - strike).ln()
        + exponent * (level / x).ln()
        + 0.5 * s * s * exponent * (exponent + 1.0)
        + ln_norm_cdf(d.d_minus - exponent * s))
}

/// Value of `(X_T - K - (L - K) (L / X_T)^a)^+` for a fixed cap exponent `a`.
pub fn value_capped(
    iq: &IntegratedQuantities,
    x: f64,
    strike: f64,
    level: f64,
    exponent: f64,
) -> Result<f64> {
    check_level_inputs(iq, x, strike, level)?;
    ensure_finite("exponent", exponent)?;
    let d = d_pm(x, level, iq)?;
    let base = x * norm_cdf(d.d_plus) - strike * norm_cdf(d.d_minus);
    if level == strike {
        return Ok(base);
    }
    let cap = ln_cap_term(iq, x, strike, level, exponent)?.exp();
    Ok((base - cap).max(0.0))
}

/// `d/dx` of [`value_capped`].
pub fn delta_capped(
    iq: &IntegratedQuantities,
    x: f64,
    strike: f64,
    level: f64,
    exponent: f64,
) -> Result<f64> {
    check_level_inputs(iq, x, strike, level)?;
    ensure_finite("exponent", exponent)?;
    let d = d_pm(x, level, iq)?;
    if level == strike {
        return Ok(norm_cdf(d.d_plus));
    }
    let cap = ln_cap_term(iq, x, strike, level, exponent)?.exp();
    Ok(norm_cdf(d.d_plus) + exponent / x * cap)
}

/// Power-loss value function `F_p(t, x)`:
///
/// `x Phi(d_+(x,L)) - K Phi(d_-(x,L)) - (L-K) (L/x)^(a) exp(sigma_T^2 a (a+1) / 2) Phi(d_-(x,L) - a sigma_T)`
///
/// with `a = alpha_T / (p - 1)`.
pub fn value_power(
    iq: &IntegratedQuantities,
    x: f64,
    strike: f64,
    level: f64,
    p: f64,
) -> Result<f64> {
    let a = power_exponent(iq, p)?;
    value_capped(iq, x, strike, level, a)
}

/// Hedge ratio `xi_p = dF_p / dx`:
/// `Phi(d_+(x,L)) + a (L-K) L^a / x^(a+1) exp(sigma_T^2 a (a+1) / 2) Phi(d_-(x,L) - a sigma_T)`.
pub fn delta_power(
    iq: &IntegratedQuantities,
    x: f64,
    strike: f64,
    level: f64,
    p: f64,
) -> Result<f64> {
    let a = power_exponent(iq, p)?;
    delta_capped(iq, x, strike, level, a)
}

/// Constants of the power-loss modified claim written as a function of the
/// standard normal driver `tau` of the window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerClaim {
    /// `ln A`, where `A = C^(1/(p-1)) Z_t^(1/(p-1))`. `-inf` when `L = K`.
    pub log_a: f64,
    /// Threshold `E` at which cap and payoff intersect.
    pub threshold: f64,
}

impl PowerClaim {
    pub fn a_constant(&self) -> f64 {
        self.log_a.exp()
    }
}

/// `E = ln(L / x) / sigma_T + sigma_T / 2` and `A` from `y1(E) = y2(E) = L - K`.
pub fn power_claim_constants(
    iq: &IntegratedQuantities,
    x_t: f64,
    strike: f64,
    level: f64,
    p: f64,
) -> Result<PowerClaim> {
    check_level_inputs(iq, x_t, strike, level)?;
    let s = iq.sigma_total();
    let theta = iq.theta_total();
    let c = theta / (p - 1.0);
    check_power(p)?;
    let threshold = (level / x_t).ln() / s + 0.5 * s;
    let log_a = (level - strike).ln() + c * (-0.5 * theta + threshold);
    Ok(PowerClaim { log_a, threshold })
}

/// Modified claim `f_p(tau)`:
/// `[x_t exp(sigma_T(-sigma_T/2 + tau)) - K - A exp(-theta_T/(p-1) (-theta_T/2 + tau))] 1{tau >= E}`.
pub fn modified_claim_power(
    iq: &IntegratedQuantities,
    tau: f64,
    x_t: f64,
    strike: f64,
    p: f64,
    claim: &PowerClaim,
) -> Result<f64> {
    check_power(p)?;
    ensure_positive("x_t", x_t)?;
    let s = iq.sigma_total();
    let theta = iq.theta_total();
    let c = theta / (p - 1.0);
    let payoff = |z: f64| x_t * (s * (-0.5 * s + z)).exp() - strike;
    let cap = |z: f64| (claim.log_a - c * (-0.5 * theta + z)).exp();

    let at_e = (payoff(claim.threshold), cap(claim.threshold));
    if (at_e.0 - at_e.1).abs() > 1e-9 * at_e.0.abs().max(1.0) {
        return Err(Error::InconsistentClaim {
            cap: at_e.1,
            payoff: at_e.0,
        });
    }
    if tau < claim.threshold {
        return Ok(0.0);
    }
    Ok((payoff(tau) - cap(tau)).max(0.0))
}

/// Power-loss modified claim as a function of the terminal price.
pub fn capped_claim_payoff(x_terminal: f64, strike: f64, level: f64, exponent: f64) -> f64 {
    if x_terminal <= level {
        return 0.0;
    }
    let cap = (level - strike) * (level / x_terminal).powf(exponent);
    (x_terminal - strike - cap).max(0.0)
}

/// Strike branch of `D`: `ln(K / x) / sigma_T + sigma_T / 2`.
pub fn strike_branch(iq: &IntegratedQuantities, x: f64, strike: f64) -> f64 {
    let s = iq.sigma_total();
    (strike / x).ln() / s + 0.5 * s
}

/// `a_tilde` branch of `D`: `ln(a_tilde) / theta_T + theta_T / 2`.
pub fn linear_threshold(iq: &IntegratedQuantities, a_tilde: f64) -> Result<f64> {
    ensure_positive("a_tilde", a_tilde)?;
    let theta = iq.theta_total();
    if theta == 0.0 {
        return Err(Error::ZeroDrift);
    }
    if theta < 0.0 {
        return Err(Error::NegativeDrift(iq.alpha()));
    }
    Ok(a_tilde.ln() / theta + 0.5 * theta)
}

fn a_tilde_from_threshold(iq: &IntegratedQuantities, b: f64) -> f64 {
    let theta = iq.theta_total();
    (theta * (b - 0.5 * theta)).exp()
}

fn linear_value_at_threshold(
    iq: &IntegratedQuantities,
    x: f64,
    strike: f64,
    b: f64,
    mode: DMode,
) -> f64 {
    let s = iq.sigma_total();
    let d = mode.combine(strike_branch(iq, x, strike), b);
    x * norm_cdf(s - d) - strike * norm_cdf(-d)
}

/// Linear-loss value function `F_1(t, x) = x Phi(sigma_T - D) - K Phi(-D)`.
pub fn value_linear(
    iq: &IntegratedQuantities,
    x: f64,
    strike: f64,
    a_tilde: f64,
    mode: DMode,
) -> Result<f64> {
    ensure_positive("x", x)?;
    ensure_positive("strike", strike)?;
    if iq.sigma_total() == 0.0 {
        return Err(Error::DegenerateWindow);
    }
    let b = linear_threshold(iq, a_tilde)?;
    Ok(linear_value_at_threshold(iq, x, strike, b, mode))
}

/// The threshold `D` actually used by [`value_linear`].
pub fn linear_d(
    iq: &IntegratedQuantities,
    x: f64,
    strike: f64,
    a_tilde: f64,
    mode: DMode,
) -> Result<f64> {
    let b = linear_threshold(iq, a_tilde)?;
    Ok(mode.combine(strike_branch(iq, x, strike), b))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CalibrationInfo {
    pub iterations: usize,
    /// `|value - budget| / budget` at the returned constant.
    pub residual: f64,
}

/// The calibrated constant of a plan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlanConstant {
    /// Power loss: level `L >= K` at which the modified claim starts paying,
    /// with the time-0 claim constants `A`, `E`.
    Level {
        level: f64,
        exponent: f64,
        claim: PowerClaim,
    },
    /// Linear loss: `a_tilde`, its branch threshold `b`, the time-0 `D`, and
    /// the terminal price above which `rho < 1 / a_tilde`.
    ATilde {
        a_tilde: f64,
        threshold: f64,
        d: f64,
        terminal_level: f64,
    },
}

/// A calibrated efficient-hedging strategy. Immutable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HedgePlan {
    model: MarketModel,
    loss: LossSpec,
    budget: f64,
    constant: PlanConstant,
    d_mode: Option<DMode>,
    calibration: CalibrationInfo,
}

fn check_budget(model: &MarketModel, budget: f64) -> Result<f64> {
    if !(budget > 0.0) || !budget.is_finite() {
        return Err(Error::NonPositiveBudget(budget));
    }
    let price = call_value(&model.window(0.0)?, model.spot(), model.strike())?;
    if budget >= price {
        return Err(Error::PerfectHedgeAffordable { budget, price });
    }
    Ok(price)
}

fn check_strictly_monotone<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    geometric: bool,
    increasing: bool,
) -> Result<()> {
    const SAMPLES: usize = 16;
    let point = |i: usize| {
        let w = i as f64 / SAMPLES as f64;
        if geometric {
            (lo.ln() + w * (hi.ln() - lo.ln())).exp()
        } else {
            lo + w * (hi - lo)
        }
    };
    let mut prev = f(point(0));
    for i in 1..=SAMPLES {
        let cur = f(point(i));
        let ok = if increasing { cur > prev } else { cur < prev };
        // Both ends may underflow to zero far out in the tail.
        if !ok && !(prev == 0.0 && cur == 0.0) {
            return Err(Error::NotMonotone { lo, hi });
        }
        prev = cur;
    }
    Ok(())
}

/// Finds the level `L >= K` whose capped claim with exponent `exponent`
/// costs `budget` at time 0.
pub fn calibrate_level(
    model: &MarketModel,
    exponent: f64,
    budget: f64,
) -> Result<(f64, CalibrationInfo)> {
    check_budget(model, budget)?;
    if !(exponent >= 0.0) || !exponent.is_finite() {
        return Err(Error::param(
            "exponent",
            format!("must be finite and >= 0, got {exponent}"),
        ));
    }
    let iq = model.window(0.0)?;
    let (x0, strike) = (model.spot(), model.strike());
    let f = |level: f64| value_capped(&iq, x0, strike, level, exponent).unwrap_or(f64::NAN);

    let mut lo = strike;
    let mut hi = 2.0 * strike;
    while f(hi) >= budget {
        lo = hi;
        hi *= 2.0;
        if hi > MAX_LEVEL_MULTIPLE * strike {
            return Err(Error::BudgetTooSmall {
                limit: MAX_LEVEL_MULTIPLE * strike,
            });
        }
    }
    check_strictly_monotone(&f, lo, hi, true, false)?;
    let root = bisect(
        f,
        lo,
        hi,
        budget,
        CALIBRATION_TOLERANCE * budget,
        Midpoint::Geometric,
    );
    let residual = (root.value - budget).abs() / budget;
    if residual > CALIBRATION_TOLERANCE {
        return Err(Error::CalibrationStalled { residual });
    }
    Ok((
        root.x,
        CalibrationInfo {
            iterations: root.iterations,
            residual,
        },
    ))
}

/// Calibrates the power-loss plan: the level `L` with `F_p(0, x_0) = budget`.
pub fn calibrate_power(model: &MarketModel, p: f64, budget: f64) -> Result<HedgePlan> {
    let iq = model.window(0.0)?;
    let exponent = power_exponent(&iq, p)?;
    let (level, calibration) = calibrate_level(model, exponent, budget)?;
    HedgePlan::power_from_level(model, p, level, budget, calibration)
}

/// Calibrates the linear-loss plan: `a_tilde` with `F_1(0, x_0) = budget`.
///
/// Solves on the `a_tilde` branch threshold `b`. Under `Max` the
/// value falls from `U_0` to 0 as `b` rises above the strike branch. Under
/// `Min` the value rises from `x_0 - K` to `U_0` as `b` approaches the
/// strike branch from below, so budgets at or under `x_0 - K` are unreachable.
pub fn calibrate_linear(model: &MarketModel, budget: f64, mode: DMode) -> Result<HedgePlan> {
    check_budget(model, budget)?;
    let iq = model.window(0.0)?;
    if iq.sigma_total() == 0.0 {
        return Err(Error::DegenerateWindow);
    }
    if iq.theta_total() == 0.0 {
        return Err(Error::ZeroDrift);
    }
    if iq.theta_total() < 0.0 {
        return Err(Error::NegativeDrift(iq.alpha()));
    }
    let (x0, strike) = (model.spot(), model.strike());
    let k0 = strike_branch(&iq, x0, strike);
    let g = |b: f64| linear_value_at_threshold(&iq, x0, strike, b, mode);

    let (lo, hi) = match mode {
        DMode::Max => {
            let mut step = 0.5;
            while g(k0 + step) >= budget {
                step *= 2.0;
                if step > 1e3 {
                    return Err(Error::BudgetTooSmall { limit: k0 + step });
                }
            }
            (k0, k0 + step)
        }
        DMode::Min => {
            let floor = x0 - strike;
            if budget <= floor * (1.0 + 1e-12) {
                return Err(Error::NoSolutionMin { budget, floor });
            }
            let mut step = 0.5;
            while g(k0 - step) >= budget {
                step *= 2.0;
                if step > 1e3 {
                    return Err(Error::NoSolutionMin { budget, floor });
                }
            }
            (k0 - step, k0)
        }
    };
    check_strictly_monotone(&g, lo, hi, false, mode == DMode::Min)?;
    let root = bisect(
        g,
        lo,
        hi,
        budget,
        CALIBRATION_TOLERANCE * budget,
        Midpoint::Arithmetic,
    );
    let residual = (root.value - budget).abs() / budget;
    if residual > CALIBRATION_TOLERANCE {
        return Err(Error::CalibrationStalled { residual });
    }

    let b = root.x;
    let s = iq.sigma_total();
    Ok(HedgePlan {
        model: model.clone(),
        loss: LossSpec::Linear,
        budget,
        constant: PlanConstant::ATilde {
            a_tilde: a_tilde_from_threshold(&iq, b),
            threshold: b,
            d: mode.combine(k0, b),
            terminal_level: x0 * (s * (b - 0.5 * s)).exp(),
        },
        d_mode: Some(mode),
        calibration: CalibrationInfo {
            iterations: root.iterations,
            residual,
        },
    })
}

impl HedgePlan {
    fn power_from_level(
        model: &MarketModel,
        p: f64,
        level: f64,
        budget: f64,
        calibration: CalibrationInfo,
    ) -> Result<Self> {
        let iq = model.window(0.0)?;
        let exponent = power_exponent(&iq, p)?;
        let claim = power_claim_constants(&iq, model.spot(), model.strike(), level, p)?;
        Ok(HedgePlan {
            model: model.clone(),
            loss: LossSpec::Power { p },
            budget,
            constant: PlanConstant::Level {
                level,
                exponent,
                claim,
            },
            d_mode: None,
            calibration,
        })
    }

    /// Power-loss plan with a given level instead of a budget. `level = K`
    /// is the perfect hedge; its budget is `U_0`.
    pub fn power_with_level(model: &MarketModel, p: f64, level: f64) -> Result<Self> {
        let iq = model.window(0.0)?;
        let exponent = power_exponent(&iq, p)?;
        if level < model.strike() {
            return Err(Error::InvalidLevel {
                level,
                strike: model.strike(),
            });
        }
        let budget = if iq.sigma_total() == 0.0 {
            capped_claim_payoff(model.spot(), model.strike(), level, exponent)
        } else {
            value_capped(&iq, model.spot(), model.strike(), level, exponent)?
        };
        let claim = if iq.sigma_total() == 0.0 {
            PowerClaim {
                log_a: (level - model.strike()).ln(),
                threshold: f64::NAN,
            }
        } else {
            power_claim_constants(&iq, model.spot(), model.strike(), level, p)?
        };
        Ok(HedgePlan {
            model: model.clone(),
            loss: LossSpec::Power { p },
            budget,
            constant: PlanConstant::Level {
                level,
                exponent,
                claim,
            },
            d_mode: None,
            calibration: CalibrationInfo {
                iterations: 0,
                residual: 0.0,
            },
        })
    }

    pub fn model(&self) -> &MarketModel {
        &self.model
    }

    pub fn loss(&self) -> LossSpec {
        self.loss
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn constant(&self) -> &PlanConstant {
        &self.constant
    }

    pub fn d_mode(&self) -> Option<DMode> {
        self.d_mode
    }

    pub fn calibration(&self) -> &CalibrationInfo {
        &self.calibration
    }

    /// Linear plans: terminal price level above which the knock-in call pays,
    /// combined with the strike per the plan's `DMode`.
    fn linear_level(&self, terminal_level: f64) -> f64 {
        self.d_mode
            .unwrap_or_default()
            .combine(self.model.strike(), terminal_level)
    }

    /// The modified claim `phi H` as a function of the terminal price.
    pub fn terminal_claim(&self, x_terminal: f64) -> f64 {
        let strike = self.model.strike();
        match self.constant {
            PlanConstant::Level {
                level, exponent, ..
            } => capped_claim_payoff(x_terminal, strike, level, exponent),
            PlanConstant::ATilde { terminal_level, .. } => {
                if x_terminal >= self.linear_level(terminal_level) {
                    x_terminal - strike
                } else {
                    0.0
                }
            }
        }
    }

    /// Value and hedge ratio at `(t, x)`, `0 <= t < T`.
    ///
    /// Window quantities are recomputed for `[t, T]`. The linear plan is
    /// evaluated through its terminal level, which keeps the knock-in barrier
    /// fixed in price space as `t` moves; at `t = 0, x = x_0` this is exactly
    /// `F_1` with the calibrated `a_tilde`.
    pub fn value_and_delta(&self, t: f64, x: f64) -> Result<(f64, f64)> {
        ensure_positive("x", x)?;
        if t >= self.model.horizon() {
            return Err(Error::InvalidWindow {
                start: t,
                end: self.model.horizon(),
            });
        }
        let iq = self.model.window(t)?;
        let strike = self.model.strike();
        if iq.sigma_total() == 0.0 {
            return Ok(self.intrinsic_value_and_delta(x));
        }
        match (self.loss, self.constant) {
            (LossSpec::Power { p }, PlanConstant::Level { level, .. }) => Ok((
                value_power(&iq, x, strike, level, p)?,
                delta_power(&iq, x, strike, level, p)?,
            )),
            (_, PlanConstant::ATilde { terminal_level, .. }) => {
                let s = iq.sigma_total();
                let level = self.linear_level(terminal_level);
                let d = (level / x).ln() / s + 0.5 * s;
                let value = x * norm_cdf(s - d) - strike * norm_cdf(-d);
                let delta = norm_cdf(s - d) + (level - strike) * norm_pdf(d) / (x * s);
                Ok((value, delta))
            }
            _ => unreachable!("plan constant always matches its loss"),
        }
    }

    fn intrinsic_value_and_delta(&self, x: f64) -> (f64, f64) {
        let value = self.terminal_claim(x);
        let delta = match self.constant {
            PlanConstant::Level {
                level, exponent, ..
            } => {
                if x > level {
                    1.0 + exponent * (level - self.model.strike()) * (level / x).powf(exponent) / x
                } else {
                    0.0
                }
            }
            PlanConstant::ATilde { terminal_level, .. } => {
                if x >= self.linear_level(terminal_level) {
                    1.0
                } else {
                    0.0
                }
            }
        };
        (value, delta)
    }
}

/// `(value, delta)` of a calibrated plan at `(t, x)`.
pub fn plan_value_and_delta(plan: &HedgePlan, t: f64, x: f64) -> Result<(f64, f64)> {
    plan.value_and_delta(t, x)
}

/// Perfect-hedge value and delta, for comparison with plan outputs.
pub fn perfect_value_and_delta(model: &MarketModel, t: f64, x: f64) -> Result<(f64, f64)> {
    let iq = model.window(t)?;
    Ok((
        call_value(&iq, x, model.strike())?,
        call_delta(&iq, x, model.strike())?,
    ))
}
