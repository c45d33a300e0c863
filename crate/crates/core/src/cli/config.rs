use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::efficient_hedging::{DMode, LossSpec};
use crate::error::{ensure_finite, ensure_positive, Error, Result};
use crate::monte_carlo::{HedgeMode, McConfig};
use crate::term_structure::{CoefficientCurve, MarketModel};

/// Everything a command needs. Every field has a default, so a config file
/// only lists what it changes; emitted reports echo the fully resolved form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub option: OptionSpec,
    pub loss: LossSpec,
    pub budget: BudgetSpec,
    pub d_mode: DMode,
    pub mc: McSpec,
    pub price: PriceSpec,
    pub surface: SurfaceSpec,
    pub simulate: SimulateSpec,
    pub backtest: BacktestSpec,
    pub output: OutputSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelSpec::Standard {
                m: 0.08,
                sigma: 0.2,
            },
            option: OptionSpec::default(),
            loss: LossSpec::Power { p: 2.0 },
            budget: BudgetSpec::Fraction(0.8),
            d_mode: DMode::default(),
            mc: McSpec::default(),
            price: PriceSpec::default(),
            surface: SurfaceSpec::default(),
            simulate: SimulateSpec::default(),
            backtest: BacktestSpec::default(),
            output: OutputSpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Standard {
        m: f64,
        sigma: f64,
    },
    /// Piecewise-constant curve read from a `t,m,sigma` CSV file.
    TimeVarying {
        curve_csv: PathBuf,
    },
    /// `hurst = 0.5` selects the reduction to the standard model.
    Fractional {
        m: f64,
        sigma: f64,
        hurst: f64,
    },
}

impl ModelSpec {
    /// Parses `standard:m=0.08,sigma=0.2`, `fractional:m=..,sigma=..,hurst=..`
    /// or `curve:path.csv`.
    pub fn parse(text: &str) -> Result<Self> {
        let (kind, rest) = text.split_once(':').ok_or_else(|| {
            Error::param("model", format!("expected `<kind>:<params>`, got `{text}`"))
        })?;
        if kind == "curve" {
            return Ok(ModelSpec::TimeVarying {
                curve_csv: PathBuf::from(rest),
            });
        }
        let mut m = None;
        let mut sigma = None;
        let mut hurst = None;
        for pair in rest.split(',').filter(|p| !p.is_empty()) {
            let (key, value) = pair.split_once('=').ok_or_else(|| {
                Error::param("model", format!("expected `key=value`, got `{pair}`"))
            })?;
            let value: f64 = value.trim().parse().map_err(|_| {
                Error::param("model", format!("`{key}` is not a number: `{value}`"))
            })?;
            match key.trim() {
                "m" => m = Some(value),
                "sigma" => sigma = Some(value),
                "hurst" | "H" => hurst = Some(value),
                other => return Err(Error::param("model", format!("unknown key `{other}`"))),
            }
        }
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Error::param("model", format!("`{kind}` needs `{name}`")))
        };
        match kind {
            "standard" => Ok(ModelSpec::Standard {
                m: need(m, "m")?,
                sigma: need(sigma, "sigma")?,
            }),
            "fractional" => Ok(ModelSpec::Fractional {
                m: need(m, "m")?,
                sigma: need(sigma, "sigma")?,
                hurst: need(hurst, "hurst")?,
            }),
            other => Err(Error::param(
                "model",
                format!("unknown model kind `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptionSpec {
    pub spot: f64,
    pub strike: f64,
    pub horizon: f64,
}

impl Default for OptionSpec {
    fn default() -> Self {
        Self {
            spot: 100.0,
            strike: 100.0,
            horizon: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum BudgetSpec {
    /// Fraction of the perfect-hedge price `U_0`, in `(0, 1)`.
    Fraction(f64),
    Absolute(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McSpec {
    pub n_paths: u64,
    pub steps: usize,
    pub seed: u64,
    pub workers: usize,
    pub antithetic: bool,
}

impl Default for McSpec {
    fn default() -> Self {
        Self {
            n_paths: 100_000,
            steps: 64,
            seed: 20_240_601,
            workers: 1,
            antithetic: false,
        }
    }
}

impl McSpec {
    pub fn config(&self) -> McConfig {
        McConfig::new(self.n_paths, self.seed)
            .with_workers(self.workers)
            .with_antithetic(self.antithetic)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct PriceSpec {
    /// Valuation time.
    pub t: f64,
    /// Valuation price; the spot when absent.
    pub x: Option<f64>,
    /// Adds a Monte Carlo estimate under the pricing measure.
    pub mc_check: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SurfaceSpec {
    /// Times in `[0, T)`.
    pub times: Vec<f64>,
    /// Price range as multiples of the strike.
    pub x_min: f64,
    pub x_max: f64,
    pub x_points: usize,
}

impl Default for SurfaceSpec {
    fn default() -> Self {
        Self {
            times: vec![0.0, 0.25, 0.5, 0.75],
            x_min: 0.5,
            x_max: 2.0,
            x_points: 31,
        }
    }
}

impl SurfaceSpec {
    /// Uniform price grid in `[x_min K, x_max K]`.
    pub fn prices(&self, strike: f64) -> Vec<f64> {
        let (lo, hi) = (self.x_min * strike, self.x_max * strike);
        if self.x_points == 1 {
            return vec![lo];
        }
        (0..self.x_points)
            .map(|i| lo + (hi - lo) * i as f64 / (self.x_points - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Comparison {
    /// Perfect hedge of `budget / U_0` calls.
    NaiveFraction,
    /// `(X_T - L)^+` with the same budget.
    FlatCap,
    /// Capped claim whose exponent is `multiple` times the plan's.
    Capped { multiple: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateSpec {
    pub mode: HedgeMode,
    pub comparisons: Vec<Comparison>,
}

impl Default for SimulateSpec {
    fn default() -> Self {
        Self {
            mode: HedgeMode::TerminalClaim,
            comparisons: vec![Comparison::NaiveFraction, Comparison::FlatCap],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BacktestPlan {
    /// The plan calibrated to the configured budget.
    #[default]
    Calibrated,
    /// The `L = K` plan, which costs `U_0`.
    Perfect,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BacktestSpec {
    pub plan: BacktestPlan,
    pub steps: Vec<usize>,
}

impl Default for BacktestSpec {
    fn default() -> Self {
        Self {
            plan: BacktestPlan::Calibrated,
            steps: vec![16, 64, 256, 1024],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    #[default]
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub format: OutputFormat,
    /// Standard output when absent.
    pub path: Option<PathBuf>,
    /// Optional `path_id,t,X` dump of simulated paths.
    pub dump_paths: Option<PathBuf>,
    pub dump_limit: u64,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            format: OutputFormat::Json,
            path: None,
            dump_paths: None,
            dump_limit: 100,
        }
    }
}

impl RunConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::param("config", e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn market_model(&self) -> Result<MarketModel> {
        let OptionSpec {
            spot,
            strike,
            horizon,
        } = self.option;
        match &self.model {
            ModelSpec::Standard { m, sigma } => {
                MarketModel::standard(*m, *sigma, spot, strike, horizon)
            }
            ModelSpec::TimeVarying { curve_csv } => {
                let curve = CoefficientCurve::from_csv_path(curve_csv, horizon)?;
                MarketModel::time_varying(curve, spot, strike, horizon)
            }
            ModelSpec::Fractional { m, sigma, hurst } if *hurst == 0.5 => {
                MarketModel::fractional_reduction_mode(*m, *sigma, *hurst, spot, strike, horizon)
            }
            ModelSpec::Fractional { m, sigma, hurst } => {
                MarketModel::fractional(*m, *sigma, *hurst, spot, strike, horizon)
            }
        }
    }

    /// Absolute budget given the perfect-hedge price.
    pub fn budget_amount(&self, perfect_price: f64) -> f64 {
        match self.budget {
            BudgetSpec::Fraction(f) => f * perfect_price,
            BudgetSpec::Absolute(b) => b,
        }
    }

    /// Checks every field a command may touch, before any work is done.
    pub fn validate(&self) -> Result<MarketModel> {
        let model = self.market_model()?;
        self.loss.validate()?;
        match self.budget {
            BudgetSpec::Fraction(f) if !(f > 0.0 && f < 1.0) => {
                return Err(Error::param(
                    "budget",
                    format!("fraction must lie in (0, 1), got {f}"),
                ))
            }
            BudgetSpec::Absolute(b) => ensure_positive("budget", b)?,
            _ => {}
        }
        self.mc.config().validate()?;
        if self.mc.steps == 0 {
            return Err(Error::param("steps", "must be at least 1"));
        }
        ensure_finite("price.t", self.price.t)?;
        if let Some(x) = self.price.x {
            ensure_positive("price.x", x)?;
        }
        let s = &self.surface;
        ensure_positive("surface.x_min", s.x_min)?;
        ensure_positive("surface.x_max", s.x_max)?;
        if s.x_max < s.x_min || s.x_points == 0 {
            return Err(Error::param(
                "surface",
                "needs x_min <= x_max and at least one point",
            ));
        }
        if self.backtest.steps.contains(&0) {
            return Err(Error::param(
                "backtest.steps",
                "step counts must be at least 1",
            ));
        }
        for c in &self.simulate.comparisons {
            if let Comparison::Capped { multiple } = c {
                if !(multiple.is_finite() && *multiple >= 0.0) {
                    return Err(Error::param(
                        "simulate.comparisons",
                        format!("bad multiple {multiple}"),
                    ));
                }
            }
        }
        Ok(model)
    }
}
