//! Monte Carlo oracle: exact path simulation under the physical and pricing
//! measures, fBm synthesis, pricing, shortfall risk and hedging backtests.
//!
//! Every path draws its normals from a stream derived from `(seed, path_id)`
//! and results are reduced in path order with pairwise summation, so an
//! estimate is bitwise identical for any worker count.

mod estimators;
mod fbm;
mod paths;
mod rng;

use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::term_structure::MarketModel;

pub use estimators::{
    backtest_hedge, mc_price, refinement_study, shortfall_risk, shortfall_samples, CappedClaim,
    HedgeMode, HedgeStrategy, RefinementRow, ScaledPerfectHedge,
};
pub use fbm::{fbm_covariance, FbmMethod, FbmSampler};
pub use paths::{
    generator_for, simulate_fbm, simulate_fractional, simulate_standard, FbmStream,
    FractionalGenerator, StandardGenerator,
};
pub use rng::NormalSource;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Measure {
    /// Physical measure `P`.
    #[serde(rename = "P")]
    Physical,
    /// Pricing measure `P*`.
    #[serde(rename = "P*")]
    RiskNeutral,
}

impl Measure {
    pub fn name(self) -> &'static str {
        match self {
            Measure::Physical => "P",
            Measure::RiskNeutral => "P*",
        }
    }
}

/// Simulation times `0 = t_0 < ... < t_n = T`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathGrid {
    times: Vec<f64>,
}

impl PathGrid {
    pub fn uniform(horizon: f64, steps: usize) -> Result<Self> {
        crate::error::ensure_positive("horizon", horizon)?;
        if steps == 0 {
            return Err(Error::param("steps", "grid needs at least one step"));
        }
        let mut times: Vec<f64> = (0..=steps)
            .map(|i| horizon * i as f64 / steps as f64)
            .collect();
        times[steps] = horizon;
        Ok(Self { times })
    }

    pub fn from_times(times: Vec<f64>) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::param("grid", "needs at least one step"));
        }
        if times[0] != 0.0 {
            return Err(Error::param("grid", "must start at 0"));
        }
        if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::param(
                "grid",
                "times must be finite and strictly increasing",
            ));
        }
        Ok(Self { times })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    pub fn horizon(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    /// The common step when all steps agree to within `1e-9` relative.
    pub fn uniform_step(&self) -> Option<f64> {
        let step = self.horizon() / self.steps() as f64;
        self.times
            .windows(2)
            .all(|w| ((w[1] - w[0]) - step).abs() <= 1e-9 * step)
            .then_some(step)
    }

    fn check_horizon(&self, model: &MarketModel) -> Result<()> {
        let horizon = model.horizon();
        if (self.horizon() - horizon).abs() > 1e-12 * horizon {
            return Err(Error::param(
                "grid",
                format!(
                    "must end at the horizon {horizon}, ends at {}",
                    self.horizon()
                ),
            ));
        }
        Ok(())
    }
}

/// One simulated price path.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedPath {
    pub path_id: u64,
    pub grid: Arc<PathGrid>,
    /// Price at each grid time; `prices[0]` is the spot.
    pub prices: Vec<f64>,
    /// Driver increment over each grid step: Brownian for the diffusion
    /// models, fBm (`B_H` under `P`, `B*_H` under `P*`) for the fractional one.
    pub driver: Vec<f64>,
    pub measure: Measure,
    /// `rho* = dP*/dP` evaluated on this path.
    pub rn_density: f64,
}

impl SimulatedPath {
    fn blank(grid: Arc<PathGrid>, measure: Measure) -> Self {
        let n = grid.steps();
        Self {
            path_id: 0,
            grid,
            prices: vec![0.0; n + 1],
            driver: vec![0.0; n],
            measure,
            rn_density: 1.0,
        }
    }

    pub fn terminal(&self) -> f64 {
        self.prices[self.prices.len() - 1]
    }
}

/// Source of paths for one `(model, grid, measure)` configuration.
pub trait PathGenerator: Sync {
    fn model(&self) -> &MarketModel;
    fn grid(&self) -> &Arc<PathGrid>;
    fn measure(&self) -> Measure;
    /// Overwrites `path` with a fresh draw from `normals`.
    fn fill(&self, normals: &mut NormalSource, path: &mut SimulatedPath);

    fn path(&self, seed: u64, path_id: u64, antithetic: bool) -> SimulatedPath {
        let mut path = SimulatedPath::blank(self.grid().clone(), self.measure());
        let mut normals = NormalSource::for_path(seed, path_id, antithetic);
        path.path_id = path_id;
        self.fill(&mut normals, &mut path);
        path
    }
}

/// Run configuration shared by every estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub n_paths: u64,
    pub seed: u64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default)]
    pub antithetic: bool,
}

fn default_workers() -> usize {
    1
}

impl McConfig {
    pub fn new(n_paths: u64, seed: u64) -> Self {
        Self {
            n_paths,
            seed,
            workers: 1,
            antithetic: false,
        }
    }

    pub fn with_workers(self, workers: usize) -> Self {
        Self { workers, ..self }
    }

    pub fn with_antithetic(self, antithetic: bool) -> Self {
        Self { antithetic, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_paths == 0 {
            return Err(Error::param("n_paths", "must be at least 1"));
        }
        if self.workers == 0 {
            return Err(Error::param("workers", "must be at least 1"));
        }
        if self.antithetic && self.n_paths % 2 == 1 {
            return Err(Error::param(
                "n_paths",
                "must be even with antithetic pairing",
            ));
        }
        Ok(())
    }

    /// Applies `f` to every path and returns the results in path order.
    pub fn map_paths<G, T, F>(&self, generator: &G, f: F) -> Result<Vec<T>>
    where
        G: PathGenerator + ?Sized,
        T: Send,
        F: Fn(&SimulatedPath) -> T + Sync + Send,
    {
        self.validate()?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::param("workers", e.to_string()))?;
        let (seed, antithetic) = (self.seed, self.antithetic);
        Ok(pool.install(|| {
            (0..self.n_paths)
                .into_par_iter()
                .map_init(
                    || SimulatedPath::blank(generator.grid().clone(), generator.measure()),
                    |path, id| {
                        let mut normals = NormalSource::for_path(seed, id, antithetic);
                        path.path_id = id;
                        generator.fill(&mut normals, path);
                        f(path)
                    },
                )
                .collect()
        }))
    }

    /// Estimates `E[f(path)]`.
    pub fn estimate<G, F>(&self, generator: &G, f: F) -> Result<McEstimate>
    where
        G: PathGenerator + ?Sized,
        F: Fn(&SimulatedPath) -> f64 + Sync + Send,
    {
        let samples = self.map_paths(generator, f)?;
        Ok(McEstimate::from_samples(
            &samples,
            self.seed,
            self.antithetic,
        ))
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_paths: u64,
    pub seed: u64,
}

impl McEstimate {
    /// With `antithetic`, the pair averages are the independent units.
    pub fn from_samples(samples: &[f64], seed: u64, antithetic: bool) -> Self {
        let units: Vec<f64> = if antithetic && samples.len().is_multiple_of(2) {
            samples
                .chunks_exact(2)
                .map(|c| 0.5 * (c[0] + c[1]))
                .collect()
        } else {
            samples.to_vec()
        };
        let (mean, std_error) = mean_and_std_error(&units);
        Self {
            mean,
            std_error,
            n_paths: samples.len() as u64,
            seed,
        }
    }

    /// Estimate of `E[a - b]` over common paths.
    pub fn paired_difference(a: &[f64], b: &[f64], seed: u64, antithetic: bool) -> Self {
        assert_eq!(a.len(), b.len(), "paired samples must share paths");
        let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        Self::from_samples(&diff, seed, antithetic)
    }

    /// `|mean - target| / std_error`, infinite when the error is zero and the
    /// mean differs.
    pub fn z_score(&self, target: f64) -> f64 {
        let gap = (self.mean - target).abs();
        if gap == 0.0 {
            0.0
        } else {
            gap / self.std_error
        }
    }
}

/// Shifting by the first sample makes constant inputs exact.
fn mean_and_std_error(units: &[f64]) -> (f64, f64) {
    let n = units.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let shift = units[0];
    let dev: Vec<f64> = units.iter().map(|u| u - shift).collect();
    let mean_dev = pairwise_sum(&dev) / n as f64;
    if n == 1 {
        return (shift + mean_dev, 0.0);
    }
    let sq: Vec<f64> = dev
        .iter()
        .map(|d| (d - mean_dev) * (d - mean_dev))
        .collect();
    let var = pairwise_sum(&sq) / (n - 1) as f64;
    (shift + mean_dev, (var / n as f64).sqrt())
}

/// Pairwise (cascade) summation in index order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 16;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Writes `path_id,t,X` rows for the first `limit` paths.
pub fn write_paths_csv<G, W>(generator: &G, mc: &McConfig, limit: u64, out: W) -> Result<()>
where
    G: PathGenerator + ?Sized,
    W: Write,
{
    let mut writer = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    writer.write_record(["path_id", "t", "X"]).map_err(io)?;
    for id in 0..limit.min(mc.n_paths) {
        let path = generator.path(mc.seed, id, mc.antithetic);
        for (t, x) in path.grid.times().iter().zip(&path.prices) {
            writer
                .write_record([id.to_string(), t.to_string(), x.to_string()])
                .map_err(io)?;
        }
    }
    writer.flush()?;
    Ok(())
}
