use std::sync::Arc;

use super::fbm::{FbmMethod, FbmSampler};
use super::rng::NormalSource;
use super::{Measure, PathGenerator, PathGrid, SimulatedPath};
use crate::error::{Error, Result};
use crate::term_structure::{MarketModel, ModelKind, Segment};

/// Constant-coefficient stretch of one grid step, pre-scaled for sampling.
#[derive(Debug, Clone, Copy)]
struct Piece {
    sqrt_dt: f64,
    /// Log-price drift over the piece under the simulation measure.
    log_drift: f64,
    /// `sigma * sqrt(dt)`.
    vol: f64,
    /// `theta * sqrt(dt)`.
    theta: f64,
    /// `dt`-part of `ln rho*` under the simulation measure.
    rho_drift: f64,
}

impl Piece {
    fn new(seg: Segment, measure: Measure) -> Self {
        let sqrt_dt = seg.dt.sqrt();
        let half_var = 0.5 * seg.sigma * seg.sigma * seg.dt;
        if seg.sigma == 0.0 {
            return Self {
                sqrt_dt,
                log_drift: seg.m * seg.dt,
                vol: 0.0,
                theta: 0.0,
                rho_drift: 0.0,
            };
        }
        let theta = seg.m / seg.sigma;
        let half_theta_sq = 0.5 * theta * theta * seg.dt;
        let (log_drift, rho_drift) = match measure {
            Measure::Physical => (seg.m * seg.dt - half_var, -half_theta_sq),
            Measure::RiskNeutral => (-half_var, half_theta_sq),
        };
        Self {
            sqrt_dt,
            log_drift,
            vol: seg.sigma * sqrt_dt,
            theta: theta * sqrt_dt,
            rho_drift,
        }
    }
}

/// Exact log-normal stepping for the standard and time-varying models.
///
/// Each grid step is split at the curve breakpoints and every constant piece
/// gets its own normal draw, so prices at grid times have the exact law.
pub struct StandardGenerator {
    model: MarketModel,
    grid: Arc<PathGrid>,
    measure: Measure,
    steps: Vec<Vec<Piece>>,
}

impl StandardGenerator {
    pub fn new(model: &MarketModel, grid: PathGrid, measure: Measure) -> Result<Self> {
        grid.check_horizon(model)?;
        let times = grid.times();
        let segments: Vec<Vec<Segment>> = match model.kind() {
            ModelKind::Standard { m, sigma } => {
                if *sigma == 0.0 && measure == Measure::RiskNeutral {
                    return Err(Error::UnsupportedModel(
                        "zero-volatility model has no pricing measure",
                    ));
                }
                times
                    .windows(2)
                    .map(|w| {
                        vec![Segment {
                            dt: w[1] - w[0],
                            m: *m,
                            sigma: *sigma,
                        }]
                    })
                    .collect()
            }
            ModelKind::TimeVarying { curve } => times
                .windows(2)
                .map(|w| curve.segments(w[0], w[1]))
                .collect::<Result<_>>()?,
            ModelKind::Fractional { .. } => {
                return Err(Error::UnsupportedModel(
                    "fractional model needs the fBm generator",
                ))
            }
        };
        let steps = segments
            .into_iter()
            .map(|s| s.into_iter().map(|seg| Piece::new(seg, measure)).collect())
            .collect();
        Ok(Self {
            model: model.clone(),
            grid: Arc::new(grid),
            measure,
            steps,
        })
    }
}

impl PathGenerator for StandardGenerator {
    fn model(&self) -> &MarketModel {
        &self.model
    }

    fn grid(&self) -> &Arc<PathGrid> {
        &self.grid
    }

    fn measure(&self) -> Measure {
        self.measure
    }

    fn fill(&self, normals: &mut NormalSource, path: &mut SimulatedPath) {
        let x0 = self.model.spot();
        path.measure = self.measure;
        path.prices[0] = x0;
        let (mut log_return, mut log_rho) = (0.0, 0.0);
        for (i, pieces) in self.steps.iter().enumerate() {
            let mut dw = 0.0;
            for piece in pieces {
                log_return += piece.log_drift;
                log_rho += piece.rho_drift;
                if piece.vol > 0.0 {
                    let z = normals.draw();
                    log_return += piece.vol * z;
                    log_rho -= piece.theta * z;
                    dw += piece.sqrt_dt * z;
                }
            }
            path.driver[i] = dw;
            path.prices[i + 1] = x0 * log_return.exp();
        }
        path.rn_density = log_rho.exp();
    }
}

/// Paths of the fractional model driven by exact-covariance fBm.
///
/// Under `P*` the simulated process is `B*_H` and
/// `X_t = x_0 exp(sigma B*_H(t) - sigma^2 t^2H / 2)`. Under `P` it is `B_H`,
/// with `B*_H(t) = B_H(t) + theta t^2H` and density
/// `Z_T = exp(-theta B_H(T) - theta^2 T^2H / 2)`.
pub struct FractionalGenerator {
    model: MarketModel,
    grid: Arc<PathGrid>,
    measure: Measure,
    sampler: FbmSampler,
    sigma: f64,
    theta: f64,
    /// `t^2H` at each grid time.
    scaled_time: Vec<f64>,
}

impl FractionalGenerator {
    pub fn new(
        model: &MarketModel,
        grid: PathGrid,
        measure: Measure,
        method: FbmMethod,
    ) -> Result<Self> {
        let ModelKind::Fractional { m, sigma, hurst } = *model.kind() else {
            return Err(Error::UnsupportedModel(
                "fBm generator needs the fractional model",
            ));
        };
        grid.check_horizon(model)?;
        let sampler = FbmSampler::new(hurst, &grid, method)?;
        let scaled_time = grid.times().iter().map(|t| t.powf(2.0 * hurst)).collect();
        Ok(Self {
            model: model.clone(),
            grid: Arc::new(grid),
            measure,
            sampler,
            sigma,
            theta: m / sigma,
            scaled_time,
        })
    }

    pub fn sampler(&self) -> &FbmSampler {
        &self.sampler
    }
}

impl PathGenerator for FractionalGenerator {
    fn model(&self) -> &MarketModel {
        &self.model
    }

    fn grid(&self) -> &Arc<PathGrid> {
        &self.grid
    }

    fn measure(&self) -> Measure {
        self.measure
    }

    fn fill(&self, normals: &mut NormalSource, path: &mut SimulatedPath) {
        let n = self.grid.steps();
        let mut fbm = vec![0.0; n + 1];
        self.sampler.sample(normals, &mut fbm);

        let (x0, sigma, theta) = (self.model.spot(), self.sigma, self.theta);
        let shift = match self.measure {
            Measure::Physical => theta,
            Measure::RiskNeutral => 0.0,
        };
        path.measure = self.measure;
        path.prices[0] = x0;
        for i in 1..=n {
            let s = self.scaled_time[i];
            let pricing_driver = fbm[i] + shift * s;
            path.prices[i] = x0 * (sigma * pricing_driver - 0.5 * sigma * sigma * s).exp();
            path.driver[i - 1] = fbm[i] - fbm[i - 1];
        }
        let s_end = self.scaled_time[n];
        let half = 0.5 * theta * theta * s_end;
        path.rn_density = match self.measure {
            Measure::Physical => (-theta * fbm[n] - half).exp(),
            Measure::RiskNeutral => (-theta * fbm[n] + half).exp(),
        };
    }
}

/// Generator for the standard or time-varying model.
pub fn simulate_standard(
    model: &MarketModel,
    grid: PathGrid,
    measure: Measure,
) -> Result<StandardGenerator> {
    StandardGenerator::new(model, grid, measure)
}

/// Generator for the fractional model using circulant-embedding fBm.
pub fn simulate_fractional(
    model: &MarketModel,
    grid: PathGrid,
    measure: Measure,
) -> Result<FractionalGenerator> {
    FractionalGenerator::new(model, grid, measure, FbmMethod::Auto)
}

/// Generator for any model: exact log-normal stepping for the diffusion
/// models, fBm synthesis for the fractional one.
pub fn generator_for(
    model: &MarketModel,
    grid: PathGrid,
    measure: Measure,
) -> Result<Box<dyn PathGenerator + Send>> {
    Ok(match model.kind() {
        ModelKind::Fractional { .. } => Box::new(simulate_fractional(model, grid, measure)?),
        _ => Box::new(simulate_standard(model, grid, measure)?),
    })
}

/// Sequential stream of fBm sample paths on a grid, `B_H(t_0) = 0` included.
pub struct FbmStream {
    sampler: FbmSampler,
    steps: usize,
    seed: u64,
    next_id: u64,
    n_paths: u64,
}

impl Iterator for FbmStream {
    type Item = Vec<f64>;

    fn next(&mut self) -> Option<Vec<f64>> {
        if self.next_id == self.n_paths {
            return None;
        }
        let mut normals = NormalSource::for_path(self.seed, self.next_id, false);
        let mut out = vec![0.0; self.steps + 1];
        self.sampler.sample(&mut normals, &mut out);
        self.next_id += 1;
        Some(out)
    }
}

pub fn simulate_fbm(hurst: f64, grid: &PathGrid, n_paths: u64, seed: u64) -> Result<FbmStream> {
    if n_paths == 0 {
        return Err(Error::param("n_paths", "must be at least 1"));
    }
    Ok(FbmStream {
        sampler: FbmSampler::new(hurst, grid, FbmMethod::Auto)?,
        steps: grid.steps(),
        seed,
        next_id: 0,
        n_paths,
    })
}
