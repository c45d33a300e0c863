//! Exact-covariance fractional Brownian motion on a time grid.
//!
//! On a uniform grid the increments (fractional Gaussian noise) are
//! stationary, and their covariance embeds in a circulant matrix of size
//! `2n` whose eigenvalues come from one FFT (Davies-Harte / Wood-Chan). For
//! `H >= 1/2` the embedding is nonnegative definite; if rounding ever makes an
//! eigenvalue meaningfully negative the sampler falls back to a Cholesky
//! factor of the fBm covariance.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::rng::NormalSource;
use super::PathGrid;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FbmMethod {
    /// Circulant embedding, Cholesky when the embedding is not nonnegative.
    #[default]
    Auto,
    Circulant,
    Cholesky,
}

enum Inner {
    Circulant {
        n: usize,
        /// `sqrt(lambda_k / 2n)` for `k = 0..=n`.
        scale: Vec<f64>,
        fft: Arc<dyn Fft<f64>>,
        step_scale: f64,
    },
    Cholesky {
        n: usize,
        lower: Vec<f64>,
    },
}

pub struct FbmSampler {
    hurst: f64,
    inner: Inner,
}

/// `Cov(B_H(s), B_H(t)) = (s^2H + t^2H - |t - s|^2H) / 2`.
pub fn fbm_covariance(hurst: f64, s: f64, t: f64) -> f64 {
    let h2 = 2.0 * hurst;
    0.5 * (s.powf(h2) + t.powf(h2) - (t - s).abs().powf(h2))
}

/// Autocovariance of unit-step fractional Gaussian noise at lag `k`.
fn fgn_autocovariance(hurst: f64, k: usize) -> f64 {
    let h2 = 2.0 * hurst;
    let k = k as f64;
    0.5 * ((k + 1.0).powf(h2) - 2.0 * k.powf(h2) + (k - 1.0).abs().powf(h2))
}

impl FbmSampler {
    pub fn new(hurst: f64, grid: &PathGrid, method: FbmMethod) -> Result<Self> {
        if !(0.5..1.0).contains(&hurst) {
            return Err(Error::param(
                "hurst",
                format!("must lie in [0.5, 1), got {hurst}"),
            ));
        }
        let inner = match method {
            FbmMethod::Cholesky => Self::cholesky(hurst, grid)?,
            FbmMethod::Circulant | FbmMethod::Auto => {
                let step = grid.uniform_step().ok_or(Error::NonUniformGrid)?;
                match Self::circulant(hurst, grid.steps(), step) {
                    Some(inner) => inner,
                    None if method == FbmMethod::Auto => Self::cholesky(hurst, grid)?,
                    None => return Err(Error::CovarianceNotPositiveDefinite),
                }
            }
        };
        Ok(Self { hurst, inner })
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn method(&self) -> FbmMethod {
        match self.inner {
            Inner::Circulant { .. } => FbmMethod::Circulant,
            Inner::Cholesky { .. } => FbmMethod::Cholesky,
        }
    }

    fn circulant(hurst: f64, n: usize, step: f64) -> Option<Inner> {
        let m = 2 * n;
        let mut row: Vec<Complex64> = (0..m)
            .map(|j| {
                let lag = if j <= n { j } else { m - j };
                Complex64::new(fgn_autocovariance(hurst, lag), 0.0)
            })
            .collect();
        let fft = FftPlanner::new().plan_fft_forward(m);
        fft.process(&mut row);

        let largest = row.iter().map(|c| c.re).fold(0.0, f64::max);
        let mut scale = Vec::with_capacity(n + 1);
        for (k, eig) in row.iter().take(n + 1).enumerate() {
            let lambda = eig.re;
            if lambda < -1e-10 * largest {
                return None;
            }
            let denom = if k == 0 || k == n {
                m as f64
            } else {
                2.0 * m as f64
            };
            scale.push((lambda.max(0.0) / denom).sqrt());
        }
        Some(Inner::Circulant {
            n,
            scale,
            fft,
            step_scale: step.powf(hurst),
        })
    }

    fn cholesky(hurst: f64, grid: &PathGrid) -> Result<Inner> {
        let times = &grid.times()[1..];
        let n = times.len();
        let cov: Vec<f64> = (0..n * n)
            .map(|ij| fbm_covariance(hurst, times[ij / n], times[ij % n]))
            .collect();
        let diag_max = (0..n).map(|i| cov[i * n + i]).fold(0.0, f64::max);
        let mut jitter = 0.0;
        loop {
            if let Some(lower) = cholesky_factor(&cov, n, jitter) {
                return Ok(Inner::Cholesky { n, lower });
            }
            jitter = if jitter == 0.0 {
                1e-12 * diag_max
            } else {
                jitter * 10.0
            };
            if jitter > 1e-8 * diag_max {
                return Err(Error::CovarianceNotPositiveDefinite);
            }
        }
    }

    /// Standard normals consumed per path.
    pub fn normals_per_path(&self) -> usize {
        match self.inner {
            Inner::Circulant { n, .. } => 2 * n,
            Inner::Cholesky { n, .. } => n,
        }
    }

    /// Writes `B_H` at every grid time into `out` (`out[0] = 0`).
    pub fn sample(&self, normals: &mut NormalSource, out: &mut [f64]) {
        match &self.inner {
            Inner::Circulant {
                n,
                scale,
                fft,
                step_scale,
            } => {
                let (n, m) = (*n, 2 * *n);
                debug_assert_eq!(out.len(), n + 1);
                let mut w = vec![Complex64::new(0.0, 0.0); m];
                w[0] = Complex64::new(scale[0] * normals.draw(), 0.0);
                w[n] = Complex64::new(scale[n] * normals.draw(), 0.0);
                for k in 1..n {
                    let v = Complex64::new(scale[k] * normals.draw(), scale[k] * normals.draw());
                    w[k] = v;
                    w[m - k] = v.conj();
                }
                fft.process(&mut w);
                out[0] = 0.0;
                let mut level = 0.0;
                for j in 0..n {
                    level += w[j].re * step_scale;
                    out[j + 1] = level;
                }
            }
            Inner::Cholesky { n, lower } => {
                let n = *n;
                debug_assert_eq!(out.len(), n + 1);
                let z: Vec<f64> = (0..n).map(|_| normals.draw()).collect();
                out[0] = 0.0;
                for i in 0..n {
                    let row = &lower[i * n..i * n + i + 1];
                    out[i + 1] = row.iter().zip(&z).map(|(l, z)| l * z).sum();
                }
            }
        }
    }
}

fn cholesky_factor(cov: &[f64], n: usize, jitter: f64) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = cov[i * n + j];
            if i == j {
                sum += jitter;
            }
            for k in 0..j {
                sum -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(sum > 0.0) {
                    return None;
                }
                l[i * n + i] = sum.sqrt();
            } else {
                l[i * n + j] = sum / l[j * n + j];
            }
        }
    }
    Some(l)
}
