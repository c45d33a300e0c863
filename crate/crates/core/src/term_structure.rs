//! Market models and the integrated quantities that drive every closed form.
//!
//! Three models are supported: the constant-coefficient Black-Scholes model,
//! a Black-Scholes model with deterministic piecewise-constant drift and
//! volatility, and the Ito-type fractional Black-Scholes model. All prices are
//! discounted; there is no interest rate.
//!
//! Every pricing formula downstream depends on the model only through the
//! triple `(sigma_total, theta_total, alpha)` of a window `[t, T]`, see
//! [`IntegratedQuantities`].

use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, ensure_positive, Error, Result};

/// One piece of a piecewise-constant coefficient curve, active on
/// `[start, next start)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Breakpoint {
    pub t: f64,
    pub m: f64,
    pub sigma: f64,
}

/// Integrals of the coefficient functions over a window.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CurveIntegrals {
    /// `int sigma^2 ds`
    pub variance: f64,
    /// `int theta^2 ds` with `theta = m / sigma`
    pub theta_sq: f64,
    /// `int m ds`, which equals `int theta * sigma ds`
    pub drift: f64,
}

/// A constant-coefficient stretch of a curve restricted to some window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub dt: f64,
    pub m: f64,
    pub sigma: f64,
}

/// Deterministic drift `m(t)` and volatility `sigma(t)`, piecewise constant on
/// right-open intervals. Integration over any window is exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCurve", into = "RawCurve")]
pub struct CoefficientCurve {
    breakpoints: Vec<Breakpoint>,
    domain_end: f64,
}

#[derive(Serialize, Deserialize)]
struct RawCurve {
    breakpoints: Vec<Breakpoint>,
    domain_end: f64,
}

impl TryFrom<RawCurve> for CoefficientCurve {
    type Error = Error;

    fn try_from(raw: RawCurve) -> Result<Self> {
        CoefficientCurve::new(raw.breakpoints, raw.domain_end)
    }
}

impl From<CoefficientCurve> for RawCurve {
    fn from(c: CoefficientCurve) -> Self {
        RawCurve {
            breakpoints: c.breakpoints,
            domain_end: c.domain_end,
        }
    }
}

impl CoefficientCurve {
    pub fn new(breakpoints: Vec<Breakpoint>, domain_end: f64) -> Result<Self> {
        let Some(first) = breakpoints.first() else {
            return Err(Error::param(
                "breakpoints",
                "curve needs at least one piece",
            ));
        };
        if first.t != 0.0 {
            return Err(Error::param(
                "breakpoints",
                "first breakpoint must be at t = 0",
            ));
        }
        for (i, bp) in breakpoints.iter().enumerate() {
            ensure_finite("m", bp.m)?;
            ensure_positive("sigma", bp.sigma)?;
            if i > 0 && !(bp.t > breakpoints[i - 1].t) {
                return Err(Error::param(
                    "breakpoints",
                    format!("times must be strictly increasing (index {i})"),
                ));
            }
        }
        let last = breakpoints[breakpoints.len() - 1].t;
        if !(domain_end >= last) || !domain_end.is_finite() {
            return Err(Error::param(
                "domain_end",
                format!("must be finite and >= last breakpoint {last}, got {domain_end}"),
            ));
        }
        Ok(Self {
            breakpoints,
            domain_end,
        })
    }

    pub fn constant(m: f64, sigma: f64, domain_end: f64) -> Result<Self> {
        Self::new(vec![Breakpoint { t: 0.0, m, sigma }], domain_end)
    }

    pub fn breakpoints(&self) -> &[Breakpoint] {
        &self.breakpoints
    }

    pub fn domain_end(&self) -> f64 {
        self.domain_end
    }

    /// Parses a curve from CSV with header `t,m,sigma`. Each row starts a new
    /// constant piece. Line numbers in errors are 1-based and count the header.
    pub fn from_csv_reader<R: Read>(reader: R, domain_end: f64) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .has_headers(true)
            .from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| Error::CurveParse {
                line: 1,
                reason: e.to_string(),
            })?
            .clone();
        let names: Vec<&str> = headers.iter().collect();
        if names != ["t", "m", "sigma"] {
            return Err(Error::CurveParse {
                line: 1,
                reason: format!("expected header `t,m,sigma`, got `{}`", names.join(",")),
            });
        }

        let mut breakpoints: Vec<Breakpoint> = Vec::new();
        for record in rdr.records() {
            let record = record.map_err(|e| Error::CurveParse {
                line: e.position().map(|p| p.line()).unwrap_or(0),
                reason: e.to_string(),
            })?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            let field = |i: usize, name: &str| -> Result<f64> {
                record
                    .get(i)
                    .ok_or_else(|| Error::CurveParse {
                        line,
                        reason: format!("missing `{name}`"),
                    })?
                    .parse::<f64>()
                    .map_err(|e| Error::CurveParse {
                        line,
                        reason: format!("bad `{name}`: {e}"),
                    })
            };
            let bp = Breakpoint {
                t: field(0, "t")?,
                m: field(1, "m")?,
                sigma: field(2, "sigma")?,
            };
            if !bp.t.is_finite() || !bp.m.is_finite() {
                return Err(Error::CurveParse {
                    line,
                    reason: "non-finite value".into(),
                });
            }
            if !(bp.sigma > 0.0) || !bp.sigma.is_finite() {
                return Err(Error::CurveParse {
                    line,
                    reason: format!("sigma must be > 0, got {}", bp.sigma),
                });
            }
            match breakpoints.last() {
                None if bp.t != 0.0 => {
                    return Err(Error::CurveParse {
                        line,
                        reason: "first breakpoint must be at t = 0".into(),
                    })
                }
                Some(prev) if !(bp.t > prev.t) => {
                    return Err(Error::CurveParse {
                        line,
                        reason: format!("non-monotone t: {} after {}", bp.t, prev.t),
                    })
                }
                _ => {}
            }
            breakpoints.push(bp);
        }
        if breakpoints.is_empty() {
            return Err(Error::CurveParse {
                line: 2,
                reason: "no breakpoints".into(),
            });
        }
        let last = breakpoints[breakpoints.len() - 1].t;
        Self::new(breakpoints, domain_end.max(last))
    }

    pub fn from_csv_path(path: impl AsRef<Path>, domain_end: f64) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref())
            .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_csv_reader(file, domain_end)
    }

    /// Constant pieces overlapping `[a, b]`, clipped to the window. Zero-length
    /// pieces are skipped.
    pub fn segments(&self, a: f64, b: f64) -> Result<Vec<Segment>> {
        self.check_window(a, b)?;
        let mut out = Vec::new();
        for (i, bp) in self.breakpoints.iter().enumerate() {
            let end = self
                .breakpoints
                .get(i + 1)
                .map(|n| n.t)
                .unwrap_or(f64::INFINITY);
            let lo = bp.t.max(a);
            let hi = end.min(b);
            if hi > lo {
                out.push(Segment {
                    dt: hi - lo,
                    m: bp.m,
                    sigma: bp.sigma,
                });
            }
        }
        Ok(out)
    }

    pub fn integrate(&self, a: f64, b: f64) -> Result<CurveIntegrals> {
        let mut acc = CurveIntegrals::default();
        for s in self.segments(a, b)? {
            let theta = s.m / s.sigma;
            acc.variance += s.sigma * s.sigma * s.dt;
            acc.theta_sq += theta * theta * s.dt;
            acc.drift += s.m * s.dt;
        }
        Ok(acc)
    }

    /// Coefficients of the piece active just before `t` (the one containing
    /// `t` for `t` strictly inside a piece).
    fn piece_at_left(&self, t: f64) -> &Breakpoint {
        self.breakpoints
            .iter()
            .rev()
            .find(|bp| bp.t < t)
            .unwrap_or(&self.breakpoints[0])
    }

    fn check_window(&self, a: f64, b: f64) -> Result<()> {
        if a > b {
            return Err(Error::InvalidWindow { start: a, end: b });
        }
        for t in [a, b] {
            if !(0.0..=self.domain_end).contains(&t) {
                return Err(Error::OutsideDomain {
                    time: t,
                    domain_end: self.domain_end,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelKind {
    /// `dX = X (m dt + sigma dw)`
    Standard { m: f64, sigma: f64 },
    /// `dX = X (m(t) dt + sigma(t) dw)`
    TimeVarying { curve: CoefficientCurve },
    /// `dX = X (sigma dB_H + m dt)`
    Fractional { m: f64, sigma: f64, hurst: f64 },
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Standard { .. } => "standard",
            ModelKind::TimeVarying { .. } => "time_varying",
            ModelKind::Fractional { .. } => "fractional",
        }
    }
}

/// A market model together with the option contract `(spot, strike, horizon)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel", into = "RawModel")]
pub struct MarketModel {
    kind: ModelKind,
    spot: f64,
    strike: f64,
    horizon: f64,
}

#[derive(Serialize, Deserialize)]
struct RawModel {
    #[serde(flatten)]
    kind: ModelKind,
    spot: f64,
    strike: f64,
    horizon: f64,
}

impl TryFrom<RawModel> for MarketModel {
    type Error = Error;

    fn try_from(raw: RawModel) -> Result<Self> {
        MarketModel::new(raw.kind, raw.spot, raw.strike, raw.horizon)
    }
}

impl From<MarketModel> for RawModel {
    fn from(m: MarketModel) -> Self {
        RawModel {
            kind: m.kind,
            spot: m.spot,
            strike: m.strike,
            horizon: m.horizon,
        }
    }
}

impl MarketModel {
    pub fn new(kind: ModelKind, spot: f64, strike: f64, horizon: f64) -> Result<Self> {
        match &kind {
            ModelKind::Standard { m, sigma } => {
                ensure_finite("m", *m)?;
                ensure_positive("sigma", *sigma)?;
            }
            ModelKind::TimeVarying { curve } => {
                if curve.domain_end() < horizon {
                    return Err(Error::param(
                        "curve",
                        format!(
                            "domain end {} is before the horizon {horizon}",
                            curve.domain_end()
                        ),
                    ));
                }
            }
            ModelKind::Fractional { m, sigma, hurst } => {
                ensure_finite("m", *m)?;
                ensure_positive("sigma", *sigma)?;
                if !(*hurst > 0.5 && *hurst < 1.0) {
                    return Err(Error::param(
                        "hurst",
                        format!("must lie in (0.5, 1), got {hurst}"),
                    ));
                }
            }
        }
        Self::contract(kind, spot, strike, horizon)
    }

    pub fn standard(m: f64, sigma: f64, spot: f64, strike: f64, horizon: f64) -> Result<Self> {
        Self::new(ModelKind::Standard { m, sigma }, spot, strike, horizon)
    }

    pub fn time_varying(
        curve: CoefficientCurve,
        spot: f64,
        strike: f64,
        horizon: f64,
    ) -> Result<Self> {
        Self::new(ModelKind::TimeVarying { curve }, spot, strike, horizon)
    }

    pub fn fractional(
        m: f64,
        sigma: f64,
        hurst: f64,
        spot: f64,
        strike: f64,
        horizon: f64,
    ) -> Result<Self> {
        Self::new(
            ModelKind::Fractional { m, sigma, hurst },
            spot,
            strike,
            horizon,
        )
    }

    /// Fractional model that also accepts `hurst = 0.5`, for checking that the
    /// fractional formulas collapse onto the standard ones.
    pub fn fractional_reduction_mode(
        m: f64,
        sigma: f64,
        hurst: f64,
        spot: f64,
        strike: f64,
        horizon: f64,
    ) -> Result<Self> {
        ensure_finite("m", m)?;
        ensure_positive("sigma", sigma)?;
        if !(0.5..1.0).contains(&hurst) {
            return Err(Error::param(
                "hurst",
                format!("must lie in [0.5, 1), got {hurst}"),
            ));
        }
        Self::contract(
            ModelKind::Fractional { m, sigma, hurst },
            spot,
            strike,
            horizon,
        )
    }

    /// Standard model with `sigma = 0`. Paths are deterministic; there is no
    /// pricing measure, so `theta_total` and `alpha` are reported as zero.
    pub fn zero_volatility_test_mode(m: f64, spot: f64, strike: f64, horizon: f64) -> Result<Self> {
        ensure_finite("m", m)?;
        Self::contract(ModelKind::Standard { m, sigma: 0.0 }, spot, strike, horizon)
    }

    fn contract(kind: ModelKind, spot: f64, strike: f64, horizon: f64) -> Result<Self> {
        ensure_positive("spot", spot)?;
        ensure_positive("strike", strike)?;
        ensure_positive("horizon", horizon)?;
        Ok(Self {
            kind,
            spot,
            strike,
            horizon,
        })
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn spot(&self) -> f64 {
        self.spot
    }

    pub fn strike(&self) -> f64 {
        self.strike
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn hurst(&self) -> f64 {
        match self.kind {
            ModelKind::Fractional { hurst, .. } => hurst,
            _ => 0.5,
        }
    }

    pub fn is_fractional(&self) -> bool {
        matches!(self.kind, ModelKind::Fractional { .. })
    }

    /// Same model and strike with a different spot.
    pub fn with_spot(&self, spot: f64) -> Result<Self> {
        Self::contract(self.kind.clone(), spot, self.strike, self.horizon)
    }

    /// Integrated quantities over the hedging window `[t, horizon]`.
    pub fn window(&self, t: f64) -> Result<IntegratedQuantities> {
        integrated_quantities(self, t, self.horizon)
    }
}

/// Sufficient statistics of a window `[t, T]`.
///
/// `theta_total == alpha * sigma_total` holds bitwise: the struct can only be
/// built from `(sigma_total, alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegratedQuantities {
    sigma_total: f64,
    theta_total: f64,
    alpha: f64,
}

impl IntegratedQuantities {
    pub fn new(sigma_total: f64, alpha: f64) -> Result<Self> {
        if !(sigma_total >= 0.0) || !sigma_total.is_finite() {
            return Err(Error::param(
                "sigma_total",
                format!("must be finite and >= 0, got {sigma_total}"),
            ));
        }
        ensure_finite("alpha", alpha)?;
        Ok(Self {
            sigma_total,
            theta_total: alpha * sigma_total,
            alpha,
        })
    }

    /// Total volatility `sqrt(int_t^T sigma^2 ds)`.
    pub fn sigma_total(&self) -> f64 {
        self.sigma_total
    }

    /// Total market price of risk `sqrt(int_t^T theta^2 ds)`, signed by the
    /// direction of the drift.
    pub fn theta_total(&self) -> f64 {
        self.theta_total
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// `(sigma_T, theta_T, alpha_T)` for the window `[t, end]` of `model`.
pub fn integrated_quantities(
    model: &MarketModel,
    t: f64,
    end: f64,
) -> Result<IntegratedQuantities> {
    if t > end {
        return Err(Error::InvalidWindow { start: t, end });
    }
    if t < 0.0 || end > model.horizon || !t.is_finite() {
        return Err(Error::OutsideDomain {
            time: if t < 0.0 || !t.is_finite() { t } else { end },
            domain_end: model.horizon,
        });
    }
    match &model.kind {
        ModelKind::Standard { m, sigma } => {
            if *sigma == 0.0 {
                return IntegratedQuantities::new(0.0, 0.0);
            }
            IntegratedQuantities::new(sigma * (end - t).sqrt(), m / (sigma * sigma))
        }
        ModelKind::Fractional { m, sigma, hurst } => {
            let two_h = 2.0 * hurst;
            let spread = end.powf(two_h) - t.powf(two_h);
            IntegratedQuantities::new(sigma * spread.max(0.0).sqrt(), m / (sigma * sigma))
        }
        ModelKind::TimeVarying { curve } => {
            let ints = curve.integrate(t, end)?;
            if ints.variance == 0.0 {
                let bp = curve.piece_at_left(end);
                return IntegratedQuantities::new(0.0, bp.m / (bp.sigma * bp.sigma));
            }
            let sigma_total = ints.variance.sqrt();
            let theta_abs = ints.theta_sq.sqrt();
            let theta = if ints.drift < 0.0 {
                -theta_abs
            } else {
                theta_abs
            };
            IntegratedQuantities::new(sigma_total, theta / sigma_total)
        }
    }
}
