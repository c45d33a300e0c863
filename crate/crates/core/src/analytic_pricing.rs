//! Standard normal machinery and the perfect-hedge price of a European call.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{ensure_positive, Error, Result};
use crate::term_structure::{IntegratedQuantities, MarketModel};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Standard normal CDF, `erfc(-z / sqrt 2) / 2`.
///
/// `erfc` is accurate to about one ulp over the whole line, so the result has
/// absolute error well under 1e-15 and keeps full relative accuracy in the
/// lower tail until it underflows near `z = -38`.
pub fn norm_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
}

pub fn norm_pdf(z: f64) -> f64 {
    (-0.5 * z * z - LN_SQRT_2PI).exp()
}

/// `ln Phi(z)`, finite for every finite `z`.
pub fn ln_norm_cdf(z: f64) -> f64 {
    if z > -30.0 {
        return norm_cdf(z).ln();
    }
    // Phi(z) = phi(z) * R(-z), with the Mills ratio R from its continued
    // fraction 1 / (x + 1 / (x + 2 / (x + 3 / ...))).
    let x = -z;
    let mut tail = x;
    for k in (1..=60).rev() {
        tail = x + k as f64 / tail;
    }
    -0.5 * z * z - LN_SQRT_2PI - tail.ln()
}

/// `d_+` and `d_-` of a call struck (or capped) at some level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoneynessTerms {
    pub d_plus: f64,
    pub d_minus: f64,
}

/// `d_pm = (ln x - ln L) / sigma_T +- sigma_T / 2`.
pub fn d_pm(x: f64, level: f64, iq: &IntegratedQuantities) -> Result<MoneynessTerms> {
    ensure_positive("x", x)?;
    ensure_positive("level", level)?;
    let s = iq.sigma_total();
    if s == 0.0 {
        return Err(Error::DegenerateWindow);
    }
    let d_minus = (x.ln() - level.ln()) / s - 0.5 * s;
    Ok(MoneynessTerms {
        d_plus: d_minus + s,
        d_minus,
    })
}

/// Black-Scholes call value for total volatility `iq.sigma_total()`.
/// Collapses to the intrinsic value when the window is empty.
pub fn call_value(iq: &IntegratedQuantities, x: f64, strike: f64) -> Result<f64> {
    ensure_positive("x", x)?;
    ensure_positive("strike", strike)?;
    if iq.sigma_total() == 0.0 {
        return Ok((x - strike).max(0.0));
    }
    let d = d_pm(x, strike, iq)?;
    Ok(x * norm_cdf(d.d_plus) - strike * norm_cdf(d.d_minus))
}

/// Classical call delta `Phi(d_+)`; at an empty window the (right-continuous)
/// intrinsic slope.
pub fn call_delta(iq: &IntegratedQuantities, x: f64, strike: f64) -> Result<f64> {
    if iq.sigma_total() == 0.0 {
        return Ok(if x >= strike { 1.0 } else { 0.0 });
    }
    Ok(norm_cdf(d_pm(x, strike, iq)?.d_plus))
}

/// Cost of the perfect hedge of `(X_T - K)^+` at time `t` with spot `x`:
/// `x Phi(d_+) - K Phi(d_-)` over the window `[t, T]`, or `(x - K)^+` at `t = T`.
pub fn perfect_hedge_price(model: &MarketModel, t: f64, x: f64) -> Result<f64> {
    let iq = model.window(t)?;
    call_value(&iq, x, model.strike())
}
