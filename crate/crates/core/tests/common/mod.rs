//! Independent oracles shared by the integration tests and the acceptance
//! harness. Nothing here calls the formulas under test.

#![allow(dead_code)]

use effhedge::term_structure::MarketModel;

/// Reference values computed at 40 significant digits with mpmath.
pub mod frozen {
    /// At-the-money call, `x = K = 100`, `sigma_T = 0.2`.
    pub const ATM_CALL: f64 = 7.965_567_455_405_796;
    /// Power-loss value at `x = K = 100, L = 120, sigma_T = 0.2, alpha_T = 2, p = 2`.
    pub const POWER_VALUE: f64 = 2.698_211_083_202_088;
    /// Its `x`-derivative.
    pub const POWER_DELTA: f64 = 0.259_835_240_757_613_8;
    /// `100 Phi(-0.3) - 100 Phi(-0.5)`.
    pub const LINEAR_VALUE: f64 = 7.355_103_908_506_047;
    /// At-the-money fractional call with `sigma = 0.2` for `(H, T)`.
    pub const FRACTIONAL_CALLS: [(f64, f64, f64); 9] = [
        (0.6, 0.5, 5.260_258_571_902_149),
        (0.6, 1.0, 7.965_567_455_405_796),
        (0.6, 2.0, 12.047_521_020_903_876),
        (0.75, 0.5, 4.741_455_889_129_909),
        (0.75, 1.0, 7.965_567_455_405_796),
        (0.75, 2.0, 13.355_776_146_983_779),
        (0.9, 0.5, 4.273_711_891_925_599),
        (0.9, 1.0, 7.965_567_455_405_796),
        (0.9, 2.0, 14.803_090_707_382_706),
    ];
}

pub const SEED: u64 = 20_240_601;

pub fn standard_model() -> MarketModel {
    MarketModel::standard(0.08, 0.2, 100.0, 100.0, 1.0).unwrap()
}

/// Standard normal CDF via the complementary error function from `libm`.
pub fn phi(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

pub fn density(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Fractional Black-Scholes call: the standard formula with total variance
/// `sigma^2 (T^2H - t^2H)`.
pub fn fractional_call(x: f64, strike: f64, sigma: f64, hurst: f64, t: f64, horizon: f64) -> f64 {
    let s = sigma * (horizon.powf(2.0 * hurst) - t.powf(2.0 * hurst)).sqrt();
    let d1 = (x / strike).ln() / s + 0.5 * s;
    x * phi(d1) - strike * phi(d1 - s)
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let centre = f(mid);
    let mut k = GK_WEIGHTS[7] * centre;
    let mut g = GAUSS_WEIGHTS[3] * centre;
    for i in 0..7 {
        let pair = f(mid - half * GK_NODES[i]) + f(mid + half * GK_NODES[i]);
        k += GK_WEIGHTS[i] * pair;
        if i % 2 == 1 {
            g += GAUSS_WEIGHTS[i / 2] * pair;
        }
    }
    (k * half, ((k - g) * half).abs())
}

/// Adaptive 7-15 Gauss-Kronrod quadrature on `[a, b]`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn go(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (value, err) = kronrod(f, a, b);
        if err <= tol || depth == 0 {
            return value;
        }
        let mid = 0.5 * (a + b);
        go(f, a, mid, 0.5 * tol, depth - 1) + go(f, mid, b, 0.5 * tol, depth - 1)
    }
    go(f, a, b, tol, 40)
}

/// Power-loss value as the pricing-measure expectation of the modified
/// claim written in the standard normal driver `y` of the window:
///
/// `int_E^inf [x e^{s(y - s/2)} - K - (L - K) e^{-c(y - E)}] phi(y) dy`
///
/// with `E = ln(L/x)/s + s/2` (where the terminal price reaches `L`) and
/// `c = alpha s / (p - 1)`.
pub fn power_value_by_quadrature(
    x: f64,
    strike: f64,
    level: f64,
    p: f64,
    sigma_total: f64,
    alpha: f64,
) -> f64 {
    let s = sigma_total;
    let c = alpha * s / (p - 1.0);
    let e = (level / x).ln() / s + 0.5 * s;
    let integrand = |y: f64| {
        let claim =
            x * (s * (y - 0.5 * s)).exp() - strike - (level - strike) * (-c * (y - e)).exp();
        claim * density(y)
    };
    let hi = e.max(s) + 40.0;
    let mut total = 0.0;
    let mut a = e;
    while a < hi {
        let b = (a + 1.0).min(hi);
        total += integrate(&integrand, a, b, 1e-15);
        a = b;
    }
    total
}

pub fn relative_error(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }
}
