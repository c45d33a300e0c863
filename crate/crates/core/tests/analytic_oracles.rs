mod common;

use common::{frozen, power_value_by_quadrature, relative_error, SEED};
use effhedge::analytic_pricing::call_value;
use effhedge::efficient_hedging::{
    calibrate_power, delta_power, value_linear, value_power, DMode, PlanConstant,
};
use effhedge::term_structure::{CoefficientCurve, IntegratedQuantities, MarketModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn iq(sigma_total: f64, alpha: f64) -> IntegratedQuantities {
    IntegratedQuantities::new(sigma_total, alpha).unwrap()
}

#[test]
fn quadrature_oracle_reproduces_frozen_values() {
    let q = power_value_by_quadrature(100.0, 100.0, 120.0, 2.0, 0.2, 2.0);
    assert!((q - frozen::POWER_VALUE).abs() < 1e-12, "{q}");
}

#[test]
fn power_value_matches_frozen_reference() {
    let v = value_power(&iq(0.2, 2.0), 100.0, 100.0, 120.0, 2.0).unwrap();
    assert!((v - frozen::POWER_VALUE).abs() < 1e-10, "{v}");
    let d = delta_power(&iq(0.2, 2.0), 100.0, 100.0, 120.0, 2.0).unwrap();
    assert!(relative_error(d, frozen::POWER_DELTA) < 1e-12, "{d}");
    let u0 = call_value(&iq(0.2, 0.4), 100.0, 100.0).unwrap();
    assert!(relative_error(u0, frozen::ATM_CALL) < 1e-14);
}

#[test]
fn linear_value_matches_frozen_reference() {
    // ln a / theta + theta / 2 = 0.5 with theta = 0.4.
    let a_tilde = (0.4f64 * 0.3).exp();
    let v = value_linear(&iq(0.2, 2.0), 100.0, 100.0, a_tilde, DMode::Max).unwrap();
    assert!(relative_error(v, frozen::LINEAR_VALUE) < 1e-13, "{v}");
    let min_rule = value_linear(&iq(0.2, 2.0), 100.0, 100.0, a_tilde, DMode::Min).unwrap();
    assert!(relative_error(min_rule, frozen::ATM_CALL) < 1e-13);
}

#[test]
fn power_value_matches_quadrature_on_random_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..50 {
        let strike = 100.0;
        let level = strike * rng.random_range(0f64..5f64.ln()).exp();
        let x = strike * rng.random_range(0.5f64.ln()..2f64.ln()).exp();
        let p = rng.random_range(1.1..20.0);
        let s = rng.random_range(0.05..1.0);
        let alpha = rng.random_range(0.0..5.0);
        let v = value_power(&iq(s, alpha), x, strike, level, p).unwrap();
        let q = power_value_by_quadrature(x, strike, level, p, s, alpha);
        assert!(
            (v - q).abs() < 1e-9,
            "x={x} L={level} p={p} s={s} a={alpha}: {v} vs {q}"
        );
    }
}

#[test]
fn plan_value_at_later_time_matches_quadrature() {
    let model = common::standard_model();
    let plan = calibrate_power(&model, 2.0, 6.0).unwrap();
    let PlanConstant::Level { level, .. } = *plan.constant() else {
        panic!()
    };
    for (t, x) in [(0.25, 90.0), (0.5, 100.0), (0.9, 130.0)] {
        let (v, _) = plan.value_and_delta(t, x).unwrap();
        let s = 0.2 * (1.0f64 - t).sqrt();
        let q = power_value_by_quadrature(x, 100.0, level, 2.0, s, 2.0);
        assert!((v - q).abs() < 1e-9, "t={t}: {v} vs {q}");
    }
}

#[test]
fn delta_matches_finite_difference_on_grid() {
    let q = iq(0.2, 2.0);
    for p in [1.5, 2.0, 3.0, 5.0, 10.0] {
        for i in 0..21 {
            let x = 100.0 * (0.5 + 1.5 * i as f64 / 20.0);
            let h = x * 1e-5;
            let fd = (value_power(&q, x + h, 100.0, 120.0, p).unwrap()
                - value_power(&q, x - h, 100.0, 120.0, p).unwrap())
                / (2.0 * h);
            let d = delta_power(&q, x, 100.0, 120.0, p).unwrap();
            assert!(relative_error(d, fd) <= 1e-6, "p={p} x={x}: {d} vs {fd}");
        }
    }
}

#[test]
fn calibrated_level_decreases_with_p() {
    let model = common::standard_model();
    let budget = 0.8 * frozen::ATM_CALL;
    let levels: Vec<f64> = [2.0, 5.0, 10.0, 50.0, 200.0]
        .iter()
        .map(
            |&p| match *calibrate_power(&model, p, budget).unwrap().constant() {
                PlanConstant::Level { level, .. } => level,
                _ => unreachable!(),
            },
        )
        .collect();
    assert!(levels.windows(2).all(|w| w[1] < w[0]), "{levels:?}");
    let flat = effhedge::efficient_hedging::calibrate_level(&model, 0.0, budget)
        .unwrap()
        .0;
    assert!(
        levels[4] > flat && levels[4] - flat < 0.05 * (levels[0] - flat),
        "{levels:?} vs {flat}"
    );
}

#[test]
fn constant_curve_calibrates_to_the_same_level() {
    let standard = common::standard_model();
    let curve = CoefficientCurve::constant(0.08, 0.2, 1.0).unwrap();
    let varying = MarketModel::time_varying(curve, 100.0, 100.0, 1.0).unwrap();
    let budget = 0.8 * frozen::ATM_CALL;
    let level = |m: &MarketModel| match *calibrate_power(m, 2.0, budget).unwrap().constant() {
        PlanConstant::Level { level, .. } => level,
        _ => unreachable!(),
    };
    assert!(relative_error(level(&varying), level(&standard)) < 1e-10);
}
