mod common;

use common::{frozen, SEED};
use effhedge::efficient_hedging::{
    calibrate_linear, calibrate_power, DMode, HedgePlan, LossSpec, PlanConstant,
};
use effhedge::monte_carlo::{
    fbm_covariance, mc_price, shortfall_risk, simulate_fbm, simulate_fractional, simulate_standard,
    CappedClaim, HedgeMode, HedgeStrategy, McConfig, Measure, PathGrid,
};
use effhedge::term_structure::{Breakpoint, CoefficientCurve, MarketModel};

fn mc(n: u64) -> McConfig {
    McConfig::new(n, SEED).with_workers(4)
}

#[test]
fn density_reweighting_matches_pricing_measure() {
    let model = common::standard_model();
    let grid = || PathGrid::uniform(1.0, 4).unwrap();
    let physical = simulate_standard(&model, grid(), Measure::Physical).unwrap();
    let pricing = simulate_standard(&model, grid(), Measure::RiskNeutral).unwrap();
    let payoffs: [fn(f64) -> f64; 3] = [
        |x| (x - 100.0).max(0.0),
        |x| f64::from(u8::from(x > 110.0)),
        |x| x,
    ];
    for g in payoffs {
        let direct = mc_price(&mc(40_000), &pricing, |p| g(p.terminal())).unwrap();
        let weighted = mc(40_000)
            .estimate(&physical, |p| p.rn_density * g(p.terminal()))
            .unwrap();
        let se = direct.std_error.hypot(weighted.std_error);
        assert!(
            (direct.mean - weighted.mean).abs() < 4.0 * se,
            "{direct:?} vs {weighted:?}"
        );
    }
}

#[test]
fn time_varying_density_reweighting_matches_pricing_measure() {
    let curve = CoefficientCurve::new(
        vec![
            Breakpoint {
                t: 0.0,
                m: 0.02,
                sigma: 0.3,
            },
            Breakpoint {
                t: 0.4,
                m: 0.15,
                sigma: 0.15,
            },
        ],
        1.0,
    )
    .unwrap();
    let model = MarketModel::time_varying(curve, 100.0, 100.0, 1.0).unwrap();
    let price = effhedge::analytic_pricing::perfect_hedge_price(&model, 0.0, 100.0).unwrap();
    let physical = simulate_standard(
        &model,
        PathGrid::uniform(1.0, 3).unwrap(),
        Measure::Physical,
    )
    .unwrap();
    let weighted = mc(40_000)
        .estimate(&physical, |p| {
            p.rn_density * (p.terminal() - 100.0).max(0.0)
        })
        .unwrap();
    assert!(weighted.z_score(price) < 4.0, "{weighted:?} vs {price}");
}

#[test]
fn fractional_density_reweighting_prices_the_call() {
    let model = MarketModel::fractional(0.08, 0.2, 0.75, 100.0, 100.0, 2.0).unwrap();
    let physical = simulate_fractional(
        &model,
        PathGrid::uniform(2.0, 16).unwrap(),
        Measure::Physical,
    )
    .unwrap();
    let weighted = mc(40_000)
        .estimate(&physical, |p| {
            p.rn_density * (p.terminal() - 100.0).max(0.0)
        })
        .unwrap();
    let expected = frozen::FRACTIONAL_CALLS[5].2;
    assert!(
        weighted.z_score(expected) < 4.0,
        "{weighted:?} vs {expected}"
    );
}

#[test]
fn fractional_at_half_prices_like_standard() {
    let model = MarketModel::fractional_reduction_mode(0.08, 0.2, 0.5, 100.0, 100.0, 1.0).unwrap();
    let generator = simulate_fractional(
        &model,
        PathGrid::uniform(1.0, 8).unwrap(),
        Measure::RiskNeutral,
    )
    .unwrap();
    let est = mc_price(&mc(40_000), &generator, |p| (p.terminal() - 100.0).max(0.0)).unwrap();
    assert!(est.z_score(frozen::ATM_CALL) < 4.0, "{est:?}");
}

#[test]
fn fbm_sample_covariance_small_grid() {
    let grid = PathGrid::uniform(1.0, 4).unwrap();
    let n = 50_000u64;
    let mut cross = [[0.0; 4]; 4];
    for path in simulate_fbm(0.9, &grid, n, SEED).unwrap() {
        for i in 0..4 {
            for j in 0..4 {
                cross[i][j] += path[i + 1] * path[j + 1];
            }
        }
    }
    let times = grid.times();
    for i in 0..4 {
        for j in 0..4 {
            let sample = cross[i][j] / n as f64;
            let exact = fbm_covariance(0.9, times[i + 1], times[j + 1]);
            assert!(
                (sample - exact).abs() < 0.02,
                "({i},{j}): {sample} vs {exact}"
            );
        }
    }
}

#[test]
fn calibrated_plans_cost_the_budget() {
    let model = common::standard_model();
    let generator = simulate_standard(
        &model,
        PathGrid::uniform(1.0, 1).unwrap(),
        Measure::RiskNeutral,
    )
    .unwrap();
    let budget = 0.8 * frozen::ATM_CALL;
    let power = calibrate_power(&model, 3.0, budget).unwrap();
    let linear = calibrate_linear(&model, budget, DMode::Max).unwrap();
    for plan in [&power, &linear] {
        let est = mc_price(&mc(40_000), &generator, |p| {
            plan.terminal_claim(p.terminal())
        })
        .unwrap();
        assert!(est.z_score(budget) < 4.0, "{:?}: {est:?}", plan.constant());
    }
}

#[test]
fn linear_plan_is_a_knock_in_on_the_density() {
    let model = common::standard_model();
    let budget = 0.6 * frozen::ATM_CALL;
    let plan = calibrate_linear(&model, budget, DMode::Max).unwrap();
    let PlanConstant::ATilde { a_tilde, .. } = *plan.constant() else {
        unreachable!()
    };
    let generator = simulate_standard(
        &model,
        PathGrid::uniform(1.0, 1).unwrap(),
        Measure::RiskNeutral,
    )
    .unwrap();
    let est = mc_price(&mc(40_000), &generator, |p| {
        if p.rn_density < 1.0 / a_tilde {
            (p.terminal() - 100.0).max(0.0)
        } else {
            0.0
        }
    })
    .unwrap();
    assert!(est.z_score(budget) < 4.0, "{est:?} vs {budget}");
}

#[test]
fn level_at_strike_is_the_call_and_remote_level_is_cheap() {
    let model = common::standard_model();
    let generator = simulate_standard(
        &model,
        PathGrid::uniform(1.0, 1).unwrap(),
        Measure::RiskNeutral,
    )
    .unwrap();
    let full = HedgePlan::power_with_level(&model, 2.0, 100.0).unwrap();
    assert!((full.budget() - frozen::ATM_CALL).abs() < 1e-12);
    let est = mc_price(&mc(40_000), &generator, |p| {
        full.terminal_claim(p.terminal())
    })
    .unwrap();
    assert!(est.z_score(full.budget()) < 4.0, "{est:?}");

    let remote = HedgePlan::power_with_level(&model, 2.0, 1e4).unwrap();
    assert!(remote.budget() < 1e-12);
    let est = mc_price(&mc(40_000), &generator, |p| {
        remote.terminal_claim(p.terminal())
    })
    .unwrap();
    assert_eq!(est.mean, 0.0);
}

#[test]
fn plan_beats_equal_budget_capped_claims() {
    let model = common::standard_model();
    let budget = 0.8 * frozen::ATM_CALL;
    let plan = calibrate_power(&model, 2.0, budget).unwrap();
    let physical = simulate_standard(
        &model,
        PathGrid::uniform(1.0, 1).unwrap(),
        Measure::Physical,
    )
    .unwrap();
    let loss = LossSpec::Power { p: 2.0 };
    let base = shortfall_risk(
        &mc(40_000),
        &physical,
        &plan,
        loss,
        HedgeMode::TerminalClaim,
    )
    .unwrap();
    for exponent in [0.0, 0.5, 8.0] {
        let alt = CappedClaim::calibrate(&model, exponent, budget).unwrap();
        assert!((alt.initial_capital() - budget).abs() < 1e-9 * budget);
        let risk =
            shortfall_risk(&mc(40_000), &physical, &alt, loss, HedgeMode::TerminalClaim).unwrap();
        assert!(
            risk.mean > base.mean,
            "exponent {exponent}: {risk:?} vs {base:?}"
        );
    }
}
