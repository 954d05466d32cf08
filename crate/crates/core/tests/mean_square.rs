use barnes_zeta::{
    integrate_mean_square, validate_params, verify_mean_square, EvalConfig, MeanSquareConfig,
    Regime, WeightStructure,
};

fn zeta_one() -> barnes_zeta::BarnesParams {
    validate_params(1.0, &[1.0]).unwrap()
}

#[test]
fn nondecreasing_and_nonnegative() {
    let tr = integrate_mean_square(
        &zeta_one(),
        0.8,
        80.0,
        &[10.0, 20.0, 40.0],
        &MeanSquareConfig::default(),
    )
    .unwrap();
    let mut prev = 0.0;
    for c in &tr.checkpoints {
        assert!(c.integral >= prev);
        prev = c.integral;
    }
}

#[test]
fn halving_quadrature_tolerance() {
    let coarse_tol = 1e-5;
    let coarse = MeanSquareConfig {
        quad_tol: coarse_tol,
        ..MeanSquareConfig::default()
    };
    let fine = MeanSquareConfig {
        quad_tol: coarse_tol / 2.0,
        ..MeanSquareConfig::default()
    };
    let a = integrate_mean_square(&zeta_one(), 1.25, 100.0, &[], &coarse).unwrap();
    let b = integrate_mean_square(&zeta_one(), 1.25, 100.0, &[], &fine).unwrap();
    let (ia, ib) = (a.checkpoints[0].integral, b.checkpoints[0].integral);
    assert!((ia - ib).abs() < 3.0 * coarse_tol * ia);
}

#[test]
fn insensitive_to_truncation_safety() {
    let base = MeanSquareConfig::default();
    let wide = MeanSquareConfig {
        eval: EvalConfig {
            x_safety: 4.0,
            ..base.eval.clone()
        },
        ..base.clone()
    };
    let t = 60.0;
    let a = integrate_mean_square(&zeta_one(), 0.9, t, &[], &base).unwrap();
    let b = integrate_mean_square(&zeta_one(), 0.9, t, &[], &wide).unwrap();
    assert!(
        (a.checkpoints[0].integral - b.checkpoints[0].integral).abs() < 5.0 * base.quad_tol * t
    );
}

#[test]
fn relative_residual_shrinks_above_r() {
    let zeta4 = std::f64::consts::PI.powi(4) / 90.0;
    let tr = integrate_mean_square(
        &zeta_one(),
        2.0,
        400.0,
        &[50.0, 100.0, 200.0, 400.0],
        &MeanSquareConfig::default(),
    )
    .unwrap();
    let rel: Vec<f64> = tr
        .checkpoints
        .iter()
        .map(|c| (c.integral / c.t - zeta4).abs())
        .collect();
    assert!(rel.windows(2).all(|w| w[1] < w[0]), "{rel:?}");
}

#[test]
fn lower_range_fits_the_integral_itself() {
    let rep = verify_mean_square(
        &zeta_one(),
        0.4,
        &[20.0, 40.0, 80.0, 160.0],
        &WeightStructure::AssumedIndependent,
        &MeanSquareConfig::default(),
    )
    .unwrap();
    assert_eq!(rep.regime, Regime::LowerRange);
    assert!(rep.tilde_value.is_none());
    assert!((rep.predicted_slope_bound - 1.2).abs() < 1e-12);
    assert!(rep.pass);
}

#[test]
fn boundary_sigma_records_both_bounds() {
    let rep = verify_mean_square(
        &zeta_one(),
        0.75,
        &[20.0, 40.0, 80.0, 160.0],
        &WeightStructure::AssumedIndependent,
        &MeanSquareConfig::default(),
    )
    .unwrap();
    assert_eq!(rep.regime, Regime::MidRange);
    assert_eq!(rep.notes.len(), 1);
    let json = serde_json::to_string(&rep).unwrap();
    assert!(json.contains("\"regime\":\"mid_range\""));
}

#[test]
fn budget_is_enforced() {
    let cfg = MeanSquareConfig {
        eval_cap: Some(1000),
        ..MeanSquareConfig::default()
    };
    let err = integrate_mean_square(&zeta_one(), 1.5, 500.0, &[], &cfg).unwrap_err();
    assert!(err.is_budget());
}
