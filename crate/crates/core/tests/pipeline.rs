use levy_barrier::generator::diagnostic_suite;
use levy_barrier::simulate::simulate_ruin_probability;
use levy_barrier::{
    linspace, BarrierValueFunction, JumpSide, MixedExponential, ModelSpec, ScaleFunction,
    SimulationConfig,
};

fn m1() -> ModelSpec {
    ModelSpec::cramer_lundberg(1.5, 0.0, 1.0, 2.0, 0.1).unwrap()
}

#[test]
fn m1_end_to_end() {
    let m = m1();
    let sf = ScaleFunction::new(&m).unwrap();
    assert!((sf.rho() - 0.09772).abs() < 1e-5);
    let e = sf.expansion();
    assert_eq!(e.roots.len(), 1);
    let (p0, p1) = (e.ruin_probability(0.0).unwrap(), e.ruin_probability(1.0).unwrap());
    assert!(0.0 < p1 && p1 < p0 && p0 < 1.0);
    // two code paths for h(5)
    let direct = (1.0 - e.ruin_probability(5.0).unwrap()) * (5.0 * sf.rho()).exp();
    assert!((sf.h(5.0).unwrap() - direct).abs() <= 8.0 * f64::EPSILON * direct);

    let (opt, v) = BarrierValueFunction::optimal(sf).unwrap();
    assert!(opt.b_star > 0.0);
    assert!(v.scale().h_second(opt.b_star).unwrap().abs() < 1e-10);
    let report = diagnostic_suite(&v, &linspace(0.01, 3.0 * opt.b_star + 5.0, 200), 1e-6, 1e-9).unwrap();
    assert!(report.pass(), "{}", report.render_table());
    assert!(report.get("hjb_inequality_above_barrier").is_some());
}

#[test]
fn upward_jumps_skip_barrier_value_checks() {
    let m = ModelSpec::new(
        1.0,
        0.5,
        JumpSide::new(1.0, MixedExponential::new(&[0.3, 0.7], &[1.5, 4.0]).unwrap()).unwrap(),
        JumpSide::new(0.5, MixedExponential::exponential(3.0).unwrap()).unwrap(),
        0.1,
    )
    .unwrap();
    let (opt, v) = BarrierValueFunction::optimal(ScaleFunction::new(&m).unwrap()).unwrap();
    let report = diagnostic_suite(&v, &linspace(0.01, 3.0 * opt.b_star + 5.0, 100), 1e-6, 1e-9).unwrap();
    assert!(report.get("hjb_equality_below_barrier").is_none());
    assert!(report.get("scale_equation_relative").unwrap().pass);
    assert!(report.pass(), "{}", report.render_table());
}

#[test]
fn tilted_ruin_matches_simulated_ruin_frequency() {
    let m = m1();
    let sf = ScaleFunction::new(&m).unwrap();
    let tilted = m.esscher_tilt(sf.rho()).unwrap();
    let config = SimulationConfig::new(40_000, 200.0, 99);
    let est = simulate_ruin_probability(&tilted, 1.0, &config).unwrap();
    let exact = sf.expansion().ruin_probability(1.0).unwrap();
    assert!(est.bias_bound < 1e-6);
    assert!(
        (est.mean - exact).abs() <= 3.0 * est.std_error,
        "{} ± {} vs {exact}",
        est.mean,
        est.std_error
    );
}

#[test]
fn lundberg_failure_names_the_drift() {
    let m = ModelSpec::cramer_lundberg(0.4, 0.0, 1.0, 2.0, 0.1).unwrap();
    let err = ScaleFunction::new(&m).unwrap_err().to_string();
    assert!(err.contains("drift"), "{err}");
}
