//! Asymptotic regimes: convergence to the limit profiles, regime lookup and
//! catalog reaction examples.

use bifront::profile::{
    classify_regime, critical_front, linear_critical, make_limit_profile, LimitProfile, LimitTag, Regime, RegimeQuery,
    SpeedTrend, Trend,
};
use bifront::reaction::{classify, ReactionCalculus, ReactionSpec, ReactionType, DEFAULT_GRID};
use bifront::reduction::{Controls, Diffusion, ModelParams};
use bifront::speed::{compute_bounds, compute_speed};
use bifront::sweep::{run_sweep, Axis, Output, SweepPlan};

fn calc(spec: ReactionSpec) -> ReactionCalculus<f64> {
    classify(&spec, DEFAULT_GRID).unwrap()
}

fn front(k: &ReactionCalculus<f64>, a: f64, b: f64) -> bifront::profile::FrontProfile<f64> {
    let d = Diffusion::born_infeld(ModelParams::new(a, b).unwrap());
    critical_front(k, &d, &Controls::default()).unwrap().2
}

fn decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}

#[test]
fn vanishing_diffusion_approaches_the_step_away_from_the_origin() {
    let k = calc(ReactionSpec::fisher(1.0));
    let step = make_limit_profile(&k, Regime::Heaviside, k.normalization(), &Controls::default()).unwrap();
    let ds: Vec<f64> = [1e-1, 1e-2, 1e-3]
        .iter()
        .map(|g: &f64| {
            let prof = front(&k, 1.0 / g, 1.0);
            (0..=400)
                .map(|i| 0.25 + 3.75 * i as f64 / 400.0)
                .flat_map(|z| [z, -z])
                .map(|z| (prof.eval(z) - step.eval(z)).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    assert!(decreasing(&ds), "{ds:?}");
}

#[test]
fn weak_saturation_approaches_the_linear_front() {
    let k = calc(ReactionSpec::fisher(1.0));
    let (cl, lin) = linear_critical(&k, &Controls::default()).unwrap();
    assert!((cl - 2.0).abs() < 1e-3);
    let ds: Vec<f64> = [1e-1, 1e-2, 1e-3]
        .iter()
        .map(|&b| {
            let prof = front(&k, 1.0, b);
            (0..=500)
                .map(|i| -10.0 + 20.0 * i as f64 / 500.0)
                .map(|z| (prof.eval(z) - lin.eval(z)).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    assert!(decreasing(&ds), "{ds:?}");
    assert!(ds[2] < 0.02, "{ds:?}");
}

#[test]
fn profiles_respect_the_gradient_bound() {
    for (spec, a, b) in [
        (ReactionSpec::fisher(1.0), 1.0, 1.0),
        (ReactionSpec::cubic_bistable(0.4), 2.0, 4.0),
        (ReactionSpec::combustion(0.3), 1.0, 3.0),
    ] {
        let k = calc(spec);
        let prof = front(&k, a, b);
        assert!(prof.max_slope() < a / b, "{}: {} vs {}", k.name, prof.max_slope(), a / b);
    }
}

#[test]
fn balanced_steady_front_has_unit_central_slope() {
    let k = calc(ReactionSpec::cubic_bistable(0.5));
    assert!(k.balanced);
    let eps: f64 = 1e-3;
    let prof = front(&k, 1.0 / eps, 1.0 / eps);
    let s = prof.slope_at_level(0.5);
    assert!((s - 1.0).abs() < 0.05, "slope {s}");
    let lim = make_limit_profile(&k, Regime::SingularPerturbation, 0.5, &Controls::default()).unwrap();
    assert!(matches!(lim, LimitProfile::SteadyBalanced { .. }));
    assert!((lim.eval(0.2) - 0.7).abs() < 1e-12);
}

#[test]
fn singular_speeds_stay_within_their_bounds() {
    let ctrl = Controls::default();
    for spec in [ReactionSpec::fisher(1.0), ReactionSpec::nagylaki(5.0)] {
        let k = calc(spec);
        for e2 in [1e-2, 1e-4, 1e-6] {
            let p = ModelParams::singular(f64::sqrt(e2)).unwrap();
            let c = compute_speed(&k, &p, &ctrl).unwrap().c_star;
            let bounds = compute_bounds(&k, &p).unwrap();
            assert!(c >= bounds.best_lower() - 1e-9 && c <= bounds.best_upper() + 1e-9, "{}: {c}", k.name);
            // the sup-norm cap is asymptotic; the KPP bound 2√(ε² f'(0)) exceeds it for large ε
            if e2 <= 1e-6 {
                assert!(c >= k.f1 - 1e-9 && c <= k.f_max + 1e-9, "{}: {c}", k.name);
            }
        }
    }
}

#[test]
fn regime_table_examples() {
    let q = |a, b| RegimeQuery { a, b, ratio: None, b2_over_a: None };
    let lin = classify_regime(&q(Trend::Bounded, Trend::ToZero)).unwrap();
    assert_eq!((lin.regime, lin.speed), (Regime::LinearLimit, SpeedTrend::ToLinearCritical));
    assert_eq!(lin.profiles, vec![LimitTag::LinearCritical]);
    let step = classify_regime(&q(Trend::ToInfinity, Trend::Bounded)).unwrap();
    assert_eq!((step.regime, step.speed), (Regime::Heaviside, SpeedTrend::ToZero));
    let sing = classify_regime(&RegimeQuery { ratio: Some(Trend::Bounded), ..q(Trend::ToInfinity, Trend::ToInfinity) })
        .unwrap();
    assert_eq!(sing.regime, Regime::SingularPerturbation);
    assert!(!sing.open);
    let open = classify_regime(&RegimeQuery {
        ratio: Some(Trend::ToZero),
        b2_over_a: Some(Trend::ToInfinity),
        ..q(Trend::ToInfinity, Trend::ToInfinity)
    })
    .unwrap();
    assert!(open.open);
}

#[test]
fn nagylaki_reference_points() {
    let k = calc(ReactionSpec::nagylaki(5.0));
    assert_eq!(k.type_label, ReactionType::A);
    assert!((k.v_plus.unwrap() - 0.865).abs() < 1e-3, "{:?}", k.v_plus);
    assert!((k.v_max - (4.0 + 31f64.sqrt()) / 15.0).abs() < 1e-7);
    assert!(k.v_plus.unwrap() > k.v_max);
}

#[test]
fn sweeps_are_deterministic() {
    let plan = SweepPlan::new(ReactionSpec::combustion(0.3), Axis::Epsilon, vec![1e-1, 1e-2, 1e-3])
        .with_outputs(vec![Output::Speeds, Output::Bounds]);
    let one = run_sweep::<f64>(&plan, &Controls::default()).unwrap().to_csv();
    let two = run_sweep::<f64>(&plan, &Controls::default()).unwrap().to_csv();
    assert_eq!(one, two);
    assert_eq!(one.lines().count(), 4);
}
