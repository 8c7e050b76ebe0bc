//! Cross-module invariant suite in double precision.
//!
//! Every check records the worst observed value next to its threshold so that a
//! failure report says by how much it missed.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::ode::{integrate, Flow, OdeOptions};
use crate::profile::{critical_front, FrontProfile};
use crate::reaction::{classify, ReactionCalculus, ReactionSpec, DEFAULT_GRID};
use crate::reduction::{e_inverse, e_transform, r_function, y_max_closed_form, Controls, Diffusion, ModelParams};
use crate::speed::{compute_bounds, SpeedResult};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// worst observed value of the checked quantity
    pub worst: f64,
    pub threshold: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Reactions of the suite: one of each shape, bistable deliberately unbalanced.
pub fn suite_reactions() -> Vec<ReactionSpec> {
    vec![
        ReactionSpec::fisher(1.0),
        ReactionSpec::huxley(40.0),
        ReactionSpec::nagylaki(5.0),
        ReactionSpec::cubic_bistable(0.4),
        ReactionSpec::combustion(0.3),
    ]
}

pub const SUITE_A: [f64; 3] = [0.5, 1.0, 4.0];
pub const SUITE_B: [f64; 3] = [0.25, 1.0, 4.0];

/// Profile grid used for residual checks; the five-point stencil needs it near slope saturation.
pub const RESIDUAL_PROFILE_POINTS: usize = 8192;
pub const RESIDUAL_THRESHOLD: f64 = 1e-4;

fn check(name: impl Into<String>, worst: f64, threshold: f64, passed: bool, detail: impl Into<String>) -> Check {
    Check { name: name.into(), passed, worst, threshold, detail: detail.into() }
}

struct Cell {
    a: f64,
    b: f64,
    outcome: Result<(SpeedResult<f64>, FrontProfile<f64>)>,
}

fn solve_grid(calc: &ReactionCalculus<f64>, ctrl: &Controls<f64>) -> Vec<Cell> {
    let pairs: Vec<(f64, f64)> = SUITE_A.iter().flat_map(|&a| SUITE_B.iter().map(move |&b| (a, b))).collect();
    pairs
        .into_par_iter()
        .map(|(a, b)| {
            let outcome = ModelParams::new(a, b)
                .and_then(|p| critical_front(calc, &Diffusion::born_infeld(p), ctrl))
                .map(|(s, _, prof)| (s, prof));
            Cell { a, b, outcome }
        })
        .collect()
}

/// Max interior residual of the profile ODE (same stencil as the profile module).
fn max_residual(profile: &FrontProfile<f64>, calc: &ReactionCalculus<f64>) -> f64 {
    crate::profile::profile_residual(profile, calc, 200).into_iter().map(|(_, r)| r).fold(0.0, f64::max)
}

fn reaction_checks(spec: &ReactionSpec, ctrl: &Controls<f64>) -> Vec<Check> {
    let name = &spec.name;
    let calc = match classify::<f64>(spec, DEFAULT_GRID) {
        Ok(c) => c,
        Err(e) => return vec![check(format!("{name}: classify"), f64::NAN, 0.0, false, e.to_string())],
    };
    let cells = solve_grid(&calc, ctrl);
    let mut out = Vec::new();

    let (mut sandwich_worst, mut slope_worst, mut residual_worst) = (f64::NEG_INFINITY, f64::NEG_INFINITY, 0.0f64);
    let mut errors = Vec::new();
    for cell in &cells {
        match &cell.outcome {
            Ok((speed, prof)) => {
                let bounds = compute_bounds(&calc, &ModelParams::new(cell.a, cell.b).unwrap()).unwrap_or_default();
                let c = speed.c_star;
                sandwich_worst = sandwich_worst.max(bounds.best_lower() - c).max(c - bounds.best_upper());
                slope_worst = slope_worst.max(prof.max_slope() / (cell.a / cell.b));
                residual_worst = residual_worst.max(max_residual(prof, &calc));
            }
            Err(e) => errors.push(format!("(a={}, b={}): {e}", cell.a, cell.b)),
        }
    }
    let err_detail = if errors.is_empty() { String::new() } else { errors.join("; ") };
    out.push(check(
        format!("{name}: bounds sandwich c*"),
        sandwich_worst,
        ctrl.ctol,
        errors.is_empty() && sandwich_worst <= ctrl.ctol,
        format!("max violation over 9 (a,b) pairs {err_detail}"),
    ));
    out.push(check(
        format!("{name}: gradient bound v' < a/b"),
        slope_worst,
        1.0,
        errors.is_empty() && slope_worst < 1.0,
        "max of v'·b/a over all profiles",
    ));
    out.push(check(
        format!("{name}: profile ODE residual"),
        residual_worst,
        RESIDUAL_THRESHOLD,
        errors.is_empty() && residual_worst < RESIDUAL_THRESHOLD,
        "max interior residual over all profiles",
    ));

    // c* non-increasing in a, non-decreasing in b
    let speed = |i: usize, j: usize| cells[i * SUITE_B.len() + j].outcome.as_ref().ok().map(|(s, _)| s.c_star);
    let mut mono_worst = f64::NEG_INFINITY;
    let mut complete = true;
    for i in 0..SUITE_A.len() {
        for j in 0..SUITE_B.len() {
            let Some(c) = speed(i, j) else {
                complete = false;
                continue;
            };
            if i + 1 < SUITE_A.len() {
                if let Some(next) = speed(i + 1, j) {
                    mono_worst = mono_worst.max(next - c);
                }
            }
            if j + 1 < SUITE_B.len() {
                if let Some(next) = speed(i, j + 1) {
                    mono_worst = mono_worst.max(c - next);
                }
            }
        }
    }
    out.push(check(
        format!("{name}: monotone in a and b"),
        mono_worst,
        ctrl.ctol,
        complete && mono_worst <= ctrl.ctol,
        "largest step against the expected direction on the 3×3 grid",
    ));
    out
}

/// `y = (a/b²)(√(1 + c²b²v²) − 1)` against a numerical solve of `y' = c a R(y)`.
fn closed_form_check() -> Check {
    let mut worst = 0.0f64;
    for &(a, b, c) in &[(1.0, 1.0, 0.5), (1.0, 10.0, 0.2), (10.0, 10.0, 0.1), (0.5, 2.0, 1.5)] {
        let params = ModelParams::new(a, b).unwrap();
        let (v0, v1) = (1e-3, 0.3);
        let y0 = y_max_closed_form(&params, c, v0);
        let opts = OdeOptions { rtol: 1e-12, atol: 1e-16, h_min: 1e-14, h_max: 1e-2, max_steps: 1_000_000 };
        let res = integrate(
            |_v: f64, y: &[f64; 1]| [c * a * r_function(&params, y[0].max(0.0)).unwrap_or(0.0)],
            v0,
            [y0],
            v1,
            &opts,
            |_, _| Flow::Continue,
        );
        worst = worst.max(match res {
            Ok(end) => (end.y[0] - y_max_closed_form(&params, c, v1)).abs(),
            Err(_) => f64::INFINITY,
        });
    }
    check("type B closed form vs numerical forward solve", worst, 1e-8, worst < 1e-8, "|y_num(α) − y_closed(α)|")
}

fn round_trip_check() -> Check {
    let mut worst = 0.0f64;
    for &(a, b) in &[(1.0, 1.0), (1e-3, 1.0), (1e3, 1e3), (1.0, 1e-3), (10.0, 1e3)] {
        let params = ModelParams::new(a, b).unwrap();
        for k in -24..=12 {
            let y = 10f64.powf(k as f64 / 2.0);
            let back = e_inverse(&params, e_transform(&params, y).unwrap()).unwrap();
            worst = worst.max((back - y).abs() / y.max(1.0));
        }
    }
    check("E-transform round trip", worst, 1e-12, worst < 1e-12, "relative error for y ∈ [1e-12, 1e6]")
}

/// Balanced cubic: `c* = 0`, and `z(v) = ∫_{1/2}^v ds / v'(s)` with `y = −F(s)` reproduces the profile.
fn balanced_checks(ctrl: &Controls<f64>) -> Vec<Check> {
    let calc = classify::<f64>(&ReactionSpec::cubic_bistable(0.5), DEFAULT_GRID).unwrap();
    let mut speed_worst = 0.0f64;
    let mut profile_worst = 0.0f64;
    let mut detail = String::new();
    for &(a, b) in &[(1.0, 1.0), (100.0, 100.0), (1000.0, 1000.0), (1.0, 5.0)] {
        let params = ModelParams::new(a, b).unwrap();
        let diffusion = Diffusion::born_infeld(params);
        let (speed, _, prof) = match critical_front(&calc, &diffusion, ctrl) {
            Ok(x) => x,
            Err(e) => {
                detail.push_str(&format!("(a={a}, b={b}): {e}; "));
                speed_worst = f64::INFINITY;
                continue;
            }
        };
        speed_worst = speed_worst.max(speed.c_star.abs());
        let slope = |s: f64| diffusion.slope_of_e(diffusion.e_of_y((-calc.big_f(s)).max(0.0)));
        let opts = OdeOptions { rtol: 1e-12, atol: 1e-14, h_min: 1e-14, h_max: 1e-3, max_steps: 1_000_000 };
        for target in [0.01, 0.99] {
            let _ = integrate(
                |s: f64, _z: &[f64; 1]| [1.0 / slope(s)],
                0.5,
                [0.0],
                target,
                &opts,
                |s, z| {
                    profile_worst = profile_worst.max((prof.eval(z[0]) - s).abs());
                    Flow::Continue
                },
            )
            .map_err(|_| profile_worst = f64::INFINITY);
        }
    }
    vec![
        check("balanced cubic c* = 0", speed_worst, 0.0, speed_worst == 0.0, detail),
        check(
            "balanced cubic profile vs explicit quadrature",
            profile_worst,
            1e-4,
            profile_worst < 1e-4,
            "sup |v(z(s)) − s| for s ∈ [0.01, 0.99]",
        ),
    ]
}

/// Runs every check.
pub fn run_validation(ctrl: &Controls<f64>) -> ValidationReport {
    let dense = Controls { profile_points: RESIDUAL_PROFILE_POINTS, ..*ctrl };
    let mut checks: Vec<Check> =
        suite_reactions().par_iter().map(|spec| reaction_checks(spec, &dense)).flatten().collect();
    checks.push(closed_form_check());
    checks.push(round_trip_check());
    checks.extend(balanced_checks(&dense));
    ValidationReport { checks }
}
