//! Parameter studies over one-parameter families of `(a, b)`, convergence-order
//! fits and distances between computed and limit profiles.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::{critical_front, make_limit_profile, FrontProfile, LimitProfile, Regime};
use crate::reaction::{classify, ReactionCalculus, ReactionSpec, DEFAULT_GRID};
use crate::reduction::{Controls, Diffusion, ModelParams};
use crate::scalar::{lit, to_f64, Scalar};
use crate::speed::{compute_bounds, critical_speed, SpeedBounds, SpeedResult};

/// How the sweep value `p` maps to `(a, b)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Axis {
    /// `a = p` at fixed `b`
    A { b: f64 },
    /// `b = p` at fixed `a`
    B { a: f64 },
    /// `a = b = 1/ε` with `p = ε²`
    Epsilon,
    /// `a = 1/γ`, `b = 1` with `p = γ`
    Gamma,
    /// `a = p`, `b = p^power` (the open regime uses powers in `(1/2, 1)`)
    Power { power: f64 },
    /// Explicit `(a, b)` pairs; the row value is the pair index.
    Custom { pairs: Vec<(f64, f64)> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Output {
    Speeds,
    Bounds,
    Profiles,
    Distances,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPlan {
    pub reaction: ReactionSpec,
    pub axis: Axis,
    #[serde(default)]
    pub values: Vec<f64>,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<Output>,
    /// Limit compared against when distances are requested.
    #[serde(default)]
    pub limit: Option<Regime>,
    #[serde(default = "default_window")]
    pub window: (f64, f64),
}

fn default_outputs() -> Vec<Output> {
    vec![Output::Speeds, Output::Bounds]
}

fn default_window() -> (f64, f64) {
    (-1.0, 4.0)
}

impl SweepPlan {
    pub fn new(reaction: ReactionSpec, axis: Axis, values: Vec<f64>) -> Self {
        Self { reaction, axis, values, outputs: default_outputs(), limit: None, window: default_window() }
    }

    pub fn with_outputs(mut self, outputs: Vec<Output>) -> Self {
        self.outputs = outputs;
        self
    }

    pub fn with_limit(mut self, limit: Regime, window: (f64, f64)) -> Self {
        self.limit = Some(limit);
        self.window = window;
        self
    }

    fn wants(&self, o: Output) -> bool {
        self.outputs.contains(&o)
    }

    /// `(value, a, b)` per row, validating monotonicity and positivity.
    pub fn points(&self) -> Result<Vec<(f64, f64, f64)>> {
        if let Axis::Custom { pairs } = &self.axis {
            if pairs.iter().any(|&(a, b)| !(a > 0.0 && b >= 0.0 && a.is_finite() && b.is_finite())) {
                return Err(Error::InvalidParameter("custom pairs need a > 0 and b ≥ 0".into()));
            }
            return Ok(pairs.iter().enumerate().map(|(i, &(a, b))| (i as f64, a, b)).collect());
        }
        if self.values.iter().any(|&p| !(p > 0.0 && p.is_finite())) {
            return Err(Error::InvalidParameter("sweep values must be positive and finite".into()));
        }
        let up = self.values.windows(2).all(|w| w[1] > w[0]);
        let down = self.values.windows(2).all(|w| w[1] < w[0]);
        if !(up || down) {
            return Err(Error::InvalidParameter("sweep values must be strictly monotone".into()));
        }
        Ok(self
            .values
            .iter()
            .map(|&p| {
                let (a, b) = match &self.axis {
                    Axis::A { b } => (p, *b),
                    Axis::B { a } => (*a, p),
                    Axis::Epsilon => (1.0 / p.sqrt(), 1.0 / p.sqrt()),
                    Axis::Gamma => (1.0 / p, 1.0),
                    Axis::Power { power } => (p, p.powf(*power)),
                    Axis::Custom { .. } => unreachable!(),
                };
                (p, a, b)
            })
            .collect())
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct SweepRow<T: Scalar> {
    pub value: f64,
    pub a: f64,
    pub b: f64,
    pub speed: Option<SpeedResult<T>>,
    pub bounds: Option<SpeedBounds<T>>,
    pub max_slope: Option<T>,
    pub distance: Option<T>,
    pub error: Option<String>,
    #[serde(skip)]
    pub profile: Option<FrontProfile<T>>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct OrderFit {
    pub slope: f64,
    pub intercept: f64,
    /// root-mean-square residual of the log-log fit
    pub residual: f64,
    pub deviation: Option<f64>,
    pub points: usize,
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct SweepReport<T: Scalar> {
    pub plan: SweepPlan,
    pub rows: Vec<SweepRow<T>>,
    pub fitted_order: Option<OrderFit>,
    /// The plan lies in a regime without an asserted limit profile.
    pub open: bool,
}

fn solve_row<T: Scalar>(
    plan: &SweepPlan,
    calc: &ReactionCalculus<T>,
    limit: Option<&LimitProfile<T>>,
    (value, a, b): (f64, f64, f64),
    ctrl: &Controls<T>,
) -> SweepRow<T> {
    let mut row = SweepRow {
        value,
        a,
        b,
        speed: None,
        bounds: None,
        max_slope: None,
        distance: None,
        error: None,
        profile: None,
    };
    let params = match ModelParams::new(lit::<T>(a), lit::<T>(b)) {
        Ok(p) => p,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    if plan.wants(Output::Bounds) {
        match compute_bounds(calc, &params) {
            Ok(bd) => row.bounds = Some(bd),
            Err(e) => row.error = Some(e.to_string()),
        }
    }
    let diffusion = Diffusion::born_infeld(params);
    let need_profile = plan.wants(Output::Profiles) || plan.wants(Output::Distances);
    let outcome = if need_profile {
        critical_front(calc, &diffusion, ctrl).and_then(|(speed, _, prof)| {
            if plan.wants(Output::Distances) {
                let lp = limit.ok_or_else(|| Error::NoPrediction("no limit profile for this sweep".into()))?;
                let (lo, hi) = plan.window;
                row.distance = Some(distance_to_limit(&prof, lp, (lit(lo), lit(hi)))?);
            }
            row.max_slope = Some(prof.max_slope());
            if plan.wants(Output::Profiles) {
                row.profile = Some(prof);
            }
            Ok(speed)
        })
    } else if plan.wants(Output::Speeds) {
        critical_speed(calc, &diffusion, ctrl)
    } else {
        return row;
    };
    match outcome {
        Ok(s) => row.speed = Some(s),
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

/// Runs every row (in parallel); per-row failures are recorded, never fatal.
pub fn run_sweep<T: Scalar>(plan: &SweepPlan, ctrl: &Controls<T>) -> Result<SweepReport<T>> {
    let points = plan.points()?;
    let calc = classify::<T>(&plan.reaction, DEFAULT_GRID)?;
    let limit = match (plan.limit, plan.wants(Output::Distances)) {
        (Some(regime), true) => Some(make_limit_profile(&calc, regime, calc.normalization(), ctrl)?),
        _ => None,
    };
    let rows: Vec<SweepRow<T>> =
        points.par_iter().map(|&pt| solve_row(plan, &calc, limit.as_ref(), pt, ctrl)).collect();
    let open =
        plan.limit == Some(Regime::Open) || matches!(plan.axis, Axis::Power { power } if power > 0.5 && power < 1.0);
    Ok(SweepReport { plan: plan.clone(), rows, fitted_order: None, open })
}

impl<T: Scalar> SweepReport<T> {
    /// Rows as CSV with a fixed column order and full precision.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("value,a,b,c_star,best_lower,best_upper,iterations,max_slope,distance,error\n");
        let opt = |x: Option<T>| x.map(|v| format!("{:e}", to_f64(v))).unwrap_or_default();
        for r in &self.rows {
            out.push_str(&format!(
                "{:e},{:e},{:e},{},{},{},{},{},{},{}\n",
                r.value,
                r.a,
                r.b,
                opt(r.speed.as_ref().map(|s| s.c_star)),
                opt(r.bounds.as_ref().map(|b| b.best_lower())),
                opt(r.bounds.as_ref().map(|b| b.best_upper())),
                r.speed.as_ref().map(|s| s.iterations.to_string()).unwrap_or_default(),
                opt(r.max_slope),
                opt(r.distance),
                r.error.as_deref().unwrap_or("").replace([',', '\n'], ";"),
            ));
        }
        out
    }

    /// Fits and stores the convergence order.
    pub fn fit(&mut self, expected: Option<f64>) -> Result<&OrderFit> {
        self.fitted_order = Some(fit_order(self, expected)?);
        Ok(self.fitted_order.as_ref().unwrap())
    }
}

/// Least-squares slope of `ln c*` against `ln value`.
///
/// Needs at least three successful rows with positive `c*` and distinct values.
pub fn fit_order<T: Scalar>(report: &SweepReport<T>, expected: Option<f64>) -> Result<OrderFit> {
    let pts: Vec<(f64, f64)> = report
        .rows
        .iter()
        .filter_map(|r| r.speed.as_ref().map(|s| (r.value, to_f64(s.c_star))))
        .filter(|&(p, c)| p > 0.0 && c > 0.0)
        .map(|(p, c)| (p.ln(), c.ln()))
        .collect();
    fit_log_log(&pts, expected)
}

/// Unweighted least squares on already logarithmic data.
pub fn fit_log_log(pts: &[(f64, f64)], expected: Option<f64>) -> Result<OrderFit> {
    let n = pts.len();
    if n < 3 {
        return Err(Error::InsufficientData(format!("{n} usable rows, need at least 3")));
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InsufficientData("sweep values do not span a range".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / n as f64).sqrt();
    Ok(OrderFit { slope, intercept, residual, deviation: expected.map(|e| (slope - e).abs()), points: n })
}

/// Sup-distance between a computed profile and a limit profile on `window`.
pub fn distance_to_limit<T: Scalar>(profile: &FrontProfile<T>, limit: &LimitProfile<T>, window: (T, T)) -> Result<T> {
    distance_with(|z| profile.eval(z), limit, window)
}

/// As [`distance_to_limit`] for any profile evaluator.
pub fn distance_with<T: Scalar>(v: impl Fn(T) -> T, limit: &LimitProfile<T>, (lo, hi): (T, T)) -> Result<T> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::DomainMismatch(format!("window [{lo}, {hi}] is empty or unbounded")));
    }
    const N: usize = 4000;
    let mut worst = T::zero();
    for i in 0..=N {
        let z = lo + (hi - lo) * lit::<T>(i as f64) / lit::<T>(N as f64);
        let d = (v(z) - limit.eval(z)).abs();
        if !d.is_finite() {
            return Err(Error::DomainMismatch(format!("profile undefined at z = {z}")));
        }
        worst = worst.max(d);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plan_rejects_non_monotone() {
        let plan = SweepPlan::new(ReactionSpec::fisher(1.0), Axis::Gamma, vec![1.0, 0.1, 1.0]);
        assert!(plan.points().is_err());
    }

    #[test]
    fn couplings() {
        let plan = SweepPlan::new(ReactionSpec::fisher(1.0), Axis::Epsilon, vec![1e-2]);
        let (_, a, b) = plan.points().unwrap()[0];
        assert!((a - 10.0).abs() < 1e-12 && (b - 10.0).abs() < 1e-12);
        let plan = SweepPlan::new(ReactionSpec::fisher(1.0), Axis::Gamma, vec![4.0]);
        assert_eq!(plan.points().unwrap()[0], (4.0, 0.25, 1.0));
    }

    #[test]
    fn fit_exact_power_law() {
        let pts: Vec<_> = [1.0f64, 10.0, 100.0].iter().map(|&p| (p.ln(), (3.0 * p.powf(0.7)).ln())).collect();
        let fit = fit_log_log(&pts, Some(0.7)).unwrap();
        assert!((fit.slope - 0.7).abs() < 1e-12);
        assert!(fit.deviation.unwrap() < 1e-12);
        assert!(matches!(fit_log_log(&pts[..2], None), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn bounds_only_sweep() {
        let plan = SweepPlan::new(ReactionSpec::fisher(1.0), Axis::B { a: 1.0 }, vec![1.0, 2.0])
            .with_outputs(vec![Output::Bounds]);
        let rep = run_sweep::<f64>(&plan, &Controls::default()).unwrap();
        assert!(rep.rows.iter().all(|r| r.speed.is_none() && r.bounds.is_some()));
    }

    #[test]
    fn empty_window_is_domain_mismatch() {
        let lp = LimitProfile::Constant { v0: 0.5 };
        assert!(matches!(distance_with(|_| 0.5, &lp, (1.0, 1.0)), Err(Error::DomainMismatch(_))));
    }
}
