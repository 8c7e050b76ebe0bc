//! Analytic speed bounds and the critical speed by bracketed bisection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::Regime;
use crate::reaction::{Ratio, ReactionCalculus, ReactionType};
use crate::reduction::{backward_run, matching_gap, Controls, Diffusion, Dynamics, ModelParams, StopRule};
use crate::roots::grid;
use crate::scalar::{lit, to_f64, tol, Scalar};

/// Certification grid size for the M-bounds.
const M_GRID: usize = 10_000;

/// Every bound that applies to the given reaction and parameters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SpeedBounds<T: Scalar> {
    pub lower_stimaa: Option<T>,
    pub upper_stimaa: Option<T>,
    pub lower_stimac: Option<T>,
    pub upper_stimac: Option<T>,
    /// `(b/a) sup F(v)/v`
    pub lower_universal: Option<T>,
    /// `2 √(f'(0)/a)`
    pub lower_kpp: Option<T>,
    /// `2 √(M/a)` with the least certified `M`
    pub upper_thm22: Option<T>,
    /// Only for `a = b = 1`, and only when the implied `M` certifies the control.
    pub upper_stima1: Option<T>,
}

impl<T: Scalar> SpeedBounds<T> {
    pub fn lowers(&self) -> Vec<(&'static str, T)> {
        [
            ("lower_stimaa", self.lower_stimaa),
            ("lower_stimac", self.lower_stimac),
            ("lower_universal", self.lower_universal),
            ("lower_kpp", self.lower_kpp),
        ]
        .into_iter()
        .filter_map(|(n, v)| v.map(|v| (n, v)))
        .collect()
    }

    pub fn uppers(&self) -> Vec<(&'static str, T)> {
        [
            ("upper_stimaa", self.upper_stimaa),
            ("upper_stimac", self.upper_stimac),
            ("upper_thm22", self.upper_thm22),
            ("upper_stima1", self.upper_stima1),
        ]
        .into_iter()
        .filter_map(|(n, v)| v.map(|v| (n, v)))
        .collect()
    }

    /// Largest lower bound (0 when none applies).
    pub fn best_lower(&self) -> T {
        self.lowers().into_iter().fold(T::zero(), |m, (_, v)| m.max(v))
    }

    /// Smallest upper bound (`+∞` when none applies).
    pub fn best_upper(&self) -> T {
        self.uppers().into_iter().fold(T::infinity(), |m, (_, v)| m.min(v))
    }

    /// All bounds as `(name, value)`, lowers first.
    pub fn named(&self) -> Vec<(&'static str, Option<T>)> {
        vec![
            ("lower_stimaa", self.lower_stimaa),
            ("upper_stimaa", self.upper_stimaa),
            ("lower_stimac", self.lower_stimac),
            ("upper_stimac", self.upper_stimac),
            ("lower_universal", self.lower_universal),
            ("lower_kpp", self.lower_kpp),
            ("upper_thm22", self.upper_thm22),
            ("upper_stima1", self.upper_stima1),
        ]
    }
}

/// Critical speed together with its bracketing history and diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SpeedResult<T: Scalar> {
    pub c_star: T,
    pub bracket_history: Vec<(T, T)>,
    /// `|y⁺(α) − y⁻(α)|` for types B and C; for type A the smallest `y` of the admissible
    /// backward solution on `[v_floor, 1 − δ]`.
    pub matching_residual: T,
    pub iterations: usize,
    pub bounds: SpeedBounds<T>,
    /// Type A: the lower bound itself was admissible.
    pub attained_lower_bound: bool,
}

impl<T: Scalar> SpeedResult<T> {
    pub fn final_bracket(&self) -> (T, T) {
        self.bracket_history.last().copied().unwrap_or((self.c_star, self.c_star))
    }
}

fn r_coeffs<T: Scalar>(a: T, b: T, y: T) -> T {
    (y * (lit::<T>(2.0) * a + b * b * y)).sqrt() / (a + b * b * y)
}

/// `max_s [f(s) − M s / √(1 + (M/a) b² s²)]` on the certification grid.
fn m_excess<T: Scalar>(calc: &ReactionCalculus<T>, a: T, b: T, m: T) -> T {
    grid(T::zero(), T::one(), M_GRID)
        .into_iter()
        .map(|s| calc.f(s) - m * s / (T::one() + m / a * b * b * s * s).sqrt())
        .fold(T::neg_infinity(), T::max)
}

fn certifies<T: Scalar>(calc: &ReactionCalculus<T>, a: T, b: T, m: T) -> bool {
    m_excess(calc, a, b, m) <= tol::<T>(1e-14) * calc.f_max.max(T::one())
}

/// Least `M` (to 1e-8 relative) with `f(s) ≤ M s / √(1 + (M/a) b² s²)` on `[0, 1]`.
pub fn minimal_m<T: Scalar>(calc: &ReactionCalculus<T>, a: T, b: T) -> Result<T> {
    let (sup_fv, _) = calc.sup_ratio(Ratio::SmallFOverV)?;
    let mut lo = sup_fv.max(T::min_positive_value());
    if certifies(calc, a, b, lo) {
        return Ok(lo);
    }
    let mut hi = lo * lit(2.0);
    let mut n = 0;
    while !certifies(calc, a, b, hi) {
        lo = hi;
        hi = hi * lit(2.0);
        n += 1;
        if n > 200 {
            return Err(Error::Unbounded);
        }
    }
    let rel: T = tol(1e-8);
    while hi - lo > rel * hi {
        let mid = (lo + hi) * lit(0.5);
        if certifies(calc, a, b, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

pub(crate) fn bounds_for<T: Scalar>(calc: &ReactionCalculus<T>, a: T, b: T) -> Result<SpeedBounds<T>> {
    let two: T = lit(2.0);
    let (sup_fv, _) = calc.sup_ratio(Ratio::BigFOverV)?;
    let mut out = SpeedBounds { lower_universal: Some(b / a * sup_fv), ..Default::default() };
    match calc.type_label {
        ReactionType::A => {
            let (lo, _) = calc.sup_ratio(Ratio::StimaaLower { a, b })?;
            let (up, _) = calc.sup_ratio(Ratio::StimaaUpper { a, b })?;
            out.lower_stimaa = Some(lo.max(T::zero()).sqrt());
            out.upper_stimaa = Some(up);
            if let Some(d) = calc.fprime0 {
                out.lower_kpp = Some(two * (d.max(T::zero()) / a).sqrt());
            }
            let m = minimal_m(calc, a, b)?;
            out.upper_thm22 = Some(two * (m / a).sqrt());
            if a == T::one() && b == T::one() && calc.v_max > T::zero() {
                let (fm, v0) = (calc.f_max, calc.v_max);
                let m1 = fm * (fm * v0 + (lit::<T>(4.0) + fm * fm * v0 * v0).sqrt()) / (two * v0);
                if certifies(calc, a, b, m1) {
                    out.upper_stima1 = Some(two * m1.sqrt());
                }
            }
        }
        ReactionType::B | ReactionType::C => {
            let alpha = calc.alpha.expect("types B and C carry alpha");
            let y = calc.f1 - calc.big_f(alpha);
            out.lower_stimac = Some(sup_fv / a / r_coeffs(a, b, y));
            out.upper_stimac = Some(((b / a) * (b / a) * y * y + two / a * y).sqrt() / alpha);
        }
    }
    Ok(out)
}

/// Bounds of the critical speed for Born-Infeld diffusion with parameters `params`.
pub fn compute_bounds<T: Scalar>(calc: &ReactionCalculus<T>, params: &ModelParams<T>) -> Result<SpeedBounds<T>> {
    bounds_for(calc, params.a(), params.b())
}

/// Type A admissibility of speed `c`, with the positivity margin of admissible runs.
fn type_a_check<T: Scalar>(
    calc: &ReactionCalculus<T>,
    diffusion: &Diffusion<T>,
    c: T,
    ctrl: &Controls<T>,
) -> Result<(bool, T)> {
    let dyn_ = Dynamics::new(calc, diffusion, c);
    let x_plus = match dyn_.origin_roots() {
        Some((_, xp)) => xp,
        None => return Ok((false, T::zero())),
    };
    let (run, _) = backward_run(calc, diffusion, c, ctrl.v_end, StopRule::TypeA { x_plus }, ctrl)?;
    let ok = run.admissible == Some(true);
    let margin = run.samples.iter().filter(|s| s.v >= ctrl.v_floor).map(|s| s.y).fold(T::infinity(), T::min);
    Ok((ok, if margin.is_finite() { margin } else { T::zero() }))
}

/// Critical speed for an arbitrary diffusion operator.
pub fn critical_speed<T: Scalar>(
    calc: &ReactionCalculus<T>,
    diffusion: &Diffusion<T>,
    ctrl: &Controls<T>,
) -> Result<SpeedResult<T>> {
    let (a, b) = diffusion.coeffs();
    let bounds = bounds_for(calc, a, b)?;
    match calc.type_label {
        ReactionType::A => speed_type_a(calc, diffusion, bounds, ctrl),
        _ => speed_matching(calc, diffusion, bounds, ctrl),
    }
}

fn speed_type_a<T: Scalar>(
    calc: &ReactionCalculus<T>,
    diffusion: &Diffusion<T>,
    bounds: SpeedBounds<T>,
    ctrl: &Controls<T>,
) -> Result<SpeedResult<T>> {
    let lower = bounds.best_lower();
    let mut upper = bounds.best_upper().max(lower);
    let mut history = vec![(lower, upper)];
    let (ok_lower, margin_lower) = type_a_check(calc, diffusion, lower, ctrl)?;
    if ok_lower {
        return Ok(SpeedResult {
            c_star: lower,
            bracket_history: vec![(lower, lower)],
            matching_residual: margin_lower,
            iterations: 1,
            bounds,
            attained_lower_bound: true,
        });
    }
    let mut lo = lower;
    let mut iterations = 1;
    let mut expansions = 0;
    let mut margin;
    loop {
        let (ok, m) = type_a_check(calc, diffusion, upper, ctrl)?;
        iterations += 1;
        if ok {
            margin = m;
            break;
        }
        expansions += 1;
        if expansions > ctrl.max_expansions {
            return Err(Error::BracketFailure {
                low: to_f64(lo),
                high: to_f64(upper),
                expansions: ctrl.max_expansions,
            });
        }
        lo = upper;
        upper = upper * lit(2.0) + T::min_positive_value();
        history.push((lo, upper));
    }
    let mut hi = upper;
    while hi - lo > ctrl.ctol {
        let mid = (lo + hi) * lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        let (ok, m) = type_a_check(calc, diffusion, mid, ctrl)?;
        iterations += 1;
        if ok {
            hi = mid;
            margin = m;
        } else {
            lo = mid;
        }
        history.push((lo, hi));
    }
    Ok(SpeedResult {
        c_star: hi,
        bracket_history: history,
        matching_residual: margin,
        iterations,
        bounds,
        attained_lower_bound: false,
    })
}

fn speed_matching<T: Scalar>(
    calc: &ReactionCalculus<T>,
    diffusion: &Diffusion<T>,
    bounds: SpeedBounds<T>,
    ctrl: &Controls<T>,
) -> Result<SpeedResult<T>> {
    if calc.balanced {
        let residual = if calc.type_label == ReactionType::C {
            matching_gap(calc, diffusion, T::zero(), ctrl)?.1.abs()
        } else {
            T::zero()
        };
        return Ok(SpeedResult {
            c_star: T::zero(),
            bracket_history: vec![(T::zero(), T::zero())],
            matching_residual: residual,
            iterations: 1,
            bounds,
            attained_lower_bound: false,
        });
    }
    let gap = |c: T| -> Result<(T, T)> {
        if c <= T::zero() && calc.type_label == ReactionType::B {
            return Ok((-T::one(), -T::one()));
        }
        matching_gap(calc, diffusion, c, ctrl)
    };
    let mut lo = bounds.best_lower();
    let mut hi = bounds.best_upper().max(lo);
    let mut history = vec![(lo, hi)];
    let mut iterations = 0;
    let mut expansions = 0;
    // the lower end must give a nonpositive gap
    loop {
        iterations += 1;
        if gap(lo)?.0 <= T::zero() {
            break;
        }
        expansions += 1;
        if expansions > ctrl.max_expansions || lo <= T::zero() {
            return Err(Error::BracketFailure { low: to_f64(lo), high: to_f64(hi), expansions });
        }
        hi = lo;
        lo = if lo < ctrl.ctol { T::zero() } else { lo * lit(0.5) };
        history.push((lo, hi));
    }
    expansions = 0;
    loop {
        iterations += 1;
        if gap(hi)?.0 >= T::zero() {
            break;
        }
        expansions += 1;
        if expansions > ctrl.max_expansions {
            return Err(Error::BracketFailure { low: to_f64(lo), high: to_f64(hi), expansions: ctrl.max_expansions });
        }
        lo = hi;
        hi = hi * lit(2.0) + ctrl.ctol;
        history.push((lo, hi));
    }
    let mut residual = T::infinity();
    let mut c_mid = (lo + hi) * lit(0.5);
    for _ in 0..200 {
        c_mid = (lo + hi) * lit(0.5);
        if c_mid <= lo || c_mid >= hi {
            break;
        }
        let (g, dy) = gap(c_mid)?;
        iterations += 1;
        residual = dy.abs();
        if g > T::zero() {
            hi = c_mid;
        } else {
            lo = c_mid;
        }
        history.push((lo, hi));
        if hi - lo < ctrl.ctol && residual < ctrl.rtol_match {
            break;
        }
    }
    Ok(SpeedResult {
        c_star: c_mid,
        bracket_history: history,
        matching_residual: residual,
        iterations,
        bounds,
        attained_lower_bound: false,
    })
}

/// Critical speed for Born-Infeld diffusion with parameters `params`.
pub fn compute_speed<T: Scalar>(
    calc: &ReactionCalculus<T>,
    params: &ModelParams<T>,
    ctrl: &Controls<T>,
) -> Result<SpeedResult<T>> {
    critical_speed(calc, &Diffusion::born_infeld(*params), ctrl)
}

/// Predicted limit of the critical speed in a corner regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "", tag = "kind", rename_all = "kebab-case")]
pub enum Prediction<T: Scalar> {
    Value {
        value: T,
    },
    /// `c* → 0` with `c* = O(param^order)`.
    ToZero {
        order: Option<T>,
    },
    /// `c* → ∞` with `c* = O(param^(-order))`.
    ToInfinity {
        order: Option<T>,
    },
}

/// Predicted limit speed in `regime`.
pub fn limit_speed_prediction<T: Scalar>(
    calc: &ReactionCalculus<T>,
    regime: &Regime,
    ctrl: &Controls<T>,
) -> Result<Prediction<T>> {
    match regime {
        // speeds at general `a` follow by the scaling `c_L(a) = c_L(1)/√a`
        Regime::LinearLimit => {
            if calc.kpp {
                let d = calc.fprime0.unwrap_or_else(T::zero);
                return Ok(Prediction::Value { value: lit::<T>(2.0) * d.sqrt() });
            }
            let (cl, _) = crate::profile::linear_critical(calc, ctrl)?;
            Ok(Prediction::Value { value: cl })
        }
        Regime::ConstantLimit => Ok(Prediction::ToInfinity { order: Some(T::one()) }),
        Regime::Heaviside => Ok(Prediction::ToZero { order: Some(lit(0.5)) }),
        Regime::SingularPerturbation => singular_limit(calc).map(|value| Prediction::Value { value }),
        Regime::Interior => Err(Error::NoPrediction("fixed parameters have no limit".into())),
        Regime::Open => Err(Error::NoPrediction("limit profile unresolved in this regime".into())),
        Regime::Unlisted => Err(Error::NoPrediction("regime not covered by the table".into())),
    }
}

/// Limit `c̄` of the critical speed for `a = b = 1/ε`, `ε → 0`.
pub fn singular_limit<T: Scalar>(calc: &ReactionCalculus<T>) -> Result<T> {
    if calc.balanced {
        return Ok(T::zero());
    }
    match calc.type_label {
        ReactionType::C => Err(Error::NoPrediction(
            "non-balanced type C singular perturbation: both limit behaviors are possible".into(),
        )),
        ReactionType::A if !calc.assumption_f => {
            Err(Error::NoPrediction("type A without a unique local maximum".into()))
        }
        _ => match calc.v_plus {
            Some(vp) => Ok(calc.f(vp)),
            // fully piecewise linear limit profile
            None => Ok(calc.f1),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reaction::{classify, ReactionSpec, DEFAULT_GRID};
    use approx::assert_abs_diff_eq;

    fn calc(spec: ReactionSpec) -> ReactionCalculus<f64> {
        classify(&spec, DEFAULT_GRID).unwrap()
    }

    #[test]
    fn fisher_bounds_unit_params() {
        let c = calc(ReactionSpec::fisher(1.0));
        let b = compute_bounds(&c, &ModelParams::new(1.0, 1.0).unwrap()).unwrap();
        assert_abs_diff_eq!(b.lower_kpp.unwrap(), 2.0);
        assert_abs_diff_eq!(b.lower_universal.unwrap(), 0.1875, epsilon = 1e-12);
        assert_abs_diff_eq!(b.upper_thm22.unwrap(), 2.0, epsilon = 1e-7);
        assert!(b.best_lower() <= b.best_upper() + 1e-9);
    }

    #[test]
    fn huxley_upper_is_finite() {
        let c = calc(ReactionSpec::huxley(40.0));
        let b = compute_bounds(&c, &ModelParams::new(1.0, 1.0).unwrap()).unwrap();
        let up = b.upper_stimaa.unwrap();
        assert!(up.is_finite() && up >= b.lower_stimaa.unwrap());
    }

    #[test]
    fn stimac_upper_linear_in_b() {
        let c = calc(ReactionSpec::cubic_bistable(0.4));
        let u = |b: f64| compute_bounds(&c, &ModelParams::new(1.0, b).unwrap()).unwrap().upper_stimac.unwrap();
        let r1 = u(200.0) / u(100.0);
        assert!((r1 - 2.0).abs() < 0.01, "{r1}");
    }

    #[test]
    fn balanced_is_zero() {
        let c = calc(ReactionSpec::cubic_bistable(0.5));
        let r = compute_speed(&c, &ModelParams::new(1.0, 1.0).unwrap(), &Controls::default()).unwrap();
        assert_eq!(r.c_star, 0.0);
    }

    #[test]
    fn singular_limits() {
        assert_abs_diff_eq!(singular_limit(&calc(ReactionSpec::fisher(1.0))).unwrap(), 0.1875, epsilon = 1e-10);
        assert!(singular_limit(&calc(ReactionSpec::cubic_bistable(0.4))).is_err());
    }
}
