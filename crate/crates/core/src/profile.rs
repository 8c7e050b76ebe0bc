//! Front profiles reconstructed from reduction solutions, closed-form limit
//! profiles, and the regime table of the `(a, b)` plane.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::Hermite;
use crate::ode::{integrate, Flow, OdeOptions};
use crate::reaction::{ReactionCalculus, ReactionType};
use crate::reduction::{integrate_backward, matched_solution, Controls, Diffusion, ReductionSolution};
use crate::scalar::{lit, to_f64, Scalar};
use crate::speed::{critical_speed, SpeedResult};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ProfileSample<T: Scalar> {
    pub z: T,
    pub v: T,
    pub dv: T,
}

/// Sampled monotone front `v(z)` on a uniform `z` grid, truncated at
/// `v ∈ [δ0, 1 − δ1]` and extended by exponential tails beyond.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontProfile<T: Scalar> {
    pub c: T,
    pub diffusion: Diffusion<T>,
    pub v0: T,
    pub samples: Vec<ProfileSample<T>>,
    pub truncation: (T, T),
    /// `v ≈ C e^{λ₀ z}` as `z → −∞`.
    pub tail_exponent_zero: T,
    /// `1 − v ≈ C e^{−λ₁ z}` as `z → +∞`.
    pub tail_exponent_one: T,
    interp: Hermite<T>,
}

impl<T: Scalar> FrontProfile<T> {
    /// `z` range covered by the samples.
    pub fn z_range(&self) -> (T, T) {
        self.interp.domain()
    }

    /// Profile value anywhere on the line (tails are exponential).
    pub fn eval(&self, z: T) -> T {
        let (lo, hi) = self.z_range();
        if z < lo {
            let first = self.samples[0];
            return first.v * (self.tail_exponent_zero * (z - lo)).exp();
        }
        if z > hi {
            let last = self.samples[self.samples.len() - 1];
            return T::one() - (T::one() - last.v) * (-self.tail_exponent_one * (z - hi)).exp();
        }
        self.interp.eval(z)
    }

    pub fn max_slope(&self) -> T {
        self.samples.iter().fold(T::zero(), |m, s| m.max(s.dv))
    }

    /// Slope at the sample closest to `v = level`.
    pub fn slope_at_level(&self, level: T) -> T {
        self.samples
            .iter()
            .min_by(|p, q| (p.v - level).abs().partial_cmp(&(q.v - level).abs()).unwrap())
            .map(|s| s.dv)
            .unwrap_or_else(T::zero)
    }
}

/// Builds `v(z)` from an admissible reduction, with `v(0) = v0`.
pub fn reconstruct_profile<T: Scalar>(
    reduction: &ReductionSolution<T>,
    v0: T,
    ctrl: &Controls<T>,
) -> Result<FrontProfile<T>> {
    if let Some(v) = reduction.hit_zero_at {
        return Err(Error::NotAdmissible(to_f64(v)));
    }
    let d = reduction.diffusion;
    let raw: Vec<_> = reduction
        .samples
        .iter()
        .filter(|s| s.z.is_finite() && s.v > T::zero() && s.v < T::one() && s.e > T::zero())
        .copied()
        .collect();
    if raw.len() < 4 {
        return Err(Error::QuadratureFailure("too few interior samples".into()));
    }
    let (v_lo_raw, v_hi_raw) = (raw[0].v, raw[raw.len() - 1].v);
    let v_lo = ctrl.delta0.max(v_lo_raw);
    let v_hi = (T::one() - ctrl.delta1).min(v_hi_raw);
    if !(v0 > v_lo && v0 < v_hi) {
        return Err(Error::QuadratureFailure(format!("normalization level {v0} outside sampled range")));
    }
    // z as a function of v, dz/dv = 1/v'
    let z_of_v = Hermite::with_slopes(
        raw.iter().map(|s| s.v).collect(),
        raw.iter().map(|s| s.z).collect(),
        raw.iter().map(|s| d.slope_of_e(s.e).recip()).collect(),
    )
    .ok_or_else(|| Error::QuadratureFailure("samples not strictly increasing".into()))?;
    let z_shift = z_of_v.eval(v0);
    let mut zs: Vec<T> = raw.iter().map(|s| s.z - z_shift).collect();
    for w in 1..zs.len() {
        if !(zs[w] > zs[w - 1]) {
            return Err(Error::QuadratureFailure("profile coordinate is not increasing".into()));
        }
    }
    let v_of_z = Hermite::with_slopes(
        zs.clone(),
        raw.iter().map(|s| s.v).collect(),
        raw.iter().map(|s| d.slope_of_e(s.e)).collect(),
    )
    .ok_or_else(|| Error::QuadratureFailure("profile inversion failed".into()))?;
    let z_lo = z_of_v.eval(v_lo) - z_shift;
    let z_hi = z_of_v.eval(v_hi) - z_shift;
    zs.clear();
    let n = ctrl.profile_points.max(8);
    let mut samples = Vec::with_capacity(n);
    for i in 0..n {
        let z = z_lo + (z_hi - z_lo) * lit::<T>(i as f64) / lit::<T>((n - 1) as f64);
        let v = v_of_z.eval(z).max(T::min_positive_value()).min(T::one());
        samples.push(ProfileSample { z, v, dv: reduction.slope_at(v) });
    }
    let first = samples[0];
    let last = samples[n - 1];
    let interp = Hermite::with_slopes(
        samples.iter().map(|s| s.z).collect(),
        samples.iter().map(|s| s.v).collect(),
        samples.iter().map(|s| s.dv).collect(),
    )
    .ok_or_else(|| Error::QuadratureFailure("degenerate profile grid".into()))?;
    Ok(FrontProfile {
        c: reduction.c,
        diffusion: d,
        v0,
        tail_exponent_zero: first.dv / first.v,
        tail_exponent_one: last.dv / (T::one() - last.v),
        samples,
        truncation: (ctrl.delta0, ctrl.delta1),
        interp,
    })
}

/// Reduction solution at speed `c` joining 0 and 1 (backward for type A, matched otherwise).
pub fn reduction_at_speed<T: Scalar>(
    calc: &ReactionCalculus<T>,
    diffusion: &Diffusion<T>,
    c: T,
    ctrl: &Controls<T>,
) -> Result<ReductionSolution<T>> {
    match calc.type_label {
        ReactionType::A => integrate_backward(calc, diffusion, c, ctrl),
        _ => Ok(matched_solution(calc, diffusion, c, ctrl)?.0),
    }
}

/// Critical speed, reduction and profile in one pass.
pub fn critical_front<T: Scalar>(
    calc: &ReactionCalculus<T>,
    diffusion: &Diffusion<T>,
    ctrl: &Controls<T>,
) -> Result<(SpeedResult<T>, ReductionSolution<T>, FrontProfile<T>)> {
    let speed = critical_speed(calc, diffusion, ctrl)?;
    let red = reduction_at_speed(calc, diffusion, speed.c_star, ctrl)?;
    let prof = reconstruct_profile(&red, calc.normalization(), ctrl)?;
    Ok((speed, red, prof))
}

/// Critical speed and profile for linear diffusion `v'' − c v' + f(v) = 0`.
pub fn linear_critical<T: Scalar>(calc: &ReactionCalculus<T>, ctrl: &Controls<T>) -> Result<(T, FrontProfile<T>)> {
    let (speed, _, prof) = critical_front(calc, &Diffusion::Linear, ctrl)?;
    if calc.kpp {
        let expected = lit::<T>(2.0) * calc.fprime0.unwrap_or_else(T::zero).sqrt();
        if (speed.c_star - expected).abs() >= lit(1e-3) {
            return Err(Error::Inconsistent(format!(
                "linear critical speed {} differs from 2√f'(0) = {}",
                speed.c_star, expected
            )));
        }
    }
    Ok((speed.c_star, prof))
}

/// Interior second-order residual `|(φ(v'))' − c v' + f(v)|` at up to `points` samples,
/// with `φ(p) = p/√(a² − b²p²)` differentiated by a five-point stencil.
pub fn profile_residual<T: Scalar>(
    profile: &FrontProfile<T>,
    calc: &ReactionCalculus<T>,
    points: usize,
) -> Vec<(T, T)> {
    let s = &profile.samples;
    let n = s.len();
    if n < 5 {
        return Vec::new();
    }
    let h = s[1].z - s[0].z;
    let phi: Vec<T> = s.iter().map(|p| profile.diffusion.flux(p.dv)).collect();
    let interior = n - 4;
    let stride = (interior / points.max(1)).max(1);
    let (eight, twelve): (T, T) = (lit(8.0), lit(12.0));
    (2..n - 2)
        .step_by(stride)
        .map(|i| {
            let dphi = (phi[i - 2] - eight * phi[i - 1] + eight * phi[i + 1] - phi[i + 2]) / (twelve * h);
            (s[i].z, (dphi - profile.c * s[i].dv + calc.f(s[i].v)).abs())
        })
        .collect()
}

/// Corner regimes of the `(a, b)` plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `a` fixed, `b → 0`; quantities refer to `a = 1` (speeds scale as `a^{-1/2}`).
    LinearLimit,
    /// `b/a → ∞`
    ConstantLimit,
    /// `a → ∞` with `b²/a → 0`
    Heaviside,
    /// `a, b → ∞` with `b/a` bounded away from 0 and ∞ (`a = b = 1/ε`)
    SingularPerturbation,
    /// Both parameters fixed.
    Interior,
    /// `a, b → ∞`, `b/a → 0`, `b²/a ↛ 0`: limit profile unresolved.
    Open,
    /// Not a cell of the table.
    Unlisted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Trend {
    ToZero,
    Bounded,
    ToInfinity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpeedTrend {
    ToInfinity,
    ToLinearCritical,
    ToZero,
    ToPositiveLimit,
    Finite,
    Unresolved,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitTag {
    Constant,
    LinearCritical,
    Heaviside,
    GluedLi,
    PiecewiseLinear,
    BornInfeld,
    Unresolved,
}

/// Parameter trends; the ratio trends are only needed when `a` and `b` alone
/// do not determine them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegimeQuery {
    pub a: Trend,
    pub b: Trend,
    /// trend of `b/a`
    pub ratio: Option<Trend>,
    /// trend of `b²/a`
    pub b2_over_a: Option<Trend>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegimeCell {
    pub regime: Regime,
    pub speed: SpeedTrend,
    pub profiles: Vec<LimitTag>,
    pub open: bool,
}

fn implied_ratio(a: Trend, b: Trend) -> Option<Trend> {
    use Trend::*;
    match (a, b) {
        (ToZero, ToZero) | (ToInfinity, ToInfinity) => None,
        (ToZero, _) | (Bounded, ToInfinity) => Some(ToInfinity),
        (Bounded, Bounded) => Some(Bounded),
        (Bounded, ToZero) | (ToInfinity, _) => Some(ToZero),
    }
}

fn implied_b2_over_a(a: Trend, b: Trend) -> Option<Trend> {
    use Trend::*;
    match (a, b) {
        (ToZero, ToZero) | (ToInfinity, ToInfinity) => None,
        (ToZero, _) | (Bounded, ToInfinity) => Some(ToInfinity),
        (Bounded, Bounded) => Some(Bounded),
        (Bounded, ToZero) | (ToInfinity, _) => Some(ToZero),
    }
}

/// Looks up the regime table. Never extrapolates beyond its cells.
pub fn classify_regime(q: &RegimeQuery) -> Result<RegimeCell> {
    use Trend::*;
    let check = |given: Option<Trend>, implied: Option<Trend>, what: &str| -> Result<Option<Trend>> {
        match (given, implied) {
            (Some(g), Some(i)) if g != i => Err(Error::InvalidParameter(format!(
                "{what} trend {g:?} contradicts the parameter trends (implied {i:?})"
            ))),
            (g, i) => Ok(g.or(i)),
        }
    };
    let ratio = check(q.ratio, implied_ratio(q.a, q.b), "b/a")?;
    let b2a = check(q.b2_over_a, implied_b2_over_a(q.a, q.b), "b²/a")?;
    let cell = |regime, speed, profiles: Vec<LimitTag>, open| RegimeCell { regime, speed, profiles, open };
    let constant = || cell(Regime::ConstantLimit, SpeedTrend::ToInfinity, vec![LimitTag::Constant], false);
    let heaviside = || cell(Regime::Heaviside, SpeedTrend::ToZero, vec![LimitTag::Heaviside], false);
    let unlisted = || cell(Regime::Unlisted, SpeedTrend::Unresolved, vec![LimitTag::Unresolved], false);
    Ok(match (q.a, q.b) {
        (Bounded, ToZero) => {
            cell(Regime::LinearLimit, SpeedTrend::ToLinearCritical, vec![LimitTag::LinearCritical], false)
        }
        (Bounded, Bounded) => cell(Regime::Interior, SpeedTrend::Finite, vec![LimitTag::BornInfeld], false),
        (ToInfinity, ToZero) | (ToInfinity, Bounded) => heaviside(),
        _ if ratio == Some(ToInfinity) => constant(),
        (ToInfinity, ToInfinity) => match ratio {
            Some(Bounded) => cell(
                Regime::SingularPerturbation,
                SpeedTrend::ToPositiveLimit,
                vec![LimitTag::GluedLi, LimitTag::PiecewiseLinear],
                false,
            ),
            Some(ToZero) => match b2a {
                Some(ToZero) => heaviside(),
                Some(_) => cell(Regime::Open, SpeedTrend::ToZero, vec![LimitTag::Unresolved], true),
                None => unlisted(),
            },
            _ => unlisted(),
        },
        _ => unlisted(),
    })
}

/// Closed-form (or explicitly integrated) limit profiles.
#[derive(Debug, Clone, PartialEq)]
pub enum LimitProfile<T: Scalar> {
    Constant {
        v0: T,
    },
    /// Step from 0 to 1 at `z = 0`, taking the value `v0` there.
    Heaviside {
        v0: T,
    },
    /// `𝒱_L(z; anchor_z, anchor_v)` with the given slope, clamped to `[0, 1]`.
    PiecewiseLinear {
        anchor_z: T,
        anchor_v: T,
        slope: T,
    },
    /// Solution of `c̄ v' = f(v)` through `(0, v0)`.
    Inviscid {
        cbar: T,
        v0: T,
        curve: Hermite<T>,
        tail_rate: T,
    },
    /// Slope-one line up to `(glue_z, v_plus)`, then `c̄ v' = f(v)`.
    GluedLi {
        v_plus: T,
        cbar: T,
        glue_z: T,
        curve: Hermite<T>,
        tail_rate: T,
    },
    /// Linear-diffusion critical profile evaluated at `z_scale · z`.
    LinearCritical {
        profile: Box<FrontProfile<T>>,
        z_scale: T,
    },
    /// `v = z + α` on `[−α, 1 − α]`.
    SteadyBalanced {
        alpha: T,
    },
}

/// Serializable summary of a limit profile: a kind tag plus parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitSummary {
    pub kind: &'static str,
    pub params: Vec<(&'static str, f64)>,
}

impl<T: Scalar> LimitProfile<T> {
    pub fn eval(&self, z: T) -> T {
        let clamp = |v: T| v.max(T::zero()).min(T::one());
        match self {
            LimitProfile::Constant { v0 } => *v0,
            LimitProfile::Heaviside { v0 } => {
                if z < T::zero() {
                    T::zero()
                } else if z > T::zero() {
                    T::one()
                } else {
                    *v0
                }
            }
            LimitProfile::PiecewiseLinear { anchor_z, anchor_v, slope } => clamp(*anchor_v + *slope * (z - *anchor_z)),
            LimitProfile::Inviscid { curve, tail_rate, .. } => eval_curve(curve, *tail_rate, z),
            LimitProfile::GluedLi { v_plus, glue_z, curve, tail_rate, .. } => {
                if z <= *glue_z {
                    clamp(*v_plus + (z - *glue_z))
                } else {
                    eval_curve(curve, *tail_rate, z)
                }
            }
            LimitProfile::LinearCritical { profile, z_scale } => profile.eval(z * *z_scale),
            LimitProfile::SteadyBalanced { alpha } => clamp(z + *alpha),
        }
    }

    pub fn summary(&self) -> LimitSummary {
        let (kind, params): (&'static str, Vec<(&'static str, T)>) = match self {
            LimitProfile::Constant { v0 } => ("constant", vec![("v0", *v0)]),
            LimitProfile::Heaviside { v0 } => ("heaviside", vec![("v0", *v0)]),
            LimitProfile::PiecewiseLinear { anchor_z, anchor_v, slope } => {
                ("piecewise-linear", vec![("anchor_z", *anchor_z), ("anchor_v", *anchor_v), ("slope", *slope)])
            }
            LimitProfile::Inviscid { cbar, v0, .. } => ("inviscid", vec![("cbar", *cbar), ("v0", *v0)]),
            LimitProfile::GluedLi { v_plus, cbar, glue_z, .. } => {
                ("glued-li", vec![("v_plus", *v_plus), ("cbar", *cbar), ("glue_z", *glue_z)])
            }
            LimitProfile::LinearCritical { profile, z_scale } => {
                ("linear-critical", vec![("c", profile.c), ("z_scale", *z_scale)])
            }
            LimitProfile::SteadyBalanced { alpha } => ("steady-balanced", vec![("alpha", *alpha)]),
        };
        LimitSummary { kind, params: params.into_iter().map(|(n, v)| (n, to_f64(v))).collect() }
    }

    /// Left and right slopes at the glue point of a glued profile.
    pub fn glue_slopes(&self, calc: &ReactionCalculus<T>) -> Option<(T, T)> {
        match self {
            LimitProfile::GluedLi { v_plus, cbar, .. } => Some((T::one(), calc.f(*v_plus) / *cbar)),
            _ => None,
        }
    }
}

fn eval_curve<T: Scalar>(curve: &Hermite<T>, tail_rate: T, z: T) -> T {
    let (lo, hi) = curve.domain();
    if z > hi {
        let v_last = curve.ys()[curve.ys().len() - 1];
        return T::one() - (T::one() - v_last) * (-tail_rate * (z - hi)).exp();
    }
    if z < lo {
        return curve.ys()[0];
    }
    curve.eval(z)
}

/// Samples `(z, v)` of `c̄ v' = f(v)` from `(z_start, v_start)` up to `v_stop`.
fn inviscid_branch<T: Scalar>(
    calc: &ReactionCalculus<T>,
    cbar: T,
    z_start: T,
    v_start: T,
    v_stop: T,
    ctrl: &Controls<T>,
) -> Result<Vec<(T, T)>> {
    let opts =
        OdeOptions { rtol: ctrl.rtol, atol: ctrl.atol, h_min: lit(1e-15), h_max: lit(1e-2), max_steps: 1_000_000 };
    let mut out = Vec::new();
    let res = integrate(
        |v: T, _z: &[T; 1]| [cbar / calc.f(v)],
        v_start,
        [z_start],
        v_stop,
        &opts,
        |v, z| {
            out.push((z[0], v));
            Flow::Continue
        },
    );
    res.map_err(|e| Error::StiffnessFailure { last_v: to_f64(e.t) })?;
    Ok(out)
}

fn curve_from<T: Scalar>(calc: &ReactionCalculus<T>, cbar: T, mut pts: Vec<(T, T)>) -> Result<Hermite<T>> {
    pts.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    pts.dedup_by(|q, p| q.0 <= p.0);
    Hermite::with_slopes(
        pts.iter().map(|p| p.0).collect(),
        pts.iter().map(|p| p.1).collect(),
        pts.iter().map(|p| calc.f(p.1) / cbar).collect(),
    )
    .ok_or_else(|| Error::QuadratureFailure("inviscid profile has too few samples".into()))
}

/// Inviscid profile through `(0, v0)` with speed `cbar`, on `v ∈ [1e-6, 1 − 1e-6]` where `f > 0`.
pub fn inviscid_profile<T: Scalar>(
    calc: &ReactionCalculus<T>,
    cbar: T,
    v0: T,
    ctrl: &Controls<T>,
) -> Result<LimitProfile<T>> {
    if !(cbar > T::zero() && calc.f(v0) > T::zero()) {
        return Err(Error::InvalidParameter("inviscid profile needs c̄ > 0 and f(v0) > 0".into()));
    }
    let v_low = calc.alpha.unwrap_or_else(T::zero).max(lit(1e-6)) + lit(1e-6);
    let mut pts = inviscid_branch(calc, cbar, T::zero(), v0, v_low, ctrl)?;
    pts.extend(inviscid_branch(calc, cbar, T::zero(), v0, T::one() - lit(1e-6), ctrl)?);
    let curve = curve_from(calc, cbar, pts)?;
    Ok(LimitProfile::Inviscid { cbar, v0, curve, tail_rate: (-calc.fprime1).max(T::zero()) / cbar })
}

/// Glued limit of the singular perturbation: slope one up to `v₊`, inviscid beyond.
/// `c̄ = F(v₊)/v₊`, which equals `f(v₊)` at an exact root.
pub fn glued_profile<T: Scalar>(calc: &ReactionCalculus<T>, v0: T, ctrl: &Controls<T>) -> Result<LimitProfile<T>> {
    let v_plus = calc.v_plus.ok_or_else(|| Error::NoPrediction("no root of F(v) = v f(v) in (0, 1)".into()))?;
    let cbar = calc.big_f(v_plus) / v_plus;
    let top = T::one() - lit(1e-6);
    let (glue_z, pts) = if v_plus >= v0 {
        let gz = v_plus - v0;
        (gz, inviscid_branch(calc, cbar, gz, v_plus, top, ctrl)?)
    } else {
        let down = inviscid_branch(calc, cbar, T::zero(), v0, v_plus, ctrl)?;
        let gz = down.last().map(|p| p.0).unwrap_or_else(T::zero);
        let mut pts = down;
        pts.extend(inviscid_branch(calc, cbar, T::zero(), v0, top, ctrl)?);
        (gz, pts)
    };
    let curve = curve_from(calc, cbar, pts)?;
    Ok(LimitProfile::GluedLi { v_plus, cbar, glue_z, curve, tail_rate: (-calc.fprime1).max(T::zero()) / cbar })
}

/// Limit profile predicted in `regime`, normalized by `v(0) = v0`.
pub fn make_limit_profile<T: Scalar>(
    calc: &ReactionCalculus<T>,
    regime: Regime,
    v0: T,
    ctrl: &Controls<T>,
) -> Result<LimitProfile<T>> {
    match regime {
        Regime::ConstantLimit => Ok(LimitProfile::Constant { v0 }),
        Regime::Heaviside => Ok(LimitProfile::Heaviside { v0 }),
        Regime::LinearLimit => {
            let (_, prof) = linear_critical(calc, ctrl)?;
            Ok(LimitProfile::LinearCritical { profile: Box::new(prof), z_scale: T::one() })
        }
        Regime::SingularPerturbation => {
            if calc.balanced {
                return Ok(LimitProfile::SteadyBalanced { alpha: calc.alpha.expect("balanced is type C") });
            }
            match calc.type_label {
                ReactionType::C => Err(Error::NoPrediction(
                    "non-balanced type C: glued and piecewise linear limits both possible".into(),
                )),
                _ => {
                    if calc.type_label == ReactionType::A && !calc.assumption_f {
                        return Err(Error::NoPrediction("type A without a unique local maximum".into()));
                    }
                    match calc.v_plus {
                        Some(_) => glued_profile(calc, v0, ctrl),
                        None => {
                            Ok(LimitProfile::PiecewiseLinear { anchor_z: T::zero(), anchor_v: v0, slope: T::one() })
                        }
                    }
                }
            }
        }
        Regime::Interior | Regime::Open | Regime::Unlisted => {
            Err(Error::NoPrediction(format!("no limit profile for regime {regime:?}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reaction::{classify, ReactionSpec, DEFAULT_GRID};

    fn q(a: Trend, b: Trend) -> RegimeQuery {
        RegimeQuery { a, b, ratio: None, b2_over_a: None }
    }

    #[test]
    fn regime_table_cells() {
        use Trend::*;
        assert_eq!(classify_regime(&q(Bounded, ToZero)).unwrap().regime, Regime::LinearLimit);
        assert_eq!(classify_regime(&q(ToInfinity, Bounded)).unwrap().regime, Regime::Heaviside);
        assert_eq!(classify_regime(&q(ToZero, Bounded)).unwrap().regime, Regime::ConstantLimit);
        assert_eq!(classify_regime(&q(Bounded, ToInfinity)).unwrap().regime, Regime::ConstantLimit);
        let diag = RegimeQuery { ratio: Some(Bounded), ..q(ToInfinity, ToInfinity) };
        let cell = classify_regime(&diag).unwrap();
        assert_eq!(cell.regime, Regime::SingularPerturbation);
        assert_eq!(cell.speed, SpeedTrend::ToPositiveLimit);
        let open = RegimeQuery { ratio: Some(ToZero), b2_over_a: Some(ToInfinity), ..q(ToInfinity, ToInfinity) };
        assert!(classify_regime(&open).unwrap().open);
        let step = RegimeQuery { ratio: Some(ToZero), b2_over_a: Some(ToZero), ..q(ToInfinity, ToInfinity) };
        assert_eq!(classify_regime(&step).unwrap().regime, Regime::Heaviside);
        assert_eq!(classify_regime(&q(ToInfinity, ToInfinity)).unwrap().regime, Regime::Unlisted);
    }

    #[test]
    fn regime_rejects_contradictions() {
        let bad = RegimeQuery { ratio: Some(Trend::ToZero), ..q(Trend::ToZero, Trend::Bounded) };
        assert!(classify_regime(&bad).is_err());
    }

    #[test]
    fn fisher_glue_point() {
        let calc = classify::<f64>(&ReactionSpec::fisher(1.0), DEFAULT_GRID).unwrap();
        let lp = make_limit_profile(&calc, Regime::SingularPerturbation, 0.5, &Controls::default()).unwrap();
        match &lp {
            LimitProfile::GluedLi { glue_z, .. } => assert!((glue_z - 0.25).abs() < 1e-10),
            other => panic!("unexpected {other:?}"),
        }
        let (l, r) = lp.glue_slopes(&calc).unwrap();
        assert!((l - r).abs() < 1e-8);
        assert!((lp.eval(0.0) - 0.5).abs() < 1e-12);
        assert_eq!(lp.eval(-0.6), 0.0);
    }

    #[test]
    fn balanced_steady_profile() {
        let calc = classify::<f64>(&ReactionSpec::cubic_bistable(0.5), DEFAULT_GRID).unwrap();
        let lp = make_limit_profile(&calc, Regime::SingularPerturbation, 0.5, &Controls::default()).unwrap();
        assert_eq!(lp.eval(0.2), 0.7);
        assert_eq!(lp.eval(-0.7), 0.0);
    }

    #[test]
    fn nonbalanced_bistable_has_no_prediction() {
        let calc = classify::<f64>(&ReactionSpec::cubic_bistable(0.4), DEFAULT_GRID).unwrap();
        assert!(matches!(
            make_limit_profile(&calc, Regime::SingularPerturbation, 0.4, &Controls::default()),
            Err(Error::NoPrediction(_))
        ));
    }
}
