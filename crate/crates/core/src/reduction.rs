//! First-order reduction of the traveling-wave equation.
//!
//! Writing `y(v)` for the reduction variable along a monotone front, the profile
//! equation becomes `y' = c a R(y) − f(v)` with `y(0) = y(1) = 0`, where
//! `R(y) = √(y(2a + b²y)) / (a + b²y)`. All integrations run in the regularized
//! variables `t = ln v` and `k = E/v`, with `E = √(y(2a + b²y))`:
//!
//! ```text
//! dk/dt = c a − k − (f(v)/v) √(a² + b²E²) / k,      dz/dt = √(a² + b²E²) / (a k).
//! ```
//!
//! Linear diffusion is the same system with `a = 1`, `b = 0` and `y = E²`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::Hermite;
use crate::ode::{integrate, Flow, OdeOptions};
use crate::reaction::{ReactionCalculus, ReactionType};
use crate::scalar::{lit, to_f64, tol, Scalar};

/// Diffusion parameters `a, b > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ModelParams<T: Scalar> {
    a: T,
    b: T,
}

impl<T: Scalar> ModelParams<T> {
    pub fn new(a: T, b: T) -> Result<Self> {
        if !(a > T::zero() && a.is_finite() && b > T::zero() && b.is_finite()) {
            return Err(Error::InvalidParameter(format!("a and b must be positive and finite (a = {a}, b = {b})")));
        }
        Ok(Self { a, b })
    }

    /// Singular-perturbation coupling `a = b = 1/ε`.
    pub fn singular(epsilon: T) -> Result<Self> {
        Self::new(epsilon.recip(), epsilon.recip())
    }

    /// Vanishing-diffusion coupling `a = 1/γ`, `b = 1`.
    pub fn gamma(gamma: T) -> Result<Self> {
        Self::new(gamma.recip(), T::one())
    }

    pub fn a(&self) -> T {
        self.a
    }

    pub fn b(&self) -> T {
        self.b
    }

    /// Largest admissible slope `a/b` of a profile.
    pub fn max_slope(&self) -> T {
        self.a / self.b
    }

    /// Field-strength ratio `b/a`.
    pub fn ratio(&self) -> T {
        self.b / self.a
    }
}

/// Diffusion operator acting on the profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "", tag = "kind", rename_all = "kebab-case")]
pub enum Diffusion<T: Scalar> {
    BornInfeld {
        params: ModelParams<T>,
    },
    /// Classical `v''`.
    Linear,
}

impl<T: Scalar> Diffusion<T> {
    pub fn born_infeld(params: ModelParams<T>) -> Self {
        Diffusion::BornInfeld { params }
    }

    /// Coefficients `(a, b)` of the E-dynamics; `(1, 0)` for linear diffusion.
    pub fn coeffs(&self) -> (T, T) {
        match self {
            Diffusion::BornInfeld { params } => (params.a, params.b),
            Diffusion::Linear => (T::one(), T::zero()),
        }
    }

    pub fn params(&self) -> Option<ModelParams<T>> {
        match self {
            Diffusion::BornInfeld { params } => Some(*params),
            Diffusion::Linear => None,
        }
    }

    pub fn e_of_y(&self, y: T) -> T {
        let y = y.max(T::zero());
        match self {
            Diffusion::BornInfeld { params } => (y * (lit::<T>(2.0) * params.a + params.b * params.b * y)).sqrt(),
            Diffusion::Linear => y.sqrt(),
        }
    }

    pub fn y_of_e(&self, e: T) -> T {
        match self {
            Diffusion::BornInfeld { params } => {
                let (a, b) = (params.a, params.b);
                e * e / (a + (a * a + b * b * e * e).sqrt())
            }
            Diffusion::Linear => e * e,
        }
    }

    /// Profile slope `v'` corresponding to `E`.
    pub fn slope_of_e(&self, e: T) -> T {
        let (a, b) = self.coeffs();
        a * e / (a * a + b * b * e * e).sqrt()
    }

    /// `φ(p) = p / √(a² − b²p²)`, the flux as a function of the slope.
    pub fn flux(&self, p: T) -> T {
        let (a, b) = self.coeffs();
        p / (a * a - b * b * p * p).sqrt()
    }

    /// Largest slope a profile may attain (`+∞` for linear diffusion).
    pub fn max_slope(&self) -> T {
        match self {
            Diffusion::BornInfeld { params } => params.max_slope(),
            Diffusion::Linear => T::infinity(),
        }
    }

    fn y_scale(&self) -> T {
        match self {
            Diffusion::BornInfeld { params } => (params.a / (params.b * params.b)).max(T::one()),
            Diffusion::Linear => T::one(),
        }
    }

    /// Values of `y` below this at interior `v` count as a zero.
    pub fn y_floor(&self) -> T {
        tol::<T>(1e-11) * self.y_scale()
    }

    /// Below this `y` a decreasing trajectory is extrapolated linearly to its zero.
    pub fn y_switch(&self) -> T {
        tol::<T>(1e-8) * self.y_scale()
    }
}

/// `R_{a,b}(y) = √(y(2a + b²y)) / (a + b²y)`.
pub fn r_function<T: Scalar>(params: &ModelParams<T>, y: T) -> Result<T> {
    if !(y >= T::zero()) {
        return Err(Error::DomainError(format!("R requires y ≥ 0 (got {y})")));
    }
    let (a, b) = (params.a, params.b);
    if y.is_infinite() {
        return Ok(b.recip());
    }
    Ok((y * (lit::<T>(2.0) * a + b * b * y)).sqrt() / (a + b * b * y))
}

/// `E(y) = √(y(2a + b²y))`.
pub fn e_transform<T: Scalar>(params: &ModelParams<T>, y: T) -> Result<T> {
    if !(y >= T::zero()) {
        return Err(Error::DomainError(format!("E requires y ≥ 0 (got {y})")));
    }
    Ok(Diffusion::born_infeld(*params).e_of_y(y))
}

/// Inverse of [`e_transform`]: `y = (−a + √(a² + b²E²)) / b²`.
pub fn e_inverse<T: Scalar>(params: &ModelParams<T>, e: T) -> Result<T> {
    if !(e >= T::zero()) {
        return Err(Error::DomainError(format!("inverse E requires E ≥ 0 (got {e})")));
    }
    Ok(Diffusion::born_infeld(*params).y_of_e(e))
}

/// Maximal solution `y_m(v) = (a/b²)(√(1 + c²b²v²) − 1)` of the forward problem with `f ≡ 0`.
pub fn y_max_closed_form<T: Scalar>(params: &ModelParams<T>, c: T, v: T) -> T {
    let (a, b) = (params.a, params.b);
    let q = c * b * v;
    a * c * c * v * v / ((T::one() + q * q).sqrt() + T::one())
}

/// Numerical controls shared by the reduction, speed and profile solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "", default)]
pub struct Controls<T: Scalar> {
    pub rtol: T,
    pub atol: T,
    /// Minimum step (in `ln v`) before a stiffness failure is declared.
    pub h_min: T,
    /// Largest step in `ln v`; keeps the stored samples dense.
    pub h_max: T,
    /// Backward integrations start at `v = 1 − delta_start`.
    pub delta_start: T,
    /// Forward integrations of type C start at this `v`.
    pub v_start_forward: T,
    /// Type A positivity is not tested below this `v`.
    pub v_floor: T,
    /// Backward integrations never go below this `v`.
    pub v_end: T,
    /// Bisection stops once the speed bracket is narrower than this.
    pub ctol: T,
    /// Required `|y⁺(α) − y⁻(α)|` at termination for types B and C.
    pub rtol_match: T,
    pub max_expansions: usize,
    /// Profile truncation distances from 0 and 1.
    pub delta0: T,
    pub delta1: T,
    pub profile_points: usize,
}

impl<T: Scalar> Default for Controls<T> {
    fn default() -> Self {
        Self {
            rtol: tol(1e-9),
            atol: tol(1e-12),
            h_min: lit(1e-13),
            h_max: lit(0.02),
            delta_start: lit(1e-6),
            v_start_forward: lit(1e-8),
            v_floor: lit(1e-4),
            v_end: lit(1e-9),
            ctol: lit(1e-6),
            rtol_match: lit(1e-7),
            max_expansions: 60,
            delta0: lit(1e-4),
            delta1: lit(1e-4),
            profile_points: 512,
        }
    }
}

impl<T: Scalar> Controls<T> {
    /// Same controls with integration tolerances scaled by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        Self { rtol: (self.rtol * factor).max(T::tolerance_floor()), atol: self.atol * factor, ..*self }
    }

    fn ode(&self) -> OdeOptions<T> {
        OdeOptions { rtol: self.rtol, atol: self.atol, h_min: self.h_min, h_max: self.h_max, max_steps: 5_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    ForwardFromZero,
    BackwardFromOne,
    /// Forward branch on `[0, α]` joined to the backward branch on `[α, 1]`.
    Matched,
}

/// One point of a reduction solution. `z` is the profile coordinate relative to
/// the branch's anchor (infinite at the endpoints 0 and 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ReductionSample<T: Scalar> {
    pub v: T,
    pub y: T,
    pub e: T,
    /// `dE/dv`
    pub de: T,
    pub z: T,
}

/// Sampled solution of the first-order reduction.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionSolution<T: Scalar> {
    pub c: T,
    pub diffusion: Diffusion<T>,
    pub branch: Branch,
    /// Strictly increasing in `v`.
    pub samples: Vec<ReductionSample<T>>,
    /// Interior `v` where `y` vanished.
    pub hit_zero_at: Option<T>,
    /// `E/v` at the smallest sampled `v` (slope of `E` at the origin).
    pub slope_at_zero: Option<T>,
    /// Root `x` of the seeding at `v = 1`: `E ≈ x (1 − v)`.
    pub slope_at_one: Option<T>,
    e_interp: Hermite<T>,
}

impl<T: Scalar> ReductionSolution<T> {
    fn from_samples(
        c: T,
        diffusion: Diffusion<T>,
        branch: Branch,
        mut samples: Vec<ReductionSample<T>>,
        hit_zero_at: Option<T>,
        slope_at_zero: Option<T>,
        slope_at_one: Option<T>,
    ) -> Result<Self> {
        samples.sort_by(|p, q| p.v.partial_cmp(&q.v).unwrap_or(std::cmp::Ordering::Equal));
        samples.dedup_by(|q, p| q.v <= p.v);
        let e_interp = Hermite::with_slopes(
            samples.iter().map(|s| s.v).collect(),
            samples.iter().map(|s| s.e).collect(),
            samples.iter().map(|s| s.de).collect(),
        )
        .ok_or_else(|| Error::Inconsistent("reduction produced fewer than two samples".into()))?;
        Ok(Self { c, diffusion, branch, samples, hit_zero_at, slope_at_zero, slope_at_one, e_interp })
    }

    pub fn v_range(&self) -> (T, T) {
        self.e_interp.domain()
    }

    pub fn e_at(&self, v: T) -> T {
        self.e_interp.eval(v).max(T::zero())
    }

    pub fn y_at(&self, v: T) -> T {
        self.diffusion.y_of_e(self.e_at(v))
    }

    /// Profile slope `v'` at level `v`.
    pub fn slope_at(&self, v: T) -> T {
        self.diffusion.slope_of_e(self.e_at(v))
    }

    /// `(v, y)` pairs, the CSV payload of a reduction.
    pub fn vy(&self) -> Vec<(T, T)> {
        self.samples.iter().map(|s| (s.v, s.y)).collect()
    }
}

/// Right-hand side of the reduction in the regularized variables.
#[derive(Clone, Copy)]
pub(crate) struct Dynamics<'a, T: Scalar> {
    pub calc: &'a ReactionCalculus<T>,
    pub a: T,
    pub b: T,
    pub c: T,
}

impl<'a, T: Scalar> Dynamics<'a, T> {
    pub fn new(calc: &'a ReactionCalculus<T>, diffusion: &Diffusion<T>, c: T) -> Self {
        let (a, b) = diffusion.coeffs();
        Self { calc, a, b, c }
    }

    #[inline]
    fn root_term(&self, e: T) -> T {
        (self.a * self.a + self.b * self.b * e * e).sqrt()
    }

    /// `dE/dv = c a − f(v) √(a² + b²E²) / E`.
    #[inline]
    pub fn de_dv(&self, v: T, e: T) -> T {
        self.c * self.a - self.calc.f(v) * self.root_term(e) / e
    }

    #[inline]
    pub fn rhs(&self, t: T, s: &[T; 2]) -> [T; 2] {
        let v = t.exp();
        let k = s[0];
        if !(k > T::zero()) {
            return [T::nan(), T::nan()];
        }
        let root = self.root_term(k * v);
        let dk = self.c * self.a - k - self.calc.f_over_v(v) * root / k;
        [dk, root / (self.a * k)]
    }

    /// Roots of `x² − c a x + a f'(0) = 0` (smaller, larger), if real.
    pub fn origin_roots(&self) -> Option<(T, T)> {
        let d = self.calc.fprime0?;
        let ca = self.c * self.a;
        let disc = ca * ca - lit::<T>(4.0) * self.a * d;
        let slack = lit::<T>(1e-12) * (ca * ca).max(T::min_positive_value());
        if disc < -slack {
            return None;
        }
        let sq = disc.max(T::zero()).sqrt();
        let half: T = lit(0.5);
        Some(((ca - sq) * half, (ca + sq) * half))
    }

    /// Positive root of `x² + c a x − a m₁ = 0`, `m₁ = −f'(1)`, giving `E ≈ x (1 − v)`.
    pub fn corner_root(&self) -> T {
        let m1 = -self.calc.fprime1;
        let ca = self.c * self.a;
        let disc = ca * ca + lit::<T>(4.0) * self.a * m1.max(T::zero());
        // (−ca + √disc)/2 written without cancellation
        lit::<T>(2.0) * self.a * m1.max(T::zero()) / (ca + disc.sqrt()).max(T::min_positive_value())
    }

    /// `E` at `v = 1 − δ` on the trajectory entering the corner `(1, 0)`.
    pub fn corner_seed(&self, delta: T, diffusion: &Diffusion<T>) -> T {
        let x = self.corner_root();
        if x > T::zero() {
            return x * delta;
        }
        let v = T::one() - delta;
        let fv = self.calc.f(v).max(T::zero());
        let ca = self.c * self.a;
        if ca > T::zero() {
            // quasi-steady balance c a R = f
            let r = fv / ca;
            let br = (self.b * r).min(lit(0.999_999));
            self.a * r / (T::one() - br * br).sqrt()
        } else {
            diffusion.e_of_y((self.calc.f1 - self.calc.big_f(v)).max(T::zero()))
        }
    }
}

/// How a backward run decides to stop early.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum StopRule<T> {
    /// Integrate to the target level; only interior zeros stop the run.
    Plain,
    /// Type A admissibility test against the larger origin root `x_plus`.
    TypeA { x_plus: T },
}

#[derive(Debug, Clone)]
pub(crate) struct Run<T: Scalar> {
    /// In integration order.
    pub samples: Vec<ReductionSample<T>>,
    pub hit_zero_at: Option<T>,
    /// Type A verdict (`Some(true)` = reaches the origin below the larger root).
    pub admissible: Option<bool>,
    pub k_end: T,
    pub v_end: T,
}

fn sample<T: Scalar>(dyn_: &Dynamics<'_, T>, diffusion: &Diffusion<T>, v: T, e: T, z: T) -> ReductionSample<T> {
    ReductionSample { v, y: diffusion.y_of_e(e), e, de: dyn_.de_dv(v, e), z }
}

fn clamp01<T: Scalar>(v: T) -> T {
    v.max(T::zero()).min(T::one())
}

/// Integrates in `t = ln v` from `(v0, E0, z0)` to `v_target` with the given stop rule.
#[allow(clippy::too_many_arguments)]
fn run<T: Scalar>(
    dyn_: &Dynamics<'_, T>,
    diffusion: &Diffusion<T>,
    v0: T,
    e0: T,
    z0: T,
    v_target: T,
    rule: StopRule<T>,
    ctrl: &Controls<T>,
) -> Result<Run<T>> {
    let backward = v_target < v0;
    let y_floor = diffusion.y_floor();
    let y_switch = diffusion.y_switch();
    let mut samples: Vec<ReductionSample<T>> = Vec::new();
    let mut hit: Option<T> = None;
    let mut verdict: Option<bool> = None;
    let mut last = (v0, e0);
    let half: T = lit(0.5);
    let three: T = lit(3.0);

    let mut observe = |t: T, s: &[T; 2]| -> Flow {
        let v = t.exp();
        let e = s[0] * v;
        last = (v, e);
        let smp = sample(dyn_, diffusion, v, e, s[1]);
        samples.push(smp);
        if v > ctrl.v_floor || !backward {
            // E shrinking along the direction of integration, and fast enough that the
            // extrapolated zero lies well inside the remaining interval; trajectories
            // entering a corner along E ∝ v or E ∝ 1 − v never qualify
            let room = if backward { v } else { T::one() - v };
            // y can only reach 0 where f ≤ 0 going backward, f ≥ 0 going forward
            let (f_here, f_there) = (dyn_.calc.f(v), dyn_.calc.f(clamp01(v - e / smp.de)));
            let shrinking = (if backward {
                smp.de > T::zero() && f_here.min(f_there) <= T::zero()
            } else {
                smp.de < T::zero() && f_here.max(f_there) >= T::zero()
            }) && e < half * room * smp.de.abs();
            if smp.y <= y_floor && shrinking {
                hit = Some(v);
                return Flow::Stop;
            }
            if smp.y <= y_switch && shrinking {
                let dv = e / smp.de.abs();
                let v_zero = if backward { v - dv } else { v + dv };
                if v_zero > ctrl.v_floor && v_zero < T::one() {
                    hit = Some(v_zero);
                    return Flow::Stop;
                }
            }
        }
        if let StopRule::TypeA { x_plus } = rule {
            if v < ctrl.v_floor {
                let k = s[0];
                if k > three * x_plus {
                    verdict = Some(false);
                    return Flow::Stop;
                }
                if k < half * x_plus {
                    verdict = Some(true);
                    return Flow::Stop;
                }
            }
        }
        Flow::Continue
    };

    let t0 = v0.ln();
    let t1 = v_target.ln();
    let outcome = integrate(|t, s| dyn_.rhs(t, s), t0, [e0 / v0, z0], t1, &ctrl.ode(), &mut observe);
    let (k_end, v_end) = match outcome {
        Ok(end) => (end.y[0], end.t.exp()),
        Err(fail) => {
            let (v, e) = (fail.t.exp(), fail.y[0] * fail.t.exp());
            let de = dyn_.de_dv(v, e);
            let room = if backward { v } else { T::one() - v };
            let (f_here, f_there) = (dyn_.calc.f(v), dyn_.calc.f(clamp01(v - e / de)));
            let shrinking = (if backward {
                de > T::zero() && f_here.min(f_there) <= T::zero()
            } else {
                de < T::zero() && f_here.max(f_there) >= T::zero()
            }) && e < lit::<T>(0.5) * room * de.abs();
            if hit.is_none() && shrinking && diffusion.y_of_e(e) <= y_switch * lit(1e4) {
                // collapse towards y = 0 faster than the stepper can follow
                let dv = e / de.abs();
                hit = Some(if backward { v - dv } else { v + dv });
                (fail.y[0], v)
            } else {
                return Err(Error::StiffnessFailure { last_v: to_f64(last.0) });
            }
        }
    };
    if let StopRule::TypeA { x_plus } = rule {
        if verdict.is_none() && hit.is_none() {
            verdict = Some(k_end < x_plus);
        }
    }
    Ok(Run { samples, hit_zero_at: hit, admissible: verdict, k_end, v_end })
}

/// Backward run from the corner `(1, 0)` down to `v_target`.
pub(crate) fn backward_run<T: Scalar>(
    calc: &ReactionCalculus<T>,
    diffusion: &Diffusion<T>,
    c: T,
    v_target: T,
    rule: StopRule<T>,
    ctrl: &Controls<T>,
) -> Result<(Run<T>, T)> {
    let dyn_ = Dynamics::new(calc, diffusion, c);
    let delta = ctrl.delta_start;
    let v0 = T::one() - delta;
    let e0 = dyn_.corner_seed(delta, diffusion);
    if !(e0 > T::zero()) {
        return Err(Error::Inconsistent(format!("degenerate corner seed at c = {c}")));
    }
    let run = run(&dyn_, diffusion, v0, e0, T::zero(), v_target, rule, ctrl)?;
    Ok((run, dyn_.corner_root()))
}

/// `E/v` at the start of a type C forward run.
fn forward_seed_slope<T: Scalar>(dyn_: &Dynamics<'_, T>, diffusion: &Diffusion<T>, v0: T) -> T {
    if let Some(d) = dyn_.calc.fprime0 {
        let ca = dyn_.c * dyn_.a;
        let disc = ca * ca - lit::<T>(4.0) * dyn_.a * d;
        if disc >= T::zero() {
            let k = (ca + disc.sqrt()) * lit(0.5);
            if k > T::zero() {
                return k;
            }
        }
    }
    diffusion.e_of_y((-dyn_.calc.big_f(v0)).max(T::zero())) / v0
}

/// Closed-form forward branch on `[v_lo, α]` for `f ≡ 0` there: `E = a c v`.
fn type_b_closed_form<T: Scalar>(
    calc: &ReactionCalculus<T>,
    diffusion: &Diffusion<T>,
    c: T,
    alpha: T,
    v_lo: T,
) -> Vec<ReductionSample<T>> {
    let (a, b) = diffusion.coeffs();
    let dyn_ = Dynamics::new(calc, diffusion, c);
    let beta = b * c;
    let w = |s: T| (T::one() + beta * beta * s * s).sqrt();
    let w_alpha = w(alpha);
    // z(v) = (1/(ac)) [Φ(v) − Φ(α)], Φ(s) = w + ½ ln((w − 1)/(w + 1))
    let z_of = |v: T| {
        let wv = w(v);
        ((wv - w_alpha) + (v / alpha).ln() - ((T::one() + wv) / (T::one() + w_alpha)).ln()) / (a * c)
    };
    let n = 240usize;
    let mut vs: Vec<T> = Vec::with_capacity(2 * n + 1);
    let ratio = (alpha / v_lo).ln();
    for i in 0..=n {
        vs.push(v_lo * (ratio * lit::<T>(i as f64) / lit::<T>(n as f64)).exp());
        vs.push(alpha * lit::<T>(i as f64) / lit::<T>(n as f64));
    }
    vs.retain(|&v| v >= v_lo && v <= alpha);
    vs.push(alpha);
    vs.sort_by(|p, q| p.partial_cmp(q).unwrap());
    vs.dedup();
    vs.into_iter()
        .map(|v| {
            let e = a * c * v;
            ReductionSample { v, y: diffusion.y_of_e(e), e, de: dyn_.de_dv(v, e), z: z_of(v) }
        })
        .collect()
}

/// Forward run from the origin up to `v_target`; `z = 0` at `v_target`.
pub(crate) fn forward_run<T: Scalar>(
    calc: &ReactionCalculus<T>,
    diffusion: &Diffusion<T>,
    c: T,
    v_target: T,
    ctrl: &Controls<T>,
) -> Result<Run<T>> {
    let dyn_ = Dynamics::new(calc, diffusion, c);
    match calc.type_label {
        ReactionType::A => {
            Err(Error::InvalidParameter("forward integration is not unique for type A reactions".into()))
        }
        ReactionType::B => {
            if !(c > T::zero()) {
                return Err(Error::InvalidParameter("type B forward integration needs c > 0".into()));
            }
            let alpha = calc.alpha.expect("type B has alpha");
            let upto = v_target.min(alpha);
            let mut samples = type_b_closed_form(calc, diffusion, c, upto, ctrl.v_start_forward);
            let mut hit = None;
            let mut k_end = dyn_.a * c;
            if v_target > alpha {
                let run = run(&dyn_, diffusion, alpha, dyn_.a * c * alpha, T::zero(), v_target, StopRule::Plain, ctrl)?;
                samples.extend(run.samples.into_iter().skip(1));
                hit = run.hit_zero_at;
                k_end = run.k_end;
            }
            shift_z(&mut samples, v_target);
            let v_end = samples.last().map(|s| s.v).unwrap_or(v_target);
            Ok(Run { samples, hit_zero_at: hit, admissible: None, k_end, v_end })
        }
        ReactionType::C => {
            if c < T::zero() {
                return Err(Error::InvalidParameter("speed must be nonnegative".into()));
            }
            let v0 = ctrl.v_start_forward;
            let k0 = forward_seed_slope(&dyn_, diffusion, v0);
            if !(k0 > T::zero()) {
                return Err(Error::Inconsistent("degenerate forward seed".into()));
            }
            let mut run = run(&dyn_, diffusion, v0, k0 * v0, T::zero(), v_target, StopRule::Plain, ctrl)?;
            shift_z(&mut run.samples, v_target);
            Ok(run)
        }
    }
}

/// Shifts `z` so that it vanishes at level `v_anchor` (interpolating linearly in `ln v`).
fn shift_z<T: Scalar>(samples: &mut [ReductionSample<T>], v_anchor: T) {
    let mut best: Option<T> = None;
    for w in samples.windows(2) {
        let (p, q) = (w[0], w[1]);
        let (lo, hi) = if p.v <= q.v { (p, q) } else { (q, p) };
        if lo.v <= v_anchor && v_anchor <= hi.v {
            let s = if hi.v > lo.v { (v_anchor.ln() - lo.v.ln()) / (hi.v.ln() - lo.v.ln()) } else { T::zero() };
            best = Some(lo.z + s * (hi.z - lo.z));
            break;
        }
    }
    let z_anchor = best.unwrap_or_else(|| {
        samples
            .iter()
            .min_by(|p, q| (p.v - v_anchor).abs().partial_cmp(&(q.v - v_anchor).abs()).unwrap())
            .map(|s| s.z)
            .unwrap_or_else(T::zero)
    });
    for s in samples.iter_mut() {
        s.z = s.z - z_anchor;
    }
}

fn corner_samples<T: Scalar>(dyn_: &Dynamics<'_, T>) -> ReductionSample<T> {
    ReductionSample { v: T::one(), y: T::zero(), e: T::zero(), de: -dyn_.corner_root(), z: T::infinity() }
}

/// Integrates `(P_{c,f})⁻` from `v = 1` down towards 0.
///
/// Type A runs stop once admissibility is decided near the origin; admissible runs are
/// closed with the sample `(0, 0)`. Types B and C stop at `controls.v_end.max(1e-6)` or at
/// an interior zero.
pub fn integrate_backward<T: Scalar>(
    calc: &ReactionCalculus<T>,
    diffusion: &Diffusion<T>,
    c: T,
    ctrl: &Controls<T>,
) -> Result<ReductionSolution<T>> {
    if !(c >= T::zero()) {
        return Err(Error::InvalidParameter(format!("speed must be nonnegative (got {c})")));
    }
    let dyn_ = Dynamics::new(calc, diffusion, c);
    let (rule, v_target) = match calc.type_label {
        ReactionType::A => match dyn_.origin_roots() {
            Some((_, xp)) => (StopRule::TypeA { x_plus: xp }, ctrl.v_end),
            None => (StopRule::Plain, ctrl.v_end),
        },
        _ => (StopRule::Plain, ctrl.v_end.max(lit(1e-6))),
    };
    let (run, x1) = backward_run(calc, diffusion, c, v_target, rule, ctrl)?;
    let mut samples = run.samples;
    shift_z(&mut samples, calc.normalization().max(run.v_end));
    samples.push(corner_samples(&dyn_));
    let mut slope0 = None;
    if run.hit_zero_at.is_none() {
        slope0 = Some(run.k_end);
        if run.admissible == Some(true) {
            samples.push(ReductionSample {
                v: T::zero(),
                y: T::zero(),
                e: T::zero(),
                de: run.k_end,
                z: T::neg_infinity(),
            });
        }
    }
    ReductionSolution::from_samples(c, *diffusion, Branch::BackwardFromOne, samples, run.hit_zero_at, slope0, Some(x1))
}

/// Integrates `(P_{c,f})⁺` from `v = 0` up to `v_stop` (default α).
pub fn integrate_forward<T: Scalar>(
    calc: &ReactionCalculus<T>,
    diffusion: &Diffusion<T>,
    c: T,
    v_stop: Option<T>,
    ctrl: &Controls<T>,
) -> Result<ReductionSolution<T>> {
    let v_stop = v_stop.unwrap_or_else(|| calc.alpha_or_half());
    if !(v_stop > T::zero() && v_stop <= T::one()) {
        return Err(Error::DomainError(format!("forward target v = {v_stop} outside (0, 1]")));
    }
    let run = forward_run(calc, diffusion, c, v_stop, ctrl)?;
    let first = run.samples[0];
    let mut samples = run.samples;
    samples.insert(
        0,
        ReductionSample { v: T::zero(), y: T::zero(), e: T::zero(), de: first.e / first.v, z: T::neg_infinity() },
    );
    let slope0 = Some(first.e / first.v);
    ReductionSolution::from_samples(c, *diffusion, Branch::ForwardFromZero, samples, run.hit_zero_at, slope0, None)
}

/// Joins the forward branch on `[0, α]` and the backward branch on `[α, 1]` at speed `c`,
/// with `z = 0` at α. Returns the solution and `y⁺(α) − y⁻(α)`.
pub fn matched_solution<T: Scalar>(
    calc: &ReactionCalculus<T>,
    diffusion: &Diffusion<T>,
    c: T,
    ctrl: &Controls<T>,
) -> Result<(ReductionSolution<T>, T)> {
    let alpha = calc.alpha.ok_or_else(|| Error::InvalidParameter("matching needs a type B or C reaction".into()))?;
    let dyn_ = Dynamics::new(calc, diffusion, c);
    let fwd = forward_run(calc, diffusion, c, alpha, ctrl)?;
    let (mut bwd, x1) = backward_run(calc, diffusion, c, alpha, StopRule::Plain, ctrl)?;
    if let Some(v) = fwd.hit_zero_at.or(bwd.hit_zero_at) {
        return Err(Error::NotAdmissible(to_f64(v)));
    }
    shift_z(&mut bwd.samples, alpha);
    let y_plus = fwd.samples.last().map(|s| s.y).unwrap_or_else(T::zero);
    let y_minus = bwd.samples.last().map(|s| s.y).unwrap_or_else(T::zero);
    let first = fwd.samples[0];
    let mut samples = fwd.samples;
    samples.pop();
    samples.extend(bwd.samples);
    samples.push(corner_samples(&dyn_));
    samples.push(ReductionSample {
        v: T::zero(),
        y: T::zero(),
        e: T::zero(),
        de: first.e / first.v,
        z: T::neg_infinity(),
    });
    let sol = ReductionSolution::from_samples(
        c,
        *diffusion,
        Branch::Matched,
        samples,
        None,
        Some(first.e / first.v),
        Some(x1),
    )?;
    Ok((sol, y_plus - y_minus))
}

/// `E⁺(α) − E⁻(α)`, strictly increasing in `c` for types B and C.
pub(crate) fn matching_gap<T: Scalar>(
    calc: &ReactionCalculus<T>,
    diffusion: &Diffusion<T>,
    c: T,
    ctrl: &Controls<T>,
) -> Result<(T, T)> {
    let alpha = calc.alpha.expect("matching needs alpha");
    let fwd = forward_run(calc, diffusion, c, alpha, ctrl)?;
    let (bwd, _) = backward_run(calc, diffusion, c, alpha, StopRule::Plain, ctrl)?;
    // an interior zero makes the corresponding branch end below the matching level
    let e_plus = if fwd.hit_zero_at.is_some() { T::zero() } else { fwd.samples.last().unwrap().e };
    let e_minus = if bwd.hit_zero_at.is_some() { T::zero() } else { bwd.samples.last().unwrap().e };
    let dy = diffusion.y_of_e(e_plus) - diffusion.y_of_e(e_minus);
    Ok((e_plus - e_minus, dy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reaction::{classify, ReactionSpec, DEFAULT_GRID};
    use approx::assert_abs_diff_eq;

    fn p(a: f64, b: f64) -> ModelParams<f64> {
        ModelParams::new(a, b).unwrap()
    }

    #[test]
    fn r_examples() {
        assert_eq!(r_function(&p(1.0, 1.0), 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(r_function(&p(1.0, 1.0), 2.0).unwrap(), 8f64.sqrt() / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r_function(&p(1.0, 2.0), 1e12).unwrap(), 0.5, epsilon = 1e-6);
        assert_eq!(r_function(&p(1.0, 2.0), f64::INFINITY).unwrap(), 0.5);
        assert!(matches!(r_function(&p(1.0, 1.0), -1.0), Err(Error::DomainError(_))));
    }

    #[test]
    fn e_examples() {
        assert_eq!(e_transform(&p(1.0, 1.0), 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(e_transform(&p(1.0, 1.0), 1.0).unwrap(), 3f64.sqrt(), epsilon = 1e-15);
        let y = e_inverse(&p(2.0, 3.0), e_transform(&p(2.0, 3.0), 0.7).unwrap()).unwrap();
        assert_abs_diff_eq!(y, 0.7, epsilon = 1e-14);
    }

    #[test]
    fn y_max_examples() {
        assert_abs_diff_eq!(y_max_closed_form(&p(1.0, 1.0), 1.0, 1.0), 2f64.sqrt() - 1.0, epsilon = 1e-15);
        assert_eq!(y_max_closed_form(&p(3.0, 0.5), 0.0, 0.7), 0.0);
    }

    #[test]
    fn params_reject_nonpositive() {
        assert!(ModelParams::new(0.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, -1.0).is_err());
        let m = p(2.0, 4.0);
        assert_eq!(m.max_slope() * m.ratio(), 1.0);
    }

    #[test]
    fn zero_speed_backward_is_upper_solution() {
        let calc = classify::<f64>(&ReactionSpec::fisher(1.0), DEFAULT_GRID).unwrap();
        let d = Diffusion::born_infeld(p(1.0, 1.0));
        let sol = integrate_backward(&calc, &d, 0.0, &Controls::default()).unwrap();
        assert!(sol.hit_zero_at.is_none());
        for s in &sol.samples {
            if s.v > 1e-3 {
                assert!((s.y - (calc.f1 - calc.big_f(s.v))).abs() < 1e-8, "v = {}", s.v);
            }
        }
    }

    #[test]
    fn type_b_forward_matches_closed_form() {
        let calc = classify::<f64>(&ReactionSpec::combustion(0.3), DEFAULT_GRID).unwrap();
        let m = p(1.0, 2.0);
        let sol = integrate_forward(&calc, &Diffusion::born_infeld(m), 0.4, None, &Controls::default()).unwrap();
        assert_abs_diff_eq!(sol.y_at(0.3), y_max_closed_form(&m, 0.4, 0.3), epsilon = 1e-12);
    }

    #[test]
    fn type_c_forward_zero_speed() {
        let calc = classify::<f64>(&ReactionSpec::cubic_bistable(0.4), DEFAULT_GRID).unwrap();
        let d = Diffusion::born_infeld(p(1.0, 1.0));
        let sol = integrate_forward(&calc, &d, 0.0, None, &Controls::default()).unwrap();
        for s in &sol.samples {
            if s.v > 1e-4 {
                assert!((s.y + calc.big_f(s.v)).abs() < 1e-8, "v = {}", s.v);
            }
        }
    }

    #[test]
    fn forward_rejects_type_a() {
        let calc = classify::<f64>(&ReactionSpec::fisher(1.0), DEFAULT_GRID).unwrap();
        let d = Diffusion::born_infeld(p(1.0, 1.0));
        assert!(integrate_forward(&calc, &d, 2.0, None, &Controls::default()).is_err());
    }
}
