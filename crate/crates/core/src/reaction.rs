//! Reaction terms on `[0, 1]`, their classification into types A/B/C and the
//! scalar quantities derived from them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{PiecewisePolynomial, Polynomial};
use crate::roots::{bisect, grid, grid_max, scan_roots};
use crate::scalar::{lit, tol, Scalar};

/// Default number of grid cells used by [`classify`].
pub const DEFAULT_GRID: usize = 10_000;

/// How a reaction term is written down. Polynomial coefficients are lowest degree
/// first and act on the absolute variable `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ReactionForm {
    Polynomial {
        coeffs: Vec<f64>,
    },
    /// `pieces[i]` acts on `[breaks[i], breaks[i + 1]]`; `breaks` runs from 0 to 1.
    Piecewise {
        breaks: Vec<f64>,
        pieces: Vec<Vec<f64>>,
    },
    /// `m s (1 - s)`
    Fisher {
        m: f64,
    },
    /// `m s² (1 - s)`
    Huxley {
        m: f64,
    },
    /// `s (1 - s)(1 + σ s)`
    Nagylaki {
        sigma: f64,
    },
    /// `s (1 - s)(s - α)`
    CubicBistable {
        alpha: f64,
    },
    /// `0` on `[0, α]`, `(s - α)(1 - s)` on `[α, 1]`
    Combustion {
        alpha: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReactionSpec {
    pub name: String,
    pub form: ReactionForm,
}

impl ReactionSpec {
    pub fn new(name: impl Into<String>, form: ReactionForm) -> Self {
        Self { name: name.into(), form }
    }

    pub fn fisher(m: f64) -> Self {
        Self::new("fisher", ReactionForm::Fisher { m })
    }

    pub fn huxley(m: f64) -> Self {
        Self::new("huxley", ReactionForm::Huxley { m })
    }

    pub fn nagylaki(sigma: f64) -> Self {
        Self::new("nagylaki", ReactionForm::Nagylaki { sigma })
    }

    pub fn cubic_bistable(alpha: f64) -> Self {
        Self::new("cubic-bistable", ReactionForm::CubicBistable { alpha })
    }

    pub fn combustion(alpha: f64) -> Self {
        Self::new("combustion", ReactionForm::Combustion { alpha })
    }

    pub fn polynomial(name: impl Into<String>, coeffs: Vec<f64>) -> Self {
        Self::new(name, ReactionForm::Polynomial { coeffs })
    }

    /// Catalog entry by name with an optional parameter (default used when absent).
    pub fn catalog(name: &str, param: Option<f64>) -> Result<Self> {
        Ok(match name {
            "fisher" => Self::fisher(param.unwrap_or(1.0)),
            "huxley" => Self::huxley(param.unwrap_or(40.0)),
            "nagylaki" => Self::nagylaki(param.unwrap_or(5.0)),
            "cubic-bistable" => Self::cubic_bistable(param.unwrap_or(0.5)),
            "combustion" => Self::combustion(param.unwrap_or(0.3)),
            other => return Err(Error::InvalidParameter(format!("unknown catalog reaction '{other}'"))),
        })
    }

    pub const CATALOG: [&'static str; 5] = ["fisher", "huxley", "nagylaki", "cubic-bistable", "combustion"];

    fn piecewise<T: Scalar>(&self) -> Result<PiecewisePolynomial<T>> {
        let one_minus_s = Polynomial::from_f64(&[1.0, -1.0]);
        let bad = |what: &str| Error::InvalidParameter(format!("{}: {what}", self.name));
        let check_alpha = |alpha: f64| {
            if alpha > 0.0 && alpha < 1.0 {
                Ok(())
            } else {
                Err(bad("alpha must lie in (0, 1)"))
            }
        };
        let pw = match &self.form {
            ReactionForm::Polynomial { coeffs } => {
                if coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(bad("non-finite coefficient"));
                }
                PiecewisePolynomial::single(Polynomial::from_f64(coeffs))
            }
            ReactionForm::Piecewise { breaks, pieces } => {
                if breaks.iter().chain(pieces.iter().flatten()).any(|c| !c.is_finite()) {
                    return Err(bad("non-finite breakpoint or coefficient"));
                }
                PiecewisePolynomial::new(
                    breaks.iter().map(|&b| lit(b)).collect(),
                    pieces.iter().map(|p| Polynomial::from_f64(p)).collect(),
                )
                .ok_or_else(|| bad("breakpoints must increase from 0 to 1 with one piece per interval"))?
            }
            ReactionForm::Fisher { m } => {
                if !(*m > 0.0 && m.is_finite()) {
                    return Err(bad("m must be positive"));
                }
                PiecewisePolynomial::single(Polynomial::from_f64(&[0.0, *m, -*m]))
            }
            ReactionForm::Huxley { m } => {
                if !(*m > 0.0 && m.is_finite()) {
                    return Err(bad("m must be positive"));
                }
                PiecewisePolynomial::single(Polynomial::from_f64(&[0.0, 0.0, *m, -*m]))
            }
            ReactionForm::Nagylaki { sigma } => {
                if !sigma.is_finite() {
                    return Err(bad("sigma must be finite"));
                }
                let p = Polynomial::from_f64(&[0.0, 1.0]).mul(&one_minus_s).mul(&Polynomial::from_f64(&[1.0, *sigma]));
                PiecewisePolynomial::single(p)
            }
            ReactionForm::CubicBistable { alpha } => {
                check_alpha(*alpha)?;
                let p = Polynomial::from_f64(&[0.0, 1.0]).mul(&one_minus_s).mul(&Polynomial::from_f64(&[-*alpha, 1.0]));
                PiecewisePolynomial::single(p)
            }
            ReactionForm::Combustion { alpha } => {
                check_alpha(*alpha)?;
                let tail = Polynomial::from_f64(&[-*alpha, 1.0]).mul(&one_minus_s);
                PiecewisePolynomial::new(
                    vec![T::zero(), lit(*alpha), T::one()],
                    vec![Polynomial::new(vec![T::zero()]), tail],
                )
                .expect("valid combustion breakpoints")
            }
        };
        Ok(pw)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReactionType {
    /// positive on (0, 1)
    A,
    /// zero on [0, α], positive on (α, 1)
    B,
    /// negative on (0, α), positive on (α, 1), F(1) ≥ 0
    C,
}

/// A classified reaction term together with its derived quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct ReactionCalculus<T> {
    pub name: String,
    pub type_label: ReactionType,
    /// Absent for type A.
    pub alpha: Option<T>,
    /// Linear-control constant certifying `|f(s)| ≤ k·min(s, 1 − s)` on the grid.
    pub k: T,
    pub f1: T,
    /// Right derivative at 0; `None` only for non-differentiable inputs.
    pub fprime0: Option<T>,
    /// Left derivative at 1.
    pub fprime1: T,
    pub f_max: T,
    pub v_max: T,
    /// Largest root of `F(v) = v f(v)` in (0, 1).
    pub v_plus: Option<T>,
    /// Type C: root of `F` in (α, 1].
    pub v_star: Option<T>,
    pub balanced: bool,
    pub kpp: bool,
    pub assumption_f: bool,
    pub grid_size: usize,
    f: PiecewisePolynomial<T>,
}

/// Classifies `spec` using a uniform grid of `grid_size` cells.
pub fn classify<T: Scalar>(spec: &ReactionSpec, grid_size: usize) -> Result<ReactionCalculus<T>> {
    if grid_size < 10 {
        return Err(Error::InvalidParameter("grid_size must be at least 10".into()));
    }
    let f = spec.piecewise::<T>()?;
    let xs = grid(T::zero(), T::one(), grid_size);
    let vals: Vec<T> = xs.iter().map(|&s| f.eval(s)).collect();
    let scale = vals.iter().fold(T::zero(), |m, v| m.max(v.abs())).max(T::min_positive_value());
    let end_tol = tol::<T>(1e-12) * scale.max(T::one());
    if f.eval(T::zero()).abs() > end_tol || f.eval(T::one()).abs() > end_tol {
        return Err(Error::HypothesisHViolated(format!("{}: f(0) and f(1) must vanish", spec.name)));
    }
    let root_tol: T = tol(1e-12);
    let interior = &vals[1..grid_size];
    let interior_x = &xs[1..grid_size];

    let leading_zero = f.leading_zero_pieces();
    let (type_label, alpha) = if leading_zero > 0 {
        if leading_zero == f.pieces().len() {
            return Err(Error::NotClassifiable(format!("{}: f vanishes identically", spec.name)));
        }
        let alpha = f.breaks()[leading_zero];
        let positive_after = interior_x.iter().zip(interior).filter(|(&s, _)| s > alpha).all(|(_, &v)| v > T::zero());
        if !positive_after {
            return Err(Error::NotClassifiable(format!("{}: zero on [0, α] but not positive on (α, 1)", spec.name)));
        }
        (ReactionType::B, Some(alpha))
    } else if interior.iter().all(|&v| v > T::zero()) {
        (ReactionType::A, None)
    } else {
        // one sign change from negative to positive, zeros only at the crossing
        let first_pos = interior.iter().position(|&v| v > T::zero());
        let last_neg = interior.iter().rposition(|&v| v < T::zero());
        match (last_neg, first_pos) {
            (Some(ln), Some(fp))
                if ln < fp
                    && interior[..=ln].iter().all(|&v| v < T::zero())
                    && interior[fp..].iter().all(|&v| v > T::zero()) =>
            {
                let alpha = bisect(|s| f.eval(s), interior_x[ln], interior_x[fp], root_tol)
                    .expect("sign change brackets a root");
                (ReactionType::C, Some(alpha))
            }
            _ => {
                return Err(Error::NotClassifiable(format!(
                    "{}: sign pattern on (0, 1) matches none of types A, B, C",
                    spec.name
                )))
            }
        }
    };

    let f1 = f.integral(T::one());
    let balance_tol = tol::<T>(1e-12) * scale.max(T::one());
    let balanced = type_label == ReactionType::C && f1.abs() <= balance_tol;
    if type_label == ReactionType::C && !balanced && f1 < T::zero() {
        return Err(Error::NotClassifiable(format!(
            "{}: sign change with F(1) < 0 (bistable terms must satisfy F(1) ≥ 0)",
            spec.name
        )));
    }

    let fprime0 = f.deriv_at_zero();
    let fprime1 = f.deriv_at_one();
    let mut k = fprime0.abs().max(fprime1.abs());
    for (&s, &v) in interior_x.iter().zip(interior) {
        k = k.max(v.abs() / s).max(v.abs() / (T::one() - s));
    }
    if !k.is_finite() {
        return Err(Error::HypothesisHViolated(format!("{}: no finite linear control", spec.name)));
    }
    let k = k * (T::one() + lit(1e-9));

    let (v_max, f_max) = grid_max(|s| f.eval(s), T::zero(), T::one(), grid_size);

    let g = |v: T| f.integral(v) - v * f.eval(v);
    let h = T::one() / lit(grid_size as f64);
    let g_lo = match alpha {
        Some(a) if type_label == ReactionType::B => a + h,
        _ => h,
    };
    let v_plus = scan_roots(g, g_lo, T::one(), grid_size, root_tol)
        .into_iter()
        .filter(|&r| r > T::zero() && r < T::one())
        .last();

    let v_star = match (type_label, alpha) {
        (ReactionType::C, Some(a)) => {
            if balanced {
                Some(T::one())
            } else {
                bisect(|v| f.integral(v), a, T::one(), root_tol)
            }
        }
        _ => None,
    };

    let kpp = type_label == ReactionType::A
        && xs.iter().all(|&s| f.eval(s) - fprime0 * s <= tol::<T>(1e-12) * scale.max(T::one()));

    let mut maxima = 0usize;
    for i in 1..grid_size {
        if vals[i] > vals[i - 1] && vals[i] >= vals[i + 1] {
            maxima += 1;
        }
    }

    Ok(ReactionCalculus {
        name: spec.name.clone(),
        type_label,
        alpha,
        k,
        f1: if balanced { T::zero() } else { f1 },
        fprime0: Some(fprime0),
        fprime1,
        f_max,
        v_max,
        v_plus,
        v_star,
        balanced,
        kpp,
        assumption_f: maxima == 1,
        grid_size,
        f,
    })
}

/// Quantities whose supremum over `v ∈ (0, 1]` the speed bounds need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ratio<T> {
    /// `F(v) / v`
    BigFOverV,
    /// `F(v) / v²`
    BigFOverVSquared,
    /// `f(v) / v`
    SmallFOverV,
    /// `b²F²/(a²v²) + 2F/(a v²)`, the radicand of the type A lower bound
    StimaaLower { a: T, b: T },
    /// `b f/a + 2 √(f/(a v))`, the type A upper bound integrand
    StimaaUpper { a: T, b: T },
}

impl<T: Scalar> ReactionCalculus<T> {
    /// `f(v)` without domain checking.
    #[inline]
    pub fn f(&self, v: T) -> T {
        self.f.eval(v)
    }

    /// `F(v)` without domain checking.
    #[inline]
    pub fn big_f(&self, v: T) -> T {
        self.f.integral(v)
    }

    /// `f(v) / v`, exact near 0.
    #[inline]
    pub fn f_over_v(&self, v: T) -> T {
        self.f.over_x(v)
    }

    #[inline]
    pub fn df(&self, v: T) -> T {
        self.f.deriv(v)
    }

    pub fn alpha_or_half(&self) -> T {
        self.alpha.unwrap_or_else(|| lit(0.5))
    }

    /// Normalization value `v(0)`: 1/2 for type A, α otherwise.
    pub fn normalization(&self) -> T {
        self.alpha_or_half()
    }

    pub fn polynomial_pieces(&self) -> &PiecewisePolynomial<T> {
        &self.f
    }

    fn ratio_value(&self, r: Ratio<T>, v: T) -> T {
        let two: T = lit(2.0);
        match r {
            Ratio::BigFOverV => self.big_f(v) / v,
            Ratio::BigFOverVSquared => self.big_f(v) / (v * v),
            Ratio::SmallFOverV => self.f_over_v(v),
            Ratio::StimaaLower { a, b } => {
                let q = self.big_f(v) / v;
                b * b * q * q / (a * a) + two * self.big_f(v) / (a * v * v)
            }
            Ratio::StimaaUpper { a, b } => b * self.f(v) / a + two * (self.f_over_v(v).max(T::zero()) / a).sqrt(),
        }
    }

    fn ratio_limit_at_zero(&self, r: Ratio<T>) -> Option<T> {
        let d = self.fprime0?;
        let two: T = lit(2.0);
        Some(match r {
            Ratio::BigFOverV => T::zero(),
            Ratio::BigFOverVSquared => d / two,
            Ratio::SmallFOverV => d,
            Ratio::StimaaLower { a, .. } => d / a,
            Ratio::StimaaUpper { a, .. } => two * (d.max(T::zero()) / a).sqrt(),
        })
    }

    /// Supremum over `(0, 1]` and an argmax (0 when attained as the limit at 0⁺).
    pub fn sup_ratio(&self, r: Ratio<T>) -> Result<(T, T)> {
        let h = T::one() / lit(self.grid_size as f64);
        let (mut arg, mut sup) = grid_max(|v| self.ratio_value(r, v), h, T::one(), self.grid_size);
        match self.ratio_limit_at_zero(r) {
            Some(lim) => {
                if lim >= sup {
                    sup = lim;
                    arg = T::zero();
                }
            }
            None => {
                let near = self.ratio_value(r, h * lit(1e-6));
                if !near.is_finite() || near > sup * lit(1e3) {
                    return Err(Error::Unbounded);
                }
            }
        }
        if !sup.is_finite() {
            return Err(Error::Unbounded);
        }
        Ok((sup, arg))
    }

    fn check_domain(v: T) -> Result<()> {
        if v >= T::zero() && v <= T::one() {
            Ok(())
        } else {
            Err(Error::DomainError(format!("v = {v} outside [0, 1]")))
        }
    }
}

pub fn eval_f<T: Scalar>(calc: &ReactionCalculus<T>, v: T) -> Result<T> {
    ReactionCalculus::<T>::check_domain(v)?;
    Ok(calc.f(v))
}

pub fn eval_big_f<T: Scalar>(calc: &ReactionCalculus<T>, v: T) -> Result<T> {
    ReactionCalculus::<T>::check_domain(v)?;
    Ok(calc.big_f(v))
}

pub fn sup_ratio<T: Scalar>(calc: &ReactionCalculus<T>, r: Ratio<T>) -> Result<(T, T)> {
    calc.sup_ratio(r)
}
