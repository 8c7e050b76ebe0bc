//! Dense polynomials and piecewise polynomials on `[0, 1]`.

use crate::scalar::{lit, Scalar};

/// Polynomial with coefficients stored lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Polynomial<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&T::zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(T::zero());
        }
        Self { coeffs }
    }

    pub fn from_f64(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| lit(c)).collect())
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn eval(&self, x: T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * x + c)
    }

    pub fn deriv(&self) -> Self {
        let d = self.coeffs.iter().enumerate().skip(1).map(|(i, &c)| c * lit(i as f64)).collect();
        Self::new(d)
    }

    /// Antiderivative vanishing at 0.
    pub fn integ(&self) -> Self {
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(T::zero());
        for (i, &c) in self.coeffs.iter().enumerate() {
            out.push(c / lit((i + 1) as f64));
        }
        Self::new(out)
    }

    /// `p(x) / x` for a polynomial with `p(0) = 0`, by shifting coefficients.
    /// The constant term is dropped whatever its value.
    pub fn shift_down(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::new(vec![T::zero()]);
        }
        Self::new(self.coeffs[1..].to_vec())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j] + a * b;
            }
        }
        Self::new(out)
    }
}

/// Piecewise polynomial on `[0, 1]`; piece `i` acts on `[breaks[i], breaks[i + 1]]`
/// in the absolute variable. The antiderivative is continuous with value 0 at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePolynomial<T> {
    breaks: Vec<T>,
    pieces: Vec<Polynomial<T>>,
    derivs: Vec<Polynomial<T>>,
    antiderivs: Vec<Polynomial<T>>,
    offsets: Vec<T>,
    first_shifted: Polynomial<T>,
}

impl<T: Scalar> PiecewisePolynomial<T> {
    /// `breaks` must start at 0, end at 1 and be strictly increasing,
    /// with one fewer piece than breaks.
    pub fn new(breaks: Vec<T>, pieces: Vec<Polynomial<T>>) -> Option<Self> {
        if breaks.len() != pieces.len() + 1 || pieces.is_empty() {
            return None;
        }
        if breaks[0] != T::zero() || *breaks.last()? != T::one() {
            return None;
        }
        if breaks.windows(2).any(|w| w[1] <= w[0]) {
            return None;
        }
        let derivs: Vec<_> = pieces.iter().map(|p| p.deriv()).collect();
        let antiderivs: Vec<_> = pieces.iter().map(|p| p.integ()).collect();
        let mut offsets = Vec::with_capacity(pieces.len());
        let mut acc = T::zero();
        for (i, q) in antiderivs.iter().enumerate() {
            // offset makes F continuous: F(x) = acc + Q(x) - Q(break_i)
            let off = acc - q.eval(breaks[i]);
            offsets.push(off);
            acc = off + q.eval(breaks[i + 1]);
        }
        let first_shifted = pieces[0].shift_down();
        Some(Self { breaks, pieces, derivs, antiderivs, offsets, first_shifted })
    }

    pub fn single(p: Polynomial<T>) -> Self {
        Self::new(vec![T::zero(), T::one()], vec![p]).expect("single piece is valid")
    }

    pub fn breaks(&self) -> &[T] {
        &self.breaks
    }

    pub fn pieces(&self) -> &[Polynomial<T>] {
        &self.pieces
    }

    fn piece_index(&self, x: T) -> usize {
        let n = self.pieces.len();
        // right-continuous except at 1
        match self.breaks[1..n].iter().position(|&b| x < b) {
            Some(i) => i,
            None => n - 1,
        }
    }

    pub fn eval(&self, x: T) -> T {
        self.pieces[self.piece_index(x)].eval(x)
    }

    pub fn deriv(&self, x: T) -> T {
        self.derivs[self.piece_index(x)].eval(x)
    }

    pub fn integral(&self, x: T) -> T {
        let i = self.piece_index(x);
        self.offsets[i] + self.antiderivs[i].eval(x)
    }

    /// `f(x) / x`, exact for `x` in the first piece.
    pub fn over_x(&self, x: T) -> T {
        if x < self.breaks[1] {
            self.first_shifted.eval(x)
        } else {
            self.eval(x) / x
        }
    }

    /// Right derivative at 0.
    pub fn deriv_at_zero(&self) -> T {
        self.derivs[0].eval(T::zero())
    }

    /// Left derivative at 1.
    pub fn deriv_at_one(&self) -> T {
        self.derivs[self.pieces.len() - 1].eval(T::one())
    }

    /// Index of the last leading piece that vanishes identically, if any.
    pub fn leading_zero_pieces(&self) -> usize {
        self.pieces.iter().take_while(|p| p.is_zero()).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn horner_and_calculus() {
        let p = Polynomial::<f64>::from_f64(&[0.0, 1.0, -1.0]);
        assert_relative_eq!(p.eval(0.5), 0.25);
        assert_relative_eq!(p.deriv().eval(0.5), 0.0);
        assert_relative_eq!(p.integ().eval(1.0), 1.0 / 6.0, epsilon = 1e-15);
        assert_relative_eq!(p.shift_down().eval(0.3), 0.7);
    }

    #[test]
    fn trailing_zeros_trimmed() {
        let p = Polynomial::<f64>::from_f64(&[1.0, 0.0, 0.0]);
        assert_eq!(p.coeffs().len(), 1);
    }

    #[test]
    fn piecewise_antiderivative_is_continuous() {
        let alpha = 0.3;
        let tail = Polynomial::from_f64(&[-alpha, 1.0]).mul(&Polynomial::from_f64(&[1.0, -1.0]));
        let pw = PiecewisePolynomial::new(vec![0.0, alpha, 1.0], vec![Polynomial::from_f64(&[0.0]), tail]).unwrap();
        assert_eq!(pw.integral(0.2), 0.0);
        assert!(pw.integral(alpha).abs() < 1e-16);
        // (1 - alpha)^3 / 6
        assert_relative_eq!(pw.integral(1.0), 0.7f64.powi(3) / 6.0, epsilon = 1e-14);
        assert_eq!(pw.leading_zero_pieces(), 1);
    }

    #[test]
    fn rejects_bad_breaks() {
        let p = Polynomial::<f64>::from_f64(&[0.0]);
        assert!(PiecewisePolynomial::new(vec![0.0, 0.5], vec![p.clone()]).is_none());
        assert!(PiecewisePolynomial::new(vec![0.0, 0.6, 0.5, 1.0], vec![p.clone(), p.clone(), p]).is_none());
    }
}
