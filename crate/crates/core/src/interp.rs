//! Piecewise cubic Hermite interpolation on strictly increasing nodes.

use crate::scalar::{lit, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct Hermite<T> {
    xs: Vec<T>,
    ys: Vec<T>,
    ds: Vec<T>,
}

impl<T: Scalar> Hermite<T> {
    /// Interpolant through `(xs, ys)` with prescribed slopes `ds`.
    /// Returns `None` unless `xs` is strictly increasing with at least two nodes.
    pub fn with_slopes(xs: Vec<T>, ys: Vec<T>, ds: Vec<T>) -> Option<Self> {
        if xs.len() < 2 || xs.len() != ys.len() || xs.len() != ds.len() {
            return None;
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return None;
        }
        Some(Self { xs, ys, ds })
    }

    /// Shape-preserving (Fritsch–Carlson) interpolant: monotone data stay monotone.
    pub fn monotone(xs: Vec<T>, ys: Vec<T>) -> Option<Self> {
        let n = xs.len();
        if n < 2 || ys.len() != n {
            return None;
        }
        let mut delta = Vec::with_capacity(n - 1);
        for i in 0..n - 1 {
            let h = xs[i + 1] - xs[i];
            if h <= T::zero() {
                return None;
            }
            delta.push((ys[i + 1] - ys[i]) / h);
        }
        let mut ds = vec![T::zero(); n];
        ds[0] = delta[0];
        ds[n - 1] = delta[n - 2];
        for i in 1..n - 1 {
            if delta[i - 1] * delta[i] > T::zero() {
                let h0 = xs[i] - xs[i - 1];
                let h1 = xs[i + 1] - xs[i];
                let w1 = lit::<T>(2.0) * h1 + h0;
                let w2 = h1 + lit::<T>(2.0) * h0;
                ds[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        Self::with_slopes(xs, ys, ds)
    }

    pub fn xs(&self) -> &[T] {
        &self.xs
    }

    pub fn ys(&self) -> &[T] {
        &self.ys
    }

    pub fn domain(&self) -> (T, T) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    fn segment(&self, x: T) -> usize {
        let n = self.xs.len();
        match self.xs.binary_search_by(|p| p.partial_cmp(&x).unwrap_or(std::cmp::Ordering::Less)) {
            Ok(i) => i.min(n - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(n - 2),
        }
    }

    /// Value and derivative at `x`; clamps to the end nodes outside the domain.
    pub fn eval_with_slope(&self, x: T) -> (T, T) {
        let (lo, hi) = self.domain();
        if x <= lo {
            return (self.ys[0], self.ds[0]);
        }
        if x >= hi {
            let n = self.xs.len();
            return (self.ys[n - 1], self.ds[n - 1]);
        }
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let s = (x - self.xs[i]) / h;
        let two: T = lit(2.0);
        let three: T = lit(3.0);
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = two * s3 - three * s2 + T::one();
        let h10 = s3 - two * s2 + s;
        let h01 = three * s2 - two * s3;
        let h11 = s3 - s2;
        let (y0, y1, d0, d1) = (self.ys[i], self.ys[i + 1], self.ds[i] * h, self.ds[i + 1] * h);
        let val = h00 * y0 + h10 * d0 + h01 * y1 + h11 * d1;
        let six: T = lit(6.0);
        let four: T = lit(4.0);
        let dh00 = six * s2 - six * s;
        let dh10 = three * s2 - four * s + T::one();
        let dh01 = six * s - six * s2;
        let dh11 = three * s2 - two * s;
        let der = (dh00 * y0 + dh10 * d0 + dh01 * y1 + dh11 * d1) / h;
        (val, der)
    }

    pub fn eval(&self, x: T) -> T {
        self.eval_with_slope(x).0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_cubics() {
        let f = |x: f64| x * x * x - 2.0 * x + 1.0;
        let df = |x: f64| 3.0 * x * x - 2.0;
        let xs = vec![0.0, 0.3, 1.0, 2.0];
        let h =
            Hermite::with_slopes(xs.clone(), xs.iter().map(|&x| f(x)).collect(), xs.iter().map(|&x| df(x)).collect())
                .unwrap();
        for x in [0.1, 0.5, 1.7] {
            let (v, d) = h.eval_with_slope(x);
            assert!((v - f(x)).abs() < 1e-13);
            assert!((d - df(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn monotone_data_stay_monotone() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| if x < 10.0 { 0.0 } else { 1.0 }).collect();
        let h = Hermite::monotone(xs, ys).unwrap();
        let mut prev = -1.0;
        for i in 0..1900 {
            let v = h.eval(i as f64 * 0.01);
            assert!(v >= prev - 1e-15 && (0.0..=1.0).contains(&v));
            prev = v;
        }
    }
}
