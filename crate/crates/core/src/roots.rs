//! Bracketing root finders and grid scans.

use crate::scalar::{lit, Scalar};

/// Bisection on a sign change of `f` inside `[lo, hi]`, stopped when the
/// bracket is narrower than `tol`. Returns `None` if the endpoints do not bracket.
pub fn bisect<T: Scalar, F: Fn(T) -> T>(f: F, mut lo: T, mut hi: T, tol: T) -> Option<T> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == T::zero() {
        return Some(lo);
    }
    if fhi == T::zero() {
        return Some(hi);
    }
    if (flo > T::zero()) == (fhi > T::zero()) {
        return None;
    }
    let half: T = lit(0.5);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = (lo + hi) * half;
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == T::zero() {
            return Some(mid);
        }
        if (fm > T::zero()) == (flo > T::zero()) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some((lo + hi) * half)
}

/// Smallest point of `[lo, hi]` where the monotone predicate becomes true,
/// assuming `pred(lo)` is false and `pred(hi)` is true.
pub fn bisect_predicate<T: Scalar, P: FnMut(T) -> bool>(mut pred: P, mut lo: T, mut hi: T, tol: T) -> (T, T) {
    let half: T = lit(0.5);
    while hi - lo > tol {
        let mid = (lo + hi) * half;
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

/// Uniform grid of `n + 1` points on `[lo, hi]`.
pub fn grid<T: Scalar>(lo: T, hi: T, n: usize) -> Vec<T> {
    let nn: T = lit(n as f64);
    (0..=n).map(|i| lo + (hi - lo) * lit::<T>(i as f64) / nn).collect()
}

/// All roots of `f` on `[lo, hi]` found by scanning `n` cells for sign changes and
/// refining each by bisection. Returned in increasing order.
pub fn scan_roots<T: Scalar, F: Fn(T) -> T>(f: F, lo: T, hi: T, n: usize, tol: T) -> Vec<T> {
    let xs = grid(lo, hi, n);
    let vals: Vec<T> = xs.iter().map(|&x| f(x)).collect();
    let mut roots = Vec::new();
    for i in 0..n {
        let (a, b) = (vals[i], vals[i + 1]);
        if a == T::zero() {
            if roots.last() != Some(&xs[i]) {
                roots.push(xs[i]);
            }
            continue;
        }
        if b != T::zero() && (a > T::zero()) != (b > T::zero()) {
            if let Some(r) = bisect(&f, xs[i], xs[i + 1], tol) {
                roots.push(r);
            }
        }
    }
    if vals[n] == T::zero() {
        roots.push(xs[n]);
    }
    roots
}

/// Golden-section maximization of a unimodal function on `[lo, hi]`.
pub fn golden_max<T: Scalar, F: Fn(T) -> T>(f: F, mut lo: T, mut hi: T, tol: T) -> (T, T) {
    let invphi: T = lit(0.618_033_988_749_894_9);
    let mut x1 = hi - invphi * (hi - lo);
    let mut x2 = lo + invphi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Maximum of `f` over `[lo, hi]`: grid scan with `n` cells, then golden-section
/// refinement around the best node. Non-finite samples are skipped.
pub fn grid_max<T: Scalar, F: Fn(T) -> T>(f: F, lo: T, hi: T, n: usize) -> (T, T) {
    let xs = grid(lo, hi, n);
    let mut best = 0usize;
    let mut best_val = T::neg_infinity();
    for (i, &x) in xs.iter().enumerate() {
        let v = f(x);
        if v.is_finite() && v > best_val {
            best_val = v;
            best = i;
        }
    }
    if !best_val.is_finite() {
        return (xs[0], best_val);
    }
    let a = xs[best.saturating_sub(1)];
    let b = xs[(best + 1).min(n)];
    let (x, v) = golden_max(&f, a, b, T::epsilon().sqrt() * (b - a).max(T::epsilon()));
    if v.is_finite() && v > best_val {
        (x, v)
    } else {
        (xs[best], best_val)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_sqrt2() {
        let r = bisect(|x: f64| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn bisect_requires_bracket() {
        assert!(bisect(|x: f64| x * x + 1.0, -1.0, 1.0, 1e-12).is_none());
    }

    #[test]
    fn scan_finds_all_roots() {
        let roots = scan_roots(|x: f64| (x - 0.2) * (x - 0.5) * (x - 0.9), 0.0, 1.0, 1000, 1e-13);
        assert_eq!(roots.len(), 3);
        for (r, e) in roots.iter().zip([0.2, 0.5, 0.9]) {
            assert!((r - e).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_max_refines() {
        let (x, v) = grid_max(|x: f64| -(x - 0.123_456_7).powi(2), 0.0, 1.0, 100);
        assert!((x - 0.123_456_7).abs() < 1e-6);
        assert!(v <= 0.0 && v > -1e-12);
    }

    #[test]
    fn predicate_bisection() {
        let (lo, hi) = bisect_predicate(|x: f64| x >= 0.3, 0.0, 1.0, 1e-10);
        assert!(lo < 0.3 && hi >= 0.3 && hi - lo <= 1e-10);
    }
}
