use crate::error::{LabError, Result};
use crate::scalar::{count, lit, Scalar};

const ORDER: usize = 20;
const MAX_DEPTH: usize = 30;
const MAX_INTERVALS: usize = 100_000;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, from Newton iteration on `P_n`.
pub fn gauss_legendre<T: Scalar>(n: usize) -> (Vec<T>, Vec<T>) {
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let nt = count::<T>(n);
    for i in 0..n.div_ceil(2) {
        let mut x = (T::PI() * (count::<T>(i) + lit(0.75)) / (nt + lit(0.5))).cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let (mut p0, mut p1) = (T::one(), x);
            for k in 2..=n {
                let kt = count::<T>(k);
                let p2 = ((lit::<T>(2.0) * kt - T::one()) * x * p1 - (kt - T::one()) * p0) / kt;
                p0 = p1;
                p1 = p2;
            }
            dp = nt * (x * p1 - p0) / (x * x - T::one());
            let step = p1 / dp;
            x = x - step;
            if step.abs() <= T::epsilon() {
                break;
            }
        }
        let w = lit::<T>(2.0) / ((T::one() - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Adaptive Gauss-Legendre integration of a smooth `f` on `[a, b]`.
///
/// Intervals are bisected until the two-halves estimate agrees with the
/// whole-interval one within their share of `tol * |integral|`. Round-off
/// sets a floor on that budget, and the number of intervals is capped.
pub fn integrate<T: Scalar, F: Fn(T) -> T>(f: F, a: T, b: T, tol: T) -> Result<T> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(LabError::NonFinite("integration bounds".into()));
    }
    if a == b {
        return Ok(T::zero());
    }
    let (nodes, weights) = gauss_legendre::<T>(ORDER);
    let rule = |lo: T, hi: T| {
        let (c, h) = ((lo + hi) / lit(2.0), (hi - lo) / lit(2.0));
        nodes.iter().zip(&weights).map(|(x, w)| *w * f(c + h * *x)).sum::<T>() * h
    };
    let root = rule(a, b);
    if !root.is_finite() {
        return Err(LabError::NonFinite("integrand".into()));
    }
    let span = (b - a).abs();
    let budget = (tol.max(lit::<T>(16.0) * T::epsilon())) * root.abs();
    let mut total = T::zero();
    let mut intervals = 0usize;
    let mut stack = vec![(a, b, root, 0usize)];
    while let Some((lo, hi, whole, depth)) = stack.pop() {
        let mid = (lo + hi) / lit(2.0);
        let (left, right) = (rule(lo, mid), rule(mid, hi));
        let split = left + right;
        if !split.is_finite() {
            return Err(LabError::NonFinite("integrand".into()));
        }
        intervals += 1;
        let share = budget * (hi - lo).abs() / span;
        if (split - whole).abs() <= share || depth >= MAX_DEPTH || intervals >= MAX_INTERVALS {
            total = total + split;
        } else {
            stack.push((lo, mid, left, depth + 1));
            stack.push((mid, hi, right, depth + 1));
        }
    }
    Ok(total)
}
