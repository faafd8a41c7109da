//! Derivative-free kernels used as independent cross-checks: a brute-force
//! grid supremum for convex conjugates, golden-section search and bisection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Tensor grid for [`legendre_oracle`].
///
/// The coarse pass scans `points` nodes per dimension on `[lo, hi]`. Each
/// refinement pass rescans a window of two coarse steps around the current
/// argmax with `refine_points` nodes per dimension. The error of the coarse
/// pass is `O(step² · curvature)`; every refinement divides the step by
/// roughly `refine_points / 4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub refine_points: usize,
    pub refinements: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            lo: -20.0,
            hi: 20.0,
            points: 4001,
            refine_points: 41,
            refinements: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleValue<T> {
    pub value: T,
    pub argmax: Vec<T>,
}

/// One scan of `slope·x − f(x)` on a tensor grid; returns (value, argmax, on_boundary).
fn scan<T: Scalar>(
    f: &impl Fn(&[T]) -> T,
    slope: &[T],
    lo: &[T],
    hi: &[T],
    points: usize,
) -> (T, Vec<T>, bool) {
    let dims = slope.len();
    let steps: Vec<T> = (0..dims)
        .map(|d| (hi[d] - lo[d]) / T::count(points - 1))
        .collect();
    let node = |d: usize, k: usize| lo[d] + steps[d] * T::count(k);
    let mut best = (T::neg_infinity(), vec![0usize; dims]);
    let mut idx = vec![0usize; dims];
    let mut x = vec![T::zero(); dims];
    loop {
        for d in 0..dims {
            x[d] = node(d, idx[d]);
        }
        let obj = slope.iter().zip(&x).map(|(&s, &xi)| s * xi).sum::<T>() - f(&x);
        if obj > best.0 {
            best = (obj, idx.clone());
        }
        // odometer increment
        let mut d = 0;
        loop {
            if d == dims {
                let on_boundary = best.1.iter().any(|&k| k == 0 || k == points - 1);
                let argmax = (0..dims).map(|dd| node(dd, best.1[dd])).collect();
                return (best.0, argmax, on_boundary);
            }
            idx[d] += 1;
            if idx[d] < points {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// Brute-force `sup_x {⟨slope, x⟩ − f(x)}` over a tensor grid, `dims ≤ 2`.
///
/// Returns [`Error::RangeClipped`] if the coarse argmax sits on the boundary
/// of the grid, which signals that the supremum lies outside the range (or
/// is infinite).
pub fn legendre_oracle<T: Scalar>(
    f: impl Fn(&[T]) -> T,
    slope: &[T],
    grid: &GridSpec,
) -> Result<OracleValue<T>> {
    let dims = slope.len();
    if !(1..=2).contains(&dims) {
        return Err(Error::InvalidArgument(format!(
            "grid oracle supports 1 or 2 dimensions, got {dims}"
        )));
    }
    if grid.points < 3 || !(grid.hi > grid.lo) {
        return Err(Error::InvalidArgument("degenerate grid".into()));
    }
    let lo = vec![T::lit(grid.lo); dims];
    let hi = vec![T::lit(grid.hi); dims];
    let (mut value, mut argmax, clipped) = scan(&f, slope, &lo, &hi, grid.points);
    if clipped {
        return Err(Error::RangeClipped);
    }
    let mut half_width = T::lit(2.0) * (T::lit(grid.hi) - T::lit(grid.lo)) / T::count(grid.points - 1);
    let rp = grid.refine_points.max(3);
    for _ in 0..grid.refinements {
        let lo: Vec<T> = argmax.iter().map(|&c| c - half_width).collect();
        let hi: Vec<T> = argmax.iter().map(|&c| c + half_width).collect();
        let (v, a, _) = scan(&f, slope, &lo, &hi, rp);
        if v >= value {
            value = v;
            argmax = a;
        }
        half_width = T::lit(2.0) * (half_width + half_width) / T::count(rp - 1);
    }
    Ok(OracleValue { value, argmax })
}

/// Golden-section minimisation of a unimodal function on `[lo, hi]`.
/// Returns `(argmin, min)`.
pub fn golden_section<T: Scalar>(f: impl Fn(T) -> T, lo: T, hi: T, tol: T) -> (T, T) {
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..500 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = (a + b) / T::lit(2.0);
    (x, f(x))
}

/// Bisection for a sign change of `g` on `[lo, hi]`, down to interval width `tol`
/// (or until the midpoint no longer moves).
pub fn bisect<T: Scalar>(g: impl Fn(T) -> T, lo: T, hi: T, tol: T) -> Result<T> {
    let (mut a, mut b) = (lo, hi);
    let (ga, gb) = (g(a), g(b));
    if ga == T::zero() {
        return Ok(a);
    }
    if gb == T::zero() {
        return Ok(b);
    }
    if ga.signum() == gb.signum() {
        return Err(Error::InvalidArgument("bisection bracket has no sign change".into()));
    }
    let mut ga = ga;
    for _ in 0..400 {
        let m = (a + b) / T::lit(2.0);
        if (b - a).abs() <= tol || m == a || m == b {
            return Ok(m);
        }
        let gm = g(m);
        if gm == T::zero() {
            return Ok(m);
        }
        if gm.signum() == ga.signum() {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    Ok((a + b) / T::lit(2.0))
}
