//! Elementary functions with cancellation control.

use crate::scalar::Scalar;

/// Inverse hyperbolic sine, `sign(x)·log(|x| + √(x²+1))`, with a series
/// branch for `|x| < 1e-4` and an asymptotic branch for large `|x|`.
pub fn arsinh<T: Scalar>(x: T) -> T {
    let ax = x.abs();
    if ax < T::lit(1e-4) {
        // x − x³/6 + 3x⁵/40
        let x2 = x * x;
        return x * (T::one() - x2 / T::lit(6.0) + T::lit(3.0) * x2 * x2 / T::lit(40.0));
    }
    let r = if ax > T::lit(1e8) {
        ax.ln() + T::LN_2()
    } else {
        // log1p form keeps relative accuracy for moderate x
        let s = (ax * ax + T::one()).sqrt();
        (ax + ax * ax / (T::one() + s)).ln_1p()
    };
    r.copysign(x)
}

/// `cosh(x) − 1` without cancellation near zero.
pub fn cosh_m1<T: Scalar>(x: T) -> T {
    let h = (x / T::lit(2.0)).sinh();
    T::lit(2.0) * h * h
}
