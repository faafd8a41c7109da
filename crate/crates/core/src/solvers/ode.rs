use crate::scalar::Scalar;

/// One classical fourth-order Runge–Kutta step of the autonomous system `y' = f(y)`.
pub fn rk4_step<T: Scalar>(f: impl Fn(&[T]) -> Vec<T>, y: &[T], dt: T) -> Vec<T> {
    let two = T::lit(2.0);
    let six = T::lit(6.0);
    let shift = |base: &[T], k: &[T], s: T| -> Vec<T> {
        base.iter().zip(k).map(|(&b, &ki)| b + s * ki).collect()
    };
    let k1 = f(y);
    let k2 = f(&shift(y, &k1, dt / two));
    let k3 = f(&shift(y, &k2, dt / two));
    let k4 = f(&shift(y, &k3, dt));
    (0..y.len())
        .map(|i| y[i] + dt / six * (k1[i] + two * k2[i] + two * k3[i] + k4[i]))
        .collect()
}
