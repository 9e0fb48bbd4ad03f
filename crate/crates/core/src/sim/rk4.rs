use nalgebra::SVector;

use crate::error::{Error, Result};

/// One classical fourth-order Runge-Kutta step of `x' = f(t, x)`.
///
/// The vector field may fail (e.g. an attitude request out of range); the
/// error is propagated unchanged. A non-finite stage yields
/// [`Error::NonFinite`].
pub fn rk4_step<const N: usize, F>(
    f: F,
    state: &SVector<f64, N>,
    t: f64,
    dt: f64,
) -> Result<SVector<f64, N>>
where
    F: Fn(f64, &SVector<f64, N>) -> Result<SVector<f64, N>>,
{
    let check = |k: SVector<f64, N>, at: f64| {
        if k.iter().all(|v| v.is_finite()) {
            Ok(k)
        } else {
            Err(Error::NonFinite { t: at })
        }
    };
    let half = 0.5 * dt;
    let k1 = check(f(t, state)?, t)?;
    let k2 = check(f(t + half, &(state + k1 * half))?, t + half)?;
    let k3 = check(f(t + half, &(state + k2 * half))?, t + half)?;
    let k4 = check(f(t + dt, &(state + k3 * dt))?, t + dt)?;
    let next = state + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    check(next, t + dt)
}
