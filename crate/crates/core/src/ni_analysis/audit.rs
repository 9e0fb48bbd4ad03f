//! Trajectory-level audit of the dissipation inequality `V' <= y'^T u`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance on the sample spacing.
const SPACING_TOL: f64 = 1e-6;

/// Finite-difference stencil used to estimate `V'` and `y'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DifferenceScheme {
    /// Centered differences on the half-step grid: `(V[k+1] - V[k]) / h`
    /// against `(y[k+1] - y[k]) / h` paired with the averaged input. Yields
    /// one residual per interval.
    #[default]
    Staggered,
    /// Centered differences at the samples, second-order one-sided stencils
    /// at both ends. Yields one residual per sample.
    Nodal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DissipationReport {
    pub scheme: DifferenceScheme,
    pub tol: f64,
    /// Largest signed residual `V' - y'^T u`; positive values violate the
    /// inequality.
    pub max_residual: f64,
    pub max_abs_residual: f64,
    pub residual_times: Vec<f64>,
    pub residual_series: Vec<f64>,
    /// `V(t) - V(0) - int_0^t y'^T u ds` at every sample.
    pub integral_residual_series: Vec<f64>,
    pub max_integral_residual: f64,
    pub violated: bool,
}

/// Audits a sampled trajectory with the default staggered scheme.
pub fn nni_trajectory_audit<S, U, Y>(
    times: &[f64],
    states: &[S],
    inputs: &[U],
    outputs: &[Y],
    storage: impl Fn(&S) -> f64,
    tol: f64,
) -> Result<DissipationReport>
where
    U: AsRef<[f64]>,
    Y: AsRef<[f64]>,
{
    nni_trajectory_audit_with(
        times,
        states,
        inputs,
        outputs,
        storage,
        tol,
        DifferenceScheme::default(),
    )
}

pub fn nni_trajectory_audit_with<S, U, Y>(
    times: &[f64],
    states: &[S],
    inputs: &[U],
    outputs: &[Y],
    storage: impl Fn(&S) -> f64,
    tol: f64,
    scheme: DifferenceScheme,
) -> Result<DissipationReport>
where
    U: AsRef<[f64]>,
    Y: AsRef<[f64]>,
{
    let n = times.len();
    if states.len() != n || inputs.len() != n || outputs.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} times, {} states, {} inputs, {} outputs",
            n,
            states.len(),
            inputs.len(),
            outputs.len()
        )));
    }
    if n < 3 {
        return Err(Error::NonUniformSampling(format!(
            "need at least 3 samples, got {n}"
        )));
    }
    let h = times[1] - times[0];
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::NonUniformSampling(format!("first step is {h}")));
    }
    if let Some(k) = times
        .windows(2)
        .position(|w| ((w[1] - w[0]) - h).abs() > SPACING_TOL * h)
    {
        return Err(Error::NonUniformSampling(format!(
            "step {k} is {} but the first step is {h}",
            times[k + 1] - times[k]
        )));
    }
    let width = inputs[0].as_ref().len();
    if inputs.iter().any(|u| u.as_ref().len() != width)
        || outputs.iter().any(|y| y.as_ref().len() != width)
    {
        return Err(Error::DimensionMismatch(
            "inputs and outputs must share one width".into(),
        ));
    }

    let v: Vec<f64> = states.iter().map(&storage).collect();
    let y = |k: usize, i: usize| outputs[k].as_ref()[i];
    let u = |k: usize, i: usize| inputs[k].as_ref()[i];

    let (residual_times, residual_series, integral_residual_series) = match scheme {
        DifferenceScheme::Staggered => {
            let mut rt = Vec::with_capacity(n - 1);
            let mut rs = Vec::with_capacity(n - 1);
            let mut integral = Vec::with_capacity(n);
            integral.push(0.0);
            let mut supplied = 0.0;
            for k in 0..n - 1 {
                let mut power = 0.0;
                for i in 0..width {
                    power += (y(k + 1, i) - y(k, i)) * 0.5 * (u(k, i) + u(k + 1, i));
                }
                supplied += power;
                rt.push(0.5 * (times[k] + times[k + 1]));
                rs.push((v[k + 1] - v[k] - power) / h);
                integral.push(v[k + 1] - v[0] - supplied);
            }
            (rt, rs, integral)
        }
        DifferenceScheme::Nodal => {
            let deriv = |f: &dyn Fn(usize) -> f64, k: usize| -> f64 {
                if k == 0 {
                    (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2.0 * h)
                } else if k == n - 1 {
                    (3.0 * f(n - 1) - 4.0 * f(n - 2) + f(n - 3)) / (2.0 * h)
                } else {
                    (f(k + 1) - f(k - 1)) / (2.0 * h)
                }
            };
            let power: Vec<f64> = (0..n)
                .map(|k| {
                    (0..width)
                        .map(|i| deriv(&|j| y(j, i), k) * u(k, i))
                        .sum::<f64>()
                })
                .collect();
            let rs: Vec<f64> = (0..n).map(|k| deriv(&|j| v[j], k) - power[k]).collect();
            let mut integral = Vec::with_capacity(n);
            integral.push(0.0);
            let mut supplied = 0.0;
            for k in 1..n {
                supplied += 0.5 * h * (power[k - 1] + power[k]);
                integral.push(v[k] - v[0] - supplied);
            }
            (times.to_vec(), rs, integral)
        }
    };

    let max_residual = residual_series.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let max_abs_residual = residual_series.iter().fold(0.0f64, |a, r| a.max(r.abs()));
    let max_integral_residual = integral_residual_series
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(DissipationReport {
        scheme,
        tol,
        max_residual,
        max_abs_residual,
        residual_times,
        residual_series,
        integral_residual_series,
        max_integral_residual,
        violated: max_residual > tol,
    })
}
