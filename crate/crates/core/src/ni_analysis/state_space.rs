use nalgebra::{Complex, DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Distance from an eigenvalue of `A` at which `jw` counts as a pole.
pub const POLE_TOL: f64 = 1e-10;

/// Real LTI realization `x' = Ax + Bu`, `y = Cx + Du` with as many outputs
/// as inputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateSpace {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    c: DMatrix<f64>,
    d: DMatrix<f64>,
}

impl StateSpace {
    pub fn new(
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        c: DMatrix<f64>,
        d: DMatrix<f64>,
    ) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "A is {}x{}, expected square",
                n,
                a.ncols()
            )));
        }
        let m = b.ncols();
        if b.nrows() != n {
            return Err(Error::DimensionMismatch(format!(
                "B has {} rows, A has {}",
                b.nrows(),
                n
            )));
        }
        if c.shape() != (m, n) {
            return Err(Error::DimensionMismatch(format!(
                "C is {:?}, expected ({m}, {n})",
                c.shape()
            )));
        }
        if d.shape() != (m, m) {
            return Err(Error::DimensionMismatch(format!(
                "D is {:?}, expected ({m}, {m})",
                d.shape()
            )));
        }
        Ok(Self { a, b, c, d })
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }
    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }
    pub fn c(&self) -> &DMatrix<f64> {
        &self.c
    }
    pub fn d(&self) -> &DMatrix<f64> {
        &self.d
    }

    pub fn states(&self) -> usize {
        self.a.nrows()
    }

    /// Number of inputs (equal to the number of outputs).
    pub fn ports(&self) -> usize {
        self.b.ncols()
    }

    pub fn poles(&self) -> DVector<C64> {
        if self.states() == 0 {
            return DVector::zeros(0);
        }
        self.a.complex_eigenvalues()
    }

    /// `(T A T^-1, T B, C T^-1, D)`. Returns `None` when `t` is singular.
    pub fn similarity(&self, t: &DMatrix<f64>) -> Option<Self> {
        let t_inv = t.clone().try_inverse()?;
        Some(Self {
            a: t * &self.a * &t_inv,
            b: t * &self.b,
            c: &self.c * &t_inv,
            d: self.d.clone(),
        })
    }

    /// `G(s) = C (sI - A)^-1 B + D` at an arbitrary complex point, with no
    /// pole-proximity check.
    pub fn evaluate_at(&self, s: C64) -> Option<DMatrix<C64>> {
        let n = self.states();
        let cplx = |m: &DMatrix<f64>| m.map(|v| C64::new(v, 0.0));
        let d = cplx(&self.d);
        if n == 0 {
            return Some(d);
        }
        let resolvent = DMatrix::<C64>::identity(n, n) * s - cplx(&self.a);
        let x = resolvent.lu().solve(&cplx(&self.b))?;
        Some(cplx(&self.c) * x + d)
    }
}

/// Frequency response `G(jw)` for `w > 0`, computed with an LU solve.
pub fn transfer_eval(ss: &StateSpace, omega: f64) -> Result<DMatrix<C64>> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::InvalidParameter {
            name: "omega",
            reason: format!("must be finite and > 0, got {omega}"),
        });
    }
    let s = C64::new(0.0, omega);
    let distance = ss
        .poles()
        .iter()
        .map(|p| (p - s).norm())
        .fold(f64::INFINITY, f64::min);
    if distance < POLE_TOL {
        return Err(Error::Singular { omega, distance });
    }
    ss.evaluate_at(s).ok_or(Error::Singular { omega, distance })
}

/// Steady-state gain `D - C A^-1 B`; `None` when `A` is singular.
pub fn dc_gain(ss: &StateSpace) -> Option<DMatrix<f64>> {
    if ss.states() == 0 {
        return Some(ss.d.clone());
    }
    let x = ss.a.clone().lu().solve(&ss.b)?;
    Some(&ss.d - &ss.c * x)
}

/// Rank of `[C; CA; ...; CA^(n-1)]`.
pub fn observability_rank(ss: &StateSpace) -> usize {
    let n = ss.states();
    let p = ss.c.nrows();
    let mut obs = DMatrix::<f64>::zeros(n * p, n);
    let mut block = ss.c.clone();
    for k in 0..n {
        obs.view_mut((k * p, 0), (p, n)).copy_from(&block);
        block = &block * &ss.a;
    }
    let scale = obs.abs().max().max(1.0);
    obs.rank(1e-10 * scale)
}
