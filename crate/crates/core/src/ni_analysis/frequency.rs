//! Frequency-domain negative-imaginary classification.
//!
//! The NI condition `j (G(jw) - G*(jw)) >= 0` is checked pointwise on a
//! finite grid of strictly positive frequencies. A grid verdict is a sampling
//! argument: it cannot rule out a violation between grid points, so every
//! verdict carries a summary of the grid that produced it.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::state_space::{transfer_eval, StateSpace, C64, POLE_TOL};
use crate::error::{Error, Result};

/// Default eigenvalue tolerance for the Hermitian test matrix.
pub const DEFAULT_EIG_TOL: f64 = 1e-9;

/// Relative distance within which an eigenvalue of `A` is matched to `jw0`
/// when counting pole multiplicity for the residue check.
pub const POLE_MATCH_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    omegas: Vec<f64>,
    tol: f64,
}

impl FrequencyGrid {
    pub fn new(omegas: Vec<f64>, tol: f64) -> Result<Self> {
        if omegas.is_empty() {
            return Err(Error::InvalidParameter {
                name: "omegas",
                reason: "grid is empty".into(),
            });
        }
        if !(tol.is_finite() && tol >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "tol",
                reason: format!("must be finite and >= 0, got {tol}"),
            });
        }
        if omegas.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidParameter {
                name: "omegas",
                reason: "frequencies must be finite and > 0".into(),
            });
        }
        if omegas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter {
                name: "omegas",
                reason: "frequencies must be strictly increasing".into(),
            });
        }
        Ok(Self { omegas, tol })
    }

    /// `points` logarithmically spaced frequencies over `[lo, hi]`.
    pub fn log_spaced(lo: f64, hi: f64, points: usize, tol: f64) -> Result<Self> {
        if !(lo > 0.0 && hi > lo && points >= 2) {
            return Err(Error::InvalidParameter {
                name: "omegas",
                reason: format!("need 0 < lo < hi and >= 2 points, got [{lo}, {hi}] x {points}"),
            });
        }
        let (l0, l1) = (lo.log10(), hi.log10());
        let step = (l1 - l0) / (points - 1) as f64;
        let omegas = (0..points)
            .map(|i| {
                if i == points - 1 {
                    hi
                } else {
                    10f64.powf(l0 + step * i as f64)
                }
            })
            .collect();
        Self::new(omegas, tol)
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn summary(&self) -> GridSummary {
        GridSummary {
            points: self.omegas.len(),
            omega_min: self.omegas[0],
            omega_max: *self.omegas.last().unwrap(),
            tol: self.tol,
        }
    }
}

impl Default for FrequencyGrid {
    /// 1000 log-spaced points on `[1e-3, 1e3]` rad/s.
    fn default() -> Self {
        Self::log_spaced(1e-3, 1e3, 1000, DEFAULT_EIG_TOL).expect("static grid is valid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    pub points: usize,
    pub omega_min: f64,
    pub omega_max: f64,
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum NiClass {
    Sni,
    Ni,
    NotNi,
    PoleAtOrigin,
    Unstable,
}

impl std::fmt::Display for NiClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NiClass::Sni => "SNI",
            NiClass::Ni => "NI",
            NiClass::NotNi => "NOT_NI",
            NiClass::PoleAtOrigin => "POLE_AT_ORIGIN",
            NiClass::Unstable => "UNSTABLE",
        })
    }
}

/// Frequency and eigenvalue of the worst NI violation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub omega: f64,
    pub eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NiVerdict {
    pub classification: NiClass,
    /// Present exactly when `classification` is `NOT_NI`.
    pub witness: Option<Witness>,
    /// Smallest eigenvalue of the test matrix over the evaluated grid points.
    pub min_eigenvalue: Option<f64>,
    pub min_eigenvalue_omega: Option<f64>,
    /// Grid frequencies skipped because they sit on an imaginary-axis pole.
    pub skipped: Vec<f64>,
    pub grid: GridSummary,
}

/// `j (G(jw) - G*(jw))`, Hermitian by construction.
pub fn ni_matrix(ss: &StateSpace, omega: f64) -> Result<DMatrix<C64>> {
    let g = transfer_eval(ss, omega)?;
    let j = C64::new(0.0, 1.0);
    Ok((&g - g.adjoint()) * j)
}

/// Real eigenvalues of a Hermitian matrix, ascending. The input is
/// symmetrized first so round-off cannot leak into the imaginary parts.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> DVector<f64> {
    let herm = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let mut eigs: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
    eigs.sort_by(f64::total_cmp);
    DVector::from_vec(eigs)
}

pub fn ni_frequency_test(ss: &StateSpace, grid: &FrequencyGrid) -> NiVerdict {
    let poles = ss.poles();
    let mut verdict = NiVerdict {
        classification: NiClass::NotNi,
        witness: None,
        min_eigenvalue: None,
        min_eigenvalue_omega: None,
        skipped: Vec::new(),
        grid: grid.summary(),
    };

    if poles.iter().any(|p| p.norm() < POLE_TOL) {
        verdict.classification = NiClass::PoleAtOrigin;
        return verdict;
    }
    if poles.iter().any(|p| p.re > POLE_TOL) {
        verdict.classification = NiClass::Unstable;
        return verdict;
    }
    let hurwitz = poles.iter().all(|p| p.re < -POLE_TOL);

    let tol = grid.tol();
    let mut worst: Option<(f64, f64)> = None;
    let mut all_positive = true;
    for &omega in grid.omegas() {
        let m = match ni_matrix(ss, omega) {
            Ok(m) => m,
            Err(_) => {
                verdict.skipped.push(omega);
                continue;
            }
        };
        let lowest = hermitian_eigenvalues(&m).iter().copied().fold(f64::INFINITY, f64::min);
        if lowest <= tol {
            all_positive = false;
        }
        if worst.is_none_or(|(_, w)| lowest < w) {
            worst = Some((omega, lowest));
        }
    }

    if let Some((omega, eig)) = worst {
        verdict.min_eigenvalue = Some(eig);
        verdict.min_eigenvalue_omega = Some(omega);
    }
    verdict.classification = match worst {
        None => NiClass::Ni,
        Some((omega, eig)) if eig < -tol => {
            verdict.witness = Some(Witness { omega, eigenvalue: eig });
            NiClass::NotNi
        }
        _ if all_positive && hurwitz => NiClass::Sni,
        _ => NiClass::Ni,
    };
    verdict
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidueReport {
    pub omega0: f64,
    pub residue: DMatrix<C64>,
    /// Largest entry of `|K0 - K0*|`.
    pub hermitian_defect: f64,
    pub min_eigenvalue: f64,
    pub positive_semidefinite: bool,
}

/// Evaluates `K0 = lim_{s -> jw0} (s - jw0) s G(s)` numerically.
///
/// The limit is approached radially, `s = jw0 (1 + h)`, and the samples at
/// `h, h/2, h/4` are Richardson-extrapolated to cancel the first- and
/// second-order terms.
pub fn residue_check(ss: &StateSpace, omega0: f64, tol: f64) -> Result<ResidueReport> {
    if !(omega0.is_finite() && omega0 > 0.0) {
        return Err(Error::InvalidParameter {
            name: "omega0",
            reason: format!("must be finite and > 0, got {omega0}"),
        });
    }
    let target = C64::new(0.0, omega0);
    let match_radius = POLE_MATCH_TOL * omega0.max(1.0);
    let multiplicity = ss
        .poles()
        .iter()
        .filter(|p| (*p - target).norm() < match_radius)
        .count();
    if multiplicity != 1 {
        return Err(Error::NotSimplePole { omega: omega0, multiplicity });
    }

    let sample = |h: f64| -> Result<DMatrix<C64>> {
        let s = target * (1.0 + h);
        let g = ss
            .evaluate_at(s)
            .ok_or(Error::Singular { omega: s.im, distance: (s - target).norm() })?;
        Ok(g * ((s - target) * s))
    };
    let h = 1e-4;
    let f1 = sample(h)?;
    let f2 = sample(h / 2.0)?;
    let f4 = sample(h / 4.0)?;
    let third = C64::new(1.0 / 3.0, 0.0);
    let residue = (f4 * C64::new(8.0, 0.0) - f2 * C64::new(6.0, 0.0) + f1) * third;

    let hermitian_defect = (&residue - residue.adjoint())
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    let min_eigenvalue = hermitian_eigenvalues(&residue)
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let scale = residue.iter().map(|c| c.norm()).fold(1.0, f64::max);
    Ok(ResidueReport {
        omega0,
        hermitian_defect,
        min_eigenvalue,
        positive_semidefinite: min_eigenvalue >= -tol && hermitian_defect <= 1e-6 * scale,
        residue,
    })
}
