use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::state_space::StateSpace;
use crate::error::{Error, Result};

/// Which coupling identity the storage matrix must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateMode {
    /// `P B = A' C'`. With `C B = 0` this yields `V' <= y'^T u` for
    /// `V = x' P x / 2`.
    #[default]
    Corrected,
    /// `P B = C'`.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub mode: CertificateMode,
    pub passed: bool,
    /// `max |P - P'|`
    pub symmetry_defect: f64,
    pub p_min_eigenvalue: f64,
    /// Largest eigenvalue of `P A + A' P`.
    pub lyapunov_max_eigenvalue: f64,
    /// Frobenius norm of the coupling mismatch.
    pub coupling_residual: f64,
}

/// Verifies a candidate storage matrix `P` for a strictly proper realization:
/// `P = P' > 0`, `P A + A' P <= 0` and the coupling identity selected by
/// `mode`, each to within `tol`.
pub fn certificate_check(
    ss: &StateSpace,
    p: &DMatrix<f64>,
    mode: CertificateMode,
    tol: f64,
) -> Result<CertificateReport> {
    let n = ss.states();
    if p.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!(
            "P is {:?}, expected ({n}, {n})",
            p.shape()
        )));
    }
    let d_max = ss.d().abs().max();
    if d_max != 0.0 {
        return Err(Error::NonzeroFeedthrough(d_max));
    }

    let symmetry_defect = (p - p.transpose()).abs().max();
    let p_sym = (p + p.transpose()) * 0.5;
    let p_min_eigenvalue = p_sym.symmetric_eigenvalues().min();

    let lyap = &p_sym * ss.a() + ss.a().transpose() * &p_sym;
    let lyap = (&lyap + lyap.transpose()) * 0.5;
    let lyapunov_max_eigenvalue = lyap.symmetric_eigenvalues().max();

    let target = match mode {
        CertificateMode::Corrected => ss.a().transpose() * ss.c().transpose(),
        CertificateMode::Literal => ss.c().transpose(),
    };
    let coupling_residual = (p * ss.b() - target).norm();

    let passed = symmetry_defect <= tol
        && p_min_eigenvalue > tol
        && lyapunov_max_eigenvalue <= tol
        && coupling_residual <= tol;
    Ok(CertificateReport {
        mode,
        passed,
        symmetry_defect,
        p_min_eigenvalue,
        lyapunov_max_eigenvalue,
        coupling_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn axis_plant(m: f64, kp: f64) -> StateSpace {
        StateSpace::new(
            DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -kp, 0.0]),
            DMatrix::from_row_slice(2, 1, &[0.0, 1.0 / m]),
            DMatrix::from_row_slice(1, 2, &[1.0, 0.0]),
            DMatrix::zeros(1, 1),
        )
        .unwrap()
    }

    #[test]
    fn mass_weighted_storage_passes_corrected() {
        let p = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.5, 0.5]));
        let r = certificate_check(&axis_plant(0.5, 5.0), &p, CertificateMode::Corrected, 1e-12).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.coupling_residual, 0.0);
        assert_eq!(r.lyapunov_max_eigenvalue, 0.0);
    }

    #[test]
    fn mass_weighted_storage_fails_literal() {
        let p = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.5, 0.5]));
        let r = certificate_check(&axis_plant(0.5, 5.0), &p, CertificateMode::Literal, 1e-12).unwrap();
        assert!(!r.passed);
        assert_relative_eq!(r.coupling_residual, 2f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn indefinite_p_fails() {
        let p = -DMatrix::<f64>::identity(2, 2);
        let r = certificate_check(&axis_plant(0.5, 5.0), &p, CertificateMode::Corrected, 1e-12).unwrap();
        assert!(!r.passed);
        assert!(r.p_min_eigenvalue < 0.0);
    }

    #[test]
    fn wrong_shape_rejected() {
        let p = DMatrix::<f64>::identity(3, 3);
        assert!(matches!(
            certificate_check(&axis_plant(0.5, 5.0), &p, CertificateMode::Corrected, 1e-12),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn feedthrough_rejected() {
        let ss = StateSpace::new(
            DMatrix::from_element(1, 1, -1.0),
            DMatrix::from_element(1, 1, 1.0),
            DMatrix::from_element(1, 1, 1.0),
            DMatrix::from_element(1, 1, 0.3),
        )
        .unwrap();
        assert!(matches!(
            certificate_check(&ss, &DMatrix::identity(1, 1), CertificateMode::Corrected, 1e-12),
            Err(Error::NonzeroFeedthrough(_))
        ));
    }

    proptest! {
        #[test]
        fn corrected_mode_holds_for_any_mass_and_gain(m in 0.05f64..10.0, kp in 0.05f64..50.0) {
            let p = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![m * kp, m]));
            let r = certificate_check(&axis_plant(m, kp), &p, CertificateMode::Corrected, 1e-12).unwrap();
            prop_assert!(r.coupling_residual <= 1e-12 * (1.0 + m * kp));
            prop_assert!(r.lyapunov_max_eigenvalue.abs() <= 1e-12 * (1.0 + m * kp));
            prop_assert!(r.p_min_eigenvalue > 0.0);
            prop_assert!(r.passed);
        }
    }
}
