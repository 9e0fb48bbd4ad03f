//! Two-loop velocity-free position controller.
//!
//! The inner loop is a proportional position law absorbed into the plant as
//! an acceleration term `-Kp xi_h`. The outer loop is the first-order
//! integral resonant controller
//!
//! ```text
//! z'  = -Gamma delta z + Gamma xi_h
//! u_c = z
//! ```
//!
//! closed with positive feedback `F_h = +z`. Per axis the loop is a
//! third-order system whose constant characteristic coefficient
//! `kp Gamma delta - Gamma / m` changes sign exactly at the dc-loop-gain
//! boundary `delta = 1 / (m kp)`.

use nalgebra::{Complex, DMatrix, DVector, Matrix3, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ni_analysis::StateSpace;
use crate::quadmodel::QuadParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ControllerParams {
    /// Inner-loop proportional gains `(kx, ky)`, 1/s^2.
    pub kp: Vector2<f64>,
    /// Integral resonant gain `Gamma`.
    pub gamma_ir: f64,
    /// Controller dc-gain reciprocal `delta`.
    pub delta: f64,
    /// Sector-bound constant `gamma`, strictly inside (0, 1).
    pub gamma_sector: f64,
}

impl Default for ControllerParams {
    fn default() -> Self {
        Self {
            kp: Vector2::new(5.0, 5.0),
            gamma_ir: 160.0,
            delta: 0.6,
            gamma_sector: 0.8,
        }
    }
}

impl ControllerParams {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite and > 0, got {v}"),
                })
            }
        };
        positive("kp", self.kp.x)?;
        positive("kp", self.kp.y)?;
        positive("gamma_ir", self.gamma_ir)?;
        positive("delta", self.delta)?;
        if !(self.gamma_sector > 0.0 && self.gamma_sector < 1.0) {
            return Err(Error::InvalidParameter {
                name: "gamma_sector",
                reason: format!("must lie in (0, 1), got {}", self.gamma_sector),
            });
        }
        Ok(())
    }

    pub fn kp_axis(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.kp.x,
            Axis::Y => self.kp.y,
        }
    }
}

/// Controller state `(z1, z2)`; the controller output equals the state.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ControllerState(pub Vector2<f64>);

impl ControllerState {
    pub fn output(&self) -> Vector2<f64> {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

/// Inner proportional law `-Kp (xi_h - xi_d)`, an acceleration command.
pub fn inner_loop_command(
    xi_h: &Vector2<f64>,
    xi_d: &Vector2<f64>,
    kp: &Vector2<f64>,
) -> Vector2<f64> {
    -kp.component_mul(&(xi_h - xi_d))
}

pub fn sni_controller_derivative(
    cs: &ControllerState,
    xi_h: &Vector2<f64>,
    p: &ControllerParams,
) -> Vector2<f64> {
    let g = p.gamma_ir;
    -cs.0 * (g * p.delta) + xi_h * g
}

/// Two-port realization of the outer-loop controller
/// `C(s) = (sI + Gamma Delta)^-1 Gamma`.
pub fn controller_state_space(p: &ControllerParams) -> StateSpace {
    let g = p.gamma_ir;
    StateSpace::new(
        DMatrix::identity(2, 2) * (-g * p.delta),
        DMatrix::identity(2, 2) * g,
        DMatrix::identity(2, 2),
        DMatrix::zeros(2, 2),
    )
    .expect("controller realization is 2x2")
}

/// Single-axis reshaped plant `m x'' + m kp x = F`, output `x`.
pub fn plant_axis_state_space(qp: &QuadParams, kp: f64) -> StateSpace {
    StateSpace::new(
        DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -kp, 0.0]),
        DMatrix::from_row_slice(2, 1, &[0.0, 1.0 / qp.m]),
        DMatrix::from_row_slice(1, 2, &[1.0, 0.0]),
        DMatrix::zeros(1, 1),
    )
    .expect("axis realization is 2x2")
}

/// Storage matrix `diag(m kp, m)` of the single-axis plant, so that
/// `V = x' P x / 2` is the mass-weighted storage.
pub fn axis_storage_matrix(qp: &QuadParams, kp: f64) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_vec(vec![qp.m * kp, qp.m]))
}

/// Smallest `delta` satisfying `delta^2 >= 1 / (gamma^2 m^2 min(kp)^2)`.
pub fn delta_min(m: f64, kp: &Vector2<f64>, gamma_sector: f64) -> f64 {
    1.0 / (gamma_sector * m * kp.min())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamCheck {
    pub passed: bool,
    pub delta_min: f64,
    /// `delta - delta_min`; negative when the check fails.
    pub margin: f64,
}

/// Sector-bound parameter condition. The inequality is non-strict.
pub fn validate_params(qp: &QuadParams, cp: &ControllerParams) -> ParamCheck {
    let dmin = delta_min(qp.m, &cp.kp, cp.gamma_sector);
    ParamCheck {
        passed: cp.delta >= dmin,
        delta_min: dmin,
        margin: cp.delta - dmin,
    }
}

/// Plant steady state under a constant horizontal force.
pub fn steady_state_position(
    f_bar: &Vector2<f64>,
    qp: &QuadParams,
    kp: &Vector2<f64>,
) -> Vector2<f64> {
    Vector2::new(f_bar.x / (qp.m * kp.x), f_bar.y / (qp.m * kp.y))
}

/// Controller steady-state output `Delta^-1 xi`.
pub fn controller_dc_map(cp: &ControllerParams, xi: &Vector2<f64>) -> Vector2<f64> {
    xi / cp.delta
}

/// State matrix of one axis of the closed loop, state `(x, x', z)`.
pub fn closed_loop_axis_matrix(qp: &QuadParams, cp: &ControllerParams, axis: Axis) -> Matrix3<f64> {
    let kp = cp.kp_axis(axis);
    let g = cp.gamma_ir;
    Matrix3::new(
        0.0, 1.0, 0.0, //
        -kp, 0.0, 1.0 / qp.m, //
        g, 0.0, -g * cp.delta,
    )
}

/// Monic characteristic polynomial `[1, c2, c1, c0]` of the axis matrix.
pub fn characteristic_polynomial(qp: &QuadParams, cp: &ControllerParams, axis: Axis) -> [f64; 4] {
    let kp = cp.kp_axis(axis);
    let gd = cp.gamma_ir * cp.delta;
    [1.0, gd, kp, kp * gd - cp.gamma_ir / qp.m]
}

pub fn closed_loop_eigenvalues(
    qp: &QuadParams,
    cp: &ControllerParams,
    axis: Axis,
) -> [Complex<f64>; 3] {
    let e = closed_loop_axis_matrix(qp, cp, axis).complex_eigenvalues();
    [e[0], e[1], e[2]]
}

/// Equilibrium `(x, x', z)` of one axis under a constant force disturbance
/// `w`, or `None` at the dc boundary where the axis matrix is singular.
pub fn closed_loop_equilibrium(
    qp: &QuadParams,
    cp: &ControllerParams,
    axis: Axis,
    w: f64,
) -> Option<Vector3<f64>> {
    let a = closed_loop_axis_matrix(qp, cp, axis);
    let forcing = Vector3::new(0.0, -w / qp.m, 0.0);
    a.lu().solve(&forcing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ni_analysis::{
        certificate_check, dc_gain, ni_frequency_test, transfer_eval, CertificateMode,
        FrequencyGrid, NiClass,
    };
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    /// Third-order Routh-Hurwitz: all coefficients positive and c2 c1 > c0.
    fn routh_stable(c: [f64; 4]) -> bool {
        c[1] > 0.0 && c[2] > 0.0 && c[3] > 0.0 && c[1] * c[2] > c[3]
    }

    fn qp() -> QuadParams {
        QuadParams::default()
    }

    #[test]
    fn inner_loop_examples() {
        let kp = Vector2::new(5.0, 5.0);
        assert_eq!(
            inner_loop_command(&Vector2::new(2.0, -1.5), &Vector2::zeros(), &kp),
            Vector2::new(-10.0, 7.5)
        );
        let xi = Vector2::new(0.3, -4.0);
        assert_eq!(inner_loop_command(&xi, &xi, &kp), Vector2::zeros());
        assert_eq!(
            inner_loop_command(&Vector2::new(1.0, 1.0), &Vector2::zeros(), &Vector2::new(5.0, 10.0)),
            Vector2::new(-5.0, -10.0)
        );
    }

    #[test]
    fn controller_derivative_examples() {
        let p = ControllerParams::default();
        let d = sni_controller_derivative(&ControllerState::default(), &Vector2::new(1.0, 1.0), &p);
        assert_eq!(d, Vector2::new(160.0, 160.0));
        let xi = Vector2::new(0.7, -0.2);
        let eq = ControllerState(xi / p.delta);
        assert!(sni_controller_derivative(&eq, &xi, &p).norm() < 1e-12);
        let d = sni_controller_derivative(&ControllerState(Vector2::new(1.0, 0.0)), &Vector2::zeros(), &p);
        assert_relative_eq!(d.x, -96.0, epsilon = 1e-12);
        assert_eq!(d.y, 0.0);
    }

    #[test]
    fn controller_dc_gain_is_inverse_delta() {
        let p = ControllerParams::default();
        let ss = controller_state_space(&p);
        let k = dc_gain(&ss).unwrap();
        assert_relative_eq!(k[(0, 0)], 1.0 / 0.6, epsilon = 1e-12);
        assert_relative_eq!(k[(1, 1)], 1.0 / 0.6, epsilon = 1e-12);
        assert_eq!(k[(0, 1)], 0.0);
        let g = transfer_eval(&ss, 1e-9).unwrap();
        assert_relative_eq!(g[(0, 0)].re, 1.0 / 0.6, max_relative = 1e-12);
    }

    #[test]
    fn delta_min_examples() {
        let kp = Vector2::new(5.0, 5.0);
        assert_relative_eq!(delta_min(0.5, &kp, 0.8), 0.5, epsilon = 1e-12);
        assert_relative_eq!(delta_min(0.5, &kp, 1.0), 0.4, epsilon = 1e-12);
        assert_relative_eq!(delta_min(0.5, &Vector2::new(5.0, 2.0), 0.8), 1.25, epsilon = 1e-12);
    }

    #[test]
    fn validate_examples() {
        let r = validate_params(&qp(), &ControllerParams::default());
        assert!(r.passed);
        assert_relative_eq!(r.margin, 0.1, epsilon = 1e-12);
        let low = ControllerParams { delta: 0.49, ..Default::default() };
        assert!(!validate_params(&qp(), &low).passed);
        let edge = ControllerParams { delta: r.delta_min, ..Default::default() };
        let e = validate_params(&qp(), &edge);
        assert!(e.passed);
        assert_eq!(e.margin, 0.0);
    }

    #[test]
    fn controller_params_validation() {
        assert!(ControllerParams::default().validate().is_ok());
        for bad in [
            ControllerParams { delta: -1.0, ..Default::default() },
            ControllerParams { gamma_ir: 0.0, ..Default::default() },
            ControllerParams { kp: Vector2::new(5.0, 0.0), ..Default::default() },
            ControllerParams { gamma_sector: 1.0, ..Default::default() },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn steady_state_examples() {
        let kp = Vector2::new(5.0, 5.0);
        assert_relative_eq!(
            steady_state_position(&Vector2::new(1.0, 0.0), &qp(), &kp),
            Vector2::new(0.4, 0.0),
            epsilon = 1e-15
        );
        assert_eq!(steady_state_position(&Vector2::zeros(), &qp(), &kp), Vector2::zeros());
    }

    #[test]
    fn nominal_closed_loop_is_hurwitz() {
        let cp = ControllerParams::default();
        let c = characteristic_polynomial(&qp(), &cp, Axis::X);
        assert_relative_eq!(c[1], 96.0, epsilon = 1e-12);
        assert_eq!(c[2], 5.0);
        assert_relative_eq!(c[3], 160.0, epsilon = 1e-9);
        assert!(routh_stable(c));
        for e in closed_loop_eigenvalues(&qp(), &cp, Axis::X) {
            assert!(e.re < 0.0, "{e}");
        }
    }

    #[test]
    fn char_poly_matches_matrix() {
        let cp = ControllerParams { kp: Vector2::new(3.0, 7.0), delta: 0.9, gamma_ir: 40.0, ..Default::default() };
        for axis in [Axis::X, Axis::Y] {
            let a = closed_loop_axis_matrix(&qp(), &cp, axis);
            let c = characteristic_polynomial(&qp(), &cp, axis);
            // Newton identities: c2 = -tr A, c0 = -det A.
            assert_relative_eq!(c[1], -a.trace(), epsilon = 1e-12);
            assert_relative_eq!(c[3], -a.determinant(), max_relative = 1e-12);
            let minors = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)]
                + a[(0, 0)] * a[(2, 2)] - a[(0, 2)] * a[(2, 0)]
                + a[(1, 1)] * a[(2, 2)] - a[(1, 2)] * a[(2, 1)];
            assert_relative_eq!(c[2], minors, epsilon = 1e-12);
        }
    }

    #[test]
    fn low_delta_is_unstable() {
        let cp = ControllerParams { delta: 0.3, ..Default::default() };
        let c = characteristic_polynomial(&qp(), &cp, Axis::X);
        assert_relative_eq!(c[3], -80.0, epsilon = 1e-9);
        assert!(closed_loop_eigenvalues(&qp(), &cp, Axis::X).iter().any(|e| e.re > 0.0));
    }

    #[test]
    fn boundary_delta_has_origin_eigenvalue() {
        let cp = ControllerParams { delta: 0.4, ..Default::default() };
        let c = characteristic_polynomial(&qp(), &cp, Axis::X);
        assert!(c[3].abs() < 1e-12);
        let nearest = closed_loop_eigenvalues(&qp(), &cp, Axis::X)
            .iter()
            .map(|e| e.norm())
            .fold(f64::INFINITY, f64::min);
        assert!(nearest < 1e-8);
    }

    #[test]
    fn controller_is_sni_and_plant_is_certified() {
        let cp = ControllerParams::default();
        let v = ni_frequency_test(&controller_state_space(&cp), &FrequencyGrid::default());
        assert_eq!(v.classification, NiClass::Sni);
        let plant = plant_axis_state_space(&qp(), 5.0);
        let r = certificate_check(&plant, &axis_storage_matrix(&qp(), 5.0), CertificateMode::Corrected, 1e-12)
            .unwrap();
        assert!(r.passed);
    }

    #[test]
    fn equilibrium_under_disturbance() {
        let cp = ControllerParams::default();
        let w = 0.3;
        let eq = closed_loop_equilibrium(&qp(), &cp, Axis::X, w).unwrap();
        // x (m kp - 1/delta) = w, z = x / delta
        let x = w / (qp().m * 5.0 - 1.0 / 0.6);
        assert_relative_eq!(eq[0], x, max_relative = 1e-12);
        assert!(eq[1].abs() < 1e-14);
        assert_relative_eq!(eq[2], x / 0.6, max_relative = 1e-12);
    }

    proptest! {
        #[test]
        fn delta_min_monotone(
            m in 0.1f64..5.0, k in 0.5f64..20.0, g in 0.05f64..0.95, f in 1.01f64..2.0
        ) {
            let kp = Vector2::new(k, k * 1.5);
            let base = delta_min(m, &kp, g);
            prop_assert!(delta_min(m * f, &kp, g) < base);
            prop_assert!(delta_min(m, &(kp * f), g) < base);
            prop_assert!(delta_min(m, &kp, (g * f).min(0.999)) <= base);
        }

        #[test]
        fn validated_params_give_hurwitz_loop(
            m in 0.1f64..5.0, kx in 0.5f64..20.0, ky in 0.5f64..20.0,
            gamma_ir in 1.0f64..500.0, g in 0.05f64..0.99, excess in 0.0f64..3.0,
        ) {
            let kp = Vector2::new(kx, ky);
            let q = QuadParams { m, ..QuadParams::default() };
            let cp = ControllerParams {
                kp, gamma_ir, gamma_sector: g, delta: delta_min(m, &kp, g) * (1.0 + excess),
            };
            prop_assert!(validate_params(&q, &cp).passed);
            for axis in [Axis::X, Axis::Y] {
                prop_assert!(routh_stable(characteristic_polynomial(&q, &cp, axis)));
                for e in closed_loop_eigenvalues(&q, &cp, axis) {
                    prop_assert!(e.re < 0.0, "{}", e);
                }
            }
        }

        #[test]
        fn controller_sni_over_log_grid(lg in -1.0f64..3.0, ld in -2.0f64..1.0) {
            let cp = ControllerParams { gamma_ir: 10f64.powf(lg), delta: 10f64.powf(ld), ..Default::default() };
            let grid = FrequencyGrid::log_spaced(1e-3, 1e3, 200, 0.0).unwrap();
            let v = ni_frequency_test(&controller_state_space(&cp), &grid);
            prop_assert_eq!(v.classification, NiClass::Sni);
        }

        #[test]
        fn steady_state_round_trip(fx in -50.0f64..50.0, fy in -50.0f64..50.0, kx in 0.1f64..20.0, ky in 0.1f64..20.0) {
            let kp = Vector2::new(kx, ky);
            let f = Vector2::new(fx, fy);
            let xi = steady_state_position(&f, &qp(), &kp);
            let back = (kp * qp().m).component_mul(&xi);
            prop_assert!((back - f).abs().max() <= 1e-12 * (1.0 + f.abs().max()));
        }
    }
}
