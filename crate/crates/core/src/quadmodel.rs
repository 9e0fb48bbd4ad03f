//! Rigid-body quadrotor model: physical constants, kinematic maps, the
//! twelve-state vector field and the reshaped horizontal subsystem.
//!
//! Axis conventions follow the state-space form used for simulation: the
//! vertical row is `z'' = g - (u1/m) cos(phi) cos(theta)` and the horizontal
//! thrust components are `-u1 (sin phi sin psi + cos phi sin theta cos psi)`
//! and `u1 (sin phi cos psi - cos phi sin theta sin psi)`.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{Matrix3, SVector, Vector2, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Threshold on `|cos theta|` below which the Euler-rate map is flagged.
pub const EULER_SINGULARITY_TOL: f64 = 1e-6;

/// Physical constants of the airframe.
///
/// Defaults are the small-scale platform used throughout the examples. The
/// arm length and rotor inertia have no published value for that platform and
/// take typical figures for a 0.5 kg quadrotor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadParams {
    /// Mass (kg).
    pub m: f64,
    /// Gravitational acceleration (m/s^2).
    pub g: f64,
    /// Arm length (m).
    pub l: f64,
    /// Thrust coefficient (N s^2).
    pub b: f64,
    /// Drag coefficient (N m s^2).
    pub d: f64,
    /// Roll moment of inertia (kg m^2).
    pub jx: f64,
    /// Pitch moment of inertia (kg m^2).
    pub jy: f64,
    /// Yaw moment of inertia (kg m^2).
    pub jz: f64,
    /// Rotor inertia (kg m^2).
    pub jr: f64,
}

impl Default for QuadParams {
    fn default() -> Self {
        Self {
            m: 0.5,
            g: 9.81,
            l: 0.225,
            b: 2.92e-6,
            d: 1.12e-7,
            jx: 4.85e-3,
            jy: 4.85e-3,
            jz: 8.81e-3,
            jr: 3.357e-5,
        }
    }
}

impl QuadParams {
    /// Checks that every constant is finite and strictly positive.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("m", self.m),
            ("g", self.g),
            ("l", self.l),
            ("b", self.b),
            ("d", self.d),
            ("jx", self.jx),
            ("jy", self.jy),
            ("jz", self.jz),
            ("jr", self.jr),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite and > 0, got {value}"),
                });
            }
        }
        Ok(())
    }

    pub fn coefficients(&self) -> DynamicsCoefficients {
        DynamicsCoefficients {
            roll_coupling: (self.jy - self.jz) / self.jx,
            roll_gyro: self.jr / self.jx,
            pitch_coupling: (self.jz - self.jx) / self.jy,
            pitch_gyro: self.jr / self.jy,
            yaw_coupling: (self.jx - self.jy) / self.jz,
            roll_input: self.l / self.jx,
            pitch_input: self.l / self.jy,
            yaw_input: 1.0 / self.jz,
        }
    }
}

/// Inertia ratios and input scalings that appear in the rotational rows of
/// the twelve-state vector field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicsCoefficients {
    /// `(Jy - Jz) / Jx`
    pub roll_coupling: f64,
    /// `Jr / Jx`
    pub roll_gyro: f64,
    /// `(Jz - Jx) / Jy`
    pub pitch_coupling: f64,
    /// `Jr / Jy`
    pub pitch_gyro: f64,
    /// `(Jx - Jy) / Jz`
    pub yaw_coupling: f64,
    /// `l / Jx`
    pub roll_input: f64,
    /// `l / Jy`
    pub pitch_input: f64,
    /// `1 / Jz`
    pub yaw_input: f64,
}

/// Roll, pitch and yaw in radians, restricted to `|phi|, |theta| < pi/2` and
/// `psi` in `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EulerAngles {
    phi: f64,
    theta: f64,
    psi: f64,
}

impl EulerAngles {
    pub fn new(phi: f64, theta: f64, psi: f64) -> Result<Self> {
        if phi.is_nan() || phi.abs() >= FRAC_PI_2 {
            return Err(Error::AngleOutOfRange { name: "phi", value: phi });
        }
        if theta.is_nan() || theta.abs() >= FRAC_PI_2 {
            return Err(Error::AngleOutOfRange { name: "theta", value: theta });
        }
        if !(psi > -PI && psi <= PI) {
            return Err(Error::AngleOutOfRange { name: "psi", value: psi });
        }
        Ok(Self { phi, theta, psi })
    }

    pub fn level() -> Self {
        Self { phi: 0.0, theta: 0.0, psi: 0.0 }
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn psi(&self) -> f64 {
        self.psi
    }
}

/// Body-to-inertial rotation for the Z-Y-X Euler sequence.
pub fn rotation_body_to_inertial(eta: &EulerAngles) -> Matrix3<f64> {
    let (sf, cf) = eta.phi.sin_cos();
    let (st, ct) = eta.theta.sin_cos();
    let (sp, cp) = eta.psi.sin_cos();
    Matrix3::new(
        ct * cp,
        cp * st * sf - cf * sp,
        cf * cp * st + sf * sp,
        ct * sp,
        st * sf * sp + cf * cp,
        cf * st * sp - cp * sf,
        -st,
        ct * sf,
        ct * cf,
    )
}

/// The map `W(eta)` with `omega_body = W(eta) * eta_dot`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerRateMap {
    pub matrix: Matrix3<f64>,
    pub determinant: f64,
    /// Set when `|cos theta|` drops below [`EULER_SINGULARITY_TOL`].
    pub near_singular: bool,
}

pub fn euler_rate_map(eta: &EulerAngles) -> EulerRateMap {
    let (sf, cf) = eta.phi.sin_cos();
    let (st, ct) = eta.theta.sin_cos();
    let matrix = Matrix3::new(1.0, 0.0, -st, 0.0, cf, sf * ct, 0.0, -sf, cf * ct);
    // Cofactor expansion along the first column: cf*cf*ct + sf*sf*ct.
    let determinant = ct * (cf * cf + sf * sf);
    EulerRateMap {
        matrix,
        determinant,
        near_singular: ct.abs() < EULER_SINGULARITY_TOL,
    }
}

/// Ordered state `(x, x', y, y', z, z', phi, phi', theta, theta', psi, psi')`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct State12(pub SVector<f64, 12>);

impl State12 {
    pub const X: usize = 0;
    pub const VX: usize = 1;
    pub const Y: usize = 2;
    pub const VY: usize = 3;
    pub const Z: usize = 4;
    pub const VZ: usize = 5;
    pub const PHI: usize = 6;
    pub const PHI_RATE: usize = 7;
    pub const THETA: usize = 8;
    pub const THETA_RATE: usize = 9;
    pub const PSI: usize = 10;
    pub const PSI_RATE: usize = 11;

    pub fn zeros() -> Self {
        Self(SVector::zeros())
    }

    pub fn from_array(values: [f64; 12]) -> Self {
        Self(SVector::from(values))
    }

    /// Interprets the angle components, enforcing the Euler-angle bounds.
    pub fn attitude(&self) -> Result<EulerAngles> {
        EulerAngles::new(self.0[Self::PHI], self.0[Self::THETA], self.0[Self::PSI])
    }

    pub fn horizontal(&self) -> HorizState {
        HorizState {
            x: self.0[Self::X],
            xdot: self.0[Self::VX],
            y: self.0[Self::Y],
            ydot: self.0[Self::VY],
        }
    }
}

/// Total thrust and the three torque-channel inputs.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControlInput4 {
    /// Total thrust (N), non-negative.
    pub thrust: f64,
    pub roll: f64,
    pub pitch: f64,
    pub yaw: f64,
}

impl ControlInput4 {
    pub fn new(thrust: f64, roll: f64, pitch: f64, yaw: f64) -> Result<Self> {
        if thrust.is_nan() || thrust < 0.0 {
            return Err(Error::InvalidParameter {
                name: "thrust",
                reason: format!("must be >= 0, got {thrust}"),
            });
        }
        Ok(Self { thrust, roll, pitch, yaw })
    }
}

/// Twelve-state vector field with `psi` free.
///
/// `omega_bar` is the aggregate rotor speed driving the gyroscopic terms;
/// pass `0.0` to drop them.
pub fn full_dynamics(
    x: &State12,
    u: &ControlInput4,
    p: &QuadParams,
    omega_bar: f64,
) -> SVector<f64, 12> {
    let s = &x.0;
    let k = p.coefficients();
    let (s7, c7) = s[State12::PHI].sin_cos();
    let (s9, c9) = s[State12::THETA].sin_cos();
    let (s11, c11) = s[State12::PSI].sin_cos();
    let thrust_per_mass = u.thrust / p.m;
    let phi_rate = s[State12::PHI_RATE];
    let theta_rate = s[State12::THETA_RATE];
    let psi_rate = s[State12::PSI_RATE];

    SVector::from([
        s[State12::VX],
        -thrust_per_mass * (s7 * s11 + c7 * s9 * c11),
        s[State12::VY],
        thrust_per_mass * (s7 * c11 - c7 * s9 * s11),
        s[State12::VZ],
        p.g - thrust_per_mass * c7 * c9,
        phi_rate,
        theta_rate * psi_rate * k.roll_coupling - theta_rate * k.roll_gyro * omega_bar
            + k.roll_input * u.roll,
        theta_rate,
        phi_rate * psi_rate * k.pitch_coupling
            + phi_rate * k.pitch_gyro * omega_bar
            + k.pitch_input * u.pitch,
        psi_rate,
        theta_rate * phi_rate * k.yaw_coupling + k.yaw_input * u.yaw,
    ])
}

/// Horizontal position and velocity.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HorizState {
    pub x: f64,
    pub xdot: f64,
    pub y: f64,
    pub ydot: f64,
}

impl HorizState {
    pub fn new(x: f64, xdot: f64, y: f64, ydot: f64) -> Self {
        Self { x, xdot, y, ydot }
    }

    pub fn position(&self) -> Vector2<f64> {
        Vector2::new(self.x, self.y)
    }

    pub fn velocity(&self) -> Vector2<f64> {
        Vector2::new(self.xdot, self.ydot)
    }

    pub fn to_vector(&self) -> Vector4<f64> {
        Vector4::new(self.x, self.xdot, self.y, self.ydot)
    }

    pub fn from_vector(v: &Vector4<f64>) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }

    pub fn is_finite(&self) -> bool {
        self.to_vector().iter().all(|c| c.is_finite())
    }
}

/// Horizontal dynamics with the proportional inner loop absorbed:
/// `m xi'' + m Kp xi = F_h`.
pub fn reshaped_horizontal_dynamics(
    s: &HorizState,
    force: &Vector2<f64>,
    kp: &Vector2<f64>,
    p: &QuadParams,
) -> Vector4<f64> {
    Vector4::new(
        s.xdot,
        force.x / p.m - kp.x * s.x,
        s.ydot,
        force.y / p.m - kp.y * s.y,
    )
}

/// Which position weighting the horizontal storage function uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StorageForm {
    /// `1/2 m |v|^2 + 1/2 m xi' Kp xi`: exact dissipation equality with the
    /// reshaped dynamics.
    #[default]
    MassWeighted,
    /// `1/2 m |v|^2 + 1/2 xi' Kp xi`, no mass on the position term.
    Unweighted,
}

/// Storage of the reshaped subsystem in the mass-weighted form.
pub fn storage_value(s: &HorizState, kp: &Vector2<f64>, p: &QuadParams) -> f64 {
    storage_value_with(s, kp, p, StorageForm::MassWeighted)
}

pub fn storage_value_with(
    s: &HorizState,
    kp: &Vector2<f64>,
    p: &QuadParams,
    form: StorageForm,
) -> f64 {
    let kinetic = 0.5 * p.m * (s.xdot * s.xdot + s.ydot * s.ydot);
    let spring = 0.5 * (kp.x * s.x * s.x + kp.y * s.y * s.y);
    match form {
        StorageForm::MassWeighted => kinetic + p.m * spring,
        StorageForm::Unweighted => kinetic + spring,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn rx(a: f64) -> Matrix3<f64> {
        let (s, c) = a.sin_cos();
        Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
    }
    fn ry(a: f64) -> Matrix3<f64> {
        let (s, c) = a.sin_cos();
        Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
    }
    fn rz(a: f64) -> Matrix3<f64> {
        let (s, c) = a.sin_cos();
        Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
    }

    fn table_params() -> QuadParams {
        QuadParams::default()
    }

    #[test]
    fn rotation_identity_at_level() {
        let r = rotation_body_to_inertial(&EulerAngles::level());
        assert_eq!(r, Matrix3::identity());
    }

    #[test]
    fn rotation_quarter_yaw() {
        let eta = EulerAngles::new(0.0, 0.0, FRAC_PI_2).unwrap();
        let r = rotation_body_to_inertial(&eta);
        let expected = Matrix3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0);
        assert_relative_eq!(r, expected, epsilon = 1e-15);
        assert_relative_eq!(r, rz(FRAC_PI_2) * ry(0.0) * rx(0.0), epsilon = 1e-15);
    }

    #[test]
    fn euler_rate_map_level_is_identity() {
        let w = euler_rate_map(&EulerAngles::level());
        assert_eq!(w.matrix, Matrix3::identity());
        assert!(!w.near_singular);
    }

    #[test]
    fn euler_rate_map_flags_gimbal_lock() {
        let eta = EulerAngles::new(0.3, FRAC_PI_2 - 1e-9, 0.0).unwrap();
        let w = euler_rate_map(&eta);
        assert!(w.near_singular);
        assert!(w.determinant.abs() < 1e-8);
        assert!(w.matrix.determinant().abs() < 1e-8);
    }

    #[test]
    fn angle_bounds_are_errors() {
        assert!(matches!(
            EulerAngles::new(FRAC_PI_2, 0.0, 0.0),
            Err(Error::AngleOutOfRange { name: "phi", .. })
        ));
        assert!(EulerAngles::new(0.0, -FRAC_PI_2, 0.0).is_err());
        assert!(EulerAngles::new(0.0, 0.0, -PI).is_err());
        assert!(EulerAngles::new(0.0, 0.0, PI).is_ok());
        assert!(EulerAngles::new(f64::NAN, 0.0, 0.0).is_err());
    }

    #[test]
    fn negative_thrust_rejected() {
        assert!(ControlInput4::new(-1.0, 0.0, 0.0, 0.0).is_err());
        assert!(ControlInput4::new(0.0, 1.0, -1.0, 0.0).is_ok());
    }

    #[test]
    fn quad_params_validation() {
        assert!(table_params().validate().is_ok());
        let bad = QuadParams { jz: 0.0, ..table_params() };
        assert!(matches!(
            bad.validate(),
            Err(Error::InvalidParameter { name: "jz", .. })
        ));
    }

    #[test]
    fn hover_is_equilibrium() {
        let p = table_params();
        let u = ControlInput4::new(p.m * p.g, 0.0, 0.0, 0.0).unwrap();
        let f = full_dynamics(&State12::zeros(), &u, &p, 0.0);
        assert!(f.iter().all(|&v| v == 0.0), "{f:?}");
    }

    #[test]
    fn free_fall_only_vertical() {
        let p = table_params();
        let f = full_dynamics(&State12::zeros(), &ControlInput4::default(), &p, 0.0);
        for (i, v) in f.iter().enumerate() {
            if i == State12::VZ {
                assert_eq!(*v, 9.81);
            } else {
                assert_eq!(*v, 0.0);
            }
        }
    }

    #[test]
    fn symmetric_airframe_has_no_yaw_coupling() {
        let p = table_params();
        let mut x = State12::zeros();
        x.0[State12::PHI_RATE] = 1.0;
        x.0[State12::THETA_RATE] = 1.0;
        let f = full_dynamics(&x, &ControlInput4::default(), &p, 0.0);
        assert_eq!(p.coefficients().yaw_coupling, 0.0);
        assert_eq!(f[State12::PSI_RATE], 0.0);
    }

    #[test]
    fn gyroscopic_term_enters_roll_and_pitch() {
        let p = table_params();
        let k = p.coefficients();
        let mut x = State12::zeros();
        x.0[State12::PHI_RATE] = 0.5;
        x.0[State12::THETA_RATE] = -0.25;
        let base = full_dynamics(&x, &ControlInput4::default(), &p, 0.0);
        let spun = full_dynamics(&x, &ControlInput4::default(), &p, 100.0);
        let d = spun - base;
        assert_relative_eq!(d[State12::PHI_RATE], 0.25 * k.roll_gyro * 100.0, epsilon = 1e-12);
        assert_relative_eq!(d[State12::THETA_RATE], 0.5 * k.pitch_gyro * 100.0, epsilon = 1e-12);
    }

    #[test]
    fn reshaped_examples() {
        let p = table_params();
        let kp = Vector2::new(5.0, 5.0);
        let d = reshaped_horizontal_dynamics(
            &HorizState::new(1.0, 0.0, 0.0, 0.0),
            &Vector2::zeros(),
            &kp,
            &p,
        );
        assert_eq!(d, Vector4::new(0.0, -5.0, 0.0, 0.0));

        let d = reshaped_horizontal_dynamics(
            &HorizState::default(),
            &Vector2::new(1.0, 0.0),
            &kp,
            &p,
        );
        assert_eq!(d, Vector4::new(0.0, 2.0, 0.0, 0.0));

        let (xb, yb) = (0.7, -1.3);
        let force = Vector2::new(p.m * kp.x * xb, p.m * kp.y * yb);
        let d = reshaped_horizontal_dynamics(&HorizState::new(xb, 0.0, yb, 0.0), &force, &kp, &p);
        assert!(d.norm() < 1e-15);
    }

    #[test]
    fn storage_examples() {
        let p = table_params();
        let kp = Vector2::new(5.0, 5.0);
        assert_eq!(storage_value(&HorizState::default(), &kp, &p), 0.0);
        assert_relative_eq!(
            storage_value(&HorizState::new(1.0, 0.0, 0.0, 0.0), &kp, &p),
            1.25,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            storage_value_with(&HorizState::new(1.0, 0.0, 0.0, 0.0), &kp, &p, StorageForm::Unweighted),
            2.5,
            epsilon = 1e-15
        );
    }

    #[test]
    fn storage_conserved_on_free_oscillation() {
        // Closed-form harmonic motion: x = A cos(wt) + (v0/w) sin(wt).
        let p = table_params();
        let kp = Vector2::new(5.0, 3.0);
        let s0 = HorizState::new(1.2, -0.4, -0.7, 0.9);
        let v0 = storage_value(&s0, &kp, &p);
        let wx = kp.x.sqrt();
        let wy = kp.y.sqrt();
        for i in 0..200 {
            let t = i as f64 * 0.05;
            let s = HorizState::new(
                s0.x * (wx * t).cos() + s0.xdot / wx * (wx * t).sin(),
                -s0.x * wx * (wx * t).sin() + s0.xdot * (wx * t).cos(),
                s0.y * (wy * t).cos() + s0.ydot / wy * (wy * t).sin(),
                -s0.y * wy * (wy * t).sin() + s0.ydot * (wy * t).cos(),
            );
            let d = reshaped_horizontal_dynamics(&s, &Vector2::zeros(), &kp, &p);
            // the analytic derivative agrees with the vector field
            assert_relative_eq!(d[1], -kp.x * s.x, epsilon = 1e-12);
            assert_relative_eq!(storage_value(&s, &kp, &p), v0, epsilon = 1e-12);
        }
    }

    proptest! {
        #[test]
        fn rotation_is_special_orthogonal(
            phi in -1.5f64..1.5, theta in -1.5f64..1.5, psi in -3.0f64..3.0
        ) {
            let eta = EulerAngles::new(phi, theta, psi).unwrap();
            let r = rotation_body_to_inertial(&eta);
            let err = (r.transpose() * r - Matrix3::identity()).abs().max();
            prop_assert!(err < 1e-12);
            prop_assert!((r.determinant() - 1.0).abs() < 1e-12);
            let composed = rz(psi) * ry(theta) * rx(phi);
            prop_assert!((r - composed).abs().max() < 1e-12);
        }

        #[test]
        fn euler_rate_determinant_is_cos_theta(
            phi in -1.5f64..1.5, theta in -1.5f64..1.5, psi in -3.0f64..3.0
        ) {
            let eta = EulerAngles::new(phi, theta, psi).unwrap();
            let w = euler_rate_map(&eta);
            prop_assert!((w.matrix.determinant() - theta.cos()).abs() < 1e-12);
            prop_assert!((w.determinant - theta.cos()).abs() < 1e-12);
        }

        #[test]
        fn torque_inputs_enter_linearly(
            state in proptest::collection::vec(-1.0f64..1.0, 12),
            thrust in 0.0f64..20.0,
            du in proptest::collection::vec(-5.0f64..5.0, 3),
            omega_bar in -500.0f64..500.0,
        ) {
            let p = QuadParams::default();
            let k = p.coefficients();
            let x = State12(SVector::from_column_slice(&state));
            let u = ControlInput4::new(thrust, 0.1, -0.2, 0.3).unwrap();
            let shifted = ControlInput4 {
                roll: u.roll + du[0],
                pitch: u.pitch + du[1],
                yaw: u.yaw + du[2],
                ..u
            };
            let diff = full_dynamics(&x, &shifted, &p, omega_bar) - full_dynamics(&x, &u, &p, omega_bar);
            for i in 0..12 {
                let expected = match i {
                    State12::PHI_RATE => k.roll_input * du[0],
                    State12::THETA_RATE => k.pitch_input * du[1],
                    State12::PSI_RATE => k.yaw_input * du[2],
                    _ => 0.0,
                };
                prop_assert!((diff[i] - expected).abs() <= 1e-9 * (1.0 + expected.abs()));
            }
        }

        #[test]
        fn storage_positive_definite(
            x in -10.0f64..10.0, xd in -10.0f64..10.0, y in -10.0f64..10.0, yd in -10.0f64..10.0,
            kx in 0.1f64..20.0, ky in 0.1f64..20.0,
        ) {
            let s = HorizState::new(x, xd, y, yd);
            let v = storage_value(&s, &Vector2::new(kx, ky), &QuadParams::default());
            prop_assert!(v >= 0.0);
            prop_assert_eq!(v == 0.0, x == 0.0 && xd == 0.0 && y == 0.0 && yd == 0.0);
        }
    }
}
