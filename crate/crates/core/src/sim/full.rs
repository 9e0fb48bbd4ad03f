//! Twelve-state simulation with an idealized attitude loop.
//!
//! Each vector-field evaluation converts the commanded horizontal force
//! (inner proportional loop plus controller output) into a thrust and a
//! roll/pitch attitude with yaw held at zero, and applies that attitude
//! instantaneously. The translational rows then come from the full rigid-body
//! vector field.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{SVector, Vector2};

use super::{check_inputs, rk4_step, SimConfig, TrajectoryLog};
use crate::control::{inner_loop_command, sni_controller_derivative, ControllerParams, ControllerState};
use crate::error::{Error, Result};
use crate::quadmodel::{full_dynamics, storage_value, ControlInput4, QuadParams, State12};

/// Largest admissible commanded roll or pitch magnitude (rad).
pub const TILT_LIMIT: f64 = FRAC_PI_2 - 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttitudeCommand {
    pub thrust: f64,
    pub phi: f64,
    pub theta: f64,
}

/// Solves the yaw-free force rows for thrust and attitude:
///
/// ```text
/// -u1 cos(phi) sin(theta) = Fx
///  u1 sin(phi)            = Fy
///  u1 cos(phi) cos(theta) = m g
/// ```
///
/// The solution is unique with `u1 = sqrt(Fx^2 + Fy^2 + (m g)^2)`, so `sin(phi)`
/// never exceeds one; large forces instead drive the angles toward
/// [`TILT_LIMIT`], which is reported as [`Error::AttitudeBound`].
pub fn thrust_attitude_inversion(force: &Vector2<f64>, qp: &QuadParams) -> Result<AttitudeCommand> {
    let weight = qp.m * qp.g;
    let planar = force.x.hypot(weight);
    let thrust = force.y.hypot(planar);
    let phi = force.y.atan2(planar);
    let theta = (-force.x).atan2(weight);
    if !(phi.abs() < TILT_LIMIT && theta.abs() < TILT_LIMIT) {
        return Err(Error::AttitudeBound { phi, theta, limit: TILT_LIMIT });
    }
    Ok(AttitudeCommand { thrust, phi, theta })
}

type Full14 = SVector<f64, 14>;

fn split(s: &Full14) -> (State12, ControllerState) {
    (
        State12(s.fixed_rows::<12>(0).into_owned()),
        ControllerState(Vector2::new(s[12], s[13])),
    )
}

/// Commanded total horizontal force `m * (-Kp xi) + z + w`.
fn commanded_force(body: &State12, z: &ControllerState, cp: &ControllerParams, qp: &QuadParams, w: &Vector2<f64>) -> Vector2<f64> {
    let xi = body.horizontal().position();
    inner_loop_command(&xi, &Vector2::zeros(), &cp.kp) * qp.m + z.output() + w
}

fn with_attitude(body: &State12, cmd: &AttitudeCommand) -> State12 {
    let mut s = *body;
    s.0[State12::PHI] = cmd.phi;
    s.0[State12::THETA] = cmd.theta;
    s.0[State12::PSI] = 0.0;
    s.0[State12::PHI_RATE] = 0.0;
    s.0[State12::THETA_RATE] = 0.0;
    s.0[State12::PSI_RATE] = 0.0;
    s
}

pub fn simulate_full_quadrotor(
    qp: &QuadParams,
    cp: &ControllerParams,
    sc: &SimConfig,
) -> Result<TrajectoryLog> {
    check_inputs(qp, cp, sc)?;
    let w = sc.disturbance.unwrap_or_else(Vector2::zeros);

    let field = |_t: f64, s: &Full14| -> Result<Full14> {
        let (body, z) = split(s);
        let cmd = thrust_attitude_inversion(&commanded_force(&body, &z, cp, qp, &w), qp)?;
        let u = ControlInput4::new(cmd.thrust, 0.0, 0.0, 0.0)?;
        let f = full_dynamics(&with_attitude(&body, &cmd), &u, qp, 0.0);
        let zdot = sni_controller_derivative(&z, &body.horizontal().position(), cp);
        let mut out = Full14::zeros();
        out.fixed_rows_mut::<6>(0).copy_from(&f.fixed_rows::<6>(0));
        out[12] = zdot.x;
        out[13] = zdot.y;
        Ok(out)
    };
    // Snap the stored attitude to the current command so the logged state is
    // consistent with the ideal attitude loop.
    let settle = |s: &mut Full14| -> Result<()> {
        let (body, z) = split(s);
        let cmd = thrust_attitude_inversion(&commanded_force(&body, &z, cp, qp, &w), qp)?;
        s.fixed_rows_mut::<12>(0).copy_from(&with_attitude(&body, &cmd).0);
        Ok(())
    };

    let h0 = sc.initial_horiz;
    let mut state = Full14::zeros();
    state[State12::X] = h0.x;
    state[State12::VX] = h0.xdot;
    state[State12::Y] = h0.y;
    state[State12::VY] = h0.ydot;
    state[12] = sc.initial_ctrl.0.x;
    state[13] = sc.initial_ctrl.0.y;
    settle(&mut state)?;

    let mut log = TrajectoryLog::default();
    let record = |log: &mut TrajectoryLog, t: f64, s: &Full14| {
        let (body, z) = split(s);
        let h = body.horizontal();
        log.push(t, h, z, z.output() + w, storage_value(&h, &cp.kp, qp));
    };
    record(&mut log, 0.0, &state);
    for k in 0..sc.steps() {
        state = rk4_step(field, &state, k as f64 * sc.dt, sc.dt)?;
        settle(&mut state)?;
        if (k + 1) % sc.log_decimation == 0 {
            record(&mut log, (k + 1) as f64 * sc.dt, &state);
        }
    }
    Ok(log)
}
