//! Fixed-step closed-loop simulation.

mod full;
mod log;
mod rk4;

pub use full::{simulate_full_quadrotor, thrust_attitude_inversion, AttitudeCommand, TILT_LIMIT};
pub use log::{LogColumns, TrajectoryLog, CSV_HEADER};
pub use rk4::rk4_step;

use nalgebra::{SVector, Vector2};
use serde::{Deserialize, Serialize};

use crate::control::{sni_controller_derivative, validate_params, ControllerParams, ControllerState};
use crate::error::{Error, Result};
use crate::quadmodel::{reshaped_horizontal_dynamics, storage_value, HorizState, QuadParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimMode {
    /// Reshaped point-mass horizontal dynamics.
    #[default]
    HorizontalPointmass,
    /// Twelve-state rigid body with ideal attitude tracking.
    FullQuadrotor,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub t_final: f64,
    pub dt: f64,
    pub initial_horiz: HorizState,
    pub initial_ctrl: ControllerState,
    /// Constant force added to the horizontal force channel (N).
    pub disturbance: Option<Vector2<f64>>,
    pub mode: SimMode,
    pub log_decimation: usize,
    /// Run even when the controller parameters fail the sector-bound check.
    pub override_validation: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            t_final: 30.0,
            dt: 1e-3,
            initial_horiz: HorizState::new(2.0, 0.0, -1.5, 0.0),
            initial_ctrl: ControllerState::default(),
            disturbance: None,
            mode: SimMode::HorizontalPointmass,
            log_decimation: 10,
            override_validation: false,
        }
    }
}

impl SimConfig {
    /// Checks the run settings; the error names the offending field.
    pub fn validate(&self) -> Result<()> {
        let bad = |name: &'static str, reason: String| Err(Error::InvalidParameter { name, reason });
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad("dt", format!("must be finite and > 0, got {}", self.dt));
        }
        if !(self.t_final.is_finite() && self.t_final >= self.dt) {
            return bad(
                "t_final",
                format!("must be finite and >= dt = {}, got {}", self.dt, self.t_final),
            );
        }
        if self.log_decimation == 0 {
            return bad("log_decimation", "must be >= 1".into());
        }
        if !self.initial_horiz.is_finite() {
            return bad("initial_horiz", "must be finite".into());
        }
        if !self.initial_ctrl.0.iter().all(|v| v.is_finite()) {
            return bad("initial_ctrl", "must be finite".into());
        }
        if let Some(w) = self.disturbance {
            if !w.iter().all(|v| v.is_finite()) {
                return bad("disturbance", "must be finite".into());
            }
        }
        Ok(())
    }

    /// Number of integration steps, `round(t_final / dt)`.
    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }

    fn disturbance_or_zero(&self) -> Vector2<f64> {
        self.disturbance.unwrap_or_else(Vector2::zeros)
    }
}

/// Shared preconditions of both simulation modes.
fn check_inputs(qp: &QuadParams, cp: &ControllerParams, sc: &SimConfig) -> Result<()> {
    sc.validate().map_err(|e| Error::ConfigInvalid(e.to_string()))?;
    qp.validate().map_err(|e| Error::ConfigInvalid(e.to_string()))?;
    cp.validate().map_err(|e| Error::ConfigInvalid(e.to_string()))?;
    let check = validate_params(qp, cp);
    if !check.passed && !sc.override_validation {
        return Err(Error::ConfigInvalid(format!(
            "delta = {} violates the sector-bound condition delta >= delta_min = {} (margin {})",
            cp.delta, check.delta_min, check.margin
        )));
    }
    Ok(())
}

/// Runs the configured mode.
pub fn simulate(qp: &QuadParams, cp: &ControllerParams, sc: &SimConfig) -> Result<TrajectoryLog> {
    match sc.mode {
        SimMode::HorizontalPointmass => simulate_closed_loop(qp, cp, sc),
        SimMode::FullQuadrotor => simulate_full_quadrotor(qp, cp, sc),
    }
}

type Loop6 = SVector<f64, 6>;

fn unpack(s: &Loop6) -> (HorizState, ControllerState) {
    (
        HorizState::new(s[0], s[1], s[2], s[3]),
        ControllerState(Vector2::new(s[4], s[5])),
    )
}

/// Integrates the reshaped plant in positive feedback with the integral
/// resonant controller: `m xi'' = -m Kp xi + z + w`, `z' = -Gamma Delta z +
/// Gamma xi`.
pub fn simulate_closed_loop(
    qp: &QuadParams,
    cp: &ControllerParams,
    sc: &SimConfig,
) -> Result<TrajectoryLog> {
    check_inputs(qp, cp, sc)?;
    let w = sc.disturbance_or_zero();
    let field = |_t: f64, s: &Loop6| -> Result<Loop6> {
        let (h, z) = unpack(s);
        let force = z.output() + w;
        let plant = reshaped_horizontal_dynamics(&h, &force, &cp.kp, qp);
        let ctrl = sni_controller_derivative(&z, &h.position(), cp);
        Ok(Loop6::new(plant[0], plant[1], plant[2], plant[3], ctrl.x, ctrl.y))
    };

    let h0 = sc.initial_horiz;
    let z0 = sc.initial_ctrl.0;
    let mut state = Loop6::new(h0.x, h0.xdot, h0.y, h0.ydot, z0.x, z0.y);
    let steps = sc.steps();
    let mut log = TrajectoryLog::default();
    let record = |log: &mut TrajectoryLog, t: f64, s: &Loop6| {
        let (h, z) = unpack(s);
        log.push(t, h, z, z.output() + w, storage_value(&h, &cp.kp, qp));
    };
    record(&mut log, 0.0, &state);
    for k in 0..steps {
        let t = k as f64 * sc.dt;
        state = rk4_step(field, &state, t, sc.dt)?;
        if (k + 1) % sc.log_decimation == 0 {
            record(&mut log, (k + 1) as f64 * sc.dt, &state);
        }
    }
    Ok(log)
}
