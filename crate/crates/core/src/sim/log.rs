use std::io::Write;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::control::ControllerState;
use crate::error::Result;
use crate::ni_analysis::{nni_trajectory_audit, DissipationReport};
use crate::quadmodel::{storage_value, HorizState, QuadParams};

/// Column header of the CSV export.
pub const CSV_HEADER: &str = "t,x,xdot,y,ydot,z1,z2,Fx,Fy,V";

/// Decimated closed-loop trajectory. All sequences have equal length.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrajectoryLog {
    pub times: Vec<f64>,
    pub horiz_states: Vec<HorizState>,
    pub ctrl_states: Vec<ControllerState>,
    /// Horizontal force applied to the reshaped plant.
    pub forces: Vec<Vector2<f64>>,
    pub storage: Vec<f64>,
    /// Dissipation residuals, filled by [`TrajectoryLog::audit`].
    pub residuals: Option<Vec<f64>>,
}

#[derive(Serialize)]
struct CsvRow {
    t: f64,
    x: f64,
    xdot: f64,
    y: f64,
    ydot: f64,
    z1: f64,
    z2: f64,
    #[serde(rename = "Fx")]
    fx: f64,
    #[serde(rename = "Fy")]
    fy: f64,
    #[serde(rename = "V")]
    v: f64,
}

/// Column-oriented JSON form of a log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogColumns {
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    pub xdot: Vec<f64>,
    pub y: Vec<f64>,
    pub ydot: Vec<f64>,
    pub z1: Vec<f64>,
    pub z2: Vec<f64>,
    #[serde(rename = "Fx")]
    pub fx: Vec<f64>,
    #[serde(rename = "Fy")]
    pub fy: Vec<f64>,
    #[serde(rename = "V")]
    pub v: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub residuals: Option<Vec<f64>>,
}

impl TrajectoryLog {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub(crate) fn push(
        &mut self,
        t: f64,
        s: HorizState,
        z: ControllerState,
        force: Vector2<f64>,
        v: f64,
    ) {
        self.times.push(t);
        self.horiz_states.push(s);
        self.ctrl_states.push(z);
        self.forces.push(force);
        self.storage.push(v);
    }

    pub fn position_norms(&self) -> Vec<f64> {
        self.horiz_states.iter().map(|s| s.position().norm()).collect()
    }

    pub fn final_position_norm(&self) -> Option<f64> {
        self.horiz_states.last().map(|s| s.position().norm())
    }

    /// First logged time after which `|xi_h|` stays below
    /// `fraction * |xi_h(0)|`. `None` if the last sample is still outside.
    pub fn settling_time(&self, fraction: f64) -> Option<f64> {
        let norms = self.position_norms();
        let bound = fraction * norms.first().copied()?;
        let last_outside = norms.iter().rposition(|&n| n >= bound && n > 0.0);
        match last_outside {
            None => Some(self.times[0]),
            Some(k) if k + 1 < norms.len() => Some(self.times[k + 1]),
            Some(_) => None,
        }
    }

    /// Audits `V' <= xi'^T F_h` on the logged samples and stores the
    /// residual series in `self.residuals`.
    pub fn audit(&mut self, qp: &QuadParams, kp: &Vector2<f64>, tol: f64) -> Result<DissipationReport> {
        let inputs: Vec<[f64; 2]> = self.forces.iter().map(|f| [f.x, f.y]).collect();
        let outputs: Vec<[f64; 2]> = self.horiz_states.iter().map(|s| [s.x, s.y]).collect();
        let report = nni_trajectory_audit(
            &self.times,
            &self.horiz_states,
            &inputs,
            &outputs,
            |s| storage_value(s, kp, qp),
            tol,
        )?;
        self.residuals = Some(report.residual_series.clone());
        Ok(report)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for k in 0..self.len() {
            let s = &self.horiz_states[k];
            let z = self.ctrl_states[k].0;
            let f = self.forces[k];
            w.serialize(CsvRow {
                t: self.times[k],
                x: s.x,
                xdot: s.xdot,
                y: s.y,
                ydot: s.ydot,
                z1: z.x,
                z2: z.y,
                fx: f.x,
                fy: f.y,
                v: self.storage[k],
            })?;
        }
        if self.is_empty() {
            w.write_record(CSV_HEADER.split(','))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    pub fn columns(&self) -> LogColumns {
        let col = |f: &dyn Fn(usize) -> f64| (0..self.len()).map(f).collect::<Vec<_>>();
        LogColumns {
            t: self.times.clone(),
            x: col(&|k| self.horiz_states[k].x),
            xdot: col(&|k| self.horiz_states[k].xdot),
            y: col(&|k| self.horiz_states[k].y),
            ydot: col(&|k| self.horiz_states[k].ydot),
            z1: col(&|k| self.ctrl_states[k].0.x),
            z2: col(&|k| self.ctrl_states[k].0.y),
            fx: col(&|k| self.forces[k].x),
            fy: col(&|k| self.forces[k].y),
            v: self.storage.clone(),
            residuals: self.residuals.clone(),
        }
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string(&self.columns())
    }
}
