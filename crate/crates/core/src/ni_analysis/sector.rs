use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorReport {
    pub gamma: f64,
    pub passed: bool,
    /// Largest `|y2| / |u1|` over the nonzero samples.
    pub worst_ratio: f64,
    pub worst_sample: Option<[f64; 2]>,
    /// Every steady-state pair satisfies `y1' y2 >= 0`.
    pub positivity: bool,
    pub min_inner_product: f64,
}

/// Checks the steady-state sector bound `|y2|^2 <= gamma^2 |u1|^2` and the
/// positivity condition `y1' y2 >= 0` on the open-loop steady-state chain
/// `u1 -> y1 = plant(u1) -> y2 = controller(y1)`.
pub fn sector_bound_check(
    gamma: f64,
    u1_samples: &[Vector2<f64>],
    plant_map: impl Fn(&Vector2<f64>) -> Vector2<f64>,
    ctrl_map: impl Fn(&Vector2<f64>) -> Vector2<f64>,
) -> Result<SectorReport> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidParameter {
            name: "gamma",
            reason: format!("must lie in (0, 1), got {gamma}"),
        });
    }
    let mut report = SectorReport {
        gamma,
        passed: true,
        worst_ratio: 0.0,
        worst_sample: None,
        positivity: true,
        min_inner_product: f64::INFINITY,
    };
    for u1 in u1_samples {
        let y1 = plant_map(u1);
        let y2 = ctrl_map(&y1);
        let inner = y1.dot(&y2);
        report.min_inner_product = report.min_inner_product.min(inner);
        if inner < 0.0 {
            report.positivity = false;
        }
        if y2.norm_squared() > gamma * gamma * u1.norm_squared() {
            report.passed = false;
        }
        let u_norm = u1.norm();
        if u_norm > 0.0 {
            let ratio = y2.norm() / u_norm;
            if ratio > report.worst_ratio {
                report.worst_ratio = ratio;
                report.worst_sample = Some([u1.x, u1.y]);
            }
        }
    }
    report.passed &= report.positivity;
    Ok(report)
}
