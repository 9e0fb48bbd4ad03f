//! Velocity-free horizontal position control of quadrotors using
//! negative-imaginary feedback.
//!
//! * [`quadmodel`]: airframe constants, kinematics, the twelve-state vector
//!   field and the reshaped horizontal subsystem with its storage function.
//! * [`ni_analysis`]: NI/SNI frequency tests, residue and storage-matrix
//!   certificates, dissipation audits and steady-state sector checks.
//! * [`control`]: inner proportional loop, integral resonant outer loop and
//!   the parameter condition tying them together.
//! * [`sim`]: fixed-step RK4 closed-loop simulation and trajectory logs.

pub mod control;
pub mod error;
pub mod ni_analysis;
pub mod quadmodel;
pub mod sim;

pub use control::{ControllerParams, ControllerState};
pub use error::{Error, Result};
pub use ni_analysis::{DissipationReport, FrequencyGrid, NiClass, NiVerdict, StateSpace};
pub use quadmodel::{ControlInput4, EulerAngles, HorizState, QuadParams, State12};
pub use sim::{SimConfig, SimMode, TrajectoryLog};
