//! Model-free generic robust control (GRC) for servo actuators, with the
//! nonlinear plant models needed to exercise it.
//!
//! The controller ([`grc`]) sees only measured states, references and its
//! own gains. Plants ([`plants`]) cover a universal motor, a PMSM ball-screw
//! stage, a hydraulic cylinder, a hydraulic motor with valve dynamics and a
//! linearized pneumatic cylinder. [`sim`] closes the loop at a fixed control
//! rate and records [`telemetry`].

pub mod chain;
pub mod config;
pub mod error;
pub mod grc;
pub mod plants;
pub mod reference;
pub mod saturation;
pub mod sim;
pub mod telemetry;
pub mod types;

pub use error::{Error, Result};
pub use types::{
    subsystem_count, GainSet, PlantFamily, PlantState, ReferenceFrame, SaturationLimits, SubsystemGains,
    TrajectorySample, MAX_SUBSYSTEMS,
};
