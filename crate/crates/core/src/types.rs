//! Domain types shared by every module.
//!
//! Units are SI throughout (m, rad, s, A, V, Pa, N, N·m). Signals handed to
//! the controller may be normalized per channel (see `plants::Plant::observe`);
//! the normalized values are what telemetry records.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};

/// Upper bound on the number of subsystems in any chain.
pub const MAX_SUBSYSTEMS: usize = 4;

/// Actuator families with a complete plant model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlantFamily {
    /// Series-wound (single-phase) motor driving a rotary or linear load.
    UniversalMotorEda,
    /// PMSM in the d-q frame driving a ball-screw linear load.
    PmsmEda,
    /// Double-rod cylinder behind a fast servo valve (valve dynamics neglected).
    HdaCylinder,
    /// Hydraulic motor with first-order spool dynamics.
    HdaMotorWithValve,
    /// Pneumatic cylinder, third-order linearized model.
    PdaLinearized,
}

impl PlantFamily {
    pub const ALL: [PlantFamily; 5] = [
        PlantFamily::UniversalMotorEda,
        PlantFamily::PmsmEda,
        PlantFamily::HdaCylinder,
        PlantFamily::HdaMotorWithValve,
        PlantFamily::PdaLinearized,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PlantFamily::UniversalMotorEda => "universal-motor-eda",
            PlantFamily::PmsmEda => "pmsm-eda",
            PlantFamily::HdaCylinder => "hda-cylinder",
            PlantFamily::HdaMotorWithValve => "hda-motor-valve",
            PlantFamily::PdaLinearized => "pda-linearized",
        }
    }
}

/// Number of subsystems in the decomposition of `family`.
pub fn subsystem_count(family: PlantFamily) -> usize {
    match family {
        PlantFamily::UniversalMotorEda | PlantFamily::HdaCylinder | PlantFamily::PdaLinearized => 3,
        PlantFamily::PmsmEda | PlantFamily::HdaMotorWithValve => 4,
    }
}

impl fmt::Display for PlantFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PlantFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        for family in PlantFamily::ALL {
            if family.name() == key {
                return Ok(family);
            }
        }
        match key.as_str() {
            "pda-valve" | "pda-with-valve" => Err(Error::UnsupportedFamily(key)),
            _ => Err(Error::UnknownFamily(s.trim().to_string())),
        }
    }
}

/// Measured state vector of one actuator, `x_1..x_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantState {
    x: [f64; MAX_SUBSYSTEMS],
    len: usize,
    pub t: f64,
}

impl PlantState {
    pub fn new(family: PlantFamily, x: &[f64], t: f64) -> Result<Self> {
        let n = subsystem_count(family);
        if x.len() != n {
            return Err(Error::StateDimension {
                family: family.name(),
                expected: n,
                got: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) || !t.is_finite() {
            return Err(Error::NonFinite("plant state"));
        }
        let mut buf = [0.0; MAX_SUBSYSTEMS];
        buf[..n].copy_from_slice(x);
        Ok(PlantState { x: buf, len: n, t })
    }

    pub(crate) fn from_array(x: [f64; MAX_SUBSYSTEMS], len: usize, t: f64) -> Self {
        PlantState { x, len, t }
    }

    pub fn x(&self) -> &[f64] {
        &self.x[..self.len]
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// 1-based state accessor; absent entries read as 0.
    pub fn get(&self, j: usize) -> f64 {
        if j >= 1 && j <= self.len {
            self.x[j - 1]
        } else {
            0.0
        }
    }

    /// Padded copy of the state, absent entries 0.
    pub fn padded(&self) -> [f64; MAX_SUBSYSTEMS] {
        self.x
    }
}

/// Desired values `x_1d..x_4d` at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReferenceFrame {
    pub x1d: f64,
    pub x2d: f64,
    pub x3d: f64,
    pub x4d: Option<f64>,
}

impl ReferenceFrame {
    /// 1-based accessor; an absent fourth reference reads as 0.
    pub fn get(&self, j: usize) -> f64 {
        match j {
            1 => self.x1d,
            2 => self.x2d,
            3 => self.x3d,
            4 => self.x4d.unwrap_or(0.0),
            _ => 0.0,
        }
    }
}

/// One sample of a desired trajectory: position, velocity, acceleration.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrajectorySample {
    pub position: f64,
    pub velocity: f64,
    pub acceleration: f64,
}

impl TrajectorySample {
    pub fn new(position: f64, velocity: f64, acceleration: f64) -> Self {
        TrajectorySample {
            position,
            velocity,
            acceleration,
        }
    }
}

/// Bounds on one control input. `0` need not lie inside the range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaturationLimits {
    pub u_min: f64,
    pub u_max: f64,
}

impl SaturationLimits {
    pub fn new(u_min: f64, u_max: f64) -> Result<Self> {
        let limits = SaturationLimits { u_min, u_max };
        limits.validate()?;
        Ok(limits)
    }

    /// Effectively unbounded limits.
    pub fn unbounded() -> Self {
        SaturationLimits {
            u_min: f64::MIN,
            u_max: f64::MAX,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.u_min.is_finite() && self.u_max.is_finite()) {
            return Err(invalid("limits", "bounds must be finite"));
        }
        if self.u_min >= self.u_max {
            return Err(invalid(
                "limits",
                format!("u_min ({}) must be below u_max ({})", self.u_min, self.u_max),
            ));
        }
        Ok(())
    }

    pub fn contains(&self, u: f64) -> bool {
        self.u_min <= u && u <= self.u_max
    }
}

/// Gains of one subsystem's control and adaptive law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsystemGains {
    pub k: f64,
    pub epsilon: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl SubsystemGains {
    pub fn new(k: f64, epsilon: f64, gamma: f64, delta: f64) -> Self {
        SubsystemGains {
            k,
            epsilon,
            gamma,
            delta,
        }
    }
}

/// Per-subsystem gains, indexed by `υ = 0..n-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GainSet {
    gains: Vec<SubsystemGains>,
}

impl GainSet {
    pub fn new(gains: Vec<SubsystemGains>) -> Result<Self> {
        if gains.is_empty() || gains.len() > MAX_SUBSYSTEMS {
            return Err(invalid(
                "gains",
                format!("expected 1..={MAX_SUBSYSTEMS} subsystems, got {}", gains.len()),
            ));
        }
        for (v, g) in gains.iter().enumerate() {
            if !(g.k.is_finite() && g.k >= 0.0) {
                return Err(invalid(format!("k{v}"), "k must satisfy k >= 0"));
            }
            if !(g.epsilon.is_finite() && g.epsilon > 0.0) {
                return Err(invalid(format!("epsilon{v}"), "epsilon must satisfy epsilon > 0"));
            }
            if !(g.gamma.is_finite() && g.gamma > 0.0) {
                return Err(invalid(format!("gamma{v}"), "gamma must satisfy gamma > 0"));
            }
            if !(g.delta.is_finite() && g.delta > 0.0) {
                return Err(invalid(format!("delta{v}"), "delta must satisfy delta > 0"));
            }
        }
        Ok(GainSet { gains })
    }

    /// The same gains for all `n` subsystems.
    pub fn uniform(n: usize, gains: SubsystemGains) -> Result<Self> {
        GainSet::new(vec![gains; n])
    }

    pub fn len(&self) -> usize {
        self.gains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gains.is_empty()
    }

    pub fn get(&self, v: usize) -> &SubsystemGains {
        &self.gains[v]
    }

    pub fn iter(&self) -> impl Iterator<Item = &SubsystemGains> {
        self.gains.iter()
    }
}
