//! Continuous-time plant models and the simulator-side view of them.
//!
//! Each family integrates an internal state that may carry more than the
//! controller sees (the cylinder keeps both chamber pressures). [`Plant`]
//! maps internal states to the measured [`PlantState`], normalizing
//! pressures by supply pressure and valve openings by full opening so every
//! controller channel is of order one.
//!
//! Disturbance channels:
//!
//! | family    | D_1   | D_2            | D_3                | D_4               |
//! |-----------|-------|----------------|--------------------|-------------------|
//! | universal | ẋ_1   | load torque τ_L | supply voltage     | –                 |
//! | PMSM      | ẋ_1   | load force f_L | q-axis voltage     | d-axis voltage    |
//! | cylinder  | ẋ_1   | force D_L      | chamber flow q     | –                 |
//! | motor     | ẋ_1   | torque D_L     | load-pressure flow | valve command     |
//! | PDA       | ẋ_1   | ẋ_2            | jerk               | –                 |

pub mod disturbance;
pub mod hydraulic;
pub mod pmsm;
pub mod pneumatic;
pub mod universal;

pub use disturbance::{sample_disturbance, ChannelProfile, DisturbanceKind, DisturbanceProfile, DisturbanceSource};
pub use hydraulic::{hda_cylinder_derivative, hda_motor_derivative, HdaCylinderParams, HdaMotorParams, RadicandPolicy};
pub use pmsm::{pmsm_acceleration_row, pmsm_eda_derivative, PmsmEdaParams};
pub use pneumatic::{pda_derivative, PdaParams};
pub use universal::{universal_motor_derivative, UniversalMotorParams};

use crate::error::{Error, Result};
use crate::types::{subsystem_count, PlantFamily, PlantState, MAX_SUBSYSTEMS};

/// Internal integration state; unused trailing entries stay 0.
pub type InternalState = [f64; 4];

#[derive(Debug, Clone, PartialEq)]
pub enum PlantParams {
    Universal(UniversalMotorParams),
    Pmsm(PmsmEdaParams),
    HdaCylinder(HdaCylinderParams),
    HdaMotor(HdaMotorParams),
    Pda(PdaParams),
}

impl PlantParams {
    pub fn default_for(family: PlantFamily) -> Self {
        match family {
            PlantFamily::UniversalMotorEda => PlantParams::Universal(Default::default()),
            PlantFamily::PmsmEda => PlantParams::Pmsm(Default::default()),
            PlantFamily::HdaCylinder => PlantParams::HdaCylinder(Default::default()),
            PlantFamily::HdaMotorWithValve => PlantParams::HdaMotor(Default::default()),
            PlantFamily::PdaLinearized => PlantParams::Pda(Default::default()),
        }
    }

    pub fn family(&self) -> PlantFamily {
        match self {
            PlantParams::Universal(_) => PlantFamily::UniversalMotorEda,
            PlantParams::Pmsm(_) => PlantFamily::PmsmEda,
            PlantParams::HdaCylinder(_) => PlantFamily::HdaCylinder,
            PlantParams::HdaMotor(_) => PlantFamily::HdaMotorWithValve,
            PlantParams::Pda(_) => PlantFamily::PdaLinearized,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PlantParams::Universal(p) => p.validate(),
            PlantParams::Pmsm(p) => p.validate(),
            PlantParams::HdaCylinder(p) => p.validate(),
            PlantParams::HdaMotor(p) => p.validate(),
            PlantParams::Pda(p) => p.validate(),
        }
    }

    /// Parameters with every uncertainty and bias term removed.
    pub fn nominal(&self) -> Self {
        match self {
            PlantParams::Pmsm(p) => PlantParams::Pmsm(p.without_uncertainty()),
            PlantParams::Pda(p) => PlantParams::Pda(p.nominal()),
            other => other.clone(),
        }
    }

    /// Divisors taking internal SI channels to measured channels.
    pub fn signal_scale(&self) -> [f64; MAX_SUBSYSTEMS] {
        match self {
            PlantParams::HdaCylinder(p) => [1.0, 1.0, p.p_s, 1.0],
            PlantParams::HdaMotor(p) => [1.0, 1.0, p.p_s, p.max_opening()],
            _ => [1.0; MAX_SUBSYSTEMS],
        }
    }
}

/// Applied physical inputs: `(u_q, u_d)` for the PMSM, `(u, 0)` otherwise.
pub type PhysicalInputs = [f64; 2];

/// Derivative of the internal state plus a flag for clipped radicands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative {
    pub dx: InternalState,
    pub clipped: bool,
}

/// `ẋ_2 = α·x_3 + drift + load` in measured coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityRow {
    pub alpha: f64,
    pub drift: f64,
    pub load: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plant {
    params: PlantParams,
    policy: RadicandPolicy,
}

impl Plant {
    pub fn new(params: PlantParams, policy: RadicandPolicy) -> Result<Self> {
        params.validate()?;
        Ok(Plant { params, policy })
    }

    pub fn params(&self) -> &PlantParams {
        &self.params
    }

    pub fn family(&self) -> PlantFamily {
        self.params.family()
    }

    pub fn policy(&self) -> RadicandPolicy {
        self.policy
    }

    /// Internal state matching a measured state; cylinder chambers are
    /// split symmetrically about mid-pressure.
    pub fn internal_from_measured(&self, state: &PlantState) -> Result<InternalState> {
        if state.len() != subsystem_count(self.family()) {
            return Err(Error::StateDimension {
                family: self.family().name(),
                expected: subsystem_count(self.family()),
                got: state.len(),
            });
        }
        let scale = self.params.signal_scale();
        let x = state.padded();
        let mut si = [0.0; 4];
        for k in 0..4 {
            si[k] = x[k] * scale[k];
        }
        Ok(match &self.params {
            PlantParams::HdaCylinder(p) => {
                let (p_1, p_2) = p.chamber_pressures(si[2]);
                [si[0], si[1], p_1, p_2]
            }
            _ => si,
        })
    }

    /// Rest state at position `x_1`.
    pub fn rest(&self, x_1: f64) -> InternalState {
        match &self.params {
            PlantParams::HdaCylinder(p) => {
                let (p_1, p_2) = p.chamber_pressures(0.0);
                [x_1, 0.0, p_1, p_2]
            }
            _ => [x_1, 0.0, 0.0, 0.0],
        }
    }

    pub fn observe(&self, internal: &InternalState, t: f64) -> PlantState {
        let scale = self.params.signal_scale();
        let mut x = *internal;
        if let PlantParams::HdaCylinder(_) = self.params {
            x[2] = internal[2] - internal[3];
            x[3] = 0.0;
        }
        for k in 0..4 {
            x[k] /= scale[k];
        }
        PlantState::from_array(x, subsystem_count(self.family()), t)
    }

    pub fn derivative(&self, s: &InternalState, u: PhysicalInputs, d: &[f64; 4]) -> Result<Derivative> {
        let (mut dx, clipped) = match &self.params {
            PlantParams::Universal(p) => {
                let r = universal_motor_derivative(&[s[0], s[1], s[2]], u[0] + d[2], d[1], p)?;
                ([r[0], r[1], r[2], 0.0], false)
            }
            PlantParams::Pmsm(p) => (pmsm_eda_derivative(s, u[0] + d[2], u[1] + d[3], d[1], p)?, false),
            PlantParams::HdaCylinder(p) => {
                let r = hda_cylinder_derivative(s, u[0], d[1], d[2], p, self.policy)?;
                (r.dx, r.clipped)
            }
            PlantParams::HdaMotor(p) => {
                let r = hda_motor_derivative(s, u[0] + d[3], d[1], d[2], p, self.policy)?;
                (r.dx, r.clipped)
            }
            PlantParams::Pda(p) => {
                let r = pda_derivative(&[s[0], s[1], s[2]], u[0], p, d[2])?;
                ([r[0], r[1] + d[1], r[2], 0.0], false)
            }
        };
        dx[0] += d[0];
        Ok(Derivative { dx, clipped })
    }

    /// Velocity row split in measured coordinates, for diagnostics that need
    /// plant internals.
    pub fn velocity_row(&self, s: &InternalState, d: &[f64; 4]) -> VelocityRow {
        let scale = self.params.signal_scale();
        match &self.params {
            PlantParams::Universal(p) => VelocityRow {
                alpha: p.phi_m / p.j_m,
                drift: -(p.b_m * s[1] + p.tau_fs * p.friction_shape(s[1])) / p.j_m,
                load: -d[1] / p.j_m,
            },
            PlantParams::Pmsm(p) => {
                let r = pmsm_acceleration_row(s, d[1], p);
                VelocityRow {
                    alpha: r.alpha,
                    drift: r.drift,
                    load: r.load,
                }
            }
            PlantParams::HdaCylinder(p) => {
                let r = hydraulic::cylinder_acceleration_row(s, d[1], p);
                VelocityRow {
                    alpha: r.alpha * scale[2],
                    drift: r.drift,
                    load: r.load,
                }
            }
            PlantParams::HdaMotor(p) => {
                let r = hydraulic::motor_acceleration_row(s, d[1], p);
                VelocityRow {
                    alpha: r.alpha * scale[2],
                    drift: r.drift,
                    load: r.load,
                }
            }
            PlantParams::Pda(_) => VelocityRow {
                alpha: 1.0,
                drift: 0.0,
                load: d[1],
            },
        }
    }
}
