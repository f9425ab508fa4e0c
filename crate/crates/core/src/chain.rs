//! Subsystem decomposition: which reference each state tracks and which
//! controls leave the controller as physical inputs.

use crate::error::{Error, Result};
use crate::types::{subsystem_count, PlantFamily, ReferenceFrame, SaturationLimits, TrajectorySample};

/// Where a subsystem's desired value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceSource {
    TrajectoryPosition,
    TrajectoryVelocity,
    TrajectoryAcceleration,
    ControlU1,
    ControlU2,
    ConstantZero,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubsystemChain {
    pub family: PlantFamily,
    pub n: usize,
    pub routing: Vec<ReferenceSource>,
    /// Index of the last cascade stage's control (`n − 1`). The PMSM also
    /// applies `u_2` directly, see [`SubsystemChain::physical_inputs`].
    pub physical_input_index: usize,
    /// Limits for `u_1..u_{n-1}`; `limits[0]` belongs to `u_1`.
    pub limits: Vec<SaturationLimits>,
}

impl SubsystemChain {
    /// Limits of control `u_υ`, `υ ≥ 1`.
    pub fn limits_of(&self, upsilon: usize) -> SaturationLimits {
        self.limits[upsilon - 1]
    }

    /// Control indices applied to the plant, in plant-input order. The PMSM
    /// d-axis loop runs in parallel, so both `u_2 = u_q` and `u_3 = u_d`
    /// reach the plant.
    pub fn physical_inputs(&self) -> &'static [usize] {
        match self.family {
            PlantFamily::PmsmEda => &[2, 3],
            PlantFamily::HdaMotorWithValve => &[3],
            _ => &[2],
        }
    }
}

pub fn build_chain(family: PlantFamily, limits: &[SaturationLimits]) -> Result<SubsystemChain> {
    use ReferenceSource::*;
    let n = subsystem_count(family);
    if limits.len() != n - 1 {
        return Err(Error::LimitCount {
            family: family.name(),
            expected: n - 1,
            got: limits.len(),
        });
    }
    for l in limits {
        l.validate()?;
    }
    let routing = match family {
        PlantFamily::PdaLinearized => vec![TrajectoryPosition, TrajectoryVelocity, TrajectoryAcceleration],
        PlantFamily::UniversalMotorEda | PlantFamily::HdaCylinder => {
            vec![TrajectoryPosition, TrajectoryVelocity, ControlU1]
        }
        PlantFamily::PmsmEda => vec![TrajectoryPosition, TrajectoryVelocity, ControlU1, ConstantZero],
        PlantFamily::HdaMotorWithValve => vec![TrajectoryPosition, TrajectoryVelocity, ControlU1, ControlU2],
    };
    Ok(SubsystemChain {
        family,
        n,
        routing,
        physical_input_index: if n == 3 { 2 } else { 3 },
        limits: limits.to_vec(),
    })
}

/// Desired values for this tick. `controls = (u_1, u_2)` as they act as
/// references, i.e. already saturated where the controller saturates them.
///
/// For the pneumatic chain the acceleration reference is the trajectory's
/// acceleration with `u_1` added as a correction; `u_1 = 0` yields `ẍ_d`.
pub fn assemble_references(chain: &SubsystemChain, traj: TrajectorySample, controls: (f64, f64)) -> ReferenceFrame {
    let pick = |source: ReferenceSource| match source {
        ReferenceSource::TrajectoryPosition => traj.position,
        ReferenceSource::TrajectoryVelocity => traj.velocity,
        ReferenceSource::TrajectoryAcceleration => traj.acceleration + controls.0,
        ReferenceSource::ControlU1 => controls.0,
        ReferenceSource::ControlU2 => controls.1,
        ReferenceSource::ConstantZero => 0.0,
    };
    ReferenceFrame {
        x1d: pick(chain.routing[0]),
        x2d: pick(chain.routing[1]),
        x3d: pick(chain.routing[2]),
        x4d: chain.routing.get(3).map(|&s| pick(s)),
    }
}
