//! Model-free generic robust control.
//!
//! Per tick, in cascade order:
//!
//! ```text
//! z_1 = x_1 − x_1d                 u_0 = −½(k_0 + ε_0 χ̂_0) z_1
//! z_2 = x_2 − x_2d − u_0           u_1 = −½(k_1 + ε_1 χ̂_1) z_2 − z_1
//! z_3 = x_3 − x_3d                 u_2 = −½(k_2 + ε_2 χ̂_2) z_3
//! z_4 = x_4 − x_4d                 u_3 = −½(k_3 + ε_3 χ̂_3) z_4
//! χ̂_υ' = χ̂_υ + dt (−γ_υ δ_υ χ̂_υ + ½ ε_υ γ_υ z_{υ+1}²)
//! ```
//!
//! Nothing here knows the plant: the controller sees measured states,
//! references, gains and the tick length only.

pub mod pid;

pub use pid::{pid_tick, PidGains, PidState};

use crate::chain::{assemble_references, SubsystemChain};
use crate::error::{Error, Result};
use crate::saturation::{saturate, SaturationSplit};
use crate::types::{
    GainSet, PlantFamily, PlantState, ReferenceFrame, SubsystemGains, TrajectorySample, MAX_SUBSYSTEMS,
};

/// Errors `e_j = x_j − x_jd` and transforms `z_j`, 1-based `j` stored at `j−1`.
pub fn tracking_transform(
    chain: &SubsystemChain,
    state: &PlantState,
    refs: &ReferenceFrame,
    u_0: f64,
) -> ([f64; MAX_SUBSYSTEMS], [f64; MAX_SUBSYSTEMS]) {
    let mut e = [0.0; MAX_SUBSYSTEMS];
    let mut z = [0.0; MAX_SUBSYSTEMS];
    for j in 1..=chain.n {
        e[j - 1] = state.get(j) - refs.get(j);
        z[j - 1] = if j == 2 { e[j - 1] - u_0 } else { e[j - 1] };
    }
    (e, z)
}

/// Raw control `u_υ` from `z` (0-based storage of the 1-based `z_j`).
pub fn grc_control(upsilon: usize, gains: &SubsystemGains, chi: f64, z: &[f64]) -> f64 {
    let u = -0.5 * (gains.k + gains.epsilon * chi) * z[upsilon];
    if upsilon == 1 {
        u - z[0]
    } else {
        u
    }
}

/// One explicit-Euler step of the adaptive law, floored at zero.
pub fn adaptive_update(chi: f64, gains: &SubsystemGains, z: f64, dt: f64) -> f64 {
    let rate = -gains.gamma * gains.delta * chi + 0.5 * gains.epsilon * gains.gamma * z * z;
    (chi + dt * rate).max(0.0)
}

/// `dt·γ·δ < 1` keeps the discrete decay factor positive.
pub fn check_adaptive_step(gains: &GainSet, dt: f64) -> Result<()> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::ConfigInvariant("dt must be > 0".into()));
    }
    for (v, g) in gains.iter().enumerate() {
        let product = dt * g.gamma * g.delta;
        if product >= 1.0 {
            return Err(Error::ConfigInvariant(format!(
                "adaptive law {v} unstable: dt*gamma*delta = {product} must be < 1"
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrcState {
    pub gains: GainSet,
    pub chi: [f64; MAX_SUBSYSTEMS],
    /// Clip `u_1` before it becomes the next reference.
    pub saturate_u1: bool,
}

impl GrcState {
    pub fn new(gains: GainSet, chi0: &[f64], saturate_u1: bool) -> Result<Self> {
        if chi0.len() != gains.len() {
            return Err(Error::ConfigInvariant(format!(
                "expected {} initial estimates, got {}",
                gains.len(),
                chi0.len()
            )));
        }
        let mut chi = [0.0; MAX_SUBSYSTEMS];
        for (slot, &c) in chi.iter_mut().zip(chi0) {
            if !(c.is_finite() && c >= 0.0) {
                return Err(Error::ConfigInvariant("initial estimates must be >= 0".into()));
            }
            *slot = c;
        }
        Ok(GrcState {
            gains,
            chi,
            saturate_u1,
        })
    }

    /// Default saturation of `u_1`: on only where it is a correction to a
    /// trajectory-fed reference.
    pub fn default_saturate_u1(family: PlantFamily) -> bool {
        family == PlantFamily::PdaLinearized
    }
}

/// Everything one controller tick produced.
#[derive(Debug, Clone, PartialEq)]
pub struct TickOutput {
    pub refs: ReferenceFrame,
    pub e: [f64; MAX_SUBSYSTEMS],
    pub z: [f64; MAX_SUBSYSTEMS],
    /// Raw `u_0..u_3`.
    pub u: [f64; MAX_SUBSYSTEMS],
    /// Applied `u_1..u_3`: saturated where saturation applies.
    pub applied: [f64; 3],
    /// Plant inputs in plant order.
    pub physical: [f64; 2],
    /// Some physical input was clipped.
    pub clipped: bool,
    /// Estimates used this tick (before the update).
    pub chi: [f64; MAX_SUBSYSTEMS],
}

pub fn grc_tick(
    chain: &SubsystemChain,
    grc: &mut GrcState,
    state: &PlantState,
    traj: TrajectorySample,
    dt: f64,
) -> Result<TickOutput> {
    let n = chain.n;
    let g = |v: usize| *grc.gains.get(v);
    let chi = grc.chi;
    let mut u = [0.0; MAX_SUBSYSTEMS];
    let mut splits = [SaturationSplit::identity(0.0); 3];

    let x1d = traj.position;
    let z1 = state.get(1) - x1d;
    u[0] = grc_control(0, &g(0), chi[0], &[z1]);
    let z2 = state.get(2) - traj.velocity - u[0];
    u[1] = grc_control(1, &g(1), chi[1], &[z1, z2]);
    splits[0] = if grc.saturate_u1 {
        saturate(u[1], chain.limits_of(1))?
    } else {
        SaturationSplit::identity(u[1])
    };

    let refs_stage3 = assemble_references(chain, traj, (splits[0].value, 0.0));
    let z3 = state.get(3) - refs_stage3.x3d;
    u[2] = grc_control(2, &g(2), chi[2], &[z1, z2, z3]);
    splits[1] = saturate(u[2], chain.limits_of(2))?;

    let refs = assemble_references(chain, traj, (splits[0].value, splits[1].value));
    if n == 4 {
        let z4 = state.get(4) - refs.get(4);
        u[3] = grc_control(3, &g(3), chi[3], &[z1, z2, z3, z4]);
        splits[2] = saturate(u[3], chain.limits_of(3))?;
    }

    let (e, z) = tracking_transform(chain, state, &refs, u[0]);
    for v in 0..n {
        grc.chi[v] = adaptive_update(chi[v], &g(v), z[v], dt);
    }

    let mut physical = [0.0; 2];
    let mut clipped = false;
    for (slot, &v) in physical.iter_mut().zip(chain.physical_inputs()) {
        *slot = splits[v - 1].value;
        clipped |= splits[v - 1].is_clipped();
    }
    let mut applied = [0.0; 3];
    for v in 1..n {
        applied[v - 1] = splits[v - 1].value;
    }
    Ok(TickOutput {
        refs,
        e,
        z,
        u,
        applied,
        physical,
        clipped,
        chi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::build_chain;
    use crate::types::SaturationLimits;
    use proptest::prelude::*;

    fn published_gains() -> SubsystemGains {
        SubsystemGains::new(35.0, 1.0, 0.001, 0.01)
    }

    fn pmsm() -> (SubsystemChain, GrcState) {
        let l = SaturationLimits::new(-100.0, 100.0).unwrap();
        let chain = build_chain(PlantFamily::PmsmEda, &[l; 3]).unwrap();
        let grc = GrcState::new(GainSet::uniform(4, published_gains()).unwrap(), &[0.0; 4], false).unwrap();
        (chain, grc)
    }

    #[test]
    fn transform_examples() {
        let l = SaturationLimits::new(-1.0, 1.0).unwrap();
        let chain = build_chain(PlantFamily::HdaCylinder, &[l; 2]).unwrap();
        let state = PlantState::new(PlantFamily::HdaCylinder, &[1.2, 0.5, 0.3], 0.0).unwrap();
        let refs = ReferenceFrame {
            x1d: 1.0,
            x2d: 0.3,
            x3d: 0.3,
            x4d: None,
        };
        let (_, z) = tracking_transform(&chain, &state, &refs, 0.1);
        assert!((z[0] - 0.2).abs() < 1e-15);
        assert!((z[1] - 0.1).abs() < 1e-15);
        assert_eq!(z[2], 0.0);
    }

    #[test]
    fn control_examples() {
        let g = published_gains();
        assert!((grc_control(0, &g, 0.0, &[0.002]) + 0.035).abs() < 1e-15);
        assert!((grc_control(1, &g, 2.0, &[0.05, 0.1]) + 1.90).abs() < 1e-12);
        assert_eq!(grc_control(2, &g, 5.0, &[1.0, 1.0, 0.0]), 0.0);
    }

    #[test]
    fn adaptive_examples() {
        let g = published_gains();
        assert!((adaptive_update(0.0, &g, 1.0, 0.001) - 5e-7).abs() < 1e-20);
        let c = 3.0;
        let expected = c * (1.0 - 0.001 * 0.01 * 0.001);
        assert!((adaptive_update(c, &g, 0.0, 0.001) - expected).abs() <= 4.0 * f64::EPSILON * c);
    }

    #[test]
    fn adaptive_fixed_point() {
        let g = SubsystemGains::new(0.0, 1.0, 1.0, 0.5);
        let dt = 1e-3;
        // Ten time constants of 1/(γδ).
        let steps = (10.0 / (g.gamma * g.delta) / dt) as usize;
        let mut chi = 0.0;
        for _ in 0..steps {
            chi = adaptive_update(chi, &g, 1.0, dt);
        }
        assert!((chi - 1.0).abs() < 1e-3);
    }

    #[test]
    fn unstable_adaptive_step_rejected() {
        let gains = GainSet::uniform(3, SubsystemGains::new(1.0, 1.0, 100.0, 20.0)).unwrap();
        assert!(check_adaptive_step(&gains, 1e-3).is_err());
        assert!(check_adaptive_step(&GainSet::uniform(3, published_gains()).unwrap(), 1e-3).is_ok());
    }

    #[test]
    fn pmsm_single_tick() {
        let (chain, mut grc) = pmsm();
        let state = PlantState::new(PlantFamily::PmsmEda, &[0.002, 0.0, 0.0, 0.0], 0.0).unwrap();
        let out = grc_tick(&chain, &mut grc, &state, TrajectorySample::default(), 1e-3).unwrap();
        assert!((out.u[0] + 0.035).abs() < 1e-15);
        assert!((out.z[1] - 0.035).abs() < 1e-15);
        // −½·35·0.035 − 0.002
        assert!((out.u[1] + 0.6145).abs() < 1e-12);
        assert_eq!(out.refs.x3d, out.u[1]);
        assert_eq!(out.refs.x4d, Some(0.0));
    }

    #[test]
    fn zero_error_stays_zero() {
        let (chain, mut grc) = pmsm();
        let state = PlantState::new(PlantFamily::PmsmEda, &[0.0; 4], 0.0).unwrap();
        for _ in 0..100 {
            let out = grc_tick(&chain, &mut grc, &state, TrajectorySample::default(), 1e-3).unwrap();
            assert_eq!(out.u, [0.0; 4]);
            assert_eq!(out.physical, [0.0; 2]);
        }
        assert_eq!(grc.chi, [0.0; 4]);
    }

    #[test]
    fn motor_valve_reference_is_saturated_u2() {
        let l = SaturationLimits::new(-1.0, 1.0).unwrap();
        let chain = build_chain(PlantFamily::HdaMotorWithValve, &[l; 3]).unwrap();
        let mut grc = GrcState::new(GainSet::uniform(4, published_gains()).unwrap(), &[0.0; 4], false).unwrap();
        let state = PlantState::new(PlantFamily::HdaMotorWithValve, &[0.0, 0.0, 0.5, 0.0], 0.0).unwrap();
        let out = grc_tick(&chain, &mut grc, &state, TrajectorySample::default(), 1e-3).unwrap();
        assert!(out.u[2] < -1.0);
        assert_eq!(out.refs.x4d, Some(-1.0));
        assert!(out.physical[0].abs() <= 1.0);
    }

    proptest! {
        #[test]
        fn estimates_stay_non_negative(
            zs in prop::collection::vec(-1e3..1e3f64, 1..200),
            gamma in 1e-3..10.0f64,
            delta in 1e-3..10.0f64,
            chi0 in 0.0..10.0f64,
        ) {
            let dt = 1e-3;
            prop_assume!(dt * gamma * delta < 1.0);
            let g = SubsystemGains::new(1.0, 1.0, gamma, delta);
            let mut chi = chi0;
            for z in zs {
                chi = adaptive_update(chi, &g, z, dt);
                prop_assert!(chi >= 0.0);
            }
        }

        #[test]
        fn control_linear_in_z(z in -1e3..1e3f64, chi in 0.0..1e3f64, v in prop::sample::select(vec![0usize, 2, 3])) {
            let g = published_gains();
            let mut a = [0.0; 4];
            a[v] = z;
            let mut b = [0.0; 4];
            b[v] = 2.0 * z;
            prop_assert_eq!(grc_control(v, &g, chi, &b), 2.0 * grc_control(v, &g, chi, &a));
        }

        #[test]
        fn applied_inputs_within_limits(x in prop::array::uniform4(-10.0..10.0f64), xd in -10.0..10.0f64) {
            let l = SaturationLimits::new(-0.3, 0.7).unwrap();
            let chain = build_chain(PlantFamily::HdaMotorWithValve, &[l; 3]).unwrap();
            let mut grc = GrcState::new(GainSet::uniform(4, published_gains()).unwrap(), &[0.0; 4], false).unwrap();
            let state = PlantState::new(PlantFamily::HdaMotorWithValve, &x, 0.0).unwrap();
            let out = grc_tick(&chain, &mut grc, &state, TrajectorySample::new(xd, 0.0, 0.0), 1e-3).unwrap();
            prop_assert!(l.contains(out.physical[0]));
            prop_assert!(l.contains(out.applied[1]) && l.contains(out.applied[2]));
        }
    }
}
