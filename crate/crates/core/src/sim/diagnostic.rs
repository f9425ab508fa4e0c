//! Consistency check of the transformed velocity dynamics.
//!
//! Along a simulated trajectory, with the adaptive estimate held within each
//! tick, the velocity transform `z_2 = x_2 − ẋ_d − u_0(x_1, t)` obeys
//!
//! ```text
//! ż_2 = α_2·x_3 + F_2 + D_2 − ẍ_d − u̇_0,   u̇_0 = −½(k_0 + ε_0 χ̂_0)(ẋ_1 − ẋ_d)
//! ```
//!
//! where `α_2`, `F_2`, `D_2` come from plant internals the controller never
//! sees. The check compares a central finite difference of `z_2` at interior
//! integration substeps against the assembled right side.

use crate::chain::build_chain;
use crate::error::{Error, Result};
use crate::grc::{grc_tick, GrcState};
use crate::plants::{DisturbanceSource, Plant};
use crate::sim::engine::{ControllerKind, SimConfig};
use crate::sim::integrate::integrate_step;
use crate::types::PlantState;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    /// `‖ż_2,fd − rhs‖₂ / ‖rhs‖₂` over all compared samples.
    pub relative_l2: f64,
    pub samples: usize,
}

/// Runs `ticks` control ticks of `config` under GRC and evaluates the
/// identity at every interior substep.
pub fn velocity_transform_identity(config: &SimConfig, ticks: usize) -> Result<IdentityCheck> {
    config.validate()?;
    if config.controller != ControllerKind::Grc {
        return Err(Error::ConfigInvariant("identity check needs the GRC controller".into()));
    }
    if config.substeps < 3 {
        return Err(Error::ConfigInvariant("identity check needs substeps >= 3".into()));
    }
    let family = config.family();
    let plant = Plant::new(config.params.clone(), config.radicand)?;
    let chain = build_chain(family, &config.limits)?;
    let mut grc = GrcState::new(config.gains.clone(), &config.chi0, config.saturate_u1)?;
    let source = DisturbanceSource::new(config.disturbance, config.seed);
    let mut state = plant.internal_from_measured(&PlantState::new(family, &config.initial_state, 0.0)?)?;
    let g0 = *config.gains.get(0);
    let m = config.substeps;
    let h = config.dt / m as f64;

    let (mut err_sq, mut ref_sq, mut samples) = (0.0, 0.0, 0usize);
    let mut path = Vec::with_capacity(m + 1);
    for k in 0..ticks {
        let t = k as f64 * config.dt;
        let d = source.sample(t);
        let out = grc_tick(
            &chain,
            &mut grc,
            &plant.observe(&state, t),
            config.trajectory.sample(t),
            config.dt,
        )?;
        let gain0 = 0.5 * (g0.k + g0.epsilon * out.chi[0]);

        path.clear();
        path.push(state);
        for _ in 0..m {
            let next = integrate_step(
                |s| Ok(plant.derivative(s, out.physical, &d)?.dx),
                &state,
                h,
                config.integrator,
            )?;
            state = next;
            path.push(state);
        }

        let z2 = |i: usize| {
            let ti = t + i as f64 * h;
            let r = config.trajectory.sample(ti);
            let x = plant.observe(&path[i], ti);
            let u0 = -gain0 * (x.get(1) - r.position);
            x.get(2) - r.velocity - u0
        };
        for (i, s) in path.iter().enumerate().take(m).skip(1) {
            let ti = t + i as f64 * h;
            let r = config.trajectory.sample(ti);
            let x = plant.observe(s, ti);
            let row = plant.velocity_row(s, &d);
            let x2_dot = row.alpha * x.get(3) + row.drift + row.load;
            let x1_dot = x.get(2) + d[0];
            let u0_dot = -gain0 * (x1_dot - r.velocity);
            let rhs = x2_dot - r.acceleration - u0_dot;
            let fd = (z2(i + 1) - z2(i - 1)) / (2.0 * h);
            err_sq += (fd - rhs) * (fd - rhs);
            ref_sq += rhs * rhs;
            samples += 1;
        }
    }
    if ref_sq == 0.0 {
        return Err(Error::ConfigInvariant("identity check saw no motion".into()));
    }
    Ok(IdentityCheck {
        relative_l2: (err_sq / ref_sq).sqrt(),
        samples,
    })
}
