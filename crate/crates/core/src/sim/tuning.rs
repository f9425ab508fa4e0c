//! Ziegler–Nichols tuning of the PID baseline.
//!
//! The ultimate gain `K_u` is found by bisection on proportional-only step
//! responses: a gain is stable when the oscillation about the final mean
//! shrinks between the middle and the last quarter of the run. `T_u` is the
//! mean spacing of upward mean crossings at the bisection's upper bracket.
//! The classic rule `k_p = 0.6 K_u`, `k_i = 1.2 K_u/T_u`,
//! `k_d = 0.075 K_u T_u` is then scaled by a fixed detune factor.

use crate::error::{Error, Result};
use crate::grc::PidGains;
use crate::plants::DisturbanceProfile;
use crate::reference::Trajectory;
use crate::sim::engine::{run_closed_loop, ControllerKind, SimConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZnSettings {
    /// Position step from rest [m or rad].
    pub step: f64,
    /// Length of each trial run [s].
    pub duration: f64,
    /// Initial bracket on `K_u`.
    pub k_low: f64,
    pub k_high: f64,
    pub iterations: usize,
    pub detune: f64,
    pub integral_clamp: f64,
}

impl ZnSettings {
    /// The fixed procedure behind the shipped preset gains: bracket
    /// `[1e-3, 1e5]`, 30 bisections, detune 0.5, integral clamp 1.
    pub fn standard(step: f64, duration: f64) -> Self {
        ZnSettings {
            step,
            duration,
            k_low: 1e-3,
            k_high: 1e5,
            iterations: 30,
            detune: 0.5,
            integral_clamp: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZnResult {
    pub ku: f64,
    pub tu: f64,
    pub gains: PidGains,
}

pub fn classic_gains(ku: f64, tu: f64, detune: f64, integral_clamp: f64) -> PidGains {
    PidGains {
        kp: 0.6 * ku * detune,
        ki: 1.2 * ku / tu * detune,
        kd: 0.075 * ku * tu * detune,
        integral_clamp,
    }
}

fn trial(base: &SimConfig, kp: f64, s: &ZnSettings) -> Result<Vec<f64>> {
    let mut cfg = base.clone();
    cfg.controller = ControllerKind::Pid(PidGains {
        kp,
        ki: 0.0,
        kd: 0.0,
        integral_clamp: s.integral_clamp,
    });
    cfg.duration = s.duration;
    cfg.disturbance = DisturbanceProfile::none();
    cfg.trajectory = Trajectory::Hold(s.step);
    cfg.initial_state = vec![0.0; cfg.initial_state.len()];
    let out = run_closed_loop(&cfg)?;
    if out.diverged.is_some() {
        return Ok(Vec::new());
    }
    Ok(out.telemetry.iter().map(|r| r.x[0]).collect())
}

/// Ratio of late to mid oscillation amplitude; `∞` for diverged runs.
fn growth(x: &[f64]) -> f64 {
    let n = x.len();
    if n < 8 {
        return f64::INFINITY;
    }
    let tail = &x[n / 2..];
    let mean = tail.iter().sum::<f64>() / tail.len() as f64;
    let amp = |s: &[f64]| s.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
    let early = amp(&x[n / 4..n / 2]);
    let late = amp(&x[3 * n / 4..]);
    if early == 0.0 {
        return if late == 0.0 { 0.0 } else { f64::INFINITY };
    }
    late / early
}

fn period(x: &[f64], dt: f64) -> Option<f64> {
    let tail = &x[x.len() / 2..];
    let mean = tail.iter().sum::<f64>() / tail.len() as f64;
    let ups: Vec<usize> = tail
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0] < mean && w[1] >= mean)
        .map(|(i, _)| i)
        .collect();
    if ups.len() < 2 {
        return None;
    }
    Some((ups[ups.len() - 1] - ups[0]) as f64 / (ups.len() - 1) as f64 * dt)
}

pub fn ziegler_nichols(base: &SimConfig, s: &ZnSettings) -> Result<ZnResult> {
    let (mut lo, mut hi) = (s.k_low, s.k_high);
    if growth(&trial(base, hi, s)?) < 1.0 {
        return Err(Error::ConfigInvariant(format!(
            "no sustained oscillation up to kp = {hi}"
        )));
    }
    for _ in 0..s.iterations {
        let mid = (lo * hi).sqrt();
        if growth(&trial(base, mid, s)?) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = trial(base, hi, s)?;
    let tu = period(&x, base.dt).ok_or_else(|| Error::ConfigInvariant("no oscillation period found".into()))?;
    Ok(ZnResult {
        ku: hi,
        tu,
        gains: classic_gains(hi, tu, s.detune, s.integral_clamp),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_rule() {
        let g = classic_gains(2.0, 0.5, 1.0, 1.0);
        assert!((g.kp - 1.2).abs() < 1e-15);
        assert!((g.ki - 4.8).abs() < 1e-15);
        assert!((g.kd - 0.075).abs() < 1e-15);
    }

    #[test]
    fn growth_of_decaying_and_growing_waves() {
        let decay: Vec<f64> = (0..4000)
            .map(|k| (-(k as f64) * 1e-3).exp() * (k as f64 * 0.05).sin())
            .collect();
        let grow: Vec<f64> = (0..4000)
            .map(|k| ((k as f64) * 1e-3).exp() * (k as f64 * 0.05).sin())
            .collect();
        assert!(growth(&decay) < 1.0);
        assert!(growth(&grow) > 1.0);
        let p = period(&grow, 1e-3).unwrap();
        assert!((p - std::f64::consts::TAU / 50.0).abs() < 2e-3);
    }
}
