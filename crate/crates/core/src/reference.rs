//! Desired trajectories: rest-to-rest quintic moves and piecewise-linear
//! velocity scripts replayed from file.

use std::path::Path;

use crate::error::{Error, Result};
use crate::types::TrajectorySample;

/// `x(τ) = x_0 + (x_f − x_0)(10τ³ − 15τ⁴ + 6τ⁵)`, `τ = (t − t_0)/T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuinticSegment {
    pub x0: f64,
    pub xf: f64,
    pub duration: f64,
    pub t0: f64,
}

impl QuinticSegment {
    pub fn new(x0: f64, xf: f64, duration: f64, t0: f64) -> Result<Self> {
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::ConfigInvariant("quintic duration must be > 0".into()));
        }
        if !(x0.is_finite() && xf.is_finite() && t0.is_finite()) {
            return Err(Error::ConfigInvariant("quintic endpoints must be finite".into()));
        }
        Ok(QuinticSegment { x0, xf, duration, t0 })
    }
}

pub fn quintic_sample(seg: &QuinticSegment, t: f64) -> TrajectorySample {
    let tau = ((t - seg.t0) / seg.duration).clamp(0.0, 1.0);
    let span = seg.xf - seg.x0;
    let (t2, t3) = (tau * tau, tau * tau * tau);
    let shape = t3 * (10.0 - 15.0 * tau + 6.0 * t2);
    let slope = 30.0 * t2 * (1.0 - 2.0 * tau + t2);
    let curvature = 60.0 * tau * (1.0 - 3.0 * tau + 2.0 * t2);
    TrajectorySample {
        position: seg.x0 + span * shape,
        velocity: span * slope / seg.duration,
        acceleration: span * curvature / (seg.duration * seg.duration),
    }
}

/// Velocity breakpoints, linear in between and held outside. Position is
/// the running integral from `t = 0`, starting at `x0`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct VelocityScript {
    points: Vec<(f64, f64)>,
    /// Position at each breakpoint.
    positions: Vec<f64>,
    x0: f64,
}

impl VelocityScript {
    pub fn new(points: Vec<(f64, f64)>, x0: f64) -> Result<Self> {
        for (i, &(t, v)) in points.iter().enumerate() {
            if !(t.is_finite() && v.is_finite()) {
                return Err(Error::ConfigInvariant("velocity script entries must be finite".into()));
            }
            if i == 0 && t < 0.0 {
                return Err(Error::ConfigInvariant("velocity script must start at t >= 0".into()));
            }
            if i > 0 && t <= points[i - 1].0 {
                return Err(Error::ConfigInvariant(format!(
                    "velocity script times must increase strictly (row {})",
                    i + 1
                )));
            }
        }
        let mut positions = Vec::with_capacity(points.len());
        if let Some(&(t_first, v_first)) = points.first() {
            let mut x = x0 + v_first * t_first;
            positions.push(x);
            for w in points.windows(2) {
                let ((ta, va), (tb, vb)) = (w[0], w[1]);
                x += 0.5 * (va + vb) * (tb - ta);
                positions.push(x);
            }
        }
        Ok(VelocityScript { points, positions, x0 })
    }

    /// Rows of `t, v`; blank lines, `#` comments and a non-numeric header
    /// row are skipped.
    pub fn parse_csv(text: &str, x0: f64) -> Result<Self> {
        let mut points = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut cols = line.split(',').map(str::trim);
            let parsed = match (cols.next(), cols.next(), cols.next()) {
                (Some(a), Some(b), None) => a.parse::<f64>().ok().zip(b.parse::<f64>().ok()),
                _ => None,
            };
            match parsed {
                Some(p) => points.push(p),
                None if points.is_empty() && idx == 0 => continue,
                None => {
                    return Err(Error::Config {
                        line: idx + 1,
                        message: format!("expected `t, v`, found `{line}`"),
                    })
                }
            }
        }
        Self::new(points, x0)
    }

    pub fn load(path: &Path, x0: f64) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_csv(&text, x0)
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }
}

pub fn velocity_script_sample(script: &VelocityScript, t: f64) -> TrajectorySample {
    let pts = &script.points;
    let Some(&(t_first, v_first)) = pts.first() else {
        return TrajectorySample::new(script.x0, 0.0, 0.0);
    };
    if t <= t_first {
        return TrajectorySample::new(script.x0 + v_first * t, v_first, 0.0);
    }
    // Last breakpoint at or before t.
    let k = pts.partition_point(|&(tk, _)| tk <= t) - 1;
    let (tk, vk) = pts[k];
    let dt = t - tk;
    match pts.get(k + 1) {
        None => TrajectorySample::new(script.positions[k] + vk * dt, vk, 0.0),
        Some(&(tn, vn)) => {
            let slope = (vn - vk) / (tn - tk);
            let v = vk + slope * dt;
            TrajectorySample::new(script.positions[k] + 0.5 * (vk + v) * dt, v, slope)
        }
    }
}

/// Trajectory source of one run.
#[derive(Debug, Clone, PartialEq)]
pub enum Trajectory {
    /// Constant position.
    Hold(f64),
    Quintic(QuinticSegment),
    Velocity(VelocityScript),
}

impl Trajectory {
    pub fn sample(&self, t: f64) -> TrajectorySample {
        match self {
            Trajectory::Hold(x) => TrajectorySample::new(*x, 0.0, 0.0),
            Trajectory::Quintic(seg) => quintic_sample(seg, t),
            Trajectory::Velocity(script) => velocity_script_sample(script, t),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit() -> QuinticSegment {
        QuinticSegment::new(0.0, 1.0, 2.0, 0.5).unwrap()
    }

    #[test]
    fn quintic_boundaries() {
        let s = unit();
        assert_eq!(quintic_sample(&s, 0.5), TrajectorySample::new(0.0, 0.0, 0.0));
        assert_eq!(quintic_sample(&s, 2.5), TrajectorySample::new(1.0, 0.0, 0.0));
        assert_eq!(quintic_sample(&s, 100.0).position, 1.0);
        assert!((quintic_sample(&s, 1.5).position - 0.5).abs() < 1e-15);
    }

    #[test]
    fn script_constant_velocity() {
        let s = VelocityScript::new(vec![(0.0, 1.0)], 0.0).unwrap();
        let r = velocity_script_sample(&s, 2.0);
        assert_eq!((r.velocity, r.position), (1.0, 2.0));
    }

    #[test]
    fn script_ramp() {
        let s = VelocityScript::new(vec![(0.0, 0.0), (1.0, 1.0)], 0.0).unwrap();
        let r = velocity_script_sample(&s, 0.5);
        assert_eq!((r.velocity, r.acceleration), (0.5, 1.0));
        assert!((r.position - 0.125).abs() < 1e-15);
    }

    #[test]
    fn empty_script() {
        let s = VelocityScript::default();
        for t in [0.0, 1.0, 7.5] {
            assert_eq!(velocity_script_sample(&s, t), TrajectorySample::default());
        }
    }

    #[test]
    fn script_times_must_increase() {
        assert!(VelocityScript::new(vec![(0.0, 1.0), (0.0, 2.0)], 0.0).is_err());
    }

    #[test]
    fn csv_with_header_and_comments() {
        let s = VelocityScript::parse_csv("t,v\n# joystick\n0, 0\n1.5, 1\n", 0.0).unwrap();
        assert_eq!(s.points(), &[(0.0, 0.0), (1.5, 1.0)]);
        let err = VelocityScript::parse_csv("0,0\nx,y\n", 0.0).unwrap_err();
        assert!(matches!(err, Error::Config { line: 2, .. }));
    }

    proptest! {
        #[test]
        fn quintic_derivatives_match_differences(t in 0.3..2.7f64, x0 in -1.0..1.0f64, xf in -1.0..1.0f64) {
            let s = QuinticSegment::new(x0, xf, 2.0, 0.5).unwrap();
            let h = 1e-5;
            let (a, b, c) = (quintic_sample(&s, t - h), quintic_sample(&s, t), quintic_sample(&s, t + h));
            let v_fd = (c.position - a.position) / (2.0 * h);
            let a_fd = (c.velocity - a.velocity) / (2.0 * h);
            let span = (xf - x0).abs();
            // Relative to the profile's own velocity and acceleration scales.
            prop_assert!((v_fd - b.velocity).abs() <= 1e-6 * (span * 1.875 / 2.0) + 1e-12);
            prop_assert!((a_fd - b.acceleration).abs() <= 1e-6 * (span * 5.7735 / 4.0) + 1e-12);
        }

        #[test]
        fn script_position_is_trapezoid_integral(
            vs in prop::collection::vec(-2.0..2.0f64, 2..8),
            t0 in 0.0..3.0f64,
            span in 0.0..3.0f64,
        ) {
            let pts: Vec<_> = vs.iter().enumerate().map(|(i, &v)| (0.4 * i as f64, v)).collect();
            let s = VelocityScript::new(pts.clone(), 0.0).unwrap();
            let t1 = t0 + span;
            let mut nodes = vec![t0];
            nodes.extend(pts.iter().map(|p| p.0).filter(|&t| t > t0 && t < t1));
            nodes.push(t1);
            let acc: f64 = nodes
                .windows(2)
                .map(|w| 0.5 * (w[1] - w[0]) * (velocity_script_sample(&s, w[0]).velocity + velocity_script_sample(&s, w[1]).velocity))
                .sum();
            let exact = velocity_script_sample(&s, t1).position - velocity_script_sample(&s, t0).position;
            prop_assert!((acc - exact).abs() <= 1e-9);
        }
    }
}
