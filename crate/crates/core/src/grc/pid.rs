//! Discrete PID on position error, used as the comparison baseline.

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PidGains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    /// Bound on `|∫e dt|`.
    pub integral_clamp: f64,
}

impl PidGains {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("kp", self.kp), ("ki", self.ki), ("kd", self.kd)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(name, "must be >= 0"));
            }
        }
        if self.integral_clamp.is_nan() || self.integral_clamp <= 0.0 {
            return Err(invalid("integral_clamp", "must be > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PidState {
    pub gains: PidGains,
    pub integral: f64,
    pub previous_error: Option<f64>,
}

impl PidState {
    pub fn new(gains: PidGains) -> Self {
        PidState {
            gains,
            integral: 0.0,
            previous_error: None,
        }
    }

    pub fn integral_term(&self) -> f64 {
        self.gains.ki * self.integral
    }
}

/// Rectangle-rule integral, backward-difference derivative (zero on the
/// first tick).
pub fn pid_tick(state: &mut PidState, e: f64, dt: f64) -> f64 {
    let g = state.gains;
    state.integral = (state.integral + e * dt).clamp(-g.integral_clamp, g.integral_clamp);
    let derivative = state.previous_error.map_or(0.0, |prev| (e - prev) / dt);
    state.previous_error = Some(e);
    g.kp * e + g.ki * state.integral + g.kd * derivative
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gains(kp: f64, ki: f64, kd: f64, clamp: f64) -> PidGains {
        PidGains {
            kp,
            ki,
            kd,
            integral_clamp: clamp,
        }
    }

    #[test]
    fn proportional_only() {
        let mut s = PidState::new(gains(2.0, 0.0, 0.0, 1.0));
        assert_eq!(pid_tick(&mut s, 0.5, 1e-3), 1.0);
    }

    #[test]
    fn integral_accumulates() {
        let mut s = PidState::new(gains(0.0, 1.0, 0.0, 10.0));
        let mut u = 0.0;
        for _ in 0..1000 {
            u = pid_tick(&mut s, 1.0, 1e-3);
        }
        assert!((u - 1.0).abs() < 1e-9);
    }

    #[test]
    fn integral_clamped() {
        let mut s = PidState::new(gains(0.0, 1.0, 0.0, 0.1));
        for _ in 0..1000 {
            pid_tick(&mut s, 1.0, 1e-3);
        }
        assert_eq!(s.integral_term(), 0.1);
    }

    #[test]
    fn derivative_backward_difference() {
        let mut s = PidState::new(gains(0.0, 0.0, 1.0, 1.0));
        assert_eq!(pid_tick(&mut s, 0.0, 0.5), 0.0);
        assert_eq!(pid_tick(&mut s, 1.0, 0.5), 2.0);
    }
}
