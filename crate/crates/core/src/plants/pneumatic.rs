//! Linearized pneumatic actuator, state `(x_L, ẋ_L, ẍ_L)`:
//!
//! ```text
//! d³x_L/dt³ = a_1 x_L + a_2 ẋ_L + a_3 ẍ_L + b (u + Δu) + d + D
//! ```
//!
//! The coefficients stand in for a linearization of the chamber-pressure
//! model about a mid-stroke operating point; they are free parameters.

use crate::config::ini::SectionReader;
use crate::error::{ensure_finite, invalid, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PdaParams {
    /// Position coefficient [1/s³].
    pub a_1: f64,
    /// Velocity coefficient [1/s²].
    pub a_2: f64,
    /// Acceleration coefficient [1/s].
    pub a_3: f64,
    /// Input gain [m/(s³·V)].
    pub b: f64,
    /// Valve neutral offset [V].
    pub delta_u: f64,
    /// Constant jerk bias [m/s³].
    pub d: f64,
}

impl Default for PdaParams {
    fn default() -> Self {
        PdaParams {
            a_1: 0.0,
            a_2: -400.0,
            a_3: -40.0,
            b: 10.0,
            delta_u: 0.0,
            d: 0.0,
        }
    }
}

impl PdaParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("a_1", self.a_1),
            ("a_2", self.a_2),
            ("a_3", self.a_3),
            ("b", self.b),
            ("delta_u", self.delta_u),
            ("d", self.d),
        ] {
            if !v.is_finite() {
                return Err(invalid(name, "must be finite"));
            }
        }
        if self.b == 0.0 {
            return Err(invalid("b", "must be nonzero"));
        }
        Ok(())
    }

    pub(crate) fn apply(&mut self, r: &mut SectionReader) -> Result<()> {
        r.f64_into("a_1", &mut self.a_1)?;
        r.f64_into("a_2", &mut self.a_2)?;
        r.f64_into("a_3", &mut self.a_3)?;
        r.f64_into("b", &mut self.b)?;
        r.f64_into("delta_u", &mut self.delta_u)?;
        r.f64_into("d", &mut self.d)?;
        Ok(())
    }

    /// Same plant without valve offset and bias.
    pub fn nominal(&self) -> Self {
        PdaParams {
            delta_u: 0.0,
            d: 0.0,
            ..self.clone()
        }
    }
}

pub fn pda_derivative(state: &[f64; 3], u: f64, params: &PdaParams, disturbance: f64) -> Result<[f64; 3]> {
    for v in state.iter().chain([u, disturbance].iter()) {
        ensure_finite(*v, "pneumatic input")?;
    }
    let [x, v, a] = *state;
    let jerk = params.a_1 * x
        + params.a_2 * v
        + params.a_3 * a
        + params.b * u
        + params.b * params.delta_u
        + params.d
        + disturbance;
    Ok([v, a, jerk])
}
