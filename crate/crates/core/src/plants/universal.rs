//! Series-wound universal motor.
//!
//! State `(θ, ω, i)`:
//!
//! ```text
//! di/dt = (V − (R_a+R_f)·i − E) / (L_a+L_f),   E   = ω·φ_m
//! dω/dt = (τ_m − b_m·ω − τ_L − τ_fs·S(ω)) / J_m, τ_m = i·φ_m
//! ```
//!
//! `S(ω) = tanh(ω/ω_ref)` stands in for the friction shape.

use crate::config::ini::SectionReader;
use crate::error::{ensure_finite, invalid, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct UniversalMotorParams {
    /// Armature resistance [Ω].
    pub r_a: f64,
    /// Field resistance [Ω].
    pub r_f: f64,
    /// Armature inductance [H].
    pub l_a: f64,
    /// Field inductance [H].
    pub l_f: f64,
    /// Flux linkage [Wb].
    pub phi_m: f64,
    /// Rotor plus load inertia [kg·m²].
    pub j_m: f64,
    /// Viscous friction [N·m·s/rad].
    pub b_m: f64,
    /// Coulomb friction magnitude [N·m].
    pub tau_fs: f64,
    /// Speed scale of the friction shape [rad/s].
    pub friction_ref_speed: f64,
}

impl Default for UniversalMotorParams {
    fn default() -> Self {
        UniversalMotorParams {
            r_a: 0.5,
            r_f: 0.3,
            l_a: 0.01,
            l_f: 0.01,
            phi_m: 0.5,
            j_m: 0.1,
            b_m: 0.01,
            tau_fs: 0.02,
            friction_ref_speed: 0.05,
        }
    }
}

impl UniversalMotorParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("R_a", self.r_a),
            ("R_f", self.r_f),
            ("L_a", self.l_a),
            ("L_f", self.l_f),
            ("phi_m", self.phi_m),
            ("J_m", self.j_m),
            ("b_m", self.b_m),
            ("friction_ref_speed", self.friction_ref_speed),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, "must be > 0"));
            }
        }
        if !(self.tau_fs.is_finite() && self.tau_fs >= 0.0) {
            return Err(invalid("tau_fs", "must be >= 0"));
        }
        Ok(())
    }

    pub(crate) fn apply(&mut self, r: &mut SectionReader) -> Result<()> {
        r.f64_into("R_a", &mut self.r_a)?;
        r.f64_into("R_f", &mut self.r_f)?;
        r.f64_into("L_a", &mut self.l_a)?;
        r.f64_into("L_f", &mut self.l_f)?;
        r.f64_into("phi_m", &mut self.phi_m)?;
        r.f64_into("J_m", &mut self.j_m)?;
        r.f64_into("b_m", &mut self.b_m)?;
        r.f64_into("tau_fs", &mut self.tau_fs)?;
        r.f64_into("friction_ref_speed", &mut self.friction_ref_speed)?;
        Ok(())
    }

    pub fn friction_shape(&self, omega: f64) -> f64 {
        (omega / self.friction_ref_speed).tanh()
    }
}

/// `d/dt (θ, ω, i)` for supply voltage `v_in` and load torque `tau_l`.
pub fn universal_motor_derivative(
    state: &[f64; 3],
    v_in: f64,
    tau_l: f64,
    params: &UniversalMotorParams,
) -> Result<[f64; 3]> {
    let [_, omega, i] = *state;
    for v in state.iter().chain([v_in, tau_l].iter()) {
        ensure_finite(*v, "universal motor input")?;
    }
    let inductance = params.l_a + params.l_f;
    let emf = omega * params.phi_m;
    let torque = i * params.phi_m;
    let di = (v_in - (params.r_a + params.r_f) * i - emf) / inductance;
    let domega = (torque - params.b_m * omega - tau_l - params.tau_fs * params.friction_shape(omega)) / params.j_m;
    Ok([omega, domega, di])
}
