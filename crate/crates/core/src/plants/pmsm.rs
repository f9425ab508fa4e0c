//! PMSM in the rotating d-q frame driving a linear load through a ball screw.
//!
//! State `(x_L, ẋ_L, i_q, i_d)`. Electrical speed uses the motor shaft speed
//! `ω = drive_ratio · ẋ_L`; set `drive_ratio = 1` and read `x_L` as an angle
//! for the rotational variant, whose equations have the same form.
//!
//! ```text
//! L_q di_q/dt = −R_s i_q − n_p ω L_d i_d − n_p ω φ_m + u_q
//! L_d di_d/dt = −R_s i_d + n_p ω L_q i_q + u_d
//! J_eq ẍ_L    = 1.5 n_p φ_m i_q − b_eq ẋ_L − k_eq x_L − f_eq f_L
//! ```
//!
//! Parameter uncertainty is simulated by perturbing `R_s, L_d, L_q, φ_m` and
//! `J_eq` multiplicatively, `p·(1 + Δ)`. The controller never sees either set.

use crate::config::ini::SectionReader;
use crate::error::{ensure_finite, invalid, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PmsmEdaParams {
    /// Stator resistance [Ω].
    pub r_s: f64,
    /// d-axis inductance [H].
    pub l_d: f64,
    /// q-axis inductance [H].
    pub l_q: f64,
    /// Permanent-magnet flux linkage [Wb].
    pub phi_m: f64,
    pub pole_pairs: u32,
    /// Equivalent inertia seen at the load coordinate.
    pub j_eq: f64,
    /// Equivalent damping.
    pub b_eq: f64,
    /// Equivalent spring; `0` leaves every position an equilibrium.
    pub k_eq: f64,
    /// Load coefficient mapping the load force `f_L` [N] into the equivalent
    /// coordinate.
    pub f_eq: f64,
    /// Shaft speed per unit load velocity [rad/m], `2π·gear/lead`.
    pub drive_ratio: f64,
    pub delta_r_s: f64,
    pub delta_l_d: f64,
    pub delta_l_q: f64,
    pub delta_phi_m: f64,
    pub delta_j: f64,
}

impl Default for PmsmEdaParams {
    fn default() -> Self {
        PmsmEdaParams {
            r_s: 0.5,
            l_d: 0.02,
            l_q: 0.02,
            phi_m: 0.1,
            pole_pairs: 4,
            j_eq: 0.2,
            b_eq: 0.5,
            k_eq: 0.0,
            f_eq: 2.5e-6,
            drive_ratio: 1256.6370614359173,
            delta_r_s: 0.0,
            delta_l_d: 0.0,
            delta_l_q: 0.0,
            delta_phi_m: 0.0,
            delta_j: 0.0,
        }
    }
}

impl PmsmEdaParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("R_s", self.r_s),
            ("L_d", self.l_d),
            ("L_q", self.l_q),
            ("phi_m", self.phi_m),
            ("J_eq", self.j_eq),
            ("drive_ratio", self.drive_ratio),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, "must be > 0"));
            }
        }
        for (name, v) in [("b_eq", self.b_eq), ("k_eq", self.k_eq), ("f_eq", self.f_eq)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(name, "must be >= 0"));
            }
        }
        if self.pole_pairs == 0 {
            return Err(invalid("n_p", "must be >= 1"));
        }
        for (name, v) in [
            ("delta_R_s", self.delta_r_s),
            ("delta_L_d", self.delta_l_d),
            ("delta_L_q", self.delta_l_q),
            ("delta_phi_m", self.delta_phi_m),
            ("delta_J", self.delta_j),
        ] {
            if !(v.is_finite() && v.abs() <= 0.5) {
                return Err(invalid(name, "must satisfy |delta| <= 0.5"));
            }
        }
        Ok(())
    }

    pub(crate) fn apply(&mut self, r: &mut SectionReader) -> Result<()> {
        r.f64_into("R_s", &mut self.r_s)?;
        r.f64_into("L_d", &mut self.l_d)?;
        r.f64_into("L_q", &mut self.l_q)?;
        r.f64_into("phi_m", &mut self.phi_m)?;
        if let Some(n) = r.u64("n_p")? {
            self.pole_pairs = u32::try_from(n).map_err(|_| invalid("n_p", "too large"))?;
        }
        r.f64_into("J_eq", &mut self.j_eq)?;
        r.f64_into("b_eq", &mut self.b_eq)?;
        r.f64_into("k_eq", &mut self.k_eq)?;
        r.f64_into("f_eq", &mut self.f_eq)?;
        r.f64_into("drive_ratio", &mut self.drive_ratio)?;
        r.f64_into("delta_R_s", &mut self.delta_r_s)?;
        r.f64_into("delta_L_d", &mut self.delta_l_d)?;
        r.f64_into("delta_L_q", &mut self.delta_l_q)?;
        r.f64_into("delta_phi_m", &mut self.delta_phi_m)?;
        r.f64_into("delta_J", &mut self.delta_j)?;
        Ok(())
    }

    /// Parameters the simulated machine actually has.
    pub fn effective(&self) -> PmsmEffective {
        PmsmEffective {
            r_s: self.r_s * (1.0 + self.delta_r_s),
            l_d: self.l_d * (1.0 + self.delta_l_d),
            l_q: self.l_q * (1.0 + self.delta_l_q),
            phi_m: self.phi_m * (1.0 + self.delta_phi_m),
            j_eq: self.j_eq * (1.0 + self.delta_j),
        }
    }

    pub fn without_uncertainty(&self) -> Self {
        PmsmEdaParams {
            delta_r_s: 0.0,
            delta_l_d: 0.0,
            delta_l_q: 0.0,
            delta_phi_m: 0.0,
            delta_j: 0.0,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmsmEffective {
    pub r_s: f64,
    pub l_d: f64,
    pub l_q: f64,
    pub phi_m: f64,
    pub j_eq: f64,
}

/// Split of the load acceleration row, `ẍ_L = α·i_q + drift + load`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccelerationRow {
    pub alpha: f64,
    pub drift: f64,
    pub load: f64,
}

pub fn pmsm_acceleration_row(state: &[f64; 4], f_l: f64, params: &PmsmEdaParams) -> AccelerationRow {
    let eff = params.effective();
    let [x, v, _, _] = *state;
    AccelerationRow {
        alpha: 1.5 * f64::from(params.pole_pairs) * eff.phi_m / eff.j_eq,
        drift: -(params.b_eq * v + params.k_eq * x) / eff.j_eq,
        load: -params.f_eq * f_l / eff.j_eq,
    }
}

/// `d/dt (x_L, ẋ_L, i_q, i_d)` for axis voltages `u_q`, `u_d` and load force `f_l`.
pub fn pmsm_eda_derivative(state: &[f64; 4], u_q: f64, u_d: f64, f_l: f64, params: &PmsmEdaParams) -> Result<[f64; 4]> {
    for v in state.iter().chain([u_q, u_d, f_l].iter()) {
        ensure_finite(*v, "PMSM input")?;
    }
    let eff = params.effective();
    let n_p = f64::from(params.pole_pairs);
    let [_, v, i_q, i_d] = *state;
    let omega = params.drive_ratio * v;
    let di_q = (-eff.r_s * i_q - n_p * omega * eff.l_d * i_d - n_p * omega * eff.phi_m + u_q) / eff.l_q;
    let di_d = (-eff.r_s * i_d + n_p * omega * eff.l_q * i_q + u_d) / eff.l_d;
    let row = pmsm_acceleration_row(state, f_l, params);
    let acc = row.alpha * i_q + row.drift + row.load;
    Ok([v, acc, di_q, di_d])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bare() -> PmsmEdaParams {
        PmsmEdaParams {
            b_eq: 0.0,
            k_eq: 0.0,
            ..Default::default()
        }
    }

    #[test]
    fn rest_is_equilibrium() {
        let d = pmsm_eda_derivative(&[0.0; 4], 0.0, 0.0, 0.0, &PmsmEdaParams::default()).unwrap();
        assert_eq!(d, [0.0; 4]);
    }

    #[test]
    fn q_voltage_charges_q_current() {
        let p = PmsmEdaParams { l_q: 0.01, ..bare() };
        let d = pmsm_eda_derivative(&[0.0; 4], 1.0, 0.0, 0.0, &p).unwrap();
        assert!((d[2] - 100.0).abs() < 1e-12);
        assert_eq!([d[0], d[1], d[3]], [0.0; 3]);
    }

    #[test]
    fn q_current_produces_thrust() {
        let p = PmsmEdaParams {
            pole_pairs: 3,
            phi_m: 0.1,
            j_eq: 1.0,
            ..bare()
        };
        let d = pmsm_eda_derivative(&[0.0, 0.0, 2.0, 0.0], 0.0, 0.0, 0.0, &p).unwrap();
        assert!((d[1] - 0.9).abs() < 1e-15);
    }

    #[test]
    fn perturbation_scales_parameters() {
        let p = PmsmEdaParams {
            delta_l_q: 0.25,
            l_q: 0.01,
            ..bare()
        };
        let d = pmsm_eda_derivative(&[0.0; 4], 1.0, 0.0, 0.0, &p).unwrap();
        assert!((d[2] - 80.0).abs() < 1e-12);
    }

    #[test]
    fn perturbation_bound_enforced() {
        let p = PmsmEdaParams {
            delta_j: 0.6,
            ..Default::default()
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn q_current_rate_increases_with_voltage() {
        let p = PmsmEdaParams::default();
        let mut last = f64::NEG_INFINITY;
        for k in -10..=10 {
            let d = pmsm_eda_derivative(&[0.0, 0.0, 0.3, 0.0], f64::from(k), 0.0, 0.0, &p).unwrap();
            assert!(d[2] > last);
            last = d[2];
        }
    }
}
