//! Hydraulic actuators: a double-rod cylinder behind a fast servo valve and a
//! hydraulic motor whose spool has first-order dynamics.
//!
//! Cylinder, internal state `(x_L, ẋ_L, P_1, P_2)`; the exported state
//! carries `P_l = P_1 − P_2`:
//!
//! ```text
//! (V_1/β_e) Ṗ_1 = −A_h ẋ_L − C_t P_l + q_1 + Q_1
//! (V_2/β_e) Ṗ_2 =  A_h ẋ_L + C_t P_l − q_2 − Q_2
//! Q_1 = k_u u [s(u)·√(P_s − P_1) + s(−u)·√(P_1 − P_r)]
//! Q_2 = k_u u [s(u)·√(P_2 − P_r) + s(−u)·√(P_s − P_2)]
//! J_h ẍ_L = P_l D_h − b_h ẋ_L − A_f S_f(ẋ_L) + D_L
//! ```
//!
//! Motor with valve, state `(θ, ω, P_l, W x_v)`:
//!
//! ```text
//! τ_v d(W x_v)/dt = K_v u − W x_v
//! (V/2β_e) Ṗ_l   = C_d W x_v √((P_s − sign(W x_v) P_l)/ρ) − D_eh ω − C_t P_l
//! J_eh ω̇         = P_l D_eh − b_eh ω + D_L
//! ```
//!
//! A negative radicand means the pressures left the physical envelope. Unit
//! tests use [`RadicandPolicy::Strict`]; batch runs clip at zero and count
//! the event.

use crate::config::ini::SectionReader;
use crate::error::{ensure_finite, invalid, Error, Result};
use crate::saturation::sign_select;

/// Handling of negative square-root arguments in valve flow equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RadicandPolicy {
    Strict,
    #[default]
    Clip,
}

/// Square root with the radicand policy applied. Returns the root and
/// whether clipping happened.
pub(crate) fn policy_sqrt(radicand: f64, policy: RadicandPolicy, equation: &'static str) -> Result<(f64, bool)> {
    if radicand >= 0.0 {
        return Ok((radicand.sqrt(), false));
    }
    match policy {
        RadicandPolicy::Strict => Err(Error::PressureBound { equation, radicand }),
        RadicandPolicy::Clip => Ok((0.0, true)),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HdaCylinderParams {
    /// Chamber volumes [m³].
    pub v_1: f64,
    pub v_2: f64,
    /// Effective bulk modulus [Pa].
    pub beta_e: f64,
    /// Piston area in the continuity equations [m²].
    pub a_h: f64,
    /// Internal leakage [m³/(s·Pa)].
    pub c_t: f64,
    /// Flow gain [m³/(s·V·√Pa)].
    pub k_u: f64,
    /// Supply and return pressure [Pa].
    pub p_s: f64,
    pub p_r: f64,
    /// Load mass [kg].
    pub j_h: f64,
    /// Ram area in the force balance [m²].
    pub d_h: f64,
    /// Viscous damping [N·s/m].
    pub b_h: f64,
    /// Coulomb friction amplitude [N].
    pub a_f: f64,
    /// Speed scale of the friction shape `tanh(ẋ/v_ref)` [m/s].
    pub friction_ref_speed: f64,
}

impl Default for HdaCylinderParams {
    fn default() -> Self {
        HdaCylinderParams {
            v_1: 1.0e-3,
            v_2: 1.0e-3,
            beta_e: 7.0e8,
            a_h: 2.0e-4,
            c_t: 1.0e-13,
            k_u: 1.0e-8,
            p_s: 1.0e7,
            p_r: 0.0,
            j_h: 100.0,
            d_h: 2.0e-4,
            b_h: 200.0,
            a_f: 20.0,
            friction_ref_speed: 0.01,
        }
    }
}

impl HdaCylinderParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("V_1", self.v_1),
            ("V_2", self.v_2),
            ("beta_e", self.beta_e),
            ("A_h", self.a_h),
            ("k_u", self.k_u),
            ("J_h", self.j_h),
            ("D_h", self.d_h),
            ("b_h", self.b_h),
            ("A_f", self.a_f),
            ("friction_ref_speed", self.friction_ref_speed),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, "must be > 0"));
            }
        }
        if !(self.c_t.is_finite() && self.c_t >= 0.0) {
            return Err(invalid("C_t", "must be >= 0"));
        }
        if !(self.p_r.is_finite() && self.p_r >= 0.0 && self.p_s.is_finite() && self.p_s > self.p_r) {
            return Err(invalid("P_s", "must satisfy P_s > P_r >= 0"));
        }
        Ok(())
    }

    pub(crate) fn apply(&mut self, r: &mut SectionReader) -> Result<()> {
        r.f64_into("V_1", &mut self.v_1)?;
        r.f64_into("V_2", &mut self.v_2)?;
        r.f64_into("beta_e", &mut self.beta_e)?;
        r.f64_into("A_h", &mut self.a_h)?;
        r.f64_into("C_t", &mut self.c_t)?;
        r.f64_into("k_u", &mut self.k_u)?;
        r.f64_into("P_s", &mut self.p_s)?;
        r.f64_into("P_r", &mut self.p_r)?;
        r.f64_into("J_h", &mut self.j_h)?;
        r.f64_into("D_h", &mut self.d_h)?;
        r.f64_into("b_h", &mut self.b_h)?;
        r.f64_into("A_f", &mut self.a_f)?;
        r.f64_into("friction_ref_speed", &mut self.friction_ref_speed)?;
        Ok(())
    }

    /// Mean chamber pressure at rest.
    pub fn mid_pressure(&self) -> f64 {
        0.5 * (self.p_s + self.p_r)
    }

    /// Chamber pressures that realize load pressure `p_l` symmetrically.
    pub fn chamber_pressures(&self, p_l: f64) -> (f64, f64) {
        let mid = self.mid_pressure();
        (mid + 0.5 * p_l, mid - 0.5 * p_l)
    }

    pub fn friction_shape(&self, v: f64) -> f64 {
        (v / self.friction_ref_speed).tanh()
    }
}

/// Valve flows `(Q_1, Q_2)` for command `u` and chamber pressures.
pub fn cylinder_valve_flows(
    u: f64,
    p_1: f64,
    p_2: f64,
    params: &HdaCylinderParams,
    policy: RadicandPolicy,
) -> Result<(f64, f64, bool)> {
    let fwd = sign_select(u);
    let rev = sign_select(-u);
    let mut clipped = false;
    let mut root = |radicand: f64, active: f64| -> Result<f64> {
        if active == 0.0 {
            return Ok(0.0);
        }
        let (r, c) = policy_sqrt(radicand, policy, "cylinder valve flow")?;
        clipped |= c;
        Ok(r)
    };
    let q_1 = params.k_u * u * (fwd * root(params.p_s - p_1, fwd)? + rev * root(p_1 - params.p_r, rev)?);
    let q_2 = params.k_u * u * (fwd * root(p_2 - params.p_r, fwd)? + rev * root(params.p_s - p_2, rev)?);
    Ok((q_1, q_2, clipped))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HdaDerivative<const N: usize> {
    pub dx: [f64; N],
    /// A valve radicand was clipped to zero.
    pub clipped: bool,
}

/// `d/dt (x_L, ẋ_L, P_1, P_2)` for valve command `u`, external force `d_l`
/// and modeling-inaccuracy flow `q` (applied as `q_1 = q_2 = q`).
pub fn hda_cylinder_derivative(
    state: &[f64; 4],
    u: f64,
    d_l: f64,
    q: f64,
    params: &HdaCylinderParams,
    policy: RadicandPolicy,
) -> Result<HdaDerivative<4>> {
    for v in state.iter().chain([u, d_l, q].iter()) {
        ensure_finite(*v, "hydraulic cylinder input")?;
    }
    let [_, v, p_1, p_2] = *state;
    let p_l = p_1 - p_2;
    let (q_1, q_2, clipped) = cylinder_valve_flows(u, p_1, p_2, params, policy)?;
    let dp_1 = params.beta_e / params.v_1 * (-params.a_h * v - params.c_t * p_l + q + q_1);
    let dp_2 = params.beta_e / params.v_2 * (params.a_h * v + params.c_t * p_l - q - q_2);
    let row = cylinder_acceleration_row(state, d_l, params);
    let acc = row.alpha * p_l + row.drift + row.load;
    Ok(HdaDerivative {
        dx: [v, acc, dp_1, dp_2],
        clipped,
    })
}

/// Split `ẍ = α·P_l + drift + load` of the cylinder force balance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccelerationRow {
    pub alpha: f64,
    pub drift: f64,
    pub load: f64,
}

pub fn cylinder_acceleration_row(state: &[f64; 4], d_l: f64, params: &HdaCylinderParams) -> AccelerationRow {
    let v = state[1];
    AccelerationRow {
        alpha: params.d_h / params.j_h,
        drift: -(params.b_h * v + params.a_f * params.friction_shape(v)) / params.j_h,
        load: d_l / params.j_h,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HdaMotorParams {
    /// Spool time constant [s].
    pub tau_v: f64,
    /// Orifice area gradient [m²/m].
    pub w: f64,
    /// Valve gain [m²/V] from command to opening area `W x_v`.
    pub k_v: f64,
    /// Rated spool stroke [m]; `W·x_v_max` is the full opening area.
    pub x_v_max: f64,
    pub c_d: f64,
    /// Oil density [kg/m³].
    pub rho: f64,
    /// Chamber volume [m³].
    pub v: f64,
    pub beta_e: f64,
    /// Volumetric displacement [m³/rad].
    pub d_eh: f64,
    pub c_t: f64,
    /// Inertia [kg·m²].
    pub j_eh: f64,
    pub b_eh: f64,
    pub p_s: f64,
}

impl Default for HdaMotorParams {
    fn default() -> Self {
        HdaMotorParams {
            tau_v: 0.02,
            w: 0.025,
            k_v: 2.5e-6,
            x_v_max: 1.0e-3,
            c_d: 0.6,
            rho: 870.0,
            v: 2.25e-3,
            beta_e: 1.0e9,
            d_eh: 2.25e-4,
            c_t: 1.0e-12,
            j_eh: 993.0,
            b_eh: 50.0,
            p_s: 2.0e7,
        }
    }
}

impl HdaMotorParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("tau_v", self.tau_v),
            ("W", self.w),
            ("K_v", self.k_v),
            ("x_v_max", self.x_v_max),
            ("C_d", self.c_d),
            ("rho", self.rho),
            ("V", self.v),
            ("beta_e", self.beta_e),
            ("D_eh", self.d_eh),
            ("C_t", self.c_t),
            ("J_eh", self.j_eh),
            ("b_eh", self.b_eh),
            ("P_s", self.p_s),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, "must be > 0"));
            }
        }
        Ok(())
    }

    pub(crate) fn apply(&mut self, r: &mut SectionReader) -> Result<()> {
        r.f64_into("tau_v", &mut self.tau_v)?;
        r.f64_into("W", &mut self.w)?;
        r.f64_into("K_v", &mut self.k_v)?;
        r.f64_into("x_v_max", &mut self.x_v_max)?;
        r.f64_into("C_d", &mut self.c_d)?;
        r.f64_into("rho", &mut self.rho)?;
        r.f64_into("V", &mut self.v)?;
        r.f64_into("beta_e", &mut self.beta_e)?;
        r.f64_into("D_eh", &mut self.d_eh)?;
        r.f64_into("C_t", &mut self.c_t)?;
        r.f64_into("J_eh", &mut self.j_eh)?;
        r.f64_into("b_eh", &mut self.b_eh)?;
        r.f64_into("P_s", &mut self.p_s)?;
        Ok(())
    }

    /// Full opening area `W·x_v_max` [m²].
    pub fn max_opening(&self) -> f64 {
        self.w * self.x_v_max
    }
}

fn signum0(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Valve flow `Q = Q_1 − Q_2` through opening `w_xv` against load pressure `p_l`.
pub fn motor_valve_flow(w_xv: f64, p_l: f64, params: &HdaMotorParams, policy: RadicandPolicy) -> Result<(f64, bool)> {
    if w_xv == 0.0 {
        return Ok((0.0, false));
    }
    let radicand = (params.p_s - signum0(w_xv) * p_l) / params.rho;
    let (root, clipped) = policy_sqrt(radicand, policy, "motor valve flow")?;
    Ok((params.c_d * w_xv * root, clipped))
}

/// `d/dt (θ, ω, P_l, W x_v)` for valve command `u`, load torque `d_l` and
/// extra flow `q` into the load-pressure balance.
pub fn hda_motor_derivative(
    state: &[f64; 4],
    u: f64,
    d_l: f64,
    q: f64,
    params: &HdaMotorParams,
    policy: RadicandPolicy,
) -> Result<HdaDerivative<4>> {
    for v in state.iter().chain([u, d_l, q].iter()) {
        ensure_finite(*v, "hydraulic motor input")?;
    }
    let [_, omega, p_l, w_xv] = *state;
    let dw_xv = (params.k_v * u - w_xv) / params.tau_v;
    let (flow, clipped) = motor_valve_flow(w_xv, p_l, params, policy)?;
    let dp_l = 2.0 * params.beta_e / params.v * (flow - params.d_eh * omega - params.c_t * p_l + q);
    let row = motor_acceleration_row(state, d_l, params);
    let domega = row.alpha * p_l + row.drift + row.load;
    Ok(HdaDerivative {
        dx: [omega, domega, dp_l, dw_xv],
        clipped,
    })
}

pub fn motor_acceleration_row(state: &[f64; 4], d_l: f64, params: &HdaMotorParams) -> AccelerationRow {
    AccelerationRow {
        alpha: params.d_eh / params.j_eh,
        drift: -params.b_eh * state[1] / params.j_eh,
        load: d_l / params.j_eh,
    }
}
