//! Fixed-step explicit integrators.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Integrator {
    Euler,
    #[default]
    Rk4,
}

impl fmt::Display for Integrator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Integrator::Euler => "euler",
            Integrator::Rk4 => "rk4",
        })
    }
}

impl FromStr for Integrator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "euler" => Ok(Integrator::Euler),
            "rk4" => Ok(Integrator::Rk4),
            other => Err(Error::ConfigInvariant(format!("unknown integrator `{other}`"))),
        }
    }
}

fn axpy<const N: usize>(x: &[f64; N], a: f64, k: &[f64; N]) -> [f64; N] {
    std::array::from_fn(|i| x[i] + a * k[i])
}

/// One step of `ẋ = f(x)` with inputs held constant by the caller.
pub fn integrate_step<const N: usize, F>(mut f: F, x: &[f64; N], dt: f64, method: Integrator) -> Result<[f64; N]>
where
    F: FnMut(&[f64; N]) -> Result<[f64; N]>,
{
    let next = match method {
        Integrator::Euler => axpy(x, dt, &f(x)?),
        Integrator::Rk4 => {
            let k1 = f(x)?;
            let k2 = f(&axpy(x, 0.5 * dt, &k1))?;
            let k3 = f(&axpy(x, 0.5 * dt, &k2))?;
            let k4 = f(&axpy(x, dt, &k3))?;
            std::array::from_fn(|i| x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        }
    };
    if next.iter().all(|v| v.is_finite()) {
        Ok(next)
    } else {
        Err(Error::NonFinite("integrated state"))
    }
}
