//! Empirical exponential envelope `‖z(t)‖² ≤ A·e^{−ιt} + B`.
//!
//! The squared norm is first replaced by its suffix maximum
//! `max_{s ≥ t} ‖z(s)‖²`, the tightest non-increasing curve lying above every
//! sample. `A·e^{−ιt} + B` is then fitted to that envelope with `A, ι, B ≥ 0`,
//! minimizing *relative* residuals `(fit − env)/env`: closed-loop envelopes
//! span many decades, and absolute residuals would let the initial transient
//! swamp the residual level `B`. For fixed `ι` the problem is a two-variable
//! weighted non-negative least-squares solve; `ι` is searched on a log grid
//! and refined by golden-section search.

use crate::error::{Error, Result};
use crate::telemetry::TelemetryRecord;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundFit {
    pub a: f64,
    pub iota: f64,
    /// Residual level of the envelope.
    pub b: f64,
    /// RMS relative residual of the fit.
    pub fit_residual: f64,
}

const MIN_SAMPLES: usize = 100;

pub fn fit_convergence_bound(telemetry: &[TelemetryRecord]) -> Result<BoundFit> {
    let t: Vec<f64> = telemetry.iter().map(|r| r.t).collect();
    let y: Vec<f64> = telemetry.iter().map(TelemetryRecord::z_norm_sq).collect();
    fit_envelope(&t, &y)
}

/// Suffix maximum of `y`.
pub fn suffix_max(y: &[f64]) -> Vec<f64> {
    let mut out = y.to_vec();
    for k in (0..out.len().saturating_sub(1)).rev() {
        out[k] = out[k].max(out[k + 1]);
    }
    out
}

/// Fits `A·e^{−ι(t−t_0)} + B` to the suffix-max envelope of `(t, y)`.
pub fn fit_envelope(t: &[f64], y: &[f64]) -> Result<BoundFit> {
    if t.len() != y.len() || t.len() < MIN_SAMPLES {
        return Err(Error::Telemetry(format!(
            "envelope fit needs at least {MIN_SAMPLES} samples, got {}",
            t.len().min(y.len())
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("envelope sample"));
    }
    let env = suffix_max(y);
    if env.iter().all(|&v| v == 0.0) {
        return Ok(BoundFit {
            a: 0.0,
            iota: 0.0,
            b: 0.0,
            fit_residual: 0.0,
        });
    }
    let t0 = t[0];
    let tau: Vec<f64> = t.iter().map(|&v| v - t0).collect();
    let span = tau.last().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
    let step = (span / (tau.len() - 1) as f64).max(f64::MIN_POSITIVE);

    // Rates from far slower than the window to one decay per sample.
    let lo = (1e-3 / span).ln();
    let hi = (1.0 / step).ln();
    let grid = 200;
    let peak = env.iter().copied().fold(0.0, f64::max);
    let weight: Vec<f64> = env.iter().map(|&v| v.max(1e-12 * peak).powi(-2)).collect();
    let cost = |log_iota: f64| solve_linear(&tau, &env, &weight, log_iota.exp()).2;
    let mut best = (hi, cost(hi));
    for i in (0..grid).rev() {
        let s = lo + (hi - lo) * i as f64 / (grid - 1) as f64;
        let c = cost(s);
        if c < best.1 {
            best = (s, c);
        }
    }
    let width = (hi - lo) / (grid - 1) as f64;
    let log_iota = golden_section(cost, best.0 - width, best.0 + width, 100);
    let log_iota = if cost(log_iota) <= best.1 { log_iota } else { best.0 };
    let iota = log_iota.exp();
    let (a, b, sse) = solve_linear(&tau, &env, &weight, iota);
    Ok(BoundFit {
        a,
        iota: if a == 0.0 { 0.0 } else { iota },
        b,
        fit_residual: (sse / tau.len() as f64).sqrt(),
    })
}

/// Non-negative `(A, B)` minimizing `Σ w·(y − A·φ − B)²` with `φ = e^{−ιt}`.
fn solve_linear(tau: &[f64], y: &[f64], w: &[f64], iota: f64) -> (f64, f64, f64) {
    let (mut sw, mut sp, mut spp, mut sy, mut spy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for ((&t, &v), &wk) in tau.iter().zip(y).zip(w) {
        let p = (-iota * t).exp();
        sw += wk;
        sp += wk * p;
        spp += wk * p * p;
        sy += wk * v;
        spy += wk * p * v;
    }
    let sse = |a: f64, b: f64| -> f64 {
        tau.iter()
            .zip(y)
            .zip(w)
            .map(|((&t, &v), &wk)| {
                let r = v - a * (-iota * t).exp() - b;
                wk * r * r
            })
            .sum()
    };
    let det = spp * sw - sp * sp;
    if det > 1e-12 * spp * sw {
        let a = (spy * sw - sp * sy) / det;
        let b = (spp * sy - sp * spy) / det;
        if a >= 0.0 && b >= 0.0 {
            return (a, b, sse(a, b));
        }
    }
    // Boundary candidates.
    let only_b = (0.0, (sy / sw).max(0.0));
    let only_a = ((spy / spp).max(0.0), 0.0);
    let (ea, eb) = (sse(only_b.0, only_b.1), sse(only_a.0, only_a.1));
    if ea <= eb {
        (only_b.0, only_b.1, ea)
    } else {
        (only_a.0, only_a.1, eb)
    }
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iterations: usize) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iterations {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(f: impl Fn(f64) -> f64) -> (Vec<f64>, Vec<f64>) {
        let t: Vec<f64> = (0..=5000).map(|k| k as f64 * 1e-3).collect();
        let y = t.iter().map(|&t| f(t)).collect();
        (t, y)
    }

    #[test]
    fn recovers_synthetic_envelope() {
        let (t, y) = grid(|t| 4.0 * (-2.0 * t).exp() + 0.01);
        let fit = fit_envelope(&t, &y).unwrap();
        assert!((fit.a - 4.0).abs() < 0.04, "{fit:?}");
        assert!((fit.iota - 2.0).abs() < 0.02, "{fit:?}");
        assert!((fit.b - 0.01).abs() < 1e-4, "{fit:?}");
    }

    #[test]
    fn zero_series() {
        let (t, y) = grid(|_| 0.0);
        let fit = fit_envelope(&t, &y).unwrap();
        assert_eq!((fit.a, fit.iota, fit.b), (0.0, 0.0, 0.0));
    }

    #[test]
    fn constant_series() {
        let (t, y) = grid(|_| 0.3);
        let fit = fit_envelope(&t, &y).unwrap();
        assert!(fit.a.abs() < 1e-9, "{fit:?}");
        assert!((fit.b - 0.3).abs() < 1e-9, "{fit:?}");
    }

    #[test]
    fn envelope_dominates_oscillation() {
        let (t, y) = grid(|t| (4.0 * (-2.0 * t).exp() + 0.01) * (10.0 * t).cos().powi(2));
        let fit = fit_envelope(&t, &y).unwrap();
        assert!(fit.a >= 0.0 && fit.b >= 0.0 && fit.iota >= 0.0);
        assert!(fit.b <= 0.011);
    }

    #[test]
    fn suffix_max_is_non_increasing() {
        assert_eq!(suffix_max(&[1.0, 3.0, 2.0, 0.5, 0.7]), vec![3.0, 3.0, 2.0, 0.7, 0.7]);
    }

    #[test]
    fn too_few_samples() {
        assert!(fit_envelope(&[0.0; 10], &[1.0; 10]).is_err());
    }
}
