//! Run summaries: tracking accuracy, settling and input saturation.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::telemetry::{format_real, TelemetryRecord};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsConfig {
    /// RMSE ignores samples before this time [s].
    pub window_start: f64,
    /// Settling band on `|e_1|`.
    pub band: f64,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        MetricsConfig {
            window_start: 0.0,
            band: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunMetrics {
    pub rmse_position: f64,
    pub max_abs_error: f64,
    /// `None` when `|e_1|` is outside the band at the end of the run.
    pub settling_time: Option<f64>,
    pub control_saturation_fraction: f64,
    pub final_error: f64,
}

/// Metrics over `telemetry`; `clipped[k]` flags a saturated physical input
/// at tick `k` (missing entries count as unclipped).
pub fn compute_metrics(telemetry: &[TelemetryRecord], clipped: &[bool], config: &MetricsConfig) -> Result<RunMetrics> {
    let last = telemetry.last().ok_or(Error::EmptyTelemetry)?;
    let t0 = telemetry[0].t;
    let (mut sum_sq, mut count) = (0.0, 0usize);
    let mut max_abs: f64 = 0.0;
    for r in telemetry {
        let e = r.e[0];
        max_abs = max_abs.max(e.abs());
        if r.t >= config.window_start {
            sum_sq += e * e;
            count += 1;
        }
    }
    let rmse_position = if count == 0 {
        0.0
    } else {
        (sum_sq / count as f64).sqrt()
    };
    let settling_time = match telemetry.iter().rposition(|r| r.e[0].abs() > config.band) {
        None => Some(t0),
        Some(k) if k + 1 < telemetry.len() => Some(telemetry[k + 1].t),
        Some(_) => None,
    };
    let saturated = clipped.iter().filter(|&&c| c).count();
    Ok(RunMetrics {
        rmse_position,
        max_abs_error: max_abs,
        settling_time,
        control_saturation_fraction: saturated as f64 / telemetry.len() as f64,
        final_error: last.e[0].abs(),
    })
}

impl RunMetrics {
    /// `key=value` lines in a fixed order.
    pub fn to_key_values(&self) -> Vec<(&'static str, String)> {
        vec![
            ("rmse_position", format_real(self.rmse_position)),
            ("max_abs_error", format_real(self.max_abs_error)),
            (
                "settling_time",
                self.settling_time.map_or_else(|| "unsettled".to_string(), format_real),
            ),
            (
                "control_saturation_fraction",
                format_real(self.control_saturation_fraction),
            ),
            ("final_error", format_real(self.final_error)),
        ]
    }
}

/// Renders `key=value` lines.
pub fn render_key_values(pairs: &[(&str, String)]) -> String {
    let mut out = String::new();
    for (k, v) in pairs {
        let _ = writeln!(out, "{k}={v}");
    }
    out
}
