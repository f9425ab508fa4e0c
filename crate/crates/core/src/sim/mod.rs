//! Closed-loop simulation, metrics and diagnostics.

pub mod bound;
pub mod diagnostic;
pub mod engine;
pub mod integrate;
pub mod metrics;
pub mod tuning;

pub use bound::{fit_convergence_bound, fit_envelope, BoundFit};
pub use diagnostic::{velocity_transform_identity, IdentityCheck};
pub use engine::{advance, run_closed_loop, ControllerKind, Divergence, RunOutput, SimConfig};
pub use integrate::{integrate_step, Integrator};
pub use metrics::{compute_metrics, render_key_values, MetricsConfig, RunMetrics};
pub use tuning::{classic_gains, ziegler_nichols, ZnResult, ZnSettings};
