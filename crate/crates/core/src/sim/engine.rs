//! Closed-loop simulation at a fixed control rate.
//!
//! Each tick samples the trajectory and the disturbance, runs the
//! controller on the measured state, then integrates the plant over the tick
//! in `substeps` sub-intervals with the inputs and disturbance held.

use crate::chain::{build_chain, SubsystemChain};
use crate::error::{Error, Result};
use crate::grc::{check_adaptive_step, grc_tick, pid_tick, GrcState, PidGains, PidState};
use crate::plants::{DisturbanceProfile, DisturbanceSource, InternalState, Plant, PlantParams, RadicandPolicy};
use crate::reference::Trajectory;
use crate::saturation::saturate;
use crate::sim::integrate::{integrate_step, Integrator};
use crate::sim::metrics::{compute_metrics, MetricsConfig, RunMetrics};
use crate::telemetry::TelemetryRecord;
use crate::types::{subsystem_count, GainSet, PlantFamily, PlantState, SaturationLimits};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ControllerKind {
    Grc,
    Pid(PidGains),
}

impl ControllerKind {
    pub fn name(&self) -> &'static str {
        match self {
            ControllerKind::Grc => "grc",
            ControllerKind::Pid(_) => "pid",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub name: String,
    pub params: PlantParams,
    pub gains: GainSet,
    pub chi0: Vec<f64>,
    pub saturate_u1: bool,
    /// Limits of `u_1..u_{n-1}`.
    pub limits: Vec<SaturationLimits>,
    /// Baseline gains; used when `controller` is PID.
    pub pid: Option<PidGains>,
    pub controller: ControllerKind,
    pub dt: f64,
    pub substeps: usize,
    pub duration: f64,
    pub integrator: Integrator,
    pub disturbance: DisturbanceProfile,
    pub trajectory: Trajectory,
    /// Initial measured state `x_1..x_n`.
    pub initial_state: Vec<f64>,
    pub seed: u64,
    pub radicand: RadicandPolicy,
    pub metrics: MetricsConfig,
}

impl SimConfig {
    pub fn family(&self) -> PlantFamily {
        self.params.family()
    }

    pub fn validate(&self) -> Result<()> {
        let family = self.family();
        let n = subsystem_count(family);
        self.params.validate()?;
        if self.gains.len() != n {
            return Err(Error::ConfigInvariant(format!(
                "{family} needs gains for {n} subsystems, got {}",
                self.gains.len()
            )));
        }
        if self.initial_state.len() != n {
            return Err(Error::StateDimension {
                family: family.name(),
                expected: n,
                got: self.initial_state.len(),
            });
        }
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(Error::ConfigInvariant("duration must be > 0".into()));
        }
        if self.substeps == 0 {
            return Err(Error::ConfigInvariant("substeps must be >= 1".into()));
        }
        check_adaptive_step(&self.gains, self.dt)?;
        build_chain(family, &self.limits)?;
        self.disturbance.validate()?;
        if let Some(pid) = &self.pid {
            pid.validate()?;
        }
        if let ControllerKind::Pid(pid) = &self.controller {
            pid.validate()?;
        }
        Ok(())
    }

    pub fn ticks(&self) -> usize {
        (self.duration / self.dt).round() as usize
    }

    /// Same configuration driven by the PID baseline.
    pub fn with_pid(&self) -> Result<Self> {
        let pid = self
            .pid
            .ok_or_else(|| Error::ConfigInvariant(format!("{} has no [pid] gains", self.name)))?;
        Ok(SimConfig {
            controller: ControllerKind::Pid(pid),
            ..self.clone()
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Divergence {
    /// Index of the first record that could not be produced.
    pub tick: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub telemetry: Vec<TelemetryRecord>,
    pub metrics: RunMetrics,
    /// Per tick: some physical input was clipped.
    pub clipped: Vec<bool>,
    /// Ticks during which a valve radicand was clipped to zero.
    pub radicand_clipped_ticks: usize,
    pub diverged: Option<Divergence>,
}

/// Control input index the PID baseline drives, and the plant slot it feeds.
fn pid_input(family: PlantFamily) -> usize {
    match family {
        PlantFamily::HdaMotorWithValve => 3,
        _ => 2,
    }
}

/// One controller invocation: plant inputs plus the telemetry fragment.
struct Decision {
    physical: [f64; 2],
    clipped: bool,
    record: TelemetryRecord,
}

enum Controller {
    Grc(GrcState),
    Pid(PidState),
}

impl Controller {
    fn decide(
        &mut self,
        chain: &SubsystemChain,
        measured: &PlantState,
        traj: &Trajectory,
        dt: f64,
    ) -> Result<Decision> {
        let t = measured.t;
        let sample = traj.sample(t);
        let n = chain.n;
        let mut record = TelemetryRecord {
            t,
            x: measured.padded(),
            present: TelemetryRecord::mask_for(n),
            ..Default::default()
        };
        match self {
            Controller::Grc(grc) => {
                let out = grc_tick(chain, grc, measured, sample, dt)?;
                for j in 1..=n {
                    record.xd[j - 1] = out.refs.get(j);
                }
                record.e = out.e;
                record.z = out.z;
                record.u = out.u;
                record.sat_u = out.applied;
                record.chi = out.chi;
                Ok(Decision {
                    physical: out.physical,
                    clipped: out.clipped,
                    record,
                })
            }
            Controller::Pid(pid) => {
                let e = sample.position - measured.get(1);
                let raw = pid_tick(pid, e, dt);
                let upsilon = pid_input(chain.family);
                let split = saturate(raw, chain.limits_of(upsilon))?;
                record.xd[0] = sample.position;
                record.xd[1] = sample.velocity;
                record.e[0] = -e;
                record.e[1] = measured.get(2) - sample.velocity;
                record.z[0] = record.e[0];
                record.z[1] = record.e[1];
                record.u[upsilon] = raw;
                record.sat_u[upsilon - 1] = split.value;
                Ok(Decision {
                    physical: [split.value, 0.0],
                    clipped: split.is_clipped(),
                    record,
                })
            }
        }
    }
}

/// Integrates one control interval with held inputs. Returns the new state
/// and whether any evaluation clipped a radicand.
pub fn advance(
    plant: &Plant,
    state: &InternalState,
    physical: [f64; 2],
    disturbance: &[f64; 4],
    dt: f64,
    substeps: usize,
    method: Integrator,
) -> Result<(InternalState, bool)> {
    let h = dt / substeps as f64;
    let mut x = *state;
    let mut clipped = false;
    for _ in 0..substeps {
        x = integrate_step(
            |s| {
                let d = plant.derivative(s, physical, disturbance)?;
                clipped |= d.clipped;
                Ok(d.dx)
            },
            &x,
            h,
            method,
        )?;
    }
    Ok((x, clipped))
}

/// Runs `config` to completion or divergence. Configuration errors are
/// returned as `Err`; numerical blow-up yields a truncated, flagged run.
pub fn run_closed_loop(config: &SimConfig) -> Result<RunOutput> {
    config.validate()?;
    let family = config.family();
    let plant = Plant::new(config.params.clone(), config.radicand)?;
    let chain = build_chain(family, &config.limits)?;
    let mut controller = match config.controller {
        ControllerKind::Grc => Controller::Grc(GrcState::new(config.gains.clone(), &config.chi0, config.saturate_u1)?),
        ControllerKind::Pid(g) => Controller::Pid(PidState::new(g)),
    };
    let source = DisturbanceSource::new(config.disturbance, config.seed);
    let initial = PlantState::new(family, &config.initial_state, 0.0)?;
    let mut state = plant.internal_from_measured(&initial)?;

    let ticks = config.ticks();
    let mut telemetry = Vec::with_capacity(ticks + 1);
    let mut clipped = Vec::with_capacity(ticks + 1);
    let mut radicand_clipped_ticks = 0;
    let mut diverged = None;

    for k in 0..=ticks {
        let t = k as f64 * config.dt;
        let measured = plant.observe(&state, t);
        let d = source.sample(t);
        let mut decision = match controller.decide(&chain, &measured, &config.trajectory, config.dt) {
            Ok(dec) => dec,
            Err(err) => {
                diverged = Some(Divergence {
                    tick: k,
                    message: err.to_string(),
                });
                break;
            }
        };
        decision.record.disturbance = d;
        telemetry.push(decision.record);
        clipped.push(decision.clipped);
        if k == ticks {
            break;
        }
        match advance(
            &plant,
            &state,
            decision.physical,
            &d,
            config.dt,
            config.substeps,
            config.integrator,
        ) {
            Ok((next, c)) => {
                state = next;
                radicand_clipped_ticks += usize::from(c);
            }
            Err(err) => {
                diverged = Some(Divergence {
                    tick: k + 1,
                    message: err.to_string(),
                });
                break;
            }
        }
    }

    let metrics = compute_metrics(&telemetry, &clipped, &config.metrics)?;
    Ok(RunOutput {
        telemetry,
        metrics,
        clipped,
        radicand_clipped_ticks,
        diverged,
    })
}
