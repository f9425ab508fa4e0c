//! Run configuration files and the embedded presets.
//!
//! ```text
//! [run]          family, preset, dt, substeps, integrator, duration, seed,
//!                radicand, initial_state, plant_file
//! [plant]        family-specific parameter overrides (SI)
//! [gains]        k, epsilon, gamma, delta (scalar or one per subsystem),
//!                chi0, saturate_u1
//! [limits]       u1, u2, u3 as `min, max`
//! [trajectory]   kind = hold | quintic | velocity, plus its keys
//! [disturbance]  dN = off | constant | step | sine | noise, dN_magnitude,
//!                dN_t_on, dN_freq, dN_bandwidth
//! [pid]          kp, ki, kd, integral_clamp
//! [metrics]      window_start, band
//! ```
//!
//! A file naming a `preset` starts from that preset and overrides only the
//! keys it sets. Plant parameters layer as: built-in defaults, then the
//! family's parameter file (or `plant_file`), then `[plant]`.

pub mod ini;

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::grc::{GrcState, PidGains};
use crate::plants::{ChannelProfile, DisturbanceKind, DisturbanceProfile, PlantParams, RadicandPolicy};
use crate::reference::{QuinticSegment, Trajectory, VelocityScript};
use crate::sim::engine::{ControllerKind, SimConfig};
use crate::sim::integrate::Integrator;
use crate::sim::metrics::MetricsConfig;
use crate::types::{subsystem_count, GainSet, PlantFamily, SaturationLimits, SubsystemGains};

use ini::{Document, SectionReader};

/// Preset names with their embedded configuration text.
pub const PRESETS: [(&str, &str); 5] = [
    ("eda-quintic", include_str!("../../presets/eda-quintic.cfg")),
    ("hda-velocity", include_str!("../../presets/hda-velocity.cfg")),
    ("pda-step", include_str!("../../presets/pda-step.cfg")),
    ("universal-step", include_str!("../../presets/universal-step.cfg")),
    (
        "hda-cylinder-quintic",
        include_str!("../../presets/hda-cylinder-quintic.cfg"),
    ),
];

/// Shipped plant parameter files, one per family.
pub const PLANT_FILES: [(PlantFamily, &str); 5] = [
    (
        PlantFamily::UniversalMotorEda,
        include_str!("../../presets/plants/universal-motor-eda.cfg"),
    ),
    (PlantFamily::PmsmEda, include_str!("../../presets/plants/pmsm-eda.cfg")),
    (
        PlantFamily::HdaCylinder,
        include_str!("../../presets/plants/hda-cylinder.cfg"),
    ),
    (
        PlantFamily::HdaMotorWithValve,
        include_str!("../../presets/plants/hda-motor-valve.cfg"),
    ),
    (
        PlantFamily::PdaLinearized,
        include_str!("../../presets/plants/pda-linearized.cfg"),
    ),
];

const SECTIONS: [&str; 8] = [
    "run",
    "plant",
    "gains",
    "limits",
    "trajectory",
    "disturbance",
    "pid",
    "metrics",
];

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(name, _)| *name)
}

pub fn preset_text(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

pub fn plant_file_text(family: PlantFamily) -> &'static str {
    PLANT_FILES
        .iter()
        .find(|(f, _)| *f == family)
        .map(|(_, text)| *text)
        .expect("every family ships a parameter file")
}

pub fn load_preset(name: &str) -> Result<SimConfig> {
    let text = preset_text(name).ok_or_else(|| {
        let known: Vec<_> = preset_names().collect();
        Error::ConfigInvariant(format!("unknown preset `{name}` (known: {})", known.join(", ")))
    })?;
    parse_config_str(text, None)
}

pub fn parse_config(path: &Path) -> Result<SimConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_config_str(&text, path.parent())
}

/// Parses configuration text; relative file references resolve against
/// `base_dir`.
pub fn parse_config_str(text: &str, base_dir: Option<&Path>) -> Result<SimConfig> {
    let doc = Document::parse(text)?;
    for s in &doc.sections {
        if !SECTIONS.contains(&s.name.as_str()) {
            return Err(Error::Config {
                line: s.line,
                message: format!("unknown section [{}]", s.name),
            });
        }
    }
    let resolve = |p: &str| -> PathBuf {
        match base_dir {
            Some(dir) if Path::new(p).is_relative() => dir.join(p),
            _ => PathBuf::from(p),
        }
    };

    let empty = ini::Section {
        name: "run".into(),
        line: 1,
        entries: Vec::new(),
    };
    let mut run = SectionReader::new(doc.section("run").unwrap_or(&empty));
    let preset = run.string("preset");
    let family = match run.string("family") {
        Some((name, line)) => Some((name.parse::<PlantFamily>().map_err(|e| at(line, e))?, line)),
        None => None,
    };
    let mut cfg = match (preset, family) {
        (Some((name, line)), fam) => {
            let cfg = load_preset(name).map_err(|e| at(line, e))?;
            if let Some((f, fline)) = fam {
                if f != cfg.family() {
                    return Err(Error::Config {
                        line: fline,
                        message: format!("preset `{name}` is {}, not {f}", cfg.family()),
                    });
                }
            }
            cfg
        }
        (None, Some((f, _))) => defaults(f)?,
        (None, None) => {
            return Err(Error::Config {
                line: run.line(),
                message: "missing required key `family` (or `preset`) in [run]".into(),
            })
        }
    };
    let family = cfg.family();
    let n = subsystem_count(family);

    if let Some(v) = run.string("name") {
        cfg.name = v.0.to_string();
    }
    if let Some(v) = run.f64("dt")? {
        cfg.dt = positive(&run, "dt", v)?;
    }
    if let Some(v) = run.u64("substeps")? {
        if v == 0 {
            return Err(Error::Config {
                line: run.line_of("substeps"),
                message: "substeps must be >= 1".into(),
            });
        }
        cfg.substeps = v as usize;
    }
    if let Some((v, line)) = run.string("integrator") {
        cfg.integrator = v.parse::<Integrator>().map_err(|e| at(line, e))?;
    }
    if let Some(v) = run.f64("duration")? {
        cfg.duration = positive(&run, "duration", v)?;
    }
    if let Some(v) = run.u64("seed")? {
        cfg.seed = v;
    }
    if let Some((v, line)) = run.string("radicand") {
        cfg.radicand = match v {
            "clip" => RadicandPolicy::Clip,
            "strict" => RadicandPolicy::Strict,
            other => {
                return Err(at(
                    line,
                    format!("radicand must be `clip` or `strict`, found `{other}`"),
                ))
            }
        };
    }
    if let Some(v) = run.f64_list("initial_state")? {
        if v.len() != n {
            return Err(Error::Config {
                line: run.line_of("initial_state"),
                message: format!("initial_state needs {n} entries for {family}, got {}", v.len()),
            });
        }
        cfg.initial_state = v;
    }
    if let Some((p, line)) = run.string("plant_file") {
        let text = std::fs::read_to_string(resolve(p)).map_err(|e| at(line, format!("plant_file `{p}`: {e}")))?;
        cfg.params = plant_params_from_str(family, &text)?;
    }
    run.finish()?;

    if let Some(section) = doc.section("plant") {
        let mut r = SectionReader::new(section);
        apply_plant(&mut cfg.params, &mut r)?;
        r.finish()?;
        cfg.params.validate().map_err(|e| at(section.line, e))?;
    }
    if let Some(section) = doc.section("gains") {
        apply_gains(&mut cfg, section, n)?;
    }
    if let Some(section) = doc.section("limits") {
        let mut r = SectionReader::new(section);
        for upsilon in 1..n {
            let key = format!("u{upsilon}");
            if let Some(v) = r.f64_list(&key)? {
                let line = r.line_of(&key);
                if v.len() != 2 {
                    return Err(at(line, format!("{key} must be `min, max`")));
                }
                cfg.limits[upsilon - 1] = SaturationLimits::new(v[0], v[1]).map_err(|e| at(line, e))?;
            }
        }
        r.finish()?;
    }
    if let Some(section) = doc.section("trajectory") {
        let mut r = SectionReader::new(section);
        cfg.trajectory = parse_trajectory(&mut r, &cfg.trajectory, &resolve)?;
        r.finish()?;
    }
    if let Some(section) = doc.section("disturbance") {
        let mut r = SectionReader::new(section);
        for ch in 0..4 {
            cfg.disturbance.channels[ch] = parse_channel(&mut r, ch, cfg.disturbance.channels[ch])?;
        }
        r.finish()?;
    }
    if let Some(section) = doc.section("pid") {
        let mut r = SectionReader::new(section);
        let mut g = cfg.pid.unwrap_or(PidGains {
            kp: 0.0,
            ki: 0.0,
            kd: 0.0,
            integral_clamp: 1.0,
        });
        r.f64_into("kp", &mut g.kp)?;
        r.f64_into("ki", &mut g.ki)?;
        r.f64_into("kd", &mut g.kd)?;
        r.f64_into("integral_clamp", &mut g.integral_clamp)?;
        g.validate().map_err(|e| at(section.line, e))?;
        r.finish()?;
        cfg.pid = Some(g);
    }
    if let Some(section) = doc.section("metrics") {
        let mut r = SectionReader::new(section);
        r.f64_into("window_start", &mut cfg.metrics.window_start)?;
        if let Some(v) = r.f64("band")? {
            cfg.metrics.band = positive(&r, "band", v)?;
        }
        r.finish()?;
    }

    cfg.validate().map_err(|e| Error::ConfigInvariant(e.to_string()))?;
    Ok(cfg)
}

/// Built-in defaults for `family`, with its shipped parameter file applied.
pub fn defaults(family: PlantFamily) -> Result<SimConfig> {
    let n = subsystem_count(family);
    let l = |a: f64, b: f64| SaturationLimits { u_min: a, u_max: b };
    let limits = match family {
        PlantFamily::UniversalMotorEda => vec![l(-50.0, 50.0), l(-240.0, 240.0)],
        PlantFamily::PmsmEda => vec![l(-50.0, 50.0), l(-300.0, 300.0), l(-300.0, 300.0)],
        PlantFamily::HdaCylinder => vec![l(-1.0, 1.0), l(-10.0, 10.0)],
        PlantFamily::HdaMotorWithValve => vec![l(-1.0, 1.0), l(-1.0, 1.0), l(-10.0, 10.0)],
        PlantFamily::PdaLinearized => vec![l(-50.0, 50.0), l(-10.0, 10.0)],
    };
    Ok(SimConfig {
        name: family.name().to_string(),
        params: plant_params_from_str(family, plant_file_text(family))?,
        gains: GainSet::uniform(n, SubsystemGains::new(35.0, 1.0, 0.001, 0.01))?,
        chi0: vec![0.0; n],
        saturate_u1: GrcState::default_saturate_u1(family),
        limits,
        pid: None,
        controller: ControllerKind::Grc,
        dt: 0.001,
        substeps: 10,
        duration: 5.0,
        integrator: Integrator::Rk4,
        disturbance: DisturbanceProfile::none(),
        trajectory: Trajectory::Hold(0.0),
        initial_state: vec![0.0; n],
        seed: 0,
        radicand: RadicandPolicy::Clip,
        metrics: MetricsConfig::default(),
    })
}

/// Parameters from a plant file: a single `[plant]` section applied over
/// the built-in defaults.
pub fn plant_params_from_str(family: PlantFamily, text: &str) -> Result<PlantParams> {
    let doc = Document::parse(text)?;
    let mut params = PlantParams::default_for(family);
    for s in &doc.sections {
        if s.name != "plant" {
            return Err(Error::Config {
                line: s.line,
                message: format!("plant files hold only [plant], found [{}]", s.name),
            });
        }
        let mut r = SectionReader::new(s);
        apply_plant(&mut params, &mut r)?;
        r.finish()?;
        params.validate().map_err(|e| at(s.line, e))?;
    }
    Ok(params)
}

fn apply_plant(params: &mut PlantParams, r: &mut SectionReader) -> Result<()> {
    match params {
        PlantParams::Universal(p) => p.apply(r),
        PlantParams::Pmsm(p) => p.apply(r),
        PlantParams::HdaCylinder(p) => p.apply(r),
        PlantParams::HdaMotor(p) => p.apply(r),
        PlantParams::Pda(p) => p.apply(r),
    }
}

fn apply_gains(cfg: &mut SimConfig, section: &ini::Section, n: usize) -> Result<()> {
    let mut r = SectionReader::new(section);
    let mut gains: Vec<SubsystemGains> = cfg.gains.iter().copied().collect();
    let mut per_subsystem = |r: &mut SectionReader, key: &str, set: fn(&mut SubsystemGains, f64)| -> Result<()> {
        if let Some(v) = r.f64_list(key)? {
            let values = match v.len() {
                1 => vec![v[0]; n],
                len if len == n => v,
                len => return Err(at(r.line_of(key), format!("{key} needs 1 or {n} values, got {len}"))),
            };
            for (g, x) in gains.iter_mut().zip(values) {
                set(g, x);
            }
        }
        Ok(())
    };
    per_subsystem(&mut r, "k", |g, v| g.k = v)?;
    per_subsystem(&mut r, "epsilon", |g, v| g.epsilon = v)?;
    per_subsystem(&mut r, "gamma", |g, v| g.gamma = v)?;
    per_subsystem(&mut r, "delta", |g, v| g.delta = v)?;
    cfg.gains = GainSet::new(gains).map_err(|e| {
        let key = match &e {
            Error::InvalidParameter { name, .. } => name.trim_end_matches(char::is_numeric).to_string(),
            _ => String::new(),
        };
        at(r.line_of(&key), e)
    })?;
    if let Some(v) = r.f64_list("chi0")? {
        let line = r.line_of("chi0");
        cfg.chi0 = match v.len() {
            1 => vec![v[0]; n],
            len if len == n => v,
            len => return Err(at(line, format!("chi0 needs 1 or {n} values, got {len}"))),
        };
        if cfg.chi0.iter().any(|&c| c < 0.0) {
            return Err(at(line, "chi0 must be >= 0"));
        }
    }
    if let Some(v) = r.bool("saturate_u1")? {
        cfg.saturate_u1 = v;
    }
    r.finish()?;
    crate::grc::check_adaptive_step(&cfg.gains, cfg.dt).map_err(|e| at(section.line, e))
}

fn parse_trajectory(
    r: &mut SectionReader,
    current: &Trajectory,
    resolve: &dyn Fn(&str) -> PathBuf,
) -> Result<Trajectory> {
    let kind_name = match (r.string("kind"), current) {
        (Some((k, _)), _) => k,
        (None, Trajectory::Hold(_)) => "hold",
        (None, Trajectory::Quintic(_)) => "quintic",
        (None, Trajectory::Velocity(_)) => "velocity",
    };
    let line = r.line_of("kind");
    match kind_name {
        "hold" => {
            let mut x = match current {
                Trajectory::Hold(x) => *x,
                _ => 0.0,
            };
            r.f64_into("position", &mut x)?;
            Ok(Trajectory::Hold(x))
        }
        "quintic" => {
            let mut seg = match current {
                Trajectory::Quintic(s) => *s,
                _ => QuinticSegment {
                    x0: 0.0,
                    xf: 0.0,
                    duration: 1.0,
                    t0: 0.0,
                },
            };
            r.f64_into("x0", &mut seg.x0)?;
            r.f64_into("xf", &mut seg.xf)?;
            r.f64_into("duration", &mut seg.duration)?;
            r.f64_into("t0", &mut seg.t0)?;
            QuinticSegment::new(seg.x0, seg.xf, seg.duration, seg.t0)
                .map(Trajectory::Quintic)
                .map_err(|e| at(line, e))
        }
        "velocity" => {
            let x0 = r.f64("x0")?.unwrap_or(0.0);
            let points = r.f64_list("points")?;
            let file = r.string("file");
            let script = match (points, file) {
                (Some(_), Some((_, fline))) => {
                    return Err(at(fline, "give either `points` or `file`, not both"));
                }
                (Some(flat), None) => {
                    let pline = r.line_of("points");
                    if flat.len() % 2 != 0 {
                        return Err(at(pline, "points must be `t, v` pairs"));
                    }
                    let pairs = flat.chunks(2).map(|c| (c[0], c[1])).collect();
                    VelocityScript::new(pairs, x0).map_err(|e| at(pline, e))?
                }
                (None, Some((p, fline))) => VelocityScript::load(&resolve(p), x0).map_err(|e| at(fline, e))?,
                (None, None) => match current {
                    Trajectory::Velocity(s) => VelocityScript::new(s.points().to_vec(), x0).map_err(|e| at(line, e))?,
                    _ => VelocityScript::default(),
                },
            };
            Ok(Trajectory::Velocity(script))
        }
        other => Err(at(line, format!("unknown trajectory kind `{other}`"))),
    }
}

fn parse_channel(r: &mut SectionReader, ch: usize, current: ChannelProfile) -> Result<ChannelProfile> {
    let key = format!("d{}", ch + 1);
    let mut out = current;
    if let Some((kind, line)) = r.string(&key) {
        out.kind = match kind {
            "off" => DisturbanceKind::Off,
            "constant" => DisturbanceKind::Constant,
            "step" => DisturbanceKind::Step { t_on: 0.0 },
            "sine" => DisturbanceKind::Sine { freq_hz: 1.0 },
            "noise" => DisturbanceKind::Noise { bandwidth_hz: 5.0 },
            other => return Err(at(line, format!("unknown disturbance kind `{other}`"))),
        };
        if std::mem::discriminant(&out.kind) == std::mem::discriminant(&current.kind) {
            out.kind = current.kind;
        }
    }
    r.f64_into(&format!("{key}_magnitude"), &mut out.magnitude)?;
    let extra = |r: &mut SectionReader, name: &str| r.f64(&format!("{key}_{name}"));
    let (t_on, freq, bw) = (extra(r, "t_on")?, extra(r, "freq")?, extra(r, "bandwidth")?);
    let misplaced = |name: &str| {
        at(
            r.line_of(&format!("{key}_{name}")),
            format!("{key}_{name} does not apply to this kind"),
        )
    };
    match &mut out.kind {
        DisturbanceKind::Step { t_on: slot } => {
            if let Some(v) = t_on {
                *slot = v;
            }
        }
        DisturbanceKind::Sine { freq_hz } => {
            if let Some(v) = freq {
                *freq_hz = v;
            }
        }
        DisturbanceKind::Noise { bandwidth_hz } => {
            if let Some(v) = bw {
                *bandwidth_hz = v;
            }
        }
        _ => {}
    }
    let kind_uses = |name: &str| {
        matches!(
            (name, out.kind),
            ("t_on", DisturbanceKind::Step { .. })
                | ("freq", DisturbanceKind::Sine { .. })
                | ("bandwidth", DisturbanceKind::Noise { .. })
        )
    };
    for (name, v) in [("t_on", t_on), ("freq", freq), ("bandwidth", bw)] {
        if v.is_some() && !kind_uses(name) {
            return Err(misplaced(name));
        }
    }
    out.validate(ch).map_err(|e| at(r.line_of(&key), e))?;
    Ok(out)
}

fn positive(r: &SectionReader, key: &str, v: f64) -> Result<f64> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(at(r.line_of(key), format!("{key} must be > 0")))
    }
}

fn at(line: usize, err: impl ToString) -> Error {
    Error::Config {
        line,
        message: err.to_string(),
    }
}
