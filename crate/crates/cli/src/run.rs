use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use grc_core::config::{load_preset, parse_config};
use grc_core::sim::{render_key_values, run_closed_loop, RunOutput, SimConfig};
use grc_core::telemetry::{format_real, write_csv};

use crate::{ControllerArg, RunArgs};

pub enum Status {
    Completed,
    Diverged,
}

fn load(args: &RunArgs) -> Result<SimConfig> {
    let mut cfg = match (&args.preset, &args.config) {
        (Some(name), None) => load_preset(name)?,
        (None, Some(path)) => parse_config(path).with_context(|| format!("{}", path.display()))?,
        _ => bail!("exactly one of --preset or --config is required"),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(duration) = args.duration {
        cfg.duration = duration;
    }
    if args.controller == ControllerArg::Pid {
        cfg = cfg.with_pid()?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn out_dir(args: &RunArgs, cfg: &SimConfig) -> PathBuf {
    if let Some(dir) = &args.out {
        return dir.clone();
    }
    let root = std::env::var_os("GRC_SIM_OUT").map_or_else(|| PathBuf::from("runs"), PathBuf::from);
    root.join(format!("{}-{}", cfg.name, cfg.controller.name()))
}

pub fn metrics_text(cfg: &SimConfig, out: &RunOutput) -> String {
    let mut pairs = vec![
        ("name", cfg.name.clone()),
        ("family", cfg.family().name().to_string()),
        ("controller", cfg.controller.name().to_string()),
        ("seed", cfg.seed.to_string()),
        ("ticks", out.telemetry.len().to_string()),
        (
            "diverged",
            out.diverged
                .as_ref()
                .map_or("no".into(), |d| format!("tick {}: {}", d.tick, d.message)),
        ),
        ("radicand_clipped_ticks", out.radicand_clipped_ticks.to_string()),
    ];
    pairs.extend(out.metrics.to_key_values());
    render_key_values(&pairs)
}

fn gnuplot_script() -> &'static str {
    "set datafile separator ','\n\
     set key autotitle columnhead\n\
     set xlabel 't [s]'\n\
     set multiplot layout 2,1\n\
     plot 'telemetry.csv' using 1:2 with lines, '' using 1:6 with lines\n\
     plot 'telemetry.csv' using 1:10 with lines\n\
     unset multiplot\n"
}

fn write_outputs(dir: &Path, args: &RunArgs, cfg: &SimConfig, out: &RunOutput) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let both = !args.csv && !args.metrics;
    if both || args.csv {
        let path = dir.join("telemetry.csv");
        let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        write_csv(BufWriter::new(file), &out.telemetry)?;
    }
    if both || args.metrics {
        fs::write(dir.join("metrics.txt"), metrics_text(cfg, out))?;
    }
    if args.gnuplot {
        fs::write(dir.join("plot.gp"), gnuplot_script())?;
    }
    Ok(())
}

pub fn run(args: &RunArgs) -> Result<Status> {
    let cfg = load(args)?;
    let out = run_closed_loop(&cfg)?;
    let dir = out_dir(args, &cfg);
    write_outputs(&dir, args, &cfg, &out)?;
    println!(
        "{} ({}, {}): rmse {} final {} -> {}",
        cfg.name,
        cfg.family(),
        cfg.controller.name(),
        format_real(out.metrics.rmse_position),
        format_real(out.metrics.final_error),
        dir.display()
    );
    Ok(match &out.diverged {
        None => Status::Completed,
        Some(d) => {
            eprintln!("diverged at tick {}: {}", d.tick, d.message);
            Status::Diverged
        }
    })
}
