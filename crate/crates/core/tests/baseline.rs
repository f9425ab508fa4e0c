//! The shipped PID gains are reproducible from the documented procedure.

use grc_core::config::load_preset;
use grc_core::sim::{run_closed_loop, ziegler_nichols, ZnSettings};

fn rederive(name: &str, step: f64, duration: f64) {
    let cfg = load_preset(name).unwrap();
    let pinned = cfg.pid.unwrap();
    let zn = ziegler_nichols(&cfg, &ZnSettings::standard(step, duration)).unwrap();
    for (got, want) in [
        (zn.gains.kp, pinned.kp),
        (zn.gains.ki, pinned.ki),
        (zn.gains.kd, pinned.kd),
    ] {
        assert!(
            (got - want).abs() <= 1e-9 * want.abs(),
            "{name}: {got} vs pinned {want}"
        );
    }
    assert_eq!(zn.gains.integral_clamp, pinned.integral_clamp);
}

#[test]
fn eda_pid_gains_match_procedure() {
    rederive("eda-quintic", 0.01, 10.0);
}

#[test]
fn hda_pid_gains_match_procedure() {
    rederive("hda-velocity", 0.1, 20.0);
}

#[test]
fn grc_beats_pid_on_hda_velocity() {
    let c = load_preset("hda-velocity").unwrap();
    let grc = run_closed_loop(&c).unwrap().metrics.rmse_position;
    let pid = run_closed_loop(&c.with_pid().unwrap()).unwrap().metrics.rmse_position;
    assert!(grc <= pid, "grc {grc} pid {pid}");
}

/// Fails: an ideal-plant Ziegler–Nichols PID out-tracks GRC at the published
/// gains on this stage. Kept so the gap stays visible.
#[test]
#[ignore = "known gap on the PMSM stage"]
fn grc_beats_pid_on_eda_quintic() {
    let c = load_preset("eda-quintic").unwrap();
    let grc = run_closed_loop(&c).unwrap().metrics.rmse_position;
    let pid = run_closed_loop(&c.with_pid().unwrap()).unwrap().metrics.rmse_position;
    assert!(grc <= pid, "grc {grc} pid {pid}");
}
