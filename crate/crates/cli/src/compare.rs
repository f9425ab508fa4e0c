use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};

const METRICS: [&str; 4] = [
    "rmse_position",
    "max_abs_error",
    "settling_time",
    "control_saturation_fraction",
];

type Summary = BTreeMap<String, String>;

fn read_summary(dir: &Path) -> Result<Summary> {
    let path = dir.join("metrics.txt");
    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let mut map = Summary::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .with_context(|| format!("{}:{}: expected key=value", path.display(), i + 1))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    for key in ["family", "controller"].iter().chain(&METRICS) {
        if !map.contains_key(*key) {
            bail!("{}: missing `{key}`", path.display());
        }
    }
    Ok(map)
}

fn number(s: &Summary, key: &str) -> Result<Option<f64>> {
    let v = &s[key];
    if v == "unsettled" {
        return Ok(None);
    }
    v.parse()
        .map(Some)
        .with_context(|| format!("`{key}` is not a number: {v}"))
}

/// `b/a`, defined as 1 when both agree (including 0/0 and both unsettled).
fn ratio(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (x, y) if x == y => Some(1.0),
        (Some(x), Some(y)) if x != 0.0 => Some(y / x),
        _ => None,
    }
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "unsettled".into(), |x| format!("{x:.6e}"))
}

pub fn compare(dir_a: &Path, dir_b: &Path) -> Result<()> {
    let a = read_summary(dir_a)?;
    let b = read_summary(dir_b)?;
    if a["family"] != b["family"] {
        bail!(
            "runs are for different plant families: {} vs {}",
            a["family"],
            b["family"]
        );
    }
    println!("family: {}", a["family"]);
    println!(
        "{:<28} {:>14} {:>14} {:>12}",
        "metric",
        format!("A ({})", a["controller"]),
        format!("B ({})", b["controller"]),
        "B/A"
    );
    for key in METRICS {
        let (x, y) = (number(&a, key)?, number(&b, key)?);
        let r = ratio(x, y).map_or_else(|| "n/a".into(), |r| format!("{r:.6}"));
        println!("{key:<28} {:>14} {:>14} {r:>12}", cell(x), cell(y));
    }
    let rmse = |s: &Summary| number(s, "rmse_position");
    let pair = match (a["controller"].as_str(), b["controller"].as_str()) {
        ("grc", "pid") => Some((rmse(&a)?, rmse(&b)?)),
        ("pid", "grc") => Some((rmse(&b)?, rmse(&a)?)),
        _ => None,
    };
    if let Some((grc, pid)) = pair {
        let r = ratio(grc, pid).map_or_else(|| "n/a".into(), |r| format!("{r:.6}"));
        println!("pid_rmse/grc_rmse = {r}");
    }
    Ok(())
}
