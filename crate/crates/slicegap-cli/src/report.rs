//! Report structs, CSV rendering, and atomic file output.
//!
//! CSV floats use 17 significant digits so every double round-trips exactly;
//! files are written to a temporary sibling and renamed into place so a
//! half-written experiment never shadows a complete one.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use slicegap::sampler::{ChainTrace, ContractionStats, LevelTrace};

/// 17 significant digits: exact round-trip for f64.
pub fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[derive(Serialize)]
pub struct ClassifyReport {
    pub target: String,
    pub k: usize,
    pub member: bool,
    pub k_min: Option<usize>,
}

#[derive(Serialize)]
pub struct GapReport {
    pub target: String,
    pub n: usize,
    pub gap: f64,
    pub refinement_delta: f64,
    pub lower_bound: Option<f64>,
    pub satisfied: bool,
}

#[derive(Serialize)]
pub struct WassersteinReport {
    pub target: String,
    pub x_norm: f64,
    pub y_norm: f64,
    pub ub: f64,
    pub ub_se: f64,
    pub lb: f64,
    pub lb_se: f64,
}

impl ClassifyReport {
    pub fn to_csv(&self) -> String {
        let k_min = self.k_min.map_or(String::new(), |k| k.to_string());
        format!(
            "target,k,member,k_min\n{},{},{},{}\n",
            self.target, self.k, self.member, k_min
        )
    }
}

impl GapReport {
    pub fn to_csv(&self) -> String {
        let lb = self.lower_bound.map_or(String::new(), fmt_f);
        format!(
            "target,n,gap,refinement_delta,lower_bound,satisfied\n{},{},{},{},{},{}\n",
            self.target,
            self.n,
            fmt_f(self.gap),
            fmt_f(self.refinement_delta),
            lb,
            self.satisfied
        )
    }
}

impl WassersteinReport {
    pub fn to_csv(&self) -> String {
        format!(
            "target,x_norm,y_norm,ub,ub_se,lb,lb_se\n{},{},{},{},{},{},{}\n",
            self.target,
            fmt_f(self.x_norm),
            fmt_f(self.y_norm),
            fmt_f(self.ub),
            fmt_f(self.ub_se),
            fmt_f(self.lb),
            fmt_f(self.lb_se)
        )
    }
}

/// `step,x_1..x_d,rho_x,t` with steps numbered from 1.
pub fn chain_csv(trace: &ChainTrace) -> String {
    let mut out = String::from("step");
    for i in 1..=trace.d {
        out.push_str(&format!(",x_{i}"));
    }
    out.push_str(",rho_x,t\n");
    for (i, x) in trace.states.iter().enumerate() {
        out.push_str(&(i + 1).to_string());
        for v in x {
            out.push(',');
            out.push_str(&fmt_f(*v));
        }
        out.push(',');
        out.push_str(&fmt_f(trace.rho_values[i]));
        out.push(',');
        out.push_str(&fmt_f(trace.levels[i]));
        out.push('\n');
    }
    out
}

/// `step,t` with steps numbered from 1.
pub fn level_csv(trace: &LevelTrace) -> String {
    let mut out = String::from("step,t\n");
    for (i, t) in trace.levels.iter().enumerate() {
        out.push_str(&format!("{},{}\n", i + 1, fmt_f(*t)));
    }
    out
}

/// `step,dist,norm_gap` of replicate-averaged coupled distances; step 0 is
/// the initial pair.
pub fn couple_csv(stats: &ContractionStats) -> String {
    let mut out = String::from("step,dist,norm_gap\n");
    for (i, (d, g)) in stats
        .mean_distance
        .iter()
        .zip(stats.mean_norm_gap.iter())
        .enumerate()
    {
        out.push_str(&format!("{},{},{}\n", i, fmt_f(*d), fmt_f(*g)));
    }
    out
}

pub fn chain_json(trace: &ChainTrace) -> Result<String> {
    let rows: Vec<serde_json::Value> = trace
        .states
        .iter()
        .enumerate()
        .map(|(i, x)| {
            serde_json::json!({
                "step": i + 1,
                "x": x,
                "rho_x": trace.rho_values[i],
                "t": trace.levels[i],
            })
        })
        .collect();
    to_json(&rows)
}

pub fn level_json(trace: &LevelTrace) -> Result<String> {
    let rows: Vec<serde_json::Value> = trace
        .levels
        .iter()
        .enumerate()
        .map(|(i, t)| serde_json::json!({ "step": i + 1, "t": t }))
        .collect();
    to_json(&rows)
}
