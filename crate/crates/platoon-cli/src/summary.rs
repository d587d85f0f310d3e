//! Human-readable run summary. The `## config` section echoes the effective
//! configuration in the canonical `key = value` form, so a summary can be
//! re-parsed into the exact config that produced it.

use std::fmt::Write as _;

use platoon_core::metrics::MetricsReport;
use platoon_core::sim::Trajectory;

use crate::config::RunConfig;
use crate::csvio::{describe_topology, sig9};
use crate::error::CliError;

pub fn render(
    cfg: &RunConfig,
    traj: &Trajectory,
    report: &MetricsReport,
    window: (f64, f64),
    eps: f64,
) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# platoon run summary");
    let _ = writeln!(s);
    let _ = writeln!(s, "## config");
    s.push_str(&cfg.canonical_lines());
    let _ = writeln!(s);
    let _ = writeln!(s, "## run");
    let _ = writeln!(s, "topology = {}", describe_topology(&traj.topology));
    let _ = writeln!(s, "vehicles = {}", traj.vehicle_count());
    let _ = writeln!(s, "recorded_steps = {}", traj.times.len());
    let _ = writeln!(s, "equilibrium_headway_m = {}", sig9(traj.equilibrium_headway));
    let _ = writeln!(s, "events = {}", traj.events.len());
    for event in &traj.events {
        let _ = writeln!(
            s,
            "event: kind = {}, t_s = {}, vehicle = {}",
            event.kind.as_str(),
            sig9(event.t),
            event.vehicle + 1
        );
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "## metrics");
    let _ = writeln!(s, "window_s = {}, {}", sig9(window.0), sig9(window.1));
    let _ = writeln!(s, "convergence_eps_m = {}", sig9(eps));
    let _ = writeln!(s, "avg_oscillation_m = {}", sig9(report.avg_oscillation));
    let per: Vec<String> = report.per_vehicle_oscillation.iter().map(|x| sig9(*x)).collect();
    let _ = writeln!(s, "per_vehicle_oscillation_m = {}", per.join(", "));
    let _ = writeln!(
        s,
        "convergence_time_s = {}",
        report.convergence_time.map(sig9).unwrap_or_else(|| "none".into())
    );
    let _ = writeln!(s, "min_headway_m = {}", sig9(report.min_headway));
    let _ = writeln!(
        s,
        "first_collision_time_s = {}",
        report.first_collision_time.map(sig9).unwrap_or_else(|| "none".into())
    );
    let _ = writeln!(s, "max_abs_accel_mps2 = {}", sig9(report.max_abs_accel));
    s
}

/// Extract the `## config` section of a summary and re-parse it.
pub fn config_from_summary(text: &str) -> Result<RunConfig, CliError> {
    let mut lines = Vec::new();
    let mut inside = false;
    for line in text.lines() {
        if line.trim() == "## config" {
            inside = true;
            continue;
        }
        if inside {
            if line.starts_with("##") {
                break;
            }
            lines.push(line);
        }
    }
    if lines.is_empty() {
        return Err(CliError::config("summary holds no config section"));
    }
    RunConfig::from_str(&lines.join("\n"))
}
