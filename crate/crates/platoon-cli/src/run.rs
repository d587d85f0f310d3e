//! Turning a validated config into a finished run on disk.

use std::path::Path;

use platoon_core::metrics::{summarize, MetricsReport};
use platoon_core::models::{ModelKind, ModelSpec};
use platoon_core::sim::{run_infinite, run_ring, RingScenario, SimConfig, Trajectory};

use crate::config::{RunConfig, ScenarioKind};
use crate::csvio::{trajectory_csv, write_atomic};
use crate::error::CliError;
use crate::summary;
use crate::svg::{line_chart, Series};

/// Convergence tolerance for the settled-headway time (m).
pub const CONVERGENCE_EPS: f64 = 0.5;

/// Oscillation window: the post-transient 30-60 s stretch on the open road
/// (when the run is long enough), the second half of the run otherwise.
pub fn metrics_window(cfg: &RunConfig) -> (f64, f64) {
    match cfg.scenario {
        ScenarioKind::Infinite if cfg.t_end >= 60.0 => (30.0, 60.0),
        _ => (0.5 * cfg.t_end, cfg.t_end),
    }
}

/// Run the configured scenario with explicit model/seed/period substitutions
/// (sweeps vary these per grid point).
pub fn run_scenario(
    cfg: &RunConfig,
    model: &ModelSpec,
    seed: u64,
    period: Option<f64>,
) -> Result<Trajectory, CliError> {
    let ovf = cfg.build_ovf()?;
    let sim = SimConfig { seed, ..cfg.sim_config() };
    match cfg.scenario {
        ScenarioKind::Ring => {
            let scn = RingScenario {
                n: cfg.n,
                length: cfg.ring_length,
                ovf,
                disturbance: cfg.disturbance,
                model: *model,
            };
            Ok(run_ring(&scn, &sim)?)
        }
        ScenarioKind::Infinite => {
            let p = period.ok_or_else(|| CliError::config("missing leader period"))?;
            let leader = cfg.leader_profile(p)?;
            Ok(run_infinite(&leader, cfg.n, &ovf, model, &sim)?)
        }
    }
}

pub struct FinishedRun {
    pub trajectory: Trajectory,
    pub report: MetricsReport,
}

/// Simulate per the config and write `trajectory.csv` + `summary.txt`
/// (plus headway/velocity SVG charts on request) into `dir`.
pub fn execute(cfg: &RunConfig, dir: &Path, with_svg: bool) -> Result<FinishedRun, CliError> {
    let model = cfg.build_model()?;
    let trajectory = run_scenario(cfg, &model, cfg.seed, cfg.period)?;
    let window = metrics_window(cfg);
    let report = summarize(&trajectory, window, CONVERGENCE_EPS)?;

    write_atomic(&dir.join("trajectory.csv"), trajectory_csv(&trajectory).as_bytes())?;
    let text = summary::render(cfg, &trajectory, &report, window, CONVERGENCE_EPS);
    write_atomic(&dir.join("summary.txt"), text.as_bytes())?;

    if with_svg {
        let headway_series: Vec<Series> = (0..trajectory.headway_count())
            .map(|v| Series {
                points: trajectory
                    .times
                    .iter()
                    .zip(&trajectory.headways)
                    .map(|(t, row)| (*t, row[v]))
                    .collect(),
            })
            .collect();
        write_atomic(
            &dir.join("headways.svg"),
            line_chart("headway profiles", "t (s)", "headway (m)", &headway_series).as_bytes(),
        )?;
        let velocity_series: Vec<Series> = (0..trajectory.vehicle_count())
            .map(|v| Series {
                points: trajectory
                    .times
                    .iter()
                    .zip(&trajectory.velocities)
                    .map(|(t, row)| (*t, row[v]))
                    .collect(),
            })
            .collect();
        write_atomic(
            &dir.join("velocities.svg"),
            line_chart("velocity profiles", "t (s)", "v (m/s)", &velocity_series).as_bytes(),
        )?;
    }
    Ok(FinishedRun { trajectory, report })
}

/// Grid-point descriptor shared by the sweep machinery and its labels.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub model: ModelKind,
    pub a: f64,
    pub b: Option<f64>,
    pub p: Option<f64>,
}

impl GridPoint {
    pub fn label(&self) -> String {
        let mut s = self.model.as_str().to_string();
        s.push_str(&format!("_a{}", self.a));
        if let Some(b) = self.b {
            s.push_str(&format!("_b{b}"));
        }
        if let Some(p) = self.p {
            s.push_str(&format!("_p{p}"));
        }
        s
    }
}
