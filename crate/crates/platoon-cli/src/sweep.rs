//! Batch sweeps: expand the grid, derive per-point seeds, run the points on
//! a worker pool, and aggregate the metrics.
//!
//! Seed derivation is reproducible and documented: the non-model grid
//! coordinates are hashed (FNV-1a over `axis=value;` with the value's IEEE
//! bits), xor'd into the base seed, and passed once through SplitMix64. The
//! model axis is deliberately excluded so runs that differ only in the
//! following law face identical initial disturbances.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;

use platoon_core::metrics::summarize;
use platoon_core::rng::SplitMix64;

use crate::config::{Preset, RunConfig, ScenarioKind};
use crate::csvio::{aggregate_csv, trajectory_csv, write_atomic, AggregateRow};
use crate::error::CliError;
use crate::run::{metrics_window, run_scenario, GridPoint, CONVERGENCE_EPS};
use crate::summary;

/// Expand the sweep grid in deterministic order: model, then a, then b,
/// then p (presets pin their own axes).
pub fn expand_grid(cfg: &RunConfig) -> Result<Vec<GridPoint>, CliError> {
    let sweep = &cfg.sweep;
    let (models, a_axis, b_axis, p_axis) = match sweep.preset {
        Some(Preset::Table1) => (
            vec![cfg.model],
            vec![1.2, 2.4],
            None,
            Some(vec![5.0, 10.0, 15.0, 20.0]),
        ),
        Some(Preset::Sim1_1) => (
            vec![platoon_core::models::ModelKind::Ovm, platoon_core::models::ModelKind::POvm],
            vec![0.4, 0.8, 1.6, 2.4],
            None,
            None,
        ),
        None => (
            sweep.model.clone().unwrap_or_else(|| vec![cfg.model]),
            sweep.a.clone().unwrap_or_else(|| vec![cfg.a]),
            sweep.b.clone(),
            sweep.p.clone(),
        ),
    };

    let mut grid = Vec::new();
    for model in &models {
        for a in &a_axis {
            let bs: Vec<Option<f64>> = match &b_axis {
                Some(list) => list.iter().copied().map(Some).collect(),
                None => vec![if matches!(
                    model,
                    platoon_core::models::ModelKind::TOvm | platoon_core::models::ModelKind::FOvm
                ) {
                    Some(cfg.b)
                } else {
                    None
                }],
            };
            for b in &bs {
                let ps: Vec<Option<f64>> = match (&p_axis, cfg.scenario) {
                    (Some(list), _) => list.iter().copied().map(Some).collect(),
                    (None, ScenarioKind::Infinite) => vec![cfg.period],
                    (None, ScenarioKind::Ring) => vec![None],
                };
                for p in &ps {
                    grid.push(GridPoint { model: *model, a: *a, b: *b, p: *p });
                }
            }
        }
    }
    if grid.len() > sweep.max_runs {
        return Err(CliError::config(format!(
            "grid holds {} runs, above the max_runs cap of {} (raise max_runs to allow it)",
            grid.len(),
            sweep.max_runs
        )));
    }
    Ok(grid)
}

/// Seed for one grid point: base xor FNV-1a over the non-model coordinates,
/// mixed once through SplitMix64.
pub fn derive_seed(base: u64, point: &GridPoint) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut feed = |name: &str, value: f64| {
        for byte in name.bytes().chain(*b"=").chain(value.to_bits().to_le_bytes()).chain(*b";") {
            h ^= byte as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    feed("a", point.a);
    if let Some(b) = point.b {
        feed("b", b);
    }
    if let Some(p) = point.p {
        feed("p", p);
    }
    SplitMix64::new(base ^ h).next_u64()
}

pub struct SweepOutcome {
    pub runs: usize,
    pub aggregate_path: std::path::PathBuf,
}

/// Run every grid point (worker pool, one directory per run) and write the
/// aggregate CSV.
pub fn execute(cfg: &RunConfig, out_dir: &std::path::Path) -> Result<SweepOutcome, CliError> {
    let grid = expand_grid(cfg)?;
    let window = metrics_window(cfg);

    let rows: Vec<Option<AggregateRow>> = {
        let mut slots: Vec<Option<AggregateRow>> = (0..grid.len()).map(|_| None).collect();
        let next = AtomicUsize::new(0);
        let (tx, rx) = mpsc::channel::<(usize, Result<AggregateRow, CliError>)>();
        let workers = std::thread::available_parallelism()
            .map(|p| p.get())
            .unwrap_or(1)
            .min(grid.len().max(1));

        std::thread::scope(|scope| {
            for _ in 0..workers {
                let tx = tx.clone();
                let grid = &grid;
                let next = &next;
                scope.spawn(move || loop {
                    let idx = next.fetch_add(1, Ordering::Relaxed);
                    if idx >= grid.len() {
                        break;
                    }
                    let point = &grid[idx];
                    let result = run_point(cfg, point, out_dir, window);
                    if tx.send((idx, result)).is_err() {
                        break;
                    }
                });
            }
        });
        drop(tx);

        let mut first_error = None;
        for (idx, result) in rx.iter() {
            match result {
                Ok(row) => slots[idx] = Some(row),
                Err(e) => {
                    if first_error.is_none() {
                        first_error = Some(e);
                    }
                }
            }
        }
        if let Some(e) = first_error {
            return Err(e);
        }
        slots
    };

    let rows: Vec<AggregateRow> = rows.into_iter().map(|r| r.expect("slot filled")).collect();
    let aggregate_path = out_dir.join("aggregate.csv");
    write_atomic(&aggregate_path, aggregate_csv(&rows).as_bytes())?;
    Ok(SweepOutcome { runs: rows.len(), aggregate_path })
}

fn run_point(
    cfg: &RunConfig,
    point: &GridPoint,
    out_dir: &std::path::Path,
    window: (f64, f64),
) -> Result<AggregateRow, CliError> {
    let model = cfg.model_with(point.model, point.a, point.b.unwrap_or(0.0))?;
    let seed = derive_seed(cfg.seed, point);
    let trajectory = run_scenario(cfg, &model, seed, point.p.or(cfg.period))?;
    let report = summarize(&trajectory, window, CONVERGENCE_EPS)?;

    let dir = out_dir.join(point.label());
    write_atomic(&dir.join("trajectory.csv"), trajectory_csv(&trajectory).as_bytes())?;
    // Per-run summary echoes the grid-point model, not the base config's.
    let mut point_cfg = cfg.clone();
    point_cfg.model = point.model;
    point_cfg.a = point.a;
    point_cfg.b = point.b.unwrap_or(0.0);
    point_cfg.period = point.p.or(cfg.period);
    point_cfg.seed = seed;
    point_cfg.sweep.preset = None;
    point_cfg.sweep.a = None;
    point_cfg.sweep.b = None;
    point_cfg.sweep.p = None;
    point_cfg.sweep.model = None;
    let text = summary::render(&point_cfg, &trajectory, &report, window, CONVERGENCE_EPS);
    write_atomic(&dir.join("summary.txt"), text.as_bytes())?;

    Ok(AggregateRow {
        model: point.model.as_str().to_string(),
        a: point.a,
        b: point.b,
        p: point.p,
        seed,
        report,
    })
}
