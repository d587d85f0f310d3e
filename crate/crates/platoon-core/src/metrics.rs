//! Scalar summaries of trajectories.
//!
//! "Oscillation" is the windowed root-mean-square deviation of each defined
//! headway series from its own window mean, averaged across series. RMS is
//! insensitive to sampling phase, which matters because the comparison
//! windows rarely hold an integer number of disturbance periods. On an open
//! road the leader has no headway and is excluded by construction; on a ring
//! all `N` headways participate.

use alloc::vec::Vec;
use core::fmt;

use crate::math;
use crate::sim::{EventKind, Trajectory};

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    /// Mean of `per_vehicle_oscillation` (m).
    pub avg_oscillation: f64,
    /// Windowed RMS deviation of each defined headway series (m).
    pub per_vehicle_oscillation: Vec<f64>,
    /// Earliest recorded time after which every headway stays within `eps`
    /// of the equilibrium headway (s).
    pub convergence_time: Option<f64>,
    /// Smallest recorded headway (m).
    pub min_headway: f64,
    /// First recorded time with a headway at or below zero (s).
    pub first_collision_time: Option<f64>,
    /// Largest per-step velocity change divided by the recording interval
    /// (m/s^2); with every step recorded this recovers the accelerations the
    /// integrator actually applied.
    pub max_abs_accel: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MetricsError {
    /// The requested window does not overlap the recorded times.
    WindowOutOfRange { t0: f64, t1: f64 },
    EmptyTrajectory,
}

impl fmt::Display for MetricsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricsError::WindowOutOfRange { t0, t1 } => {
                write!(f, "window [{t0}, {t1}] s lies outside the recorded range")
            }
            MetricsError::EmptyTrajectory => write!(f, "trajectory holds no recorded steps"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for MetricsError {}

/// Per-series windowed RMS deviation from the window mean, plus the average
/// across series. The window is inclusive on both ends.
pub fn oscillation(traj: &Trajectory, t0: f64, t1: f64) -> Result<(f64, Vec<f64>), MetricsError> {
    if traj.times.is_empty() {
        return Err(MetricsError::EmptyTrajectory);
    }
    let idx: Vec<usize> = traj
        .times
        .iter()
        .enumerate()
        .filter(|(_, t)| **t >= t0 && **t <= t1)
        .map(|(i, _)| i)
        .collect();
    if idx.is_empty() || t1 < t0 {
        return Err(MetricsError::WindowOutOfRange { t0, t1 });
    }

    let series = traj.headway_count();
    let mut per_vehicle = Vec::with_capacity(series);
    for s in 0..series {
        let mean: f64 = idx.iter().map(|&i| traj.headways[i][s]).sum::<f64>() / idx.len() as f64;
        let ms: f64 = idx
            .iter()
            .map(|&i| {
                let d = traj.headways[i][s] - mean;
                d * d
            })
            .sum::<f64>()
            / idx.len() as f64;
        per_vehicle.push(math::sqrt(ms));
    }
    let avg = per_vehicle.iter().sum::<f64>() / per_vehicle.len() as f64;
    Ok((avg, per_vehicle))
}

/// Earliest recorded `t*` such that every headway stays within `eps` of the
/// trajectory's equilibrium headway for all recorded `t >= t*`.
pub fn convergence_time(traj: &Trajectory, eps: f64) -> Option<f64> {
    let h_eq = traj.equilibrium_headway;
    let settled = |row: &Vec<f64>| row.iter().all(|h| math::abs(h - h_eq) < eps);
    // Walk backward to the last violation.
    let mut first_ok = 0;
    for (i, row) in traj.headways.iter().enumerate().rev() {
        if !settled(row) {
            first_ok = i + 1;
            break;
        }
    }
    traj.times.get(first_ok).copied()
}

/// Extremes of the recorded series: smallest headway, first collision time,
/// and the largest recovered |acceleration|.
pub fn extremes(traj: &Trajectory) -> (f64, Option<f64>, f64) {
    let mut min_headway = f64::INFINITY;
    let mut first_collision = None;
    for (i, row) in traj.headways.iter().enumerate() {
        for h in row {
            min_headway = min_headway.min(*h);
        }
        if first_collision.is_none() && row.iter().any(|h| *h <= 0.0) {
            first_collision = Some(traj.times[i]);
        }
    }

    let mut max_accel = 0.0f64;
    for w in 0..traj.times.len().saturating_sub(1) {
        let span = traj.times[w + 1] - traj.times[w];
        for (v0, v1) in traj.velocities[w].iter().zip(&traj.velocities[w + 1]) {
            max_accel = max_accel.max(math::abs(v1 - v0) / span);
        }
    }
    (min_headway, first_collision, max_accel)
}

/// Full report over the given oscillation window and convergence tolerance.
pub fn summarize(
    traj: &Trajectory,
    window: (f64, f64),
    eps: f64,
) -> Result<MetricsReport, MetricsError> {
    let (avg, per_vehicle) = oscillation(traj, window.0, window.1)?;
    let (min_headway, first_collision_time, max_abs_accel) = extremes(traj);
    Ok(MetricsReport {
        avg_oscillation: avg,
        per_vehicle_oscillation: per_vehicle,
        convergence_time: convergence_time(traj, eps),
        min_headway,
        first_collision_time,
        max_abs_accel,
    })
}

/// Convenience: does the trajectory record a collision event?
pub fn had_collision(traj: &Trajectory) -> bool {
    traj.first_event(EventKind::NegativeHeadway).is_some()
}
