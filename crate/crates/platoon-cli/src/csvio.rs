//! CSV renderers and atomic file writes.
//!
//! All floating-point fields are written with nine significant digits in
//! scientific notation and LF line endings, so reruns with the same seed are
//! byte-identical. Undefined fields (the leader's headway on an open road, a
//! convergence time that never happened) are left empty.

use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};

use platoon_core::metrics::MetricsReport;
use platoon_core::sim::{Topology, Trajectory};
use platoon_core::stability::NeutralLine;

use crate::error::CliError;

/// Nine significant digits, scientific notation.
pub fn sig9(x: f64) -> String {
    format!("{x:.8e}")
}

fn opt_sig9(x: Option<f64>) -> String {
    x.map(sig9).unwrap_or_default()
}

/// `t,vehicle,x,v,h`: one row per vehicle per recorded step, vehicles
/// numbered from 1; the leader's `h` is empty on an open road.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let n = traj.vehicle_count();
    let h_count = traj.headway_count();
    let mut s = String::with_capacity(64 * n * traj.times.len());
    s.push_str("t,vehicle,x,v,h\n");
    for (step, t) in traj.times.iter().enumerate() {
        let ts = sig9(*t);
        for vehicle in 0..n {
            let h = if vehicle < h_count {
                sig9(traj.headways[step][vehicle])
            } else {
                String::new()
            };
            s.push_str(&ts);
            s.push(',');
            s.push_str(&(vehicle + 1).to_string());
            s.push(',');
            s.push_str(&sig9(traj.positions[step][vehicle]));
            s.push(',');
            s.push_str(&sig9(traj.velocities[step][vehicle]));
            s.push(',');
            s.push_str(&h);
            s.push('\n');
        }
    }
    s
}

/// `vprime,fraction,s_threshold` over all lines, fractions in input order.
pub fn neutral_csv(lines: &[NeutralLine]) -> String {
    let mut s = String::from("vprime,fraction,s_threshold\n");
    for line in lines {
        for (vp, threshold) in &line.points {
            s.push_str(&sig9(*vp));
            s.push(',');
            s.push_str(&sig9(line.fraction));
            s.push(',');
            s.push_str(&sig9(*threshold));
            s.push('\n');
        }
    }
    s
}

/// One aggregate row per sweep grid point.
#[derive(Debug, Clone)]
pub struct AggregateRow {
    pub model: String,
    pub a: f64,
    pub b: Option<f64>,
    pub p: Option<f64>,
    pub seed: u64,
    pub report: MetricsReport,
}

pub const AGGREGATE_HEADER: &str =
    "model,a,b,p,seed,avg_oscillation,convergence_time,min_headway,first_collision_time,max_abs_accel";

pub fn aggregate_csv(rows: &[AggregateRow]) -> String {
    let mut s = String::from(AGGREGATE_HEADER);
    s.push('\n');
    for row in rows {
        let r = &row.report;
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            row.model,
            sig9(row.a),
            opt_sig9(row.b),
            opt_sig9(row.p),
            row.seed,
            sig9(r.avg_oscillation),
            opt_sig9(r.convergence_time),
            sig9(r.min_headway),
            opt_sig9(r.first_collision_time),
            sig9(r.max_abs_accel),
        ));
    }
    s
}

pub fn describe_topology(t: &Topology) -> String {
    match t {
        Topology::Ring { length } => format!("ring (length {length} m)"),
        Topology::Infinite => "infinite".to_string(),
    }
}

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

/// Write via a unique temp file in the same directory plus rename, so
/// concurrent writers never interleave and readers never see partial files.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    let unique = TMP_COUNTER.fetch_add(1, Ordering::Relaxed);
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp.{}.{unique}", std::process::id()));
    let tmp_path = std::path::PathBuf::from(tmp);
    std::fs::write(&tmp_path, bytes)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", tmp_path.display())))?;
    std::fs::rename(&tmp_path, path)
        .map_err(|e| CliError::Io(format!("cannot rename into {}: {e}", path.display())))?;
    Ok(())
}
