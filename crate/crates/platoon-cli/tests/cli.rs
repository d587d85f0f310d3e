//! End-to-end tests of the `platoon` binary: file outputs, determinism, exit
//! codes, and the published CSV schemas.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_platoon"))
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("platoon-cli-{tag}-{}", std::process::id()));
    std::fs::remove_dir_all(&dir).ok();
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().unwrap();
    assert!(
        out.status.success(),
        "command failed: {}\nstdout: {}\nstderr: {}",
        out.status,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn version_subcommand() {
    let out = run_ok(bin().arg("version"));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("platoon "));
    assert!(text.contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn simulate_tiny_run_matches_golden_csv() {
    let dir = tmp_dir("golden");
    // Two vehicles in exact ring equilibrium: headway 22, speed V(22) = 10,
    // so each step advances positions by exactly 1 m.
    let cfg = write_config(
        &dir,
        "run.cfg",
        "scenario = ring\nmodel = ovm\na = 1\nn = 2\nring_length = 44\ndisturbance = 0\nt_end = 0.1\n",
    );
    run_ok(bin().args(["simulate", "--config"]).arg(&cfg).arg("--out").arg(dir.join("o")));
    let csv = std::fs::read_to_string(dir.join("o/trajectory.csv")).unwrap();
    let expected = "\
t,vehicle,x,v,h
0.00000000e0,1,0.00000000e0,1.00000000e1,2.20000000e1
0.00000000e0,2,2.20000000e1,1.00000000e1,2.20000000e1
1.00000000e-1,1,1.00000000e0,1.00000000e1,2.20000000e1
1.00000000e-1,2,2.30000000e1,1.00000000e1,2.20000000e1
";
    assert_eq!(csv, expected);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn simulate_reruns_are_byte_identical() {
    let dir = tmp_dir("determinism");
    let cfg = write_config(
        &dir,
        "run.cfg",
        "scenario = ring\nmodel = povm\na = 0.8\nt_end = 60\nseed = 901\n",
    );
    run_ok(bin().args(["simulate", "--config"]).arg(&cfg).arg("--out").arg(dir.join("a")));
    run_ok(bin().args(["simulate", "--config"]).arg(&cfg).arg("--out").arg(dir.join("b")));
    let a = std::fs::read(dir.join("a/trajectory.csv")).unwrap();
    let b = std::fs::read(dir.join("b/trajectory.csv")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
    // LF line endings only.
    assert!(!a.contains(&b'\r'));

    // 12 vehicles, and the leader-following law has pulled every headway
    // back to the 22 m equilibrium by the end of the run.
    let text = String::from_utf8(a).unwrap();
    let last_rows: Vec<&str> = text.lines().rev().take(12).collect();
    assert_eq!(last_rows.len(), 12);
    for row in last_rows {
        let h: f64 = row.split(',').nth(4).unwrap().parse().unwrap();
        assert!((h - 22.0).abs() < 0.5, "final headway {h}");
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn summary_echo_reparses_to_the_same_config() {
    let dir = tmp_dir("echo");
    let cfg_path = write_config(
        &dir,
        "run.cfg",
        "scenario = infinite\nmodel = povm\na = 2.4\nperiod = 20\nt_end = 60\n",
    );
    run_ok(bin().args(["simulate", "--config"]).arg(&cfg_path).arg("--out").arg(dir.join("o")));
    let summary = std::fs::read_to_string(dir.join("o/summary.txt")).unwrap();
    let parsed = platoon_cli::summary::config_from_summary(&summary).unwrap();
    let original = platoon_cli::RunConfig::from_file(&cfg_path).unwrap();
    assert_eq!(parsed, original);
    // The summary carries the metric fields.
    assert!(summary.contains("avg_oscillation_m = "));
    assert!(summary.contains("max_abs_accel_mps2 = "));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn record_every_flag_and_final_step() {
    let dir = tmp_dir("recevery");
    let cfg = write_config(
        &dir,
        "run.cfg",
        "scenario = ring\nmodel = ovm\na = 1.6\nt_end = 1.05\n",
    );
    run_ok(
        bin()
            .args(["simulate", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(dir.join("o"))
            .args(["--record-every", "4"]),
    );
    let csv = std::fs::read_to_string(dir.join("o/trajectory.csv")).unwrap();
    // Steps 0, 4, 8, 10 recorded for 12 vehicles: 48 data rows.
    assert_eq!(csv.lines().count(), 1 + 4 * 12);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn svg_charts_on_request() {
    let dir = tmp_dir("svg");
    let cfg = write_config(
        &dir,
        "run.cfg",
        "scenario = ring\nmodel = povm\na = 2.4\nt_end = 5\n",
    );
    run_ok(
        bin()
            .args(["simulate", "--svg", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(dir.join("o")),
    );
    for name in ["headways.svg", "velocities.svg"] {
        let svg = std::fs::read_to_string(dir.join("o").join(name)).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("<polyline"));
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn exit_codes_match_the_contract() {
    let dir = tmp_dir("codes");
    // Missing config: 2.
    let out = bin().arg("simulate").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    // Unreadable config: 2.
    let out = bin()
        .args(["simulate", "--config"])
        .arg(dir.join("nope.cfg"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    // Schema violation: 2.
    let bad = write_config(&dir, "bad.cfg", "scenario = ring\nmodel = ovm\na = 1\nwhat = 3\n");
    let out = bin().args(["simulate", "--config"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown key"));
    // Numeric blowup: 3.
    let blowup = write_config(
        &dir,
        "blowup.cfg",
        "scenario = ring\nmodel = ovm\na = 100000000\nt_end = 30\n",
    );
    let out = bin()
        .args(["simulate", "--config"])
        .arg(&blowup)
        .arg("--out")
        .arg(dir.join("o"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("non-finite"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn stability_ovm_report() {
    let out = run_ok(bin().args([
        "stability", "--model", "ovm", "--a", "2.4", "--ovf", "cosine", "--h", "22",
    ]));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("threshold_2vp = 2.09439510e0"), "{text}");
    assert!(text.contains("criterion_verdict = stable"), "{text}");
}

#[test]
fn stability_povm_eigenvalues_and_abscissa() {
    let out = run_ok(bin().args([
        "stability", "--model", "povm", "--n", "12", "--a", "1", "--vp", "1.0471975511965976",
    ]));
    let text = String::from_utf8(out.stdout).unwrap();
    // Independent arithmetic: lambda = (-a +- sqrt(a^2 - 4 a vp N/(N-1)))/2
    // with a negative discriminant, so Re = -1/2 and Im = sqrt(-disc)/2.
    let vp = 1.0471975511965976f64;
    let im = (4.0 * vp * (12.0 / 11.0) - 1.0).sqrt() / 2.0;
    assert!((im - 0.9446678).abs() < 1e-6);
    let expected_1 = format!("eigenvalue_1 = {}+{}i", platoon_cli::csvio::sig9(-0.5), platoon_cli::csvio::sig9(im));
    let expected_2 = format!("eigenvalue_2 = {}-{}i", platoon_cli::csvio::sig9(-0.5), platoon_cli::csvio::sig9(im));
    assert!(text.contains(&expected_1), "{text}");
    assert!(text.contains(&expected_2), "{text}");
    assert!(text.contains("spectral_abscissa = -"), "{text}");
    assert!(text.contains("criterion_verdict = stable"), "{text}");
}

#[test]
fn stability_neutral_lines_csv() {
    let dir = tmp_dir("neutral");
    run_ok(
        bin()
            .args(["stability", "--neutral", "--fractions", "0,0.2,0.4,0.6,0.8", "--out"])
            .arg(&dir),
    );
    let csv = std::fs::read_to_string(dir.join("neutral.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("vprime,fraction,s_threshold"));
    // 5 fractions x 81 samples.
    assert_eq!(csv.lines().count(), 1 + 5 * 81);
    // Parse back and verify the strict ordering across fractions at the top
    // of the vp range.
    let mut at_max: Vec<(f64, f64)> = csv
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            (f[0], f[1], f[2])
        })
        .filter(|(vp, _, _)| (*vp - 2.0).abs() < 1e-12)
        .map(|(_, frac, s)| (frac, s))
        .collect();
    at_max.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    assert!(at_max.windows(2).all(|w| w[1].1 < w[0].1), "{at_max:?}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn stability_rejects_inconsistent_flags() {
    let out = bin()
        .args(["stability", "--model", "ovm", "--a", "1", "--vp", "1", "--h", "22"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["stability"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_preset_sim11_shares_draws_across_models() {
    let dir = tmp_dir("sim11");
    let cfg = write_config(&dir, "sweep.cfg", "preset = sim1.1\nt_end = 5\nseed = 3\n");
    run_ok(bin().args(["sweep", "--config"]).arg(&cfg).arg("--out").arg(dir.join("o")));
    let aggregate = std::fs::read_to_string(dir.join("o/aggregate.csv")).unwrap();
    assert_eq!(aggregate.lines().count(), 1 + 8);
    for a in ["0.4", "0.8", "1.6", "2.4"] {
        let ovm = std::fs::read_to_string(dir.join(format!("o/ovm_a{a}/trajectory.csv"))).unwrap();
        let povm =
            std::fs::read_to_string(dir.join(format!("o/povm_a{a}/trajectory.csv"))).unwrap();
        // Identical initial conditions: the t = 0 rows agree byte for byte.
        let first = |text: &str| -> Vec<String> {
            text.lines().skip(1).take(12).map(str::to_string).collect()
        };
        assert_eq!(first(&ovm), first(&povm), "a = {a}");
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn sweep_empty_grid_yields_header_only() {
    let dir = tmp_dir("emptygrid");
    let cfg = write_config(
        &dir,
        "sweep.cfg",
        "scenario = ring\nmodel = ovm\na = 1\nsweep_a =\n",
    );
    run_ok(bin().args(["sweep", "--config"]).arg(&cfg).arg("--out").arg(dir.join("o")));
    let aggregate = std::fs::read_to_string(dir.join("o/aggregate.csv")).unwrap();
    assert_eq!(
        aggregate,
        "model,a,b,p,seed,avg_oscillation,convergence_time,min_headway,first_collision_time,max_abs_accel\n"
    );
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn sweep_grid_cap_refuses() {
    let dir = tmp_dir("cap");
    let cfg = write_config(
        &dir,
        "sweep.cfg",
        "scenario = ring\nmodel = ovm\na = 1\nsweep_a = 1, 2, 3, 4\nmax_runs = 3\n",
    );
    let out = bin().args(["sweep", "--config"]).arg(&cfg).arg("--out").arg(dir.join("o")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("max_runs"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tmp_dir("seedflag");
    let cfg = write_config(
        &dir,
        "run.cfg",
        "scenario = ring\nmodel = ovm\na = 1.6\nt_end = 5\nseed = 1\n",
    );
    run_ok(bin().args(["simulate", "--config"]).arg(&cfg).arg("--out").arg(dir.join("a")));
    run_ok(
        bin()
            .args(["simulate", "--config"])
            .arg(&cfg)
            .args(["--seed", "2"])
            .arg("--out")
            .arg(dir.join("b")),
    );
    let a = std::fs::read(dir.join("a/trajectory.csv")).unwrap();
    let b = std::fs::read(dir.join("b/trajectory.csv")).unwrap();
    assert_ne!(a, b);
    let summary = std::fs::read_to_string(dir.join("b/summary.txt")).unwrap();
    assert!(summary.contains("seed = 2"));
    std::fs::remove_dir_all(&dir).ok();
}
