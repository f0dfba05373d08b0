use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn vq() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_vq"));
    cmd.env_remove("VQ_SEED");
    cmd
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn report_values(text: &str, key: &str) -> Vec<f64> {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("{key} missing from report"))
        .split(' ')
        .map(|v| v.parse().unwrap())
        .collect()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    (header, rows)
}

#[test]
fn mission_run_writes_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(vq()
        .args(["simulate", "--config"])
        .arg(configs().join("mission.json"))
        .arg("--out")
        .arg(dir.path())
        .arg("--svg"));
    assert!(out.status.success(), "{}", stderr(&out));

    let (header, rows) = read_csv(&dir.path().join("log.csv"));
    assert_eq!(header.len(), 31);
    assert_eq!(header[0], "t");
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let last = rows.last().unwrap();
    let t_end: f64 = last[col("t")].parse().unwrap();
    let z_end: f64 = last[col("z")].parse().unwrap();
    assert!((7.5..=8.0).contains(&t_end), "{t_end}");
    assert!((z_end - 2.0).abs() < 0.05, "{z_end}");
    // Estimator channels are absent in the nominal scenario.
    assert!(rows.iter().all(|r| r[col("z_hat")].is_empty()));

    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    for f in manifest["files"].as_array().unwrap() {
        assert!(dir.path().join(f.as_str().unwrap()).exists(), "{f}");
    }
    assert_eq!(manifest["config_hash"].as_str().unwrap().len(), 64);
    assert!(dir.path().join("position.gp").exists());
    assert!(dir.path().join("gamma.svg").exists());
    assert!(!dir.path().join("estimator.gp").exists());
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = run(vq()
            .args(["simulate", "--config"])
            .arg(configs().join("volcano_hover.json"))
            .arg("--out")
            .arg(dir.path())
            .args(["--seed", "11"]));
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let la = fs::read(a.path().join("log.csv")).unwrap();
    let lb = fs::read(b.path().join("log.csv")).unwrap();
    assert_eq!(la, lb);
    let hash = |d: &Path| {
        let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("manifest.json")).unwrap()).unwrap();
        (m["config_hash"].as_str().unwrap().to_string(), m["seed"].as_u64().unwrap())
    };
    assert_eq!(hash(a.path()), hash(b.path()));
    assert_eq!(hash(a.path()).1, 11);
    assert!(a.path().join("estimator.gp").exists());
}

#[test]
fn seed_flag_beats_environment() {
    let dirs: Vec<_> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
    let cfg = configs().join("volcano_hover.json");
    let mut env_only = vq();
    env_only.args(["simulate", "--config"]).arg(&cfg).arg("--out").arg(dirs[0].path()).env("VQ_SEED", "3");
    let mut both = vq();
    both.args(["simulate", "--config"]).arg(&cfg).arg("--out").arg(dirs[1].path()).env("VQ_SEED", "3").args(["--seed", "4"]);
    let mut flag = vq();
    flag.args(["simulate", "--config"]).arg(&cfg).arg("--out").arg(dirs[2].path()).args(["--seed", "4"]);
    for cmd in [&mut env_only, &mut both, &mut flag] {
        assert!(run(cmd).status.success());
    }
    let seed = |d: &Path| {
        let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("manifest.json")).unwrap()).unwrap();
        m["seed"].as_u64().unwrap()
    };
    assert_eq!(seed(dirs[0].path()), 3);
    assert_eq!(seed(dirs[1].path()), 4);
    assert_eq!(fs::read(dirs[1].path().join("log.csv")).unwrap(), fs::read(dirs[2].path().join("log.csv")).unwrap());
}

#[test]
fn empty_waypoints_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"mission": {"scenario": "nominal", "waypoints": []}}"#).unwrap();
    let out = run(vq().args(["simulate", "--config"]).arg(&cfg).arg("--out").arg(dir.path().join("o")));
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("waypoints"), "{}", stderr(&out));
}

#[test]
fn malformed_config_reports_location() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, "{\n  \"controller\": {\"poles\": [-1, \"x\"]}\n}").unwrap();
    let out = run(vq().arg("design").arg("--config").arg(&cfg));
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("line 2") && err.contains("controller.poles"), "{err}");

    fs::write(&cfg, r#"{"simulaton": {}}"#).unwrap();
    let out = run(vq().arg("design").arg("--config").arg(&cfg));
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("simulaton"));
}

#[test]
fn missing_config_is_io_error() {
    let out = run(vq().args(["design", "--config", "/nonexistent/vq.json"]));
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn unwritable_output_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let out = run(vq()
        .args(["simulate", "--config"])
        .arg(configs().join("volcano_hover.json"))
        .arg("--out")
        .arg(blocker.join("sub")));
    assert_eq!(out.status.code(), Some(4), "{}", stderr(&out));
}

#[test]
fn unstable_hold_is_simulation_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("zoh.json");
    let text = fs::read_to_string(configs().join("mission.json"))
        .unwrap()
        .replace("\"kd\": [10, 10, 10]", "\"kd\": [10, 10, 10], \"control_period\": 0.05");
    fs::write(&cfg, text).unwrap();
    let out = run(vq().args(["simulate", "--config"]).arg(&cfg).arg("--out").arg(dir.path().join("o")));
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn design_report_matches_library() {
    let out = run(vq().arg("design").arg("--config").arg(configs().join("volcano_hover.json")));
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    for i in 1..=4 {
        assert_eq!(report_values(&text, &format!("altitude.k[{i}]")), vec![45.0, 4.95]);
        let n = report_values(&text, &format!("altitude.n[{i}]"));
        assert!((n[0] - 45.4415).abs() < 1e-4 && n[1] == 1.0, "{n:?}");
    }
    let kf1 = report_values(&text, "kalman.kf[1]");
    let kf2 = report_values(&text, "kalman.kf[2]");
    for (got, want) in kf1.iter().chain(&kf2).zip([3.1434, 0.0, 4.9406, 0.9764]) {
        assert!((got - want).abs() < 1e-3, "{got} vs {want}");
    }
    assert!(report_values(&text, "kalman.riccati_residual")[0] < 1e-8);

    // Parse-back equals the library values exactly.
    let params = vq_core::model::QuadrotorParams::default();
    let design = vq_core::control::AltitudeDesign::new(&params, [-100.0, -10.0], 1.0).unwrap();
    assert_eq!(report_values(&text, "altitude.n[1]"), vec![design.n[(0, 0)], design.n[(0, 1)]]);
    let noise = vq_core::estimation::build_noise_model(185.0, 885.0, params.hover_thrust(), params.mass(), 0.06, 0.3).unwrap();
    let kalman = vq_core::estimation::design_kalman_gain(&noise, params.mass(), params.gravity()).unwrap();
    assert_eq!(kf2, vec![kalman.kf[(1, 0)], kalman.kf[(1, 1)]]);
    assert_eq!(report_values(&text, "noise.thermal_mean"), vec![noise.thermal_mean]);
}

#[test]
fn positive_poles_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("poles.json");
    fs::write(&cfg, r#"{"mission": {"scenario": "volcano-hover"}, "controller": {"poles": [5, -10]}}"#).unwrap();
    let out = run(vq().arg("design").arg("--config").arg(&cfg));
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("poles must be negative"), "{}", stderr(&out));
}

#[test]
fn lag_ladder_approaches_closed_form() {
    let out = run(vq().args(["analyze-lag", "--lambda", "-10", "--v-final", "2", "--t-total", "2"]));
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let closed = report_values(&text, "closed_form.lag")[0];
    assert!((closed - 0.19).abs() < 1e-5);
    assert!((report_values(&text, "closed_form.accomplishment")[0] - 0.81).abs() < 1e-5);
    let errs: Vec<f64> = [100, 1000, 10000, 100000]
        .iter()
        .map(|n| (report_values(&text, &format!("discretized[{n}].lag"))[0] - closed).abs())
        .collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
}

#[test]
fn lag_fast_tracker_and_single_n() {
    let out = run(vq().args(["analyze-lag", "--lambda", "-1e6", "--v-final", "2", "--t-total", "2", "--n", "500"]));
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(report_values(&text, "closed_form.lag")[0] < 1e-4);
    assert_eq!(text.matches("discretized[").count(), 2);
}

#[test]
fn lag_rejects_non_negative_lambda() {
    let out = run(vq().args(["analyze-lag", "--lambda", "0.5", "--v-final", "2", "--t-total", "2"]));
    assert_eq!(out.status.code(), Some(2));
}
