use std::path::Path;
use std::process::{Command, Output};

fn eklab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eklab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Second CSV line, split on commas.
fn data_row(o: &Output) -> Vec<String> {
    stdout(o).lines().nth(1).expect("data row").split(',').map(str::to_string).collect()
}

#[test]
fn vortex_production_vanishes_off_the_core() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("v.ekf");
    let o = eklab(&["fields", "gen", "--kind", "vortex", "--n", "96", "--out", p(&f)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("prod.ekf");
    let o = eklab(&[
        "entropy", "produce", "--field", p(&f), "--entropy", "jk1", "--region", "annulus:0,0,0.3,0.9", "--out", p(&out),
    ]);
    assert!(o.status.success());
    let row = data_row(&o);
    assert_eq!(row[0], "jk1");
    let integral: f64 = row[1].parse().unwrap();
    assert!(integral.abs() < 1e-8, "{integral}");
    assert!(out.exists());
}

#[test]
fn wall_production_is_detected_on_a_vector_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("w.ekf");
    let o = eklab(&[
        "fields", "gen", "--kind", "mollified-wall", "--alpha", "1.0", "--width", "0.1", "--format", "vector", "--out",
        p(&f),
    ]);
    assert!(o.status.success());
    let o = eklab(&["entropy", "produce", "--field", p(&f), "--entropy", "jk2"]);
    assert!(o.status.success());
    let tv: f64 = data_row(&o)[2].parse().unwrap();
    assert!(tv > 0.1, "{tv}");
}

#[test]
fn entropy_check_respects_tolerance() {
    let o = eklab(&["entropy", "check", "--entropies", "jk1,jk2", "--tol", "1e-8"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 3);
    let o = eklab(&["entropy", "check", "--entropies", "jk1", "--samples", "64", "--tol", "1e-14"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn synthetic_stacks_close_the_identity() {
    let dir = tempfile::tempdir().unwrap();
    let (chi, sig) = (dir.path().join("chi.ekk"), dir.path().join("sig.ekk"));
    let o = eklab(&["kinetic", "pair", "--n", "32", "--ns", "128", "--out", p(&chi), "--sigma-out", p(&sig)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = eklab(&[
        "comp", "residual", "--kinetic", p(&chi), "--sigma", p(&sig), "--eta", "radial:2.5,3,0.4,1.6", "--tau-max",
        "1.5",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rel: f64 = data_row(&o)[3].parse().unwrap();
    assert!(rel < 0.05, "{rel}");
    // a density stack is not a kinetic field
    let o = eklab(&["comp", "residual", "--kinetic", p(&sig), "--eta", "radial:2.5,3,0.4,1.6", "--tau-max", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn besov_fit_and_bootstrap_on_a_vortex() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("v.ekf");
    assert!(eklab(&["fields", "gen", "--kind", "vortex", "--n", "256", "--center", "0.001,0.002", "--out", p(&f)])
        .status
        .success());
    let csv = dir.path().join("s.csv");
    let o = eklab(&["besov", "fit", "--field", p(&f), "--u", "rect:-0.5,-0.5,0.5,0.5", "--out", p(&csv)]);
    assert!(o.status.success());
    let slope: f64 = data_row(&o)[1].parse().unwrap();
    assert!((slope - 1.0 / 3.0).abs() < 0.05, "{slope}");
    assert!(std::fs::read_to_string(&csv).unwrap().starts_with("direction,h,norm,scaled_norm"));

    let o = eklab(&[
        "comp", "bootstrap", "--field", p(&f), "--u", "disk:0,0,0.6", "--inner", "disk:0,0,0.3", "--eta",
        "radial:0,0,0.6,0.65",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).lines().last().unwrap().starts_with("r0="));
}

#[test]
fn run_writes_a_report_with_tolerances() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e1");
    let o = eklab(&["run", "E1", "--output", p(&out), "--json"]);
    assert!(o.status.success());
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["id"], "E1");
    assert_eq!(report["pass"], true);
    for c in report["criteria"].as_array().unwrap() {
        assert!(c["tolerance"]["kind"].is_string());
        assert!(c["measured"].is_number());
    }
    let printed: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(printed["criteria"], report["criteria"]);
}

#[test]
fn exit_status_reflects_failure_and_errors() {
    // rungs too coarse to show the refinement rate
    assert_eq!(eklab(&["run", "E4", "--grid", "16,24"]).status.code(), Some(1));
    assert_eq!(eklab(&["run", "E9", "--grid", "2"]).status.code(), Some(2));
    assert_eq!(eklab(&["run", "E12"]).status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_eklab")).args(["run", "E1"]).env("EKLAB_THREADS", "zero").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_and_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("e3.cfg");
    std::fs::write(&cfg, "# entropy round trip\nid = E3\nentropies = id, jk1\n").unwrap();
    let o = eklab(&["run", "E3", "--config", p(&cfg), "--entropies", "jk2"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("round trip sup error, jk2") && !s.contains("round trip sup error, jk1"), "{s}");
    assert_eq!(eklab(&["run", "E2", "--config", p(&cfg)]).status.code(), Some(2));
}

#[test]
fn minimize_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = eklab(&[
            "ag", "minimize", "--grid", "40", "--eps-count", "2", "--max-iter", "40", "--seed", "7", "--output", p(&out),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        (std::fs::read(out.join("trace.csv")).unwrap(), std::fs::read(out.join("m_rung1.ekf")).unwrap())
    };
    assert_eq!(run("a"), run("b"));
}
