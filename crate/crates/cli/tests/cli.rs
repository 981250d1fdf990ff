use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cube-needlets"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn frame_roundtrip_example_meets_tolerance() {
    let o = run(&["frame-roundtrip", "--d", "2", "--jmax", "4", "--tight", "--trials", "10", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["max_roundtrip_rel_error"].as_f64().unwrap() <= 1e-9);
    assert!(v["parseval_rel_error"].as_f64().unwrap() <= 1e-9);
    assert!(stderr(&o).contains("[PASS] round trip"));
}

#[test]
fn radial_negative_control_reports_without_failing() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("decay.csv");
    let o = run(&[
        "kernel-decay",
        "--cutoff",
        "radial-negative-control",
        "--n-list",
        "8,32",
        "--per-stratum",
        "16",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let summary: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(summary["negative_control"], true);
    assert!(summary["growth"].as_f64().unwrap() >= 2.0);
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("n,sigma,C_emp,argmax_x,argmax_y,rho\n"));
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn f_family_with_infinite_p_is_rejected() {
    let o = run(&["norm-equiv", "--family", "F", "--p", "inf", "--q", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("F-spaces need a finite p"), "{}", stderr(&o));
}

#[test]
fn malformed_flags_exit_with_validation_status() {
    assert_eq!(run(&["nterm", "--bogus"]).status.code(), Some(1));
    assert_eq!(run(&["kernel-decay", "--cutoff", "square"]).status.code(), Some(1));
    assert_eq!(run(&["acceptance", "--criterion", "0"]).status.code(), Some(1));
}

#[test]
fn failing_invariant_is_named_with_status_two() {
    // The spectrum of degree 64 is not covered by a 3-level frame.
    let o = run(&["nterm", "--jmax", "3", "--degree", "64", "--target", "random-bandlimited"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("spectrum not covered"));
}

#[test]
fn fixed_seed_gives_identical_csv() {
    let args = ["norm-equiv", "--family", "B", "--s", "1", "--rho", "0.5", "--p", "3", "--jmax", "4", "--trials", "3"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let c = run(&[&args[..], &["--seed", "1"]].concat());
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn config_file_supplies_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"command": "cutoff-export", "d": 2, "resolution": 3, "cutoff": "product-a"}"#).unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "--resolution", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("t_1,t_2,value"));
    assert_eq!(text.lines().count(), 1 + 16);
}

#[test]
fn cubature_report_is_a_flat_array_per_level() {
    let o = run(&["cubature-report", "--d", "2", "--alpha", "0.5,-0.5", "--beta", "0", "--jmax", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let levels = v.as_array().unwrap();
    assert_eq!(levels.len(), 4);
    for (j, l) in levels.iter().enumerate() {
        assert_eq!(l["j"], j);
        assert!(l["exactness_error"].as_f64().unwrap() <= 1e-11);
        assert!(l.as_object().unwrap().values().all(|x| !x.is_object() && !x.is_array()));
    }
}
