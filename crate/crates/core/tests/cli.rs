//! End-to-end tests of the `fluctlab` binary.

use std::path::Path;
use std::process::{Command, Output};

use fluctlab::io::{load_target, Loaded};
use fluctlab::quantum::{build_state, phase_space_moments, StateRecipe};
use fluctlab::{GridSpec, UnitSystem};
use tempfile::TempDir;

fn fluctlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fluctlab"))
        .args(args)
        .env_remove("FLUCTLAB_H")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gaussian_state_audits_as_minimal() {
    let dir = TempDir::new().unwrap();
    let state = dir.path().join("s.json");
    let report = dir.path().join("r.json");
    let o = fluctlab(&[
        "state",
        "--gaussian",
        "--center",
        "0",
        "--sigma",
        "1",
        "--grid",
        "-12:12:1024",
        "--out",
        path_str(&state),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = fluctlab(&[
        "audit",
        "--in",
        path_str(&state),
        "--out",
        path_str(&report),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("minimal"), "{}", stdout(&o));
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    assert_eq!(json["classification"], "minimal");
    assert!((json["product"].as_f64().unwrap() - 0.5).abs() < 1e-8);
    // σ = 1 is not the oscillator ground state (σ = √½), so ΔE > 0 and Δt is finite
    assert!(json["delta_t"].as_f64().unwrap() > 0.0);
}

#[test]
fn extremize_prints_extremal_variances() {
    let o = fluctlab(&[
        "density",
        "extremize",
        "--mean-x",
        "0",
        "--mean-p",
        "0",
        "--x",
        "2",
        "--p",
        "1",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("var_x=1.00000"), "{out}");
    assert!(out.contains("var_p=0.250000"), "{out}");
    assert!(out.contains("product=0.250000"), "{out}");
}

#[test]
fn malformed_file_exits_two_and_names_the_field() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"units": {"h": 6.283185307179586}, "grid": {"x_min": -1.0, "x_max": "one", "n": 8}, "psi_re": [], "psi_im": []}"#,
    )
    .unwrap();
    let o = fluctlab(&["audit", "--in", path_str(&bad)]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("grid.x_max"), "{}", stderr(&o));
}

#[test]
fn saved_state_reproduces_moments() {
    let dir = TempDir::new().unwrap();
    let state = dir.path().join("c.json");
    let o = fluctlab(&[
        "state",
        "--coherent",
        "--alpha-re",
        "1.3",
        "--alpha-im",
        "-0.7",
        "--grid",
        "-15:15:1024",
        "--out",
        path_str(&state),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let u = UnitSystem::default();
    let direct = build_state(
        &StateRecipe::CoherentState {
            alpha: num_complex::Complex64::new(1.3, -0.7),
            mass: 1.0,
            omega: 1.0,
        },
        &GridSpec::new(-15.0, 15.0, 1024).unwrap(),
        &u,
    )
    .unwrap();
    let expected = phase_space_moments(&direct, &u).unwrap();
    let Loaded::State {
        state: loaded,
        units,
    } = load_target(&state).unwrap()
    else {
        panic!("expected a pure state")
    };
    assert_eq!(units, u);
    let got = phase_space_moments(&loaded, &units).unwrap();
    for (a, b) in [
        (got.mean_x, expected.mean_x),
        (got.mean_p, expected.mean_p),
        (got.var_x, expected.var_x),
        (got.var_p, expected.var_p),
    ] {
        assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "{a} vs {b}");
    }
}

#[test]
fn failing_command_leaves_no_output_file() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("never.json");
    // eigenstate n = 3 on a narrow grid trips the decay guard
    let o = fluctlab(&[
        "state",
        "--eigenstate",
        "3",
        "--grid",
        "-3:3:256",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(!out.exists());
    assert_eq!(
        std::fs::read_dir(dir.path()).unwrap().count(),
        0,
        "temporary files left behind"
    );
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(fluctlab(&["state", "--gaussian"]).status.code(), Some(1));
    assert_eq!(
        fluctlab(&["density", "extremize", "--x", "1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(fluctlab(&["bogus"]).status.code(), Some(1));
    let zero = fluctlab(&["density", "extremize", "--x", "0", "--p", "1"]);
    assert_eq!(zero.status.code(), Some(1), "{}", stderr(&zero));
    assert_eq!(fluctlab(&["--help"]).status.code(), Some(0));
}

#[test]
fn missing_input_path_is_a_usage_error() {
    let o = fluctlab(&["audit", "--in", "/nonexistent/state.json"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

#[test]
fn planck_constant_from_env_and_flag() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_fluctlab"));
        cmd.env_remove("FLUCTLAB_H");
        if let Some(h) = env {
            cmd.env("FLUCTLAB_H", h);
        }
        if let Some(h) = flag {
            cmd.args(["--h", h]);
        }
        cmd.args(["density", "extremize", "--x", "1", "--p", "1"]);
        stdout(&cmd.output().unwrap())
    };
    // bound = h/4π: product of extremal variances is bound²
    assert!(run(None, None).contains("product=0.250000"));
    let h = (4.0 * std::f64::consts::PI).to_string();
    assert!(run(Some(&h), None).contains("product=1.00000"));
    assert!(run(Some(&h), Some("6.283185307179586")).contains("product=0.250000"));
}

#[test]
fn sampling_is_seed_reproducible() {
    let dir = TempDir::new().unwrap();
    let draw = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        let o = fluctlab(&[
            "density",
            "sample",
            "--mean-x",
            "-1",
            "--var-x",
            "1",
            "--var-p",
            "0.25",
            "--count",
            "1000",
            "--seed",
            seed,
            "--out",
            path_str(&out),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        std::fs::read_to_string(out).unwrap()
    };
    let a = draw("a.csv", "42");
    assert_eq!(a, draw("b.csv", "42"));
    assert_ne!(a, draw("c.csv", "43"));
    assert_eq!(a.lines().next(), Some("x,p"));
    assert_eq!(a.lines().count(), 1001);
}

#[test]
fn scenarios_write_tables() {
    let dir = TempDir::new().unwrap();
    let sweep = dir.path().join("eig.csv");
    let o = fluctlab(&[
        "scenario",
        "eigensweep",
        "--n-max",
        "3",
        "--out",
        path_str(&sweep),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&sweep).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.lines().nth(1).unwrap().contains("minimal"));
    assert!(text.lines().nth(4).unwrap().contains("strict"));

    let walk = dir.path().join("walk.json");
    let o = fluctlab(&[
        "scenario",
        "walk",
        "--var-x",
        "1",
        "--var-p",
        "4",
        "--steps",
        "500",
        "--seed",
        "7",
        "--out",
        path_str(&walk),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("toy"));
    let trace: Vec<serde_json::Value> =
        serde_json::from_slice(&std::fs::read(&walk).unwrap()).unwrap();
    assert_eq!(trace.len(), 501);
    assert!(trace[500]["distance_to_bound"].as_f64().unwrap() < 1e-4);
}

#[test]
fn thermal_state_file_audits_as_ensemble() {
    let dir = TempDir::new().unwrap();
    let state = dir.path().join("t.json");
    let o = fluctlab(&[
        "state",
        "--thermal",
        "1",
        "--grid",
        "-20:20:1024",
        "--out",
        path_str(&state),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = dir.path().join("r.json");
    let o = fluctlab(&[
        "audit",
        "--in",
        path_str(&state),
        "--out",
        path_str(&report),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    assert_eq!(json["classification"], "strict");
    assert!((json["product"].as_f64().unwrap() - 1.0819767068693264).abs() < 1e-3);
    assert!(json["entropy_surrogate"].as_f64().unwrap() > 0.0);
}
