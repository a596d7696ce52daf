//! End-to-end behavior of the binary: schemas, exit codes, determinism,
//! sweeps, and consistency of the pipeline subcommand with its parts.

use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_segre-ode"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_stdin(args: &[&str], stdin: &str) -> Output {
    use std::io::Write;
    let mut child = Command::new(env!("CARGO_BIN_EXE_segre-ode"))
        .args(args)
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .stderr(std::process::Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child.stdin.as_mut().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().expect("binary finishes")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn malformed_json_exits_2_without_output() {
    let out = run_stdin(&["classify", "--input", "-"], "{ not json");
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty(), "no partial output on schema errors");
}

#[test]
fn schema_violations_exit_2() {
    // stray phi key
    let out = run_stdin(
        &["classify", "--input", "-"],
        r#"{"m": 1, "sign": "+", "phi": {"44": {"valuation": 0, "coeffs": []}}}"#,
    );
    assert_eq!(out.status.code(), Some(2));

    // zero m
    let out = run_stdin(&["classify", "--input", "-"], r#"{"m": 0, "sign": "+", "phi": {}}"#);
    assert_eq!(out.status.code(), Some(2));

    // bad flag values
    let out = run(&["classify", "--example", "ex68", "--order", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["verdict", "--example", "nope"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn precondition_failures_exit_3() {
    // reduce on a non-Fuchsian equation
    let out = run(&["reduce", "--example", "mm0:2"]);
    assert_eq!(out.status.code(), Some(3));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("Fuchsian"), "error names the violated precondition: {msg}");

    // associate expects defining data, not an equation
    let out = run(&["associate", "--example", "ex68"]);
    assert_eq!(out.status.code(), Some(3));

    // singular centralizer input
    let zero_row = r#"[[[1,0],[0,0],[0,0]],[[0,0],[1,0],[0,0]],[[0,0],[0,0],[0,0]]]"#;
    let out = run_stdin(&["centralizer", "--input", "-"], zero_row);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn reports_are_byte_identical() {
    for args in [
        vec!["verdict", "--example", "m-gamma:3"],
        vec!["verdict", "--example", "mm0:2"],
        vec!["associate", "--example", "m-gamma:0.5"],
        vec!["monodromy", "--example", "ex68"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "nondeterministic output for {args:?}");
    }
}

#[test]
fn verdict_matches_composed_subcommands() {
    for example in ["m-gamma:2", "m-gamma:0.5", "mm0:2", "ex68"] {
        let verdict = json_of(&run(&["verdict", "--example", example]));
        let classify = json_of(&run(&["classify", "--example", example]));
        assert_eq!(verdict["fuchsian"], classify["fuchsian"], "{example}");

        let monodromy = json_of(&run(&["monodromy", "--example", example]));
        assert_eq!(verdict["monodromy_trivial"], monodromy["monodromy_trivial"], "{example}");
    }
    // the growth summary of the pipeline agrees with the dedicated
    // subcommand on the ray that witnesses irregularity
    let verdict = json_of(&run(&["verdict", "--example", "mm0:2"]));
    let growth = json_of(&run(&["growth", "--example", "mm0:2", "--ray", "4.71238898038469"]));
    assert_eq!(verdict["growth"], growth["growth"]);
}

#[test]
fn associate_then_classify_round_trips_through_files() {
    let dir = std::env::temp_dir().join(format!("segre-ode-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let ode_path = dir.join("ode.json");

    let assoc = json_of(&run(&["associate", "--example", "m-gamma:2"]));
    std::fs::write(&ode_path, serde_json::to_string(&assoc["ode"]).unwrap()).unwrap();

    let classify = json_of(&run(&["classify", "--input", ode_path.to_str().unwrap()]));
    assert_eq!(classify["fuchsian"], Value::Bool(true));

    let relations = json_of(&run(&["relations", "--input", ode_path.to_str().unwrap()]));
    assert_eq!(relations["pass"], Value::Bool(true));

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn solve_formal_consumes_reduced_json() {
    let dir = std::env::temp_dir().join(format!("segre-ode-red-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let red_path = dir.join("reduced.json");

    let reduced = json_of(&run(&["reduce", "--example", "ex68"]));
    std::fs::write(&red_path, serde_json::to_string(&reduced["reduced"]).unwrap()).unwrap();

    let solved = json_of(&run(&["solve-formal", "--input", red_path.to_str().unwrap()]));
    assert_eq!(solved["status"], Value::String("unique".into()));
    // the residual stays clean through everything solved for
    let n = solved["coeffs"].as_array().unwrap().len() as i64;
    assert!(n >= 20, "solved only {n} coefficients");
    assert!(solved["residual_order"].as_i64().unwrap() >= n - 1);

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn centralizer_fixture_output() {
    let diag = r#"[[[1,0],[0,0],[0,0]],[[0,0],[1,0],[0,0]],[[0,0],[0,0],[2,0]]]"#;
    let rep = json_of(&run_stdin(&["centralizer", "--input", "-"], diag));
    assert_eq!(rep["dim_gl"], Value::from(5));
    assert_eq!(rep["bound"], Value::from(4));
    assert_eq!(rep["is_identity"], Value::Bool(false));

    let scalar = r#"[[[2,0],[0,0],[0,0]],[[0,0],[2,0],[0,0]],[[0,0],[0,0],[2,0]]]"#;
    let rep = json_of(&run_stdin(&["centralizer", "--input", "-"], scalar));
    assert_eq!(rep["dim_gl"], Value::from(9));
    assert_eq!(rep["bound"], Value::from(8));
    assert_eq!(rep["is_identity"], Value::Bool(true));
}

#[test]
fn gamma_sweep_with_jobs() {
    let rep = json_of(&run(&["verdict", "--example", "m-gamma:0.5,1,2,3", "--jobs", "4"]));
    let sweep = rep["sweep"].as_array().unwrap();
    assert_eq!(sweep.len(), 4);
    let verdicts: Vec<&str> = sweep.iter().map(|r| r["verdict"].as_str().unwrap()).collect();
    assert_eq!(verdicts, vec!["Branches", "Extends", "Extends", "Extends"]);
    // sweep output is deterministic and ordered like the input
    let again = run(&["verdict", "--example", "m-gamma:0.5,1,2,3", "--jobs", "4"]);
    assert_eq!(serde_json::to_string(&rep).unwrap(), serde_json::to_string(&json_of(&again)).unwrap());
}

#[test]
fn monodromy_accepts_path_spec_json() {
    let rep = json_of(&run(&[
        "monodromy",
        "--example",
        "m-gamma:0.5",
        "--path",
        r#"{"kind": "circle", "radius": 0.4, "turns": 2}"#,
    ]));
    // two turns of the half-integer family give trivial monodromy
    assert_eq!(rep["monodromy_trivial"], Value::Bool(true));

    let out = run(&[
        "monodromy",
        "--example",
        "m-gamma:0.5",
        "--path",
        r#"{"kind": "segment", "start": [1, 0], "end": [2, 0]}"#,
    ]);
    assert_eq!(out.status.code(), Some(3), "open paths are not loops");
}

#[test]
fn segre_check_subcommand() {
    // constant graph z = 1 against the quadratic blowup equation
    let assoc = json_of(&run(&["reduce", "--example", "ex68"])); // warm build only
    drop(assoc);
    let mut samples = Vec::new();
    for k in 0..10 {
        let theta = 0.6 * k as f64;
        samples.push(serde_json::json!({
            "w": [0.7 * theta.cos(), 0.7 * theta.sin()],
            "z": [1.0, 0.0],
            "dz": [0.0, 0.0],
            "d2z": [0.0, 0.0],
        }));
    }
    let b_coeffs: Vec<[f64; 2]> = vec![[0.0, 0.0], [-2.0, 0.0]];
    let payload = serde_json::json!({
        "ode": {
            "m": 2,
            "A": {"valuation": 0, "coeffs": [[0.0, 0.0]]},
            "B": {"valuation": 0, "coeffs": b_coeffs},
            "C": {"valuation": 0, "coeffs": [[0.0, 0.0]]},
            "D": {"valuation": 0, "coeffs": [[0.0, 0.0]]},
            "E": {"valuation": 0, "coeffs": [[0.0, 0.0]]},
            "F": {"valuation": 0, "coeffs": [[0.0, 0.0]]},
        },
        "samples": samples,
    });
    let rep = json_of(&run_stdin(&["segre-check", "--input", "-"], &payload.to_string()));
    assert_eq!(rep["max_residual"].as_f64().unwrap(), 0.0);
}

#[test]
fn map_linear_matches_exponential() {
    // psi_2(1) = (1/2i) e^{-2i} = (-0.5 sin 2, -0.5 cos 2), psi_2'(1) = e^{-2i}
    let half_i_e = (-0.5 * 2.0f64.sin(), -0.5 * 2.0f64.cos());
    let e2i = (2.0f64.cos(), -(2.0f64.sin()));
    let rep = json_of(&run(&[
        "map-linear",
        "--example",
        "mm0:2",
        "--basepoint",
        "1,0",
        "--psi1-init",
        "1,0,0,0",
        "--psi2-init",
        &format!("{},{},{},{}", half_i_e.0, half_i_e.1, e2i.0, e2i.1),
        "--arc",
        "1,-0.6,0.6,5",
    ]));
    for sample in rep["samples"].as_array().unwrap() {
        let w_re = sample["w"][0].as_f64().unwrap();
        let w_im = sample["w"][1].as_f64().unwrap();
        let r_re = sample["ratio"][0].as_f64().unwrap();
        let r_im = sample["ratio"][1].as_f64().unwrap();
        let w = num_complex::Complex64::new(w_re, w_im);
        let expect = (num_complex::Complex64::new(0.0, -2.0) / w).exp() / num_complex::Complex64::new(0.0, 2.0);
        let got = num_complex::Complex64::new(r_re, r_im);
        assert!((got - expect).norm() / expect.norm() < 1e-6);
    }
}

#[test]
fn table_format_renders() {
    let out = run(&["classify", "--example", "ex68", "--format", "table"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("fuchsian"));
    assert!(text.contains("true"));
}
