use std::process::{Command, Output};

fn kbeta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kbeta"))
        .args(args)
        .env_remove("KBETA_SEED")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn eval_gamma_k() {
    let o = kbeta(&[
        "eval", "gamma_k", "--phi", "5", "--k", "1", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!((v["value"].as_f64().unwrap() - 24.0).abs() < 1e-12);
    assert!(v["abs_err"].as_f64().is_some());
    assert_eq!(v["method"], "deterministic");
    let t = stdout(&kbeta(&["eval", "gamma_k", "--phi", "5"]));
    assert!(t.contains("value") && t.contains("abs_err") && t.contains("evals"));
}

#[test]
fn eval_beta_first_within_beta_k() {
    let args = [
        "--phi", "2,2", "--a", "1", "--b", "2", "--eta", "1", "--zeta", "0.5", "--k", "1",
        "--format", "json",
    ];
    let o = kbeta(&[&["eval", "beta_first"][..], &args[..]].concat());
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o)["value"].as_f64().unwrap();
    // β_1(2,2) = 1/6
    assert!(v > 0.0 && v <= 1.0 / 6.0, "{v}");
}

#[test]
fn eval_errors_exit_2() {
    let o = kbeta(&["eval", "gamma_k", "--phi", "-1", "--k", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("domain"));
    assert!(o.stdout.is_empty());
    for bad in [
        &["eval", "no_such_function", "--phi", "1"][..],
        &["eval", "gamma_k", "--phi", "1", "--psi", "2"],
        &["eval", "gamma_k", "--phi", "abc"],
        &[
            "eval",
            "beta_first",
            "--phi",
            "2,2",
            "--a",
            "2",
            "--b",
            "1",
            "--eta",
            "1",
        ],
        &[
            "eval",
            "hyp1f1k_integral",
            "--a",
            "1",
            "--b",
            "1",
            "--l",
            "1",
        ],
        &["eval", "beta_k_n_quad", "--phi", "1,1", "--samples", "10"],
        &["frobnicate"],
        &[],
    ] {
        let o = kbeta(bad);
        assert_eq!(o.status.code(), Some(2), "{bad:?}");
    }
}

#[test]
fn eval_integral_routes_have_no_error_estimate() {
    let o = kbeta(&[
        "eval",
        "hyp1f1k_kummer",
        "--a",
        "1",
        "--b",
        "2",
        "--l",
        "-3",
        "--format",
        "json",
    ]);
    let v = json(&o);
    assert!(v["abs_err"].is_null());
    assert!((v["value"].as_f64().unwrap() - 0.316_737_643_877_378_7).abs() < 1e-13);
}

#[test]
fn verify_single_theorem() {
    let o = kbeta(&["verify", "eq4.11", "--k", "2", "--trials", "50"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("verdict: pass"));
}

#[test]
fn verify_flipped_fails() {
    let o = kbeta(&[
        "verify", "eq4.1", "--trials", "20", "--flip", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_config_errors() {
    for bad in [
        &["verify", "all", "--slack", "-1"][..],
        &["verify", "eq9.9"],
        &["verify", "eq4.1", "--k", "2,1"],
        &["verify", "eq4.1", "--samples", "100"],
        &["verify", "eq4.1", "--trials", "0"],
    ] {
        assert_eq!(kbeta(bad).status.code(), Some(2), "{bad:?}");
    }
}

#[test]
fn verify_json_is_line_delimited() {
    let o = kbeta(&["verify", "eq4.1,eq6.2", "--trials", "5", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<serde_json::Value> = text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 11);
    for case in &lines[..10] {
        for key in ["theorem", "params", "lhs", "rhs", "verdict", "margin"] {
            assert!(!case[key].is_null(), "missing {key}");
        }
        assert!(case["lhs"]["value"].is_number() && case["rhs"]["abs_err"].is_number());
    }
    let footer = &lines[10];
    assert_eq!(footer["verdict"], "pass");
    assert_eq!(footer["cases"], 10);
    assert_eq!(footer["summaries"].as_array().unwrap().len(), 2);
}

#[test]
fn list_catalogue() {
    let o = kbeta(&["list"]);
    assert_eq!(o.status.code(), Some(0));
    let t = stdout(&o);
    for name in ["beta_first", "eq4.1", "eq6.14"] {
        assert!(t.contains(name), "{name}");
    }
    let v = json(&kbeta(&["list", "--format", "json"]));
    let items = v.as_array().unwrap();
    assert!(items
        .iter()
        .any(|e| e["kind"] == "function" && e["name"] == "beta_second"));
    assert!(items
        .iter()
        .any(|e| e["kind"] == "theorem" && e["name"] == "eq6.14"));
    assert_eq!(kbeta(&["list", "--bogus"]).status.code(), Some(2));
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = kbeta(&[
        "eval",
        "gamma_k",
        "--phi",
        "3",
        "--format",
        "json",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!((v["value"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    let missing = dir.path().join("no/such/dir.json");
    let o = kbeta(&["list", "--output", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn seed_from_environment() {
    let args = [
        "eval",
        "beta_ext_n",
        "--phi",
        "1,2,3,4",
        "--ext",
        "0.5",
        "--format",
        "json",
    ];
    let with_env = |s: &str| {
        Command::new(env!("CARGO_BIN_EXE_kbeta"))
            .args(args)
            .env("KBETA_SEED", s)
            .output()
            .unwrap()
    };
    let a = with_env("7");
    let b = kbeta(&[&args[..], &["--seed", "7"]].concat());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(with_env("8").stdout, a.stdout);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = [
        "verify",
        "eq4.5,eq6.7",
        "--trials",
        "10",
        "--seed",
        "3",
        "--format",
        "json",
    ];
    let a = kbeta(&args);
    let b = kbeta(&args);
    assert_eq!(a.status.code(), b.status.code());
    assert_eq!(a.stdout, b.stdout);
    let seq = kbeta(&[&args[..], &["--sequential"]].concat());
    assert_eq!(a.stdout, seq.stdout);
}

#[test]
fn in_process_run_matches_binary() {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = kbeta_cli::run(
        ["kbeta", "eval", "sup_pi", "--n", "3", "--format", "json"],
        &mut out,
        &mut err,
    );
    assert_eq!(code, kbeta_cli::EXIT_PASS);
    assert_eq!(
        out,
        kbeta(&["eval", "sup_pi", "--n", "3", "--format", "json"]).stdout
    );
    let code = kbeta_cli::run(["kbeta", "--help"], &mut out, &mut err);
    assert_eq!(code, kbeta_cli::EXIT_PASS);
    assert!(err.is_empty());
}
