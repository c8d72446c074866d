use std::process::{Command, Output};

use serde_json::Value;

fn refres(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_refres"))
        .args(args)
        .env_remove("REFRES_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn verify_all_reports_every_relation() {
    let out = refres(&["verify", "--all", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let reports = json(&out);
    let reports = reports.as_array().unwrap();
    assert_eq!(reports.len(), 24);
    let ids: Vec<&str> = reports.iter().map(|r| r["relation_id"].as_str().unwrap()).collect();
    let mut sorted = ids.clone();
    sorted.sort_unstable();
    assert_eq!(ids, sorted);
    for r in reports {
        let keys: Vec<&String> = r.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["relation_id", "lhs", "rhs", "status", "metrics", "tolerance", "seed", "trials"]);
        assert_eq!(r["status"], "verified");
        assert_eq!(r["seed"], 7);
    }
}

#[test]
fn reports_are_byte_identical_for_fixed_seed() {
    for args in [
        &["verify", "--all", "--seed", "3"][..],
        &["verify", "--relation", "R_SDC_DOUBLE", "--format", "csv"],
        &["teleport", "--refbits", "2", "--trials", "2000", "--format", "text"],
        &["table", "superdense", "--refbits-max", "8", "--p-grid", "5", "--format", "csv"],
    ] {
        let a = refres(args);
        let b = refres(args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert!(!a.stdout.is_empty());
    }
}

#[test]
fn seed_from_environment() {
    let with_env = Command::new(env!("CARGO_BIN_EXE_refres"))
        .args(["verify", "--relation", "R_RSP"])
        .env("REFRES_SEED", "11")
        .output()
        .unwrap();
    let with_flag = refres(&["verify", "--relation", "R_RSP", "--seed", "11"]);
    assert_eq!(with_env.stdout, with_flag.stdout);
    assert_eq!(json(&with_env)["seed"], 11);
}

#[test]
fn exit_code_matrix() {
    let cases: &[(&[&str], i32)] = &[
        (&["verify", "--relation", "R_C1"], 0),
        (&["verify", "--relation", "R_TEL_N0", "--format", "text"], 0),
        (&["usd", "--refbit2", "1"], 0),
        (&["code", "--n", "2"], 0),
        (&["convert", "--source", "ebit+refbit"], 0),
        (&["verify", "--relation", "R_C1", "--tol", "1e-300"], 1),
        (&["verify", "--relation", "R_SDC_N0", "--tol", "1e-300"], 1),
        (&["verify", "--relation", "R_NOT_A_RELATION"], 2),
        (&["verify"], 2),
        (&["verify", "--all", "--relation", "R_C1"], 2),
        (&["verify", "--all", "--frobnicate"], 2),
        (&["frobnicate"], 2),
        (&["code", "--n", "0"], 2),
        (&["code", "--n", "129"], 2),
        (&["usd", "--refbits", "65"], 2),
        (&["teleport", "--refbits", "9"], 2),
        (&["optimize", "--refbits", "x"], 2),
        (&["convert", "--source", "3ebits"], 2),
        (&["verify", "--all", "--tol", "-1"], 2),
        (&["verify", "--all", "--trials", "0"], 2),
        (&["verify", "--all", "--format", "xml"], 2),
    ];
    for (args, code) in cases {
        let out = refres(args);
        assert_eq!(out.status.code(), Some(*code), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        if *code == 2 {
            assert!(!out.stderr.is_empty(), "{args:?}");
        }
    }
}

#[test]
fn usd_prints_exact_and_float() {
    let out = refres(&["usd", "--refbits", "2"]);
    let row = &json(&out)["rows"][0];
    assert_eq!(row["success_prob"], 0.25);
    assert_eq!(row["success_prob_exact"], "1/4");
    let out = refres(&["usd", "--refbit2", "1", "--format", "csv"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "n_refbits,n_refbit2,success_prob,success_prob_exact\n0,1,0.5,1/2\n");
}

#[test]
fn optimize_two_refbits() {
    let row = json(&refres(&["optimize", "--refbits", "2"]))["rows"][0].clone();
    assert!((row["p_star"].as_f64().unwrap() - 0.627).abs() < 2e-3);
    assert!((row["rate_cbits"].as_f64().unwrap() - 1.6732).abs() < 1e-3);
}

#[test]
fn superdense_sweep_table() {
    let out = refres(&["table", "superdense", "--refbits-max", "8", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "n_refbits,p,rate_cbits,leftover_refbits,success_prob,success_prob_exact");
    let rates: Vec<f64> = lines.map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert_eq!(rates.len(), 5);
    assert!(rates.windows(2).all(|w| w[1] > w[0]));

    let rows = json(&refres(&["table", "superdense", "--refbits-max", "4", "--p-grid", "3"]));
    assert_eq!(rows["rows"].as_array().unwrap().len(), 9);
    assert_eq!(rows["rows"][1]["p"], 0.5);

    let empty = refres(&["table", "superdense", "--refbits-max", "4", "--p-grid", "0", "--format", "csv"]);
    assert_eq!(String::from_utf8(empty.stdout).unwrap().lines().count(), 1);
}

#[test]
fn code_dimension_is_exact() {
    let row = json(&refres(&["code", "--n", "64"]))["rows"][0].clone();
    assert_eq!(row["dimension"], "1832624140942590534");
    assert!((row["logical_qubits"].as_f64().unwrap() - row["stirling_estimate"].as_f64().unwrap()).abs() < 0.05);
}

#[test]
fn failed_checks_go_to_stderr() {
    let out = refres(&["verify", "--relation", "R_C1", "--tol", "1e-300"]);
    assert_eq!(json(&out)["status"], "failed");
    assert!(String::from_utf8_lossy(&out.stderr).contains("R_C1: check fidelity failed"));
}
