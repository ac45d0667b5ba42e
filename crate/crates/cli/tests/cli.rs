use std::process::{Command, Output};

use serde_json::Value;

fn gentile(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gentile"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn invalid_n_is_a_config_error() {
    let out = gentile(&["audit", "--n", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert_eq!(gentile(&["spectrum", "--n", "5..3"]).status.code(), Some(1));
    assert_eq!(gentile(&["su2", "--n", "2", "--A", "nope"]).status.code(), Some(1));
    assert_eq!(gentile(&["eval", "[b,", "--n", "2"]).status.code(), Some(1));
    assert_eq!(gentile(&["--help"]).status.code(), Some(0));
}

#[test]
fn spectrum_csv_n3() {
    let out = gentile(&["spectrum", "--n", "3", "--out", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        ["nu", "energy", "level_index", "multiplicity"]
    );
    let energies: Vec<f64> = rdr.records().map(|r| r.unwrap()[1].parse().unwrap()).collect();
    let expected = [0.0, 1.0, 1.0, 0.0];
    assert_eq!(energies.len(), 4);
    for (e, x) in energies.iter().zip(expected) {
        assert!((e - x).abs() < 1e-12, "{energies:?}");
    }
}

#[test]
fn spectrum_range_json_is_an_array_with_crosschecks() {
    let out = gentile(&["spectrum", "--n", "1..=6"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let items = v.as_array().unwrap();
    assert_eq!(items.len(), 6);
    assert!(items.iter().all(|o| o["crosscheck"]["pass"] == Value::Bool(true)));
}

#[test]
fn coherent_alternating_n1() {
    let out = gentile(&["coherent", "--n", "1", "--lambda", "alternating"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["delta"], serde_json::json!([[1.0, 0.0], [1.0, 0.0]]));
    assert!(v["eigenstate_residual"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn coherent_custom_needs_matching_length() {
    let ok = gentile(&["coherent", "--n", "2", "--lambda", "custom", "--lambda-values", "1;0.5;2"]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = gentile(&["coherent", "--n", "2", "--lambda", "custom", "--lambda-values", "1;2"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn su2_degenerate_nodes_is_a_diagnostic() {
    let out = gentile(&["su2", "--n", "2", "--A", "adaga"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["error"], "DegenerateNodes");
    assert_eq!(v["nu"].as_u64().unwrap() + v["nu_prime"].as_u64().unwrap(), 3);
}

#[test]
fn su2_solves_with_adag_b() {
    let out = gentile(&["su2", "--n", "1..8", "--A", "adagb"]);
    assert_eq!(out.status.code(), Some(0));
    for item in stdout_json(&out).as_array().unwrap() {
        assert_eq!(item["residuals"]["pass"], Value::Bool(true));
        assert!(item["residuals"]["double_sum"].as_f64().unwrap() <= 1e-9);
    }
}

#[test]
fn eval_commutator_normal_form() {
    let out = gentile(&["eval", "[b,adag]_n", "--n", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["normal_form"], "1");
    assert!(v["per_n"][0]["identity_distance"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn eval_identity_of_free_generators() {
    let out = gentile(&["eval", "[u,v]_n == u v - q v u", "--n", "1..4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["kind"], "FREE");
    assert_eq!(v["normal_form"], "0");
    for row in v["per_n"].as_array().unwrap() {
        assert!(row["max_abs"].as_f64().unwrap() <= 1e-12);
    }
}

#[test]
fn arcsin_audit_flags_collision_at_three() {
    let out = gentile(&["arcsin-audit", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["collisions"], serde_json::json!([[0, 2]]));
    assert_eq!(v["all_match_prediction"], Value::Bool(true));
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["audit", "--n", "1..3", "--trials", "2", "--seed", "7"][..],
        &["eval", "[u,v]_n w", "--n", "2", "--seed", "3"][..],
        &["spectrum", "--n", "1..10", "--out", "csv"][..],
    ] {
        let a = gentile(args);
        let b = gentile(args);
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn json_and_csv_agree() {
    let j = stdout_json(&gentile(&["spectrum", "--n", "2..5"]));
    let c = gentile(&["spectrum", "--n", "2..5", "--out", "csv"]);
    let mut rdr = csv::Reader::from_reader(c.stdout.as_slice());
    let rows: Vec<_> = rdr.records().map(|r| r.unwrap()).collect();
    let mut k = 0;
    for item in j.as_array().unwrap() {
        for (v, e) in item["per_state_energies"].as_array().unwrap().iter().enumerate() {
            let row = &rows[k];
            assert_eq!(row[0].parse::<u64>().unwrap(), item["n"].as_u64().unwrap());
            assert_eq!(row[1].parse::<usize>().unwrap(), v);
            let from_csv: f64 = row[2].parse().unwrap();
            let from_json = e.as_f64().unwrap();
            assert!((from_csv - from_json).abs() <= 1e-15 * from_json.abs().max(1.0));
            k += 1;
        }
    }
    assert_eq!(k, rows.len());
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spectrum.json");
    let to_file = gentile(&["spectrum", "--n", "4", "-o", path.to_str().unwrap()]);
    assert_eq!(to_file.status.code(), Some(0));
    assert!(to_file.stdout.is_empty());
    let to_stdout = gentile(&["spectrum", "--n", "4"]);
    assert_eq!(std::fs::read(&path).unwrap(), to_stdout.stdout);
}

#[test]
fn mutated_catalog_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    let dump = gentile(&["audit", "--dump-catalog"]);
    assert_eq!(dump.status.code(), Some(0));
    let text = String::from_utf8(dump.stdout).unwrap();
    let line = text.lines().find(|l| l.starts_with("II.self ")).expect("II.self present").to_string();
    let mutated = line.replacen("==", "== -", 1);
    let path = dir.path().join("mutated.txt");
    std::fs::write(&path, format!("{mutated}\n")).unwrap();

    let out = gentile(&["audit", "--catalog", path.to_str().unwrap(), "--n", "1..3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["entries"][0]["verdict"], "FAIL");

    std::fs::write(&path, "II.self : [u,v]_n ==\n").unwrap();
    assert_eq!(
        gentile(&["audit", "--catalog", path.to_str().unwrap()]).status.code(),
        Some(1)
    );
}

#[test]
fn audit_table_lists_every_entry() {
    let out = gentile(&["audit", "--n", "1..2", "--trials", "1", "--out", "table"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("A.uvwo.1"));
    assert!(text.contains("FAIL"));
}
