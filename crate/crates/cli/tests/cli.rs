//! End-to-end tests of the `qarrow` binary: wire formats, verdicts, and the
//! exit-code policy (0 = classified, 2 = input error, 3 = corrupt data).

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qarrow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qarrow"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn simulate_to(path: &Path, state: &str, channel: &str, extra: &[&str]) {
    let path_s = path.to_str().unwrap();
    let mut args = vec![
        "simulate",
        "--state",
        state,
        "--channel",
        channel,
        "-o",
        path_s,
    ];
    args.extend_from_slice(extra);
    let out = qarrow(&args);
    assert!(
        out.status.success(),
        "simulate failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn simulate_writes_complete_table() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("table.json");
    simulate_to(&table, "|0>", "identity", &[]);
    let parsed: Value = serde_json::from_str(&fs::read_to_string(&table).unwrap()).unwrap();
    assert_eq!(parsed["n_qubits"], 1);
    let entries = parsed["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 16);
    let zz = entries
        .iter()
        .find(|e| e["a"] == "Z" && e["b"] == "Z")
        .unwrap();
    assert!((zz["value"].as_f64().unwrap() - 1.0).abs() < 1e-15);
}

#[test]
fn decohering_example_full_loop() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("table.json");
    simulate_to(&table, "rhoA:a=0.5", "decohere", &[]);

    // forward verdict
    let report = stdout_json(&qarrow(&["infer", table.to_str().unwrap(), "--json"]));
    assert_eq!(report["verdict"], "FORWARD");
    assert!(report["arrow_measure"].as_f64().unwrap() > 0.0);

    // swapped table flips the verdict and the measure sign
    let swapped = dir.path().join("swapped.json");
    let out = qarrow(&[
        "swap",
        table.to_str().unwrap(),
        "-o",
        swapped.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let mirrored = stdout_json(&qarrow(&["infer", swapped.to_str().unwrap(), "--json"]));
    assert_eq!(mirrored["verdict"], "BACKWARD");
    let m = report["arrow_measure"].as_f64().unwrap();
    let mm = mirrored["arrow_measure"].as_f64().unwrap();
    assert!((m + mm).abs() < 1e-12);

    // double swap is byte identical
    let twice = dir.path().join("twice.json");
    let out = qarrow(&[
        "swap",
        swapped.to_str().unwrap(),
        "-o",
        twice.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(fs::read(&table).unwrap(), fs::read(&twice).unwrap());

    // an (X,Z) entry moves to (Z,X)
    let orig: Value = serde_json::from_str(&fs::read_to_string(&table).unwrap()).unwrap();
    let swap: Value = serde_json::from_str(&fs::read_to_string(&swapped).unwrap()).unwrap();
    let find = |v: &Value, a: &str, b: &str| -> f64 {
        v["entries"]
            .as_array()
            .unwrap()
            .iter()
            .find(|e| e["a"] == a && e["b"] == b)
            .unwrap()["value"]
            .as_f64()
            .unwrap()
    };
    assert_eq!(find(&orig, "X", "Z"), find(&swap, "Z", "X"));
}

#[test]
fn extraction_methods_and_modes() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("table.json");
    simulate_to(&table, "rhoA:a=0.5", "decohere", &[]);

    // forward sylvester: M = diag(1,0,0,1)
    let res = stdout_json(&qarrow(&[
        "extract",
        table.to_str().unwrap(),
        "--direction",
        "fwd",
        "--method",
        "sylvester",
    ]));
    assert_eq!(res["mode"], "full");
    let re = res["choi"]["re"].as_array().unwrap();
    let want = [
        1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0,
    ];
    for (got, want) in re.iter().zip(want.iter()) {
        assert!((got.as_f64().unwrap() - want).abs() < 1e-10);
    }

    // backward inverse: the a/(4−2a) = 1/6 entry
    let res = stdout_json(&qarrow(&[
        "extract",
        table.to_str().unwrap(),
        "--direction",
        "bwd",
        "--method",
        "inverse",
    ]));
    let re = res["choi"]["re"].as_array().unwrap();
    assert!((re[1].as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-10);
    assert!(res["min_eig_T1"].as_f64().unwrap() < -0.2);

    // rank-deficient table: pinv flags projected, inverse refuses with exit 2
    let rank1 = dir.path().join("rank1.json");
    simulate_to(&rank1, "|0>", "identity", &[]);
    let res = stdout_json(&qarrow(&[
        "extract",
        rank1.to_str().unwrap(),
        "--method",
        "pinv",
    ]));
    assert_eq!(res["mode"], "projected");
    let out = qarrow(&["extract", rank1.to_str().unwrap(), "--method", "inverse"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("full-rank"));
}

#[test]
fn indeterminate_with_rank_report() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("table.json");
    simulate_to(&table, "|0>", "identity", &[]);
    let report = stdout_json(&qarrow(&["infer", table.to_str().unwrap(), "--json"]));
    assert_eq!(report["verdict"], "INDETERMINATE");
    assert_eq!(report["rank_rho"], 1);
    assert_eq!(report["rank_gamma"], 1);
    assert!(report["arrow_measure"].is_null());
}

#[test]
fn unitary_table_is_either() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("table.json");
    simulate_to(&table, "mixed", "identity", &[]);
    let report = stdout_json(&qarrow(&["infer", table.to_str().unwrap(), "--json"]));
    assert_eq!(report["verdict"], "EITHER");
    assert!(report["arrow_measure"].as_f64().unwrap().abs() <= 1e-9);
}

#[test]
fn exit_codes_for_bad_input() {
    let dir = tempfile::tempdir().unwrap();

    // malformed spec
    let out = qarrow(&["simulate", "--state", "nonsense", "--channel", "identity"]);
    assert_eq!(out.status.code(), Some(2));

    // malformed JSON file
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{ not json").unwrap();
    let out = qarrow(&["infer", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    // incomplete table
    let incomplete = dir.path().join("incomplete.json");
    fs::write(
        &incomplete,
        r#"{"n_qubits":1,"entries":[{"a":"I","b":"I","value":1.0}]}"#,
    )
    .unwrap();
    let out = qarrow(&["infer", incomplete.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing entry"));
}

#[test]
fn corrupt_table_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("table.json");
    simulate_to(&table, "|0>", "identity", &[]);
    // perturb the (Z,X) correlator: with rank-1 marginals the data no longer
    // fits any state + linear-map pair
    let mut parsed: Value = serde_json::from_str(&fs::read_to_string(&table).unwrap()).unwrap();
    for e in parsed["entries"].as_array_mut().unwrap() {
        if e["a"] == "Z" && e["b"] == "X" {
            e["value"] = Value::from(0.3);
        }
    }
    fs::write(&table, serde_json::to_string(&parsed).unwrap()).unwrap();
    let out = qarrow(&["infer", table.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("corrupt"));
}

#[test]
fn sampled_tables_are_seeded_and_concentrated() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let exact = dir.path().join("exact.json");
    simulate_to(
        &a,
        "rhoA:a=0.5",
        "decohere",
        &["--shots", "10000", "--seed", "7"],
    );
    simulate_to(
        &b,
        "rhoA:a=0.5",
        "decohere",
        &["--shots", "10000", "--seed", "7"],
    );
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    simulate_to(&exact, "rhoA:a=0.5", "decohere", &[]);

    let sampled: Value = serde_json::from_str(&fs::read_to_string(&a).unwrap()).unwrap();
    let reference: Value = serde_json::from_str(&fs::read_to_string(&exact).unwrap()).unwrap();
    let bound = 5.0 / (10_000f64).sqrt();
    for (s, e) in sampled["entries"]
        .as_array()
        .unwrap()
        .iter()
        .zip(reference["entries"].as_array().unwrap())
    {
        let diff = (s["value"].as_f64().unwrap() - e["value"].as_f64().unwrap()).abs();
        assert!(diff <= bound, "{} {} off by {diff}", s["a"], s["b"]);
    }

    // the sampled table still classifies FORWARD with the shot-scaled psd tol
    let report = stdout_json(&qarrow(&[
        "infer",
        a.to_str().unwrap(),
        "--shots",
        "10000",
        "--json",
    ]));
    assert_eq!(report["verdict"], "FORWARD");
    let notes = report["notes"].as_array().unwrap();
    assert!(notes
        .iter()
        .any(|n| n.as_str().unwrap().contains("psd_tol")));
}

#[test]
fn depolarizing_preset_and_n2() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("table.json");
    simulate_to(&table, "mixed", "depolarize:p=0.3", &["--n", "2"]);
    let parsed: Value = serde_json::from_str(&fs::read_to_string(&table).unwrap()).unwrap();
    assert_eq!(parsed["entries"].as_array().unwrap().len(), 256);
    let report = stdout_json(&qarrow(&["infer", table.to_str().unwrap(), "--json"]));
    // depolarizing noise on the maximally mixed state is time symmetric
    assert_eq!(report["verdict"], "EITHER");
}
