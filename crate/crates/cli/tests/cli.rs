use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn wordlab(args: &[&str]) -> Output {
    wordlab_with_store(args, None)
}

fn wordlab_with_store(args: &[&str], store: Option<&PathBuf>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_wordlab"));
    cmd.args(args);
    match store {
        Some(p) => cmd.env("WORDLAB_WITNESS_STORE", p),
        None => cmd.env_remove("WORDLAB_WITNESS_STORE"),
    };
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn machine(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--format", "machine"]);
    let o = wordlab(&all);
    let text = if o.stdout.is_empty() {
        o.stderr.clone()
    } else {
        o.stdout.clone()
    };
    (
        o.status.code().unwrap(),
        serde_json::from_slice(&text).expect("machine output is JSON"),
    )
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("wordlab-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn classify_examples() {
    let (code, v) = machine(&["classify", "--word", "AABABB"]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["classification"], "NotNearlySymmetric");

    let (_, v) = machine(&["classify", "--word", "AB^2AB^2A"]);
    assert_eq!(v["payload"]["classification"], "Symmetric");

    let (_, v) = machine(&["classify", "--word", "ABAB"]);
    assert_eq!(v["payload"]["classification"], "NearlySymmetric");
    let parts = v["payload"]["decomposition"].as_array().unwrap();
    let joined: String = parts.iter().map(|p| p.as_str().unwrap()).collect();
    assert_eq!(joined, "ABAB");
}

#[test]
fn parse_errors_exit_nonzero() {
    let o = wordlab(&["classify", "--word", "ABXA"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("invalid word"));
    let (code, v) = machine(&["eval", "--word", "AB", "--pair", "nope"]);
    assert_eq!(code, 2);
    assert_eq!(v["status"], "error");
}

#[test]
fn eval_published_pair_in_both_formats() {
    let (code, v) = machine(&["eval", "--word", "ABAABB", "--pair", "A1B1"]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["trace"], "-3164");
    assert_eq!(v["payload"]["verdict"], "HasNonpositiveEigenvalue");
    let text = stdout(&wordlab(&["eval", "--word", "ABAABB", "--pair", "A1B1"]));
    assert!(text.contains("trace: -3164"));
    assert!(text.contains(v["payload"]["charpoly"].as_str().unwrap()));

    let (_, swapped) = machine(&["eval", "--word", "BABBAA", "--pair", "A1B1*"]);
    assert_eq!(swapped["payload"]["trace"], "-3164");
}

#[test]
fn eval_letters_from_file() {
    let dir = temp_dir("file");
    let path = dir.join("letters.json");
    std::fs::write(
        &path,
        r#"{"a": [["2", "1"], ["1", "2"]], "b": [["3", "0"], ["0", "1/2"]]}"#,
    )
    .unwrap();
    let (code, v) = machine(&["eval", "--word", "AB", "--file", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["trace"], "7");
    assert_eq!(v["payload"]["verdict"], "AllEigenvaluesPositive");
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn census_density_decreases_from_eight() {
    let (code, v) = machine(&["census", "--max-length", "12"]);
    assert_eq!(code, 0);
    let rows = v["payload"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 12);
    let density: Vec<f64> = rows
        .iter()
        .map(|r| r["density"].as_f64().unwrap())
        .collect();
    assert!(density[7..].windows(2).all(|w| w[1] < w[0]));
    assert_eq!(rows[5]["nearly_symmetric"], 52);
}

#[test]
fn search_is_deterministic_and_reports_its_budget() {
    let args = [
        "search",
        "--word",
        "AABABBAABB",
        "--seed",
        "1",
        "--format",
        "machine",
    ];
    let first = wordlab(&args);
    let second = wordlab(&args);
    assert_eq!(first.stdout, second.stdout);
    let v: Value = serde_json::from_slice(&first.stdout).unwrap();
    match v["status"].as_str().unwrap() {
        "ok" => assert_eq!(first.status.code(), Some(0)),
        "exhausted" => {
            assert_eq!(first.status.code(), Some(1));
            assert_eq!(v["payload"]["restarts"], 200);
        }
        other => panic!("unexpected status {other}"),
    }
}

#[test]
fn saved_search_witness_is_usable_by_name() {
    let dir = temp_dir("store");
    let store = dir.join("witnesses.json");
    let o = wordlab_with_store(
        &[
            "search", "--word", "BAABBAAA", "--save", "--format", "machine",
        ],
        Some(&store),
    );
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["payload"]["witness"]["provenance"], "search");

    let o = wordlab_with_store(
        &[
            "eval",
            "--word",
            "BAABBAAA",
            "--pair",
            "search-BAABBAAA",
            "--format",
            "machine",
        ],
        Some(&store),
    );
    assert_eq!(o.status.code(), Some(0));
    let e: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(e["payload"]["trace"], v["payload"]["witness"]["trace"]);
    assert!(e["payload"]["trace"].as_str().unwrap().starts_with('-'));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn table_and_constructions() {
    let (code, v) = machine(&["table", "--p-max", "6", "--q-max", "5"]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["induction"]["holds"], true);
    assert_eq!(v["payload"]["table"]["rows"][0][0]["value"], "-3164");

    let (code, v) = machine(&["triangular", "--k", "3", "--j", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["witness"]["word"], "ABABABBABA");

    let (code, v) = machine(&["sign-families"]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["proofs"].as_array().unwrap().len(), 4);

    let (code, v) = machine(&["classes", "--length", "6", "--count-a", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["classes"].as_array().unwrap().len(), 3);
}

#[test]
fn homotopy_square() {
    let (code, v) = machine(&["homotopy", "--word", "ABAABB", "--power", "2"]);
    assert_eq!(code, 0);
    assert!(v["payload"]["exact_nonreal_roots"].as_u64().unwrap() >= 2);
}

#[test]
fn corrupted_letter_names_the_first_cell() {
    let (code, v) = machine(&["verify-published", "--check", "1", "--perturb-a1", "0,0,1"]);
    assert_eq!(code, 1);
    assert_eq!(v["status"], "fail");
    let items: Vec<&str> = v["payload"]["checks"][0]["mismatches"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| m["item"].as_str().unwrap())
        .collect();
    assert!(items.contains(&"F(2,2)"));
}

#[test]
fn table_rows_carry_method_tags() {
    let o = wordlab(&["verify-published", "--check", "table"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("AABABB"));
    assert!(text.contains("recurrence family"));
    assert!(text.contains("sign family (d)"));
    assert_eq!(text.matches("certified:").count(), 31);
}

/// The published generalization tables disagree with exact evaluation, so
/// the full report fails on that check and on no other.
#[test]
fn full_report_fails_only_on_generalization_tables() {
    let (code, v) = machine(&["verify-published"]);
    assert_eq!(code, 1);
    let failed: Vec<&str> = v["payload"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["id"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["3"]);
}
