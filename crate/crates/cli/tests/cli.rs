//! End-to-end tests of the `cayley` binary: exit codes, output formats and
//! the documented invocations.

use std::process::{Command, Output};

use serde_json::Value;

fn cayley(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cayley"))
        .args(args)
        .env_remove("CAYLEY_BUDGET")
        .output()
        .expect("cayley binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = cayley(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON document")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn census_rank1_both_agrees() {
    let v = json(&[
        "census", "--n", "2", "--field", "2", "--rank", "1", "--method", "both",
    ]);
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    let methods: Vec<&str> = rows.iter().map(|r| r["method"].as_str().unwrap()).collect();
    assert_eq!(methods, ["formula", "oracle"]);
    for row in rows {
        assert_eq!(row["count"], "2");
        assert_eq!(row["rank"], 1);
        assert_eq!(row["agrees"], true);
    }
}

#[test]
fn census_all_ranks_by_formula() {
    let v = json(&[
        "census", "--n", "3", "--field", "2", "--rank", "all", "--method", "formula",
    ]);
    let rows = v.as_array().unwrap();
    let ranks: Vec<u64> = rows.iter().map(|r| r["rank"].as_u64().unwrap()).collect();
    assert_eq!(ranks, [0, 1, 2, 3]);
    let counts: Vec<&str> = rows.iter().map(|r| r["count"].as_str().unwrap()).collect();
    assert_eq!(counts, ["168", "72", "56", "48"]);
    assert!(rows.iter().all(|r| r["method"] == "formula"));
}

#[test]
fn census_oracle_over_gf4() {
    let v = json(&[
        "census", "--n", "2", "--field", "4", "--rank", "2", "--method", "oracle",
    ]);
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["count"], "124");
    assert_eq!(rows[0]["q"], 4);
}

#[test]
fn census_csv_columns() {
    let out = cayley(&[
        "census", "--n", "2", "--field", "3", "--rank", "all", "--method", "both", "--output",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,q,rank,method,count,agrees"));
    let body: Vec<&str> = lines.collect();
    assert_eq!(body.len(), 6);
    assert!(body.contains(&"2,3,2,formula,27,true"));
    assert!(body.contains(&"2,3,2,oracle,27,true"));
    assert!(body.iter().all(|l| l.split(',').count() == 6));
}

#[test]
fn verify_lemma31_passes() {
    let v = json(&["verify", "--check", "lemma31", "--n", "3", "--field", "2"]);
    assert_eq!(v["passed"], true);
    let check = &v["checks"][0];
    assert_eq!(check["check"], "lemma31");
    assert_eq!(check["expected"], "72");
    assert_eq!(check["observed"], "72");
}

#[test]
fn verify_recurrence_is_formula_only() {
    let v = json(&[
        "verify",
        "--check",
        "recurrence",
        "--n",
        "4",
        "--field",
        "3",
        "--budget",
        "10",
    ]);
    assert_eq!(v["passed"], true);
    assert!(!v["checks"].as_array().unwrap().is_empty());
}

#[test]
fn verify_rank_reduction_sampled() {
    let v = json(&[
        "verify",
        "--check",
        "rank-reduction",
        "--n",
        "2",
        "--field",
        "3",
        "--seed",
        "7",
    ]);
    assert_eq!(v["passed"], true);
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["passed"] == true));
}

#[test]
fn verify_rank_reduction_on_given_pair() {
    let v = json(&[
        "verify",
        "--check",
        "rank-reduction",
        "--n",
        "2",
        "--field",
        "3",
        "--matrix-a",
        "1,0;0,0",
        "--matrix-b",
        "0,0;0,0",
    ]);
    assert_eq!(v["passed"], true);
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 1);
    assert_eq!(checks[0]["passed"], true);
    assert_eq!(checks[0]["observed"], "1 pairs agree");
}

#[test]
fn verify_all_at_n3() {
    let v = json(&["verify", "--check", "all", "--n", "3", "--field", "2"]);
    assert_eq!(v["passed"], true);
    let names: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["check"].as_str().unwrap())
        .collect();
    for expected in [
        "lemma27",
        "lemma31",
        "lemma32",
        "lemma32-case-rank2",
        "recurrence",
        "rank-reduction",
    ] {
        assert!(names.contains(&expected), "missing {expected} in {names:?}");
    }
}

#[test]
fn verify_csv_columns() {
    let out = cayley(&[
        "verify", "--check", "lemma31", "--n", "2", "--field", "2", "--output", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("check,n,q,passed,expected,observed"));
    assert_eq!(lines.next(), Some("lemma31,2,2,true,2,2"));
}

#[test]
fn srg_n2_is_strongly_regular() {
    let v = json(&["srg", "--n", "2", "--field", "3"]);
    assert_eq!(v["is_srg"], true);
    assert_eq!(v["parameters"], serde_json::json!([81, 48, 27, 30]));
    assert_eq!(v["witness"], Value::Null);
}

#[test]
fn srg_n3_has_witness() {
    let v = json(&["srg", "--n", "3", "--field", "2"]);
    assert_eq!(v["is_srg"], false);
    assert_eq!(v["parameters"], Value::Null);
    assert_eq!(v["mu_by_rank"]["1"], 72);
    assert_eq!(v["mu_by_rank"]["2"], 56);
    assert_eq!(v["witness"]["rank_pair"], serde_json::json!([1, 2]));
    assert_eq!(v["witness"]["counts"], serde_json::json!([72, 56]));
}

#[test]
fn srg_n1_is_complete_graph() {
    let v = json(&["srg", "--n", "1", "--field", "5"]);
    assert_eq!(v["is_srg"], false);
    assert_eq!(v["degree"], 4);
    assert!(v["note"].as_str().unwrap().contains("complete"));
}

#[test]
fn srg_text_output() {
    let out = cayley(&["srg", "--n", "2", "--field", "2", "--output", "text"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("16"));
}

#[test]
fn graph_build_agrees() {
    let v = json(&["graph-build", "--n", "2", "--field", "3"]);
    assert_eq!(v["agrees"], true);
}

#[test]
fn field_info_reports_modulus() {
    let v = json(&["field-info", "--field", "2^2"]);
    assert_eq!(v["q"], 4);
    assert_eq!(v["modulus"], serde_json::json!([1, 1, 1]));
}

#[test]
fn exit_0_on_success() {
    assert_eq!(
        cayley(&["field-info", "--field", "7"]).status.code(),
        Some(0)
    );
}

#[test]
fn exit_1_on_failed_check_prints_both_sides() {
    let out = cayley(&[
        "verify",
        "--check",
        "lemma31",
        "--n",
        "3",
        "--field",
        "2",
        "--perturb-formula",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("73") && err.contains("72"), "stderr: {err}");
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], false);
}

#[test]
fn exit_2_on_usage_errors() {
    for args in [
        &["field-info", "--field", "6"][..],
        &["census", "--n", "2", "--field", "3", "--rank", "5"],
        &["verify", "--check", "nonsense", "--n", "2", "--field", "2"],
        &["census", "--n", "2", "--field", "3", "--budget", "0"],
        &["srg", "--n", "2", "--field", "3", "--matrix-a", "1"],
        &[
            "verify",
            "--check",
            "rank-reduction",
            "--n",
            "2",
            "--field",
            "3",
            "--matrix-a",
            "1,2;3",
        ],
        &["frobnicate"],
    ] {
        let out = cayley(args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: stderr {}",
            stderr(&out)
        );
    }
}

#[test]
fn exit_3_on_budget_refusal() {
    let out = cayley(&[
        "census", "--n", "3", "--field", "3", "--rank", "1", "--method", "oracle", "--budget",
        "1000",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err = stderr(&out);
    assert!(
        err.contains("19683"),
        "diagnostic names the required budget: {err}"
    );
    assert!(out.stdout.is_empty());
}

#[test]
fn budget_from_environment() {
    let run = |budget: &str| {
        Command::new(env!("CARGO_BIN_EXE_cayley"))
            .args(["srg", "--n", "2", "--field", "3"])
            .env("CAYLEY_BUDGET", budget)
            .output()
            .unwrap()
    };
    assert_eq!(run("10").status.code(), Some(3));
    assert_eq!(run("100").status.code(), Some(0));
    let flag_wins = Command::new(env!("CARGO_BIN_EXE_cayley"))
        .args(["srg", "--n", "2", "--field", "3", "--budget", "100"])
        .env("CAYLEY_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(flag_wins.status.code(), Some(0));
}

#[test]
fn json_is_byte_identical_across_thread_counts() {
    let args = [
        "census", "--n", "2", "--field", "5", "--rank", "all", "--method", "both",
    ];
    let with = |threads: &str| {
        let mut all: Vec<&str> = args.to_vec();
        all.extend(["--threads", threads]);
        cayley(&all).stdout
    };
    let reference = with("1");
    assert!(!reference.is_empty());
    for threads in ["1", "2", "4", "auto"] {
        assert_eq!(with(threads), reference, "--threads {threads}");
    }
}
