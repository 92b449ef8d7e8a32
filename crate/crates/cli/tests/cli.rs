use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const QUINTIC: &str = "p=3; f=2,2,1,1,0,1";
const QUINTIC_SYMBOLIC: &str = "p=3; f=x^5+x^3+x^2-x-1";

fn torelli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_torelli"))
        .args(args)
        .env_remove("TORELLI_CAP")
        .output()
        .expect("binary runs")
}

fn torelli_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_torelli"))
        .args(args)
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn schema(name: &str) -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema").join(name);
    let text = std::fs::read_to_string(path).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn json_ok(args: &[&str]) -> Value {
    let out = torelli(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn error_doc(out: &Output) -> Value {
    let doc: Value = serde_json::from_slice(&out.stderr).unwrap();
    let v = schema("error.schema.json");
    assert!(v.is_valid(&doc), "{doc}");
    doc
}

/// F_9 = F_3[i], i^2 = -1, as pairs (a, b) = a + b i.
fn f9_mul(x: (i64, i64), y: (i64, i64)) -> (i64, i64) {
    ((x.0 * y.0 - x.1 * y.1).rem_euclid(3), (x.0 * y.1 + x.1 * y.0).rem_euclid(3))
}

/// Point counts of y^2 = x^5 + x^3 + x^2 - x - 1 over F_3 and F_9 by the
/// quadratic character `z^((q-1)/2)`.
fn quintic_counts() -> (i64, i64) {
    let f = |x: (i64, i64)| {
        let coeffs: [i64; 6] = [2, 2, 1, 1, 0, 1];
        let mut acc: (i64, i64) = (0, 0);
        let mut pw = (1, 0);
        for c in coeffs {
            acc = ((acc.0 + c * pw.0).rem_euclid(3), (acc.1 + c * pw.1).rem_euclid(3));
            pw = f9_mul(pw, x);
        }
        acc
    };
    let chi = |z: (i64, i64), e: u32| {
        if z == (0, 0) {
            return 0;
        }
        let mut r = (1, 0);
        for _ in 0..e {
            r = f9_mul(r, z);
        }
        if r == (1, 0) {
            1
        } else {
            -1
        }
    };
    let n1 = 1 + (0..3).map(|a| 1 + chi(f((a, 0)), 1)).sum::<i64>();
    let n2 = 1 + (0..9).map(|c| 1 + chi(f((c % 3, c / 3)), 4)).sum::<i64>();
    (n1, n2)
}

#[test]
fn zeta_json_matches_character_sum_counts() {
    let doc = json_ok(&["zeta", "--curve", QUINTIC, "--json", "--nmax", "2"]);
    assert!(schema("output.schema.json").is_valid(&doc), "{doc}");
    let (n1, n2) = quintic_counts();
    let q = 3;
    let s1 = q + 1 - n1;
    let s2 = q * q + 1 - n2;
    let c1 = -s1;
    let c2 = (s1 * s1 - s2) / 2;
    let expect = vec![1, c1, c2, q * c1, q * q];
    let got: Vec<i64> = doc["result"]["charpoly"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_i64().unwrap())
        .collect();
    assert_eq!(got, expect);
    assert_eq!(doc["result"]["weil"]["functional_eq"], true);
    assert_eq!(doc["manifest"]["subcommand"], "zeta");

    let v = schema("output.schema.json");
    let mut broken = doc.clone();
    broken["result"].as_object_mut().unwrap().remove("weil");
    assert!(!v.is_valid(&broken));
    let mut relabeled = doc.clone();
    relabeled["manifest"]["subcommand"] = "tower".into();
    assert!(!v.is_valid(&relabeled));
}

#[test]
fn symbolic_and_residue_specs_share_a_manifest() {
    let a = torelli(&["zeta", "--curve", QUINTIC, "--json"]);
    let b = torelli(&["zeta", "--curve", QUINTIC_SYMBOLIC, "--json"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn unknown_subcommand_is_usage_error() {
    let out = torelli(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_doc(&out)["error"], "Usage");
    let out = torelli(&["zeta"]);
    assert_eq!(out.status.code(), Some(2));
    let out = torelli(&["zeta", "--curve", "p=3; f=x^5+"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_doc(&out)["error"], "Parse");
}

#[test]
fn isogeny_exit_codes() {
    let out = torelli(&["isogeny", "--curve-a", QUINTIC, "--curve-b", "p=5; f=x^5+x+1", "--json"]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(error_doc(&out)["error"], "CharacteristicMismatch");
    assert!(out.stdout.is_empty());

    let out = torelli(&["isogeny", "--curve-a", "p=5; f=x^5+x+1", "--curve-b", "p=5; f=x^5+2x^2+3", "--json"]);
    assert_eq!(out.status.code(), Some(3));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["result"]["verdict"], "not-proven");
    assert!(schema("output.schema.json").is_valid(&doc));

    let out = torelli(&["isogeny", "--curve-a", "p=11; f=x^6-1", "--curve-b", "p=11; f=x^6-5x^3+4"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("verdict: isogenous"));
}

#[test]
fn every_subcommand_validates_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("scan.csv");
    let csv = csv.to_str().unwrap();
    let runs: Vec<Vec<&str>> = vec![
        vec!["zeta", "--curve", QUINTIC, "--nmax", "5"],
        vec!["order", "--curve", QUINTIC, "--nmax", "4"],
        vec!["order", "--curve", QUINTIC, "--divisor", "u:2,1;v:1", "--ext", "1"],
        vec!["isogeny", "--curve-a", QUINTIC, "--curve-b", "p=3; f=x^5-x^3+x^2-x-1"],
        vec!["configs", "--curve", QUINTIC, "--ext", "2", "--string", "5,7"],
        vec!["configs", "--curve", QUINTIC, "--ext", "1", "--string", "7", "--base", "inf"],
        vec!["tower", "--curve", "p=11; f=0,4,0,-5,0,1", "--depth", "4"],
        vec!["cminus", "--curve", "p=5; f=x^5+x"],
        vec!["generate", "--curve", QUINTIC, "--exclude", "cminus"],
        vec!["generate", "--curve", QUINTIC, "--exclude", "none"],
        vec!["generate", "--curve", QUINTIC, "--exclude", "inf;(1,1)"],
        vec!["group", "--curve", QUINTIC, "--ext", "2", "--list"],
        vec!["scan", "--p", "3", "--mmax", "1", "--dedup", "--out", csv],
    ];
    let v = schema("output.schema.json");
    for run in runs {
        let mut args = run.clone();
        args.push("--json");
        let first = torelli(&args);
        assert_eq!(first.status.code(), Some(0), "{run:?}: {}", String::from_utf8_lossy(&first.stderr));
        let second = torelli(&args);
        assert_eq!(first.stdout, second.stdout, "{run:?}");
        let doc: Value = serde_json::from_slice(&first.stdout).unwrap();
        let errors: Vec<String> = v.iter_errors(&doc).map(|e| format!("{e} at {}", e.instance_path)).collect();
        assert!(errors.is_empty(), "{run:?}: {errors:?}");
        assert_eq!(doc["manifest"]["subcommand"], run[0]);
    }
}

#[test]
fn order_of_divisor_divides_group_order() {
    let doc = json_ok(&["order", "--curve", QUINTIC, "--divisor", "u:2,1;v:1", "--json"]);
    let n = doc["result"]["group_order"].as_u64().unwrap();
    let o = doc["result"]["order"].as_u64().unwrap();
    assert_eq!(n % o, 0);
    let out = torelli(&["order", "--curve", QUINTIC, "--divisor", "u:2,1;v:0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn scan_csv_header_and_thread_independence() {
    let one = torelli(&["scan", "--p", "3", "--mmax", "2", "--threads", "1"]);
    let four = torelli(&["scan", "--p", "3", "--mmax", "2", "--threads", "4"]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    let text = String::from_utf8(one.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("curve,p,m,charpoly,F1,F2,signature_hash,violations"));
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut rows = 0;
    for rec in reader.records() {
        let rec = rec.unwrap();
        assert_eq!(rec.len(), 8);
        assert_eq!(&rec[1], "3");
        assert_eq!(&rec[7], "0");
        rows += 1;
    }
    assert!(rows > 0 && rows % 2 == 0);
}

#[test]
fn scan_from_curve_file() {
    let dir = tempfile::tempdir().unwrap();
    let list = dir.path().join("curves.txt");
    std::fs::write(&list, format!("# two models of one curve\n{QUINTIC}\n{QUINTIC_SYMBOLIC}\n")).unwrap();
    let out = torelli(&["scan", "--curves", list.to_str().unwrap(), "--dedup"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 2);
}

#[test]
fn group_table_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.txt");
    let p = path.to_str().unwrap();
    let made = json_ok(&["group", "--curve", QUINTIC, "--ext", "2", "--save", p, "--json"]);
    let loaded = json_ok(&["group", "--load", p, "--json"]);
    assert_eq!(made["result"], loaded["result"]);
    assert_eq!(made["result"]["order"], 105);
}

#[test]
fn cap_from_environment() {
    let out = torelli_env(&["group", "--curve", QUINTIC, "--ext", "2"], "TORELLI_CAP", "50");
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(error_doc(&out)["error"], "CapExceeded");
    let out = torelli_env(&["zeta", "--curve", QUINTIC], "TORELLI_CAP", "lots");
    assert_eq!(out.status.code(), Some(2));
    let doc = {
        let out = torelli_env(&["zeta", "--curve", QUINTIC, "--json"], "TORELLI_CAP", "5000");
        serde_json::from_slice::<Value>(&out.stdout).unwrap()
    };
    assert_eq!(doc["manifest"]["cap"], 5000);
}

#[test]
fn configs_rejects_bad_strings() {
    let out = torelli(&["configs", "--curve", QUINTIC, "--string", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_doc(&out)["error"], "InvalidString");
    let out = torelli(&["configs", "--curve", QUINTIC, "--string", "1"]);
    assert_eq!(error_doc(&out)["error"], "InvalidString");
}
