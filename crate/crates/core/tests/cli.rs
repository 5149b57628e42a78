use std::path::Path;
use std::process::{Command, Output};

use rwcuckoo::harness::run_args;
use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rwcuckoo")).args(args).output().unwrap()
}

fn csv_lines(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path).unwrap().lines().map(str::to_owned).collect()
}

fn path(dir: &tempfile::TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_owned()
}

#[test]
fn no_arguments_is_a_usage_error() {
    let out = bin(&[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn help_and_version_exit_cleanly() {
    assert_eq!(bin(&["--help"]).status.code(), Some(0));
    assert_eq!(bin(&["--version"]).status.code(), Some(0));
}

#[test]
fn bad_flags_and_values_exit_2() {
    assert_eq!(run_args(&["rw-bench", "--bogus"]), 2);
    assert_eq!(run_args(&["rw-bench", "--load", "1.5"]), 2);
    assert_eq!(run_args(&["rep", "--policy", "nope"]), 2);
    assert_eq!(run_args(&["thresholds", "--k-min", "2"]), 2);
    assert_eq!(run_args(&["cont-peel", "--grid", "1:2"]), 2);
    assert_eq!(run_args(&["peel", "--input", "/nonexistent/h.json"]), 1);
}

#[test]
fn thresholds_print_the_table() {
    let out = bin(&["thresholds", "--k-min", "3", "--k-max", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for c in ["0.818", "0.772", "0.702", "0.637", "0.582"] {
        assert!(text.contains(c), "{c} missing from\n{text}");
    }
}

#[test]
fn quick_verify_passes() {
    let out = bin(&["verify", "--quick"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn rw_bench_csv_layout() {
    let dir = tempfile::tempdir().unwrap();
    let csv = path(&dir, "rw.csv");
    assert_eq!(run_args(&["rw-bench", "--n", "1000", "--trials", "3", "--seed", "5", "--csv", &csv]), 0);
    let lines = csv_lines(Path::new(&csv));
    assert!(lines[0].starts_with("# schema=1 version="));
    assert!(lines[0].contains("command=rw-bench"));
    assert_eq!(lines[1], "n,k,load,seed,trial,keys,total_moves,mean_moves,max_moves,failures");
    assert_eq!(lines.len(), 2 + 3);
}

#[test]
fn rep_csv_layout() {
    let dir = tempfile::tempdir().unwrap();
    let csv = path(&dir, "rep.csv");
    let args = ["rep", "--n", "400", "--k", "3", "--policy", "random", "--variant", "rep-prime", "--trials", "4", "--csv", &csv];
    assert_eq!(run_args(&args), 0);
    let lines = csv_lines(Path::new(&csv));
    assert_eq!(lines[1], "variant,policy,n,m,k,seed,trial,rounds,status,lemma4_bound");
    assert_eq!(lines.len(), 2 + 4);
    assert!(lines[2..].iter().all(|l| l.starts_with("rep-prime,random,400,300,3,") && l.contains(",done,")));
}

#[test]
fn cont_peel_csv_layout() {
    let dir = tempfile::tempdir().unwrap();
    let csv = path(&dir, "cp.csv");
    let args = ["cont-peel", "--n", "2000", "--c", "0.7", "--seeds", "2", "--grid", "0:0.5:2", "--csv", &csv];
    assert_eq!(run_args(&args), 0);
    let lines = csv_lines(Path::new(&csv));
    assert_eq!(lines[1], "seed,t,B,H,L,tau");
    let first: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(&first[1..5], &["0", "4200", first[3], first[4]][..]);
    let (b, h, l): (u64, u64, u64) = (first[2].parse().unwrap(), first[3].parse().unwrap(), first[4].parse().unwrap());
    assert_eq!(b, h + l);
}

#[test]
fn json_report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let json = path(&dir, "rw.json");
    assert_eq!(run_args(&["rw-bench", "--n", "500", "--trials", "2", "--json", &json]), 0);
    let value: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(value["schema"], 1);
    assert_eq!(value["config"]["n"], 500);
    assert_eq!(value["records"].as_array().unwrap().len(), 2);
}

#[test]
fn config_file_merges_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let config = path(&dir, "cfg.json");
    std::fs::write(&config, r#"{"n": 600, "trials": 2, "seed": 11}"#).unwrap();
    let json = path(&dir, "out.json");
    assert_eq!(run_args(&["rw-bench", "--config", &config, "--trials", "3", "--json", &json]), 0);
    let value: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(value["config"]["n"], 600);
    assert_eq!(value["config"]["seed"], 11);
    assert_eq!(value["records"].as_array().unwrap().len(), 3);

    std::fs::write(&config, r#"{"unknown": 1}"#).unwrap();
    assert_eq!(run_args(&["rw-bench", "--config", &config]), 2);
    std::fs::write(&config, "[1, 2]").unwrap();
    assert_eq!(run_args(&["rw-bench", "--config", &config]), 2);
}

#[test]
fn generated_instances_peel_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let h = path(&dir, "h.json");
    assert_eq!(run_args(&["gen", "--n", "100", "--m", "60", "--k", "3", "--seed", "4", "--out", &h]), 0);
    let csv = path(&dir, "peel.csv");
    assert_eq!(run_args(&["peel", "--input", &h, "--csv", &csv]), 0);
    let from_file = csv_lines(Path::new(&csv));
    let csv2 = path(&dir, "peel2.csv");
    assert_eq!(run_args(&["peel", "--n", "100", "--m", "60", "--k", "3", "--seed", "4", "--csv", &csv2]), 0);
    let direct = csv_lines(Path::new(&csv2));
    assert_eq!(from_file[1], "edge,target,peel");
    assert_eq!(from_file[1..], direct[1..]);
    assert_eq!(from_file.len(), 2 + 60);
}
