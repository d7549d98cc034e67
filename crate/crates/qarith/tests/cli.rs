use std::process::{Command, Output};

fn qarith(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qarith")).args(args).env_remove("QARITH_SEED").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(code(&qarith(&["verify", "--max-n", "3"])), 0);
    assert_eq!(code(&qarith(&["verify", "--max-n", "3", "--mutate"])), 1);
    assert_eq!(code(&qarith(&["--bogus"])), 2);
    assert_eq!(code(&qarith(&["cost", "--formula", "t_CSUM_AC", "--param", "n=64"])), 2);
    assert_eq!(code(&qarith(&["build", "adder", "--adder", "qcla", "--n", "6"])), 2);
    assert_eq!(code(&qarith(&["optimize", "--algo", "d", "--arch", "ac", "--n", "64", "--space-multiple", "2"])), 3);
    assert_eq!(code(&qarith(&["report", "latency", "--space-multiple", "5"])), 3);
}

#[test]
fn seed_from_environment_wins() {
    let o = Command::new(env!("CARGO_BIN_EXE_qarith"))
        .args(["verify", "--max-n", "2", "--format", "json", "--seed", "5"])
        .env("QARITH_SEED", "99")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["seed"], 99);
    let o = qarith(&["verify", "--max-n", "2", "--format", "json", "--seed", "5"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["seed"], 5);
}

#[test]
fn tables_are_byte_identical() {
    for args in [&["report", "latency"][..], &["report", "params"], &["report", "sizes", "--n", "8,16"], &["--format", "json", "report", "adders", "--n", "4,8"]] {
        let a = qarith(args);
        assert_eq!(code(&a), 0, "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, qarith(args).stdout, "{args:?}");
    }
}

#[test]
fn latency_csv_marks_missing_cells() {
    let out = stdout(&qarith(&["report", "latency"]));
    let line = out.lines().find(|l| l.starts_with("E,ntc")).unwrap();
    assert!(line.contains("N/A"), "{line}");
    assert!(out.lines().next().unwrap().starts_with("algo,arch,ccnot"));
}

#[test]
fn cost_and_build_outputs() {
    let o = qarith(&["--format", "json", "cost", "--formula", "t_ADD", "--param", "n=3"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains('8') && s.contains('9'), "{s}");
    let o = qarith(&["build", "adder", "--adder", "cuccaro", "--n", "3"]);
    assert_eq!(code(&o), 0);
    let c = qarith::Circuit::from_json(&stdout(&o)).unwrap();
    assert_eq!(c.totals(), qarith::adders::build_cuccaro_adder(3).unwrap().circuit.totals());
}

#[test]
fn single_exponentiation_check() {
    let o = qarith(&["verify", "--algo", "g", "--n", "4", "--modulus", "15", "--x", "7"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}
