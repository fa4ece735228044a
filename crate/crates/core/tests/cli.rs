use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_extremal")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["solve", "--registry-id", "warm-up-sl3", "--depth", "4"][..],
        &["verify", "--registry-id", "sl4-i", "--seed", "5"],
        &["denominators", "--n", "3", "--l", "12", "--depth", "3"],
    ] {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn envelope_and_payloads() {
    let v = json(&run(&["solve", "--registry-id", "warm-up-sl3", "--depth", "4"]));
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "solve");
    assert_eq!(v["result"]["status"]["kind"], "unique");
    assert_eq!(v["result"]["q"]["F13"], "(x1 - x3 + 1)^-1 * (1)");
    assert_eq!(v["result"]["conjecture"]["extra_factors"], Value::Array(vec![]));

    let v = json(&run(&["roots", "--n", "4"]));
    assert_eq!(v["command"], "roots");
    let v = json(&run(&["normal-orders", "--n", "4"]));
    assert_eq!(v["result"]["count"], 16);
    let v = json(&run(&["shapovalov", "--n", "3", "--depth", "2"]));
    assert_eq!(v["result"]["symmetric"], true);
    let v = json(&run(&["projector", "--n", "3", "--l", "23", "--depth", "3"]));
    assert_eq!(v["result"]["idempotent"], true);
}

#[test]
fn config_file_and_out() {
    let dir = std::env::temp_dir().join(format!("extremal-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.cfg");
    let out = dir.join("out.json");
    std::fs::write(&cfg, "# verify one identity\ncommand = verify\nregistry-id = counterexample-sl3\ndepth = 9\n").unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "--depth", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["result"]["depth"], 3);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["verify", "--registry-id", "no-such-id"]).status.code(), Some(2));
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    assert_eq!(run(&["roots"]).status.code(), Some(2));
    assert_eq!(run(&["solve", "--registry-id", "sl5r2-i", "--mode", "symbolic"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--registry-id", "fin-fac-sl2", "--depth", "0"]).status.code(), Some(2));
    assert_eq!(run(&["projector", "--n", "3", "--l", "13"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
