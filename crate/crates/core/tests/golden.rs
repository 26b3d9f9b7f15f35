mod support;

use std::process::Command;

use machine_space::dsl::parse_machine;
use machine_space::spaces::{covers, SpaceKind};
use support::golden::{check_determinism, check_schema, dir, expressions};

#[test]
fn golden_files_are_deterministic() {
    check_determinism().unwrap();
}

#[test]
fn golden_files_match_schema() {
    check_schema().unwrap();
}

#[test]
fn golden_covers_agree_with_library() {
    for space in SpaceKind::ALL {
        let exprs = expressions(space);
        assert!(exprs.len() >= 50);
        let text = std::fs::read_to_string(dir().join(format!("{space}.jsonl"))).unwrap();
        let mut checked = 0;
        for line in text.lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            if v["command"] != "covers" {
                continue;
            }
            let m = parse_machine(v["input"].as_str().unwrap()).unwrap();
            assert_eq!(
                v["result"].as_bool().unwrap(),
                covers(space, &m).unwrap(),
                "{line}"
            );
            checked += 1;
        }
        assert_eq!(checked, exprs.len());
    }
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_machspace"))
            .args(args)
            .output()
            .unwrap()
            .status
            .code()
            .unwrap()
    };
    assert_eq!(code(&["covers", "--space", "cantor-digits", "z0 | u0"]), 0);
    assert_eq!(code(&["forall", "--fuel", "1000", "z0"]), 0);
    assert_eq!(code(&["covers", "--space", "interval", "z0"]), 2);
    assert_eq!(code(&["covers", "z0 &"]), 3);
    assert_eq!(code(&["covers", "--fuel", "0", "z0"]), 3);
    assert_eq!(code(&["forall", "--max-generator-index", "99", "z0"]), 4);
}

#[test]
fn reads_stdin() {
    use std::io::Write;
    let mut child = Command::new(env!("CARGO_BIN_EXE_machspace"))
        .args(["normalize", "-"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"z0 |\n (z0 & u1)\n")
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "z0\n");
}
