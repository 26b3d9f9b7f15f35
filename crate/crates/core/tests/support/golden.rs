//! Golden outputs of the command-line tool.
//!
//! Each `tests/golden/<space>.txt` holds one expression per line; the
//! matching `.jsonl` file holds the JSON output of every command on every
//! expression. Set `UPDATE_GOLDEN=1` to rewrite the `.jsonl` files.

use std::path::{Path, PathBuf};
use std::process::Command;

use machine_space::spaces::SpaceKind;

const FUEL: &str = "20000";

pub fn dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn commands(space: SpaceKind) -> &'static [&'static str] {
    match space {
        SpaceKind::UnitInterval => &["covers", "normalize", "forall", "exists"],
        _ => &["covers", "normalize", "forall", "exists", "search"],
    }
}

fn run(cmd: &str, space: SpaceKind, expr: &str) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_machspace"))
        .args([cmd, "--json", "--space", space.name(), "--fuel", FUEL, expr])
        .output()
        .expect("run machspace");
    assert_eq!(
        out.status.code(),
        Some(0),
        "{cmd} {expr}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

pub fn expressions(space: SpaceKind) -> Vec<String> {
    std::fs::read_to_string(dir().join(format!("{space}.txt")))
        .unwrap()
        .lines()
        .map(str::to_string)
        .collect()
}

fn render(space: SpaceKind) -> String {
    let mut out = String::new();
    for e in expressions(space) {
        for cmd in commands(space) {
            out.push_str(&run(cmd, space, &e));
        }
    }
    out
}

/// Renders every space twice and compares the runs with each other and
/// with the committed files.
pub fn check_determinism() -> Result<(), String> {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    for space in SpaceKind::ALL {
        let (a, b) = (render(space), render(space));
        if a != b {
            return Err(format!("{space}: two runs differ"));
        }
        let path = dir().join(format!("{space}.jsonl"));
        if update {
            std::fs::write(&path, &a).unwrap();
        }
        let committed =
            std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        if committed != a {
            return Err(format!("{space}: output differs from {}", path.display()));
        }
    }
    Ok(())
}

pub fn check_schema() -> Result<(), String> {
    let schema: serde_json::Value =
        serde_json::from_str(include_str!("../../schema/output.schema.json")).unwrap();
    let schema = jsonschema::JSONSchema::compile(&schema).map_err(|e| e.to_string())?;
    for space in SpaceKind::ALL {
        let text = std::fs::read_to_string(dir().join(format!("{space}.jsonl")))
            .map_err(|e| e.to_string())?;
        for line in text.lines() {
            let v: serde_json::Value = serde_json::from_str(line).map_err(|e| e.to_string())?;
            if !schema.is_valid(&v) {
                return Err(format!("schema violation: {line}"));
            }
            let at: Vec<Option<usize>> = ["command", "space", "input", "result", "fuel_used"]
                .iter()
                .map(|k| line.find(&format!("\"{k}\":")))
                .collect();
            if at.iter().any(Option::is_none) || !at.windows(2).all(|w| w[0] < w[1]) {
                return Err(format!("field order: {line}"));
            }
        }
    }
    Ok(())
}
