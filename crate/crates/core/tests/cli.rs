//! The binary end to end: files, exit codes, environment.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn gw0(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gw0")).args(args).current_dir(dir).output().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn generate_verify_and_corrupt() {
    let dir = tempfile::tempdir().unwrap();
    let out = gw0(&["gen-point", "--deg", "8", "--zmax", "6", "-o", "pt.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["region"]["reliableDeg"], 8);

    let out = gw0(&["verify", "pt.json"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let r = report(&out);
    assert_eq!(r["exitStatus"], 0);
    assert_eq!(r["inputs"]["pt.json"].as_str().unwrap().len(), 64);

    let text = std::fs::read_to_string(dir.path().join("pt.json")).unwrap();
    let bad = text.replacen("\"-1/6\"", "\"-1/7\"", 1);
    assert_ne!(bad, text);
    std::fs::write(dir.path().join("bad.json"), bad).unwrap();
    let out = gw0(&["verify", "bad.json", "--only", "trr"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert!(!r["checks"][0]["detail"]["failing"].as_array().unwrap().is_empty());
}

#[test]
fn rank1_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    gw0(&["gen-point", "-o", "pt.json"], dir.path());
    let out = gw0(&["rank1", "coords", "pt.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["output"], serde_json::json!({ "coords": [] }));

    std::fs::write(dir.path().join("a.json"), r#"{"coords":["1/2","-1/3"]}"#).unwrap();
    let out = gw0(&["rank1", "from-coords", "a.json", "--deg", "6", "-o", "f.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let out = gw0(&["rank1", "coords", "f.json"], dir.path());
    assert_eq!(report(&out)["output"], serde_json::json!({ "coords": ["1/2", "-1/3"] }));
    let out = gw0(&["verify", "f.json", "--only", "rank1,se"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["checks"].as_array().unwrap().len(), 2);

    gw0(&["rank1", "cube", "f.json", "-o", "l.json"], dir.path());
    let out = gw0(&["rank1", "reconstruct", "l.json", "--deg", "6", "-o", "g.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let f = std::fs::read(dir.path().join("f.json")).unwrap();
    let g = std::fs::read(dir.path().join("g.json")).unwrap();
    assert_eq!(f, g);
}

#[test]
fn exit_codes_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(gw0(&["frobnicate"], dir.path()).status.code(), Some(2));
    assert_eq!(gw0(&["verify", "nope.json"], dir.path()).status.code(), Some(2));
    gw0(&["gen-points", "2", "--deg", "5", "--zmax", "3", "-o", "two.json"], dir.path());
    assert_eq!(gw0(&["rank1", "coords", "two.json"], dir.path()).status.code(), Some(3));
    std::fs::write(dir.path().join("m.json"), r#"[["1/1","0/1"],["1/1","1/1"]]"#).unwrap();
    assert_eq!(gw0(&["change-frame", "two.json", "--matrix", "m.json"], dir.path()).status.code(), Some(3));

    let out = Command::new(env!("CARGO_BIN_EXE_gw0"))
        .args(["gen-point", "--deg", "5", "--zmax", "3"])
        .env("GW0_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_gw0"))
            .args(["verify", "two.json"])
            .current_dir(dir.path())
            .env("GW0_THREADS", threads)
            .output()
            .unwrap()
    };
    let (a, b) = (run("1"), run("3"));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn frame_change_keeps_axioms() {
    let dir = tempfile::tempdir().unwrap();
    gw0(&["gen-points", "2", "--deg", "5", "--zmax", "3", "-o", "two.json"], dir.path());
    std::fs::write(dir.path().join("b.json"), r#"[["1/1","1/2"],["0/1","-2/1"]]"#).unwrap();
    let out = gw0(&["change-frame", "two.json", "--matrix", "b.json", "-o", "new.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(gw0(&["verify", "new.json"], dir.path()).status.code(), Some(0));
    assert_eq!(gw0(&["frobenius", "new.json", "--wdvv"], dir.path()).status.code(), Some(0));
}
