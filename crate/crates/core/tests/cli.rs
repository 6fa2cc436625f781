use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use crafter_foundry::bridge::{read_frame, write_json, Request, Response};
use serde_json::{json, Value};

const SUBCOMMANDS: [&str; 9] =
    ["gen-play", "gen-captions", "relabel", "filter-noops", "benchmark", "task", "render", "serve", "inspect"];

fn foundry(dir: &Path) -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_foundry"));
    c.current_dir(dir).env_remove("FOUNDRY_OUT_DIR").env("COLUMNS", "100");
    c
}

fn run(dir: &Path, args: &[&str]) -> Output {
    foundry(dir).args(args).output().unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

/// Compares against `tests/snapshots/<name>.txt`; set FOUNDRY_UPDATE_SNAPSHOTS=1 to rewrite.
fn snapshot(name: &str, actual: &str) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/snapshots").join(format!("{name}.txt"));
    if std::env::var_os("FOUNDRY_UPDATE_SNAPSHOTS").is_some() || !path.exists() {
        fs::write(&path, actual).unwrap();
        return;
    }
    assert_eq!(actual, fs::read_to_string(&path).unwrap(), "snapshot {name} changed");
}

#[test]
fn help_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    snapshot("help", &ok(dir.path(), &["--help"]));
    for sub in SUBCOMMANDS {
        snapshot(&format!("help_{sub}"), &ok(dir.path(), &[sub, "--help"]));
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&run(d, &["--version"])), 0);
    assert_eq!(code(&run(d, &[])), 1);
    assert_eq!(code(&run(d, &["launch"])), 1);
    assert_eq!(code(&run(d, &["gen-captions"])), 1);
    assert_eq!(code(&run(d, &["gen-play", "--episodes", "many"])), 1);
    assert_eq!(code(&run(d, &["task", "--id", "T9"])), 1);
    assert_eq!(code(&run(d, &["benchmark", "--agent", "oracle", "--episodes", "1"])), 1);
    assert_eq!(code(&run(d, &["--workers", "0", "benchmark", "--episodes", "1"])), 1);
    assert_eq!(code(&run(d, &["gen-play", "--episodes", "0"])), 1);
    assert_eq!(code(&run(d, &["inspect", "missing.cdj"])), 2);
    fs::write(d.join("junk.cdj"), b"CDJ1garbage").unwrap();
    let out = run(d, &["inspect", "junk.cdj"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn gen_play_is_byte_identical_and_honors_out_dir_env() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for name in ["a", "b"] {
        let out = foundry(d)
            .env("FOUNDRY_OUT_DIR", d.join(name))
            .args(["gen-play", "--seed", "5", "--episodes", "2", "--max-steps", "300"])
            .output()
            .unwrap();
        assert!(out.status.success());
    }
    let files = |n: &str| {
        let mut v: Vec<_> = fs::read_dir(d.join(n).join("play")).unwrap().map(|e| e.unwrap().file_name()).collect();
        v.sort();
        v
    };
    assert_eq!(files("a").len(), 3);
    assert_eq!(files("a"), files("b"));
    for f in files("a") {
        assert_eq!(fs::read(d.join("a/play").join(&f)).unwrap(), fs::read(d.join("b/play").join(&f)).unwrap());
    }
}

#[test]
fn dataset_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["gen-play", "--episodes", "2", "--max-steps", "400"]);
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/paraphrases.yaml");
    let text = ok(d, &["gen-captions", "--play", "play", "--paraphrases", fixture.to_str().unwrap(), "--variants", "3"]);
    assert!(text.starts_with("wrote"));
    let text = ok(d, &["relabel", "--play", "play", "--captions", "captions.jsonl"]);
    assert!(text.contains("chunks"));
    assert_eq!(fs::read_to_string(d.join("goals.jsonl")).unwrap().lines().count(), 2);
    assert_eq!(code(&run(d, &["relabel", "--play", "play", "--captions", "captions.jsonl", "--min-goal-steps", "0"])), 1);

    ok(d, &["filter-noops", "play/episode_000000.cdj", "--out", "mask.json"]);
    let mask: Vec<bool> = serde_json::from_str(&fs::read_to_string(d.join("mask.json")).unwrap()).unwrap();
    let header: Value = serde_json::from_str(&ok(d, &["inspect", "play/episode_000000.cdj"])).unwrap();
    assert_eq!(header["length"].as_u64().unwrap() as usize, mask.len());

    ok(d, &["render", "play/episode_000001.cdj", "--frame", "3"]);
    assert!(fs::read(d.join("frame.png")).unwrap().starts_with(b"\x89PNG"));
    ok(d, &["render", "play/episode_000001.cdj", "--out", "clip.gif", "--frame", "0", "--end", "5"]);
    assert!(fs::read(d.join("clip.gif")).unwrap().starts_with(b"GIF8"));
    assert_eq!(code(&run(d, &["render", "play/episode_000001.cdj", "--frame", "100000"])), 1);
}

#[test]
fn task_and_benchmark_commands() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let text = ok(d, &["task", "--id", "make_wood_pickaxe", "--episodes", "2", "--out", "tasks.json"]);
    assert!(text.contains("2/2 complete"), "{text}");
    let outcomes: Value = serde_json::from_str(&fs::read_to_string(d.join("tasks.json")).unwrap()).unwrap();
    assert_eq!(outcomes.as_array().unwrap().len(), 2);
    ok(d, &["task", "--id", "T2", "--agent", "noop"]);

    let text = ok(d, &["benchmark", "--agent", "random", "--episodes", "3", "--max-steps", "200"]);
    assert!(text.contains("score"));
    for ext in ["txt", "json", "csv"] {
        assert!(d.join(format!("benchmark_random.{ext}")).exists());
    }
    ok(d, &["benchmark", "--throughput", "--steps", "2000", "--render-frames", "20"]);
    let t: Value = serde_json::from_str(&fs::read_to_string(d.join("throughput.json")).unwrap()).unwrap();
    assert_eq!(t["steps"], json!(2000));
}

#[test]
fn serve_over_stdio() {
    let dir = tempfile::tempdir().unwrap();
    let mut child = foundry(dir.path())
        .args(["serve", "--stdio"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut stdin = child.stdin.take().unwrap();
    let mut stdout = child.stdout.take().unwrap();
    let mut call = |op: &str, args: Value| -> Response {
        write_json(&mut stdin, &Request { op: op.into(), id: json!(op), args }).unwrap();
        stdin.flush().unwrap();
        serde_json::from_slice(&read_frame(&mut stdout).unwrap().unwrap()).unwrap()
    };
    assert_eq!(call("spec", Value::Null).payload.unwrap()["actions"].as_array().unwrap().len(), 17);
    assert!(call("reset", json!({"seed": 4})).ok);
    let r = call("step", json!({"action": "move_left"}));
    assert!(r.ok);
    assert_eq!(r.id, json!("step"));
    assert!(call("close", Value::Null).ok);
    assert!(child.wait().unwrap().success());
}
