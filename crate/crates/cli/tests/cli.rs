use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn run(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_gridham"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json(args: &[&str], stdin: &str) -> (Value, Option<i32>) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let out = run(&full, stdin);
    (serde_json::from_slice(&out.stdout).unwrap(), out.status.code())
}

fn text(args: &[&str], stdin: &str) -> String {
    String::from_utf8(run(args, stdin).stdout).unwrap()
}

const BLOCK_4X4: &str = "####\n####\n####\n####\n";

#[test]
fn exit_codes() {
    assert_eq!(run(&["check", "-"], BLOCK_4X4).status.code(), Some(0));
    let chipped = text(&["gen", "chipped-aztec", "3", "0"], "");
    assert_eq!(run(&["check", "-"], &chipped).status.code(), Some(1));
    // A 2x2 block with a pendant vertex is not 2-connected.
    assert_eq!(run(&["check", "-"], "##\n###\n").status.code(), Some(1));
    assert_eq!(run(&["check", "-"], "#x\n").status.code(), Some(2));
    assert_eq!(run(&["check", "/no/such/file"], "").status.code(), Some(2));
}

#[test]
fn check_reports_cycle_and_certificate() {
    let (v, code) = json(&["check", "-"], BLOCK_4X4);
    assert_eq!(code, Some(0));
    assert_eq!(v["command"], "check");
    assert_eq!(v["result"]["hamiltonian"], true);
    // Every vertex once, in cycle order.
    assert_eq!(v["result"]["cycle"].as_array().unwrap().len(), 16);
    assert_eq!(v["instance_hash"].as_str().unwrap().len(), 64);

    let chipped = text(&["gen", "chipped-aztec", "3", "1"], "");
    let (v, code) = json(&["check", "-"], &chipped);
    assert_eq!(code, Some(1));
    assert_eq!(v["result"]["reason"]["minimum-cycles"], 2);
    let cert = &v["result"]["components"][0]["certificate"];
    assert_eq!(cert["m"].as_u64().unwrap() + cert["r"].as_u64().unwrap(), cert["cover"]["p"].as_u64().unwrap());
}

#[test]
fn mincycles_on_chipped_diamond() {
    let chipped = text(&["gen", "chipped-aztec", "3", "0", "--seed", "4"], "");
    let (v, _) = json(&["mincycles", "-"], &chipped);
    assert_eq!(v["result"]["minimum"], 3);
    assert_eq!(v["result"]["stats"]["lemma_failures"], 0);
}

#[test]
fn hash_ignores_translation_and_comments() {
    let (a, _) = json(&["check", "-"], "##\n##\n");
    let (b, _) = json(&["check", "-"], "; a comment\n..##\n..##\n");
    assert_eq!(a["instance_hash"], b["instance_hash"]);
}

#[test]
fn render_matches_golden() {
    assert_eq!(text(&["render", "-"], "##\n##\n"), include_str!("golden/square.txt"));
    assert_eq!(
        text(&["render", "-", "--cover", "initial"], "###\n###\n###\n###\n"),
        include_str!("golden/block_3x4_initial.txt")
    );
    let svg = text(&["render", "-", "--svg"], "##\n##\n");
    assert!(svg.starts_with("<svg") && svg.matches("<line").count() == 4);
}

#[test]
fn generators_print_masks() {
    assert_eq!(text(&["gen", "rect", "3", "2"], ""), "###\n###\n");
    let a = text(&["gen", "random-polyomino", "12", "--seed", "3"], "");
    let b = text(&["gen", "--seed", "3", "random-polyomino", "12"], "");
    assert_eq!(a, b);
    assert_ne!(a, text(&["gen", "random-polyomino", "12", "--seed", "4"], ""));
    let tower = text(&["gen", "tower", "3"], "");
    assert_eq!(tower.matches('#').count(), 26);
}

#[test]
fn sampler_metadata_and_timing() {
    let (v, _) = json(&["sample", "-", "--seed", "5", "--steps", "1000", "--burnin", "100"], BLOCK_4X4);
    let run = &v["result"]["run"];
    assert_eq!(run["generator"], "chacha8");
    assert_eq!(run["seed"], 5);
    assert_eq!(run["steps"], 1100);
    assert!(v.get("timing_ms").is_none());
    let (v, _) = json(&["--timing", "estimate", "-", "--steps", "2000", "--chains", "2"], BLOCK_4X4);
    assert!(v["timing_ms"].as_f64().unwrap() >= 0.0);
    assert_eq!(v["result"]["chains"].as_array().unwrap().len(), 2);
    assert_eq!(v["result"]["chains"][1]["run"]["seed"], 1);
}

#[test]
fn oracle_summary_and_cap() {
    let tower = text(&["gen", "tower", "3"], "");
    let (v, _) = json(&["oracle", "-"], &tower);
    assert_eq!(v["result"]["covers"], 13);
    assert_eq!(v["result"]["hamiltonian_cycles"], 6);
    let big = text(&["gen", "rect", "8", "8"], "");
    assert_eq!(run(&["oracle", "-"], &big).status.code(), Some(2));
}
