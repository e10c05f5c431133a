use std::path::Path;
use std::process::{Command, Output};

use digrid::io::dot_node_names;
use serde_json::Value;

fn digrid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_digrid"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).expect("JSON output")
}

/// Runs `args` with `--out` into `dir` and returns the path.
fn to_file(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name).display().to_string();
    let mut all = args.to_vec();
    all.extend(["--out", &path]);
    let out = digrid(&all);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    path
}

fn verdicts(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn gen_dot_has_one_vertical_per_level() {
    let out = digrid(&[
        "gen",
        "--kind",
        "bidirected-qg",
        "--levels",
        "4",
        "--format",
        "dot",
    ]);
    assert!(out.status.success());
    let dot = String::from_utf8(out.stdout).unwrap();
    assert!(dot.starts_with("digraph G {"));
    // the roots of the verticals are v1..v4 (row 0)
    let names = dot_node_names(&dot);
    for ray in 1..=4 {
        assert!(
            names.contains(&format!("v{ray}")),
            "missing root of ray {ray}"
        );
    }
    assert!(!names.contains("v5"));
}

#[test]
fn every_generated_certificate_validates() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for kind in [
        "bidirected-qg",
        "inward-ddqg",
        "outward-ddqg",
        "bidirected-ng",
        "inward-ng",
        "outward-ng",
    ] {
        for levels in ["2", "3", "5"] {
            files.push(to_file(
                dir.path(),
                &format!("{kind}-{levels}.json"),
                &["gen", "--kind", kind, "--levels", levels],
            ));
        }
    }
    let mut args = vec!["validate"];
    args.extend(files.iter().map(String::as_str));
    let out = digrid(&args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let lines = verdicts(&out);
    assert_eq!(lines.len(), files.len());
    for (line, file) in lines.iter().zip(&files) {
        assert_eq!(line["input"], file.as_str());
        assert_eq!(line["verdict"], "accept");
    }
}

#[test]
fn mutated_certificate_is_rejected_as_girder_broken() {
    let dir = tempfile::tempdir().unwrap();
    for kind in ["outward-ddqg", "bidirected-ng"] {
        let f = to_file(
            dir.path(),
            "m.json",
            &[
                "gen",
                "--kind",
                kind,
                "--delete-girder-edges",
                "1",
                "--seed",
                "3",
            ],
        );
        let out = digrid(&["validate", &f]);
        assert_eq!(out.status.code(), Some(1));
        assert_eq!(verdicts(&out)[0]["reason"], "GirderBroken", "{kind}");
    }
}

#[test]
fn pipeline_certificate_passes_validate() {
    let dir = tempfile::tempdir().unwrap();
    let f = to_file(
        dir.path(),
        "p.json",
        &[
            "pipeline",
            "--host",
            "inward-ddqg",
            "--levels",
            "3",
            "--depth",
            "12",
        ],
    );
    let doc = json(&std::fs::read(&f).unwrap());
    assert_eq!(doc["schema"], "digrid/1");
    assert_eq!(
        doc["certificate"]["verticals"].as_object().unwrap().len(),
        3
    );
    assert!(doc["route"].is_string() || doc["route"].is_object());
    assert!(digrid(&["validate", &f]).status.success());
}

#[test]
fn transform_and_necklace_outputs_validate() {
    let dir = tempfile::tempdir().unwrap();
    let t = to_file(
        dir.path(),
        "t.json",
        &[
            "transform",
            "--host",
            "chain-out",
            "--levels",
            "3",
            "--depth",
            "16",
        ],
    );
    let doc = json(&std::fs::read(&t).unwrap());
    assert_eq!(doc["certificate"]["kind"], "BidirectedQG");
    assert!(doc["witnesses"]
        .as_array()
        .unwrap()
        .iter()
        .all(|w| w["forward"].as_u64() >= Some(3)));
    let n = to_file(
        dir.path(),
        "n.json",
        &[
            "necklace",
            "--host",
            "bidirected-ng",
            "--levels",
            "3",
            "--depth",
            "12",
        ],
    );
    let out = digrid(&["validate", &t, &n]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
}

#[test]
fn separation_checks_report_their_controls() {
    let out = digrid(&[
        "necklace",
        "--host",
        "outward-ng",
        "--check",
        "arch-separation",
        "--depth",
        "10",
    ]);
    assert!(out.status.success());
    let v = json(&out.stdout);
    assert_eq!(v["verdict"], "accept");
    assert_eq!(v["report"]["control_reaches_frontier"], true);
    let out = digrid(&[
        "necklace",
        "--host",
        "bidirected-ng",
        "--check",
        "girder-obstruction",
        "--depth",
        "10",
    ]);
    assert!(out.status.success());
    assert_eq!(
        json(&out.stdout)["report"]["control_paths"]
            .as_array()
            .unwrap()
            .len(),
        1
    );
}

#[test]
fn obstructions_are_json_on_stderr() {
    let out = digrid(&[
        "pipeline",
        "--host",
        "chain-out",
        "--levels",
        "4",
        "--depth",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    let err = json(&out.stderr);
    assert_eq!(err["kind"], "error");
    assert_eq!(err["code"], "ObstructionAtDepth");
    assert_eq!(err["details"]["depth"], 5);
    let out = digrid(&["contract", "--host", "no-such-host"]);
    assert_eq!(json(&out.stderr)["code"], "Usage");
}

#[test]
fn identical_invocations_are_byte_identical() {
    for args in [
        &["contract", "--host", "funnel", "--depth", "9"][..],
        &["analyze", "--host", "chain-in", "--depth", "12"],
        &["pipeline", "--host", "bidirected-qg", "--levels", "3"],
        &[
            "gen",
            "--kind",
            "inward-ng",
            "--delete-girder-edges",
            "2",
            "--seed",
            "9",
        ],
    ] {
        let (a, b) = (digrid(args), digrid(args));
        assert!(
            a.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&a.stderr)
        );
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn export_dot_styles_certificates_and_plain_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let g = to_file(
        dir.path(),
        "g.json",
        &["gen", "--kind", "outward-ddqg", "--levels", "3"],
    );
    let out = digrid(&["export-dot", &g]);
    let dot = String::from_utf8(out.stdout).unwrap();
    assert!(dot.contains("class=\"arch\"") && dot.contains("class=\"vertical\""));
    let c = to_file(
        dir.path(),
        "c.json",
        &["contract", "--host", "chain-in", "--depth", "9"],
    );
    let out = digrid(&["export-dot", &c]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("->"));
}
