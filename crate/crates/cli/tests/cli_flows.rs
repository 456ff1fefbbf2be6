//! End-to-end flows through the binary: file formats, exit codes, and the
//! solve/extend pipeline.

use std::path::Path;
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_semiplanar")
}

fn run(args: &[&str], dir: &Path) -> std::process::Output {
    Command::new(bin())
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

#[test]
fn gen_solve_extend_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = run(&["gen", "--kind", "4^4", "--radius", "8", "--out", "g.json"], d);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let out = run(
        &["solve", "--graph", "g.json", "--ball", "0,4", "--boundary", "xy", "--out", "f.json"],
        d,
    );
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("iterations="));

    let out = run(
        &[
            "extend", "--graph", "g.json", "--field", "f.json", "--K", "16", "--samples", "256",
            "--out", "fbar.json",
        ],
        d,
    );
    assert!(out.status.success());
    let ext: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("fbar.json")).unwrap()).unwrap();
    assert_eq!(ext["K"], 16);
    assert!(ext["faces"].as_array().unwrap().len() > 0);
    let entry = &ext["faces"][0];
    assert!(entry["id"].is_number() && entry["a0"].is_number());
    assert_eq!(entry["a"].as_array().unwrap().len(), 16);

    let out = run(
        &["surface", "--graph", "g.json", "--ball-volume", "0,2", "--h", "0.2", "--out", "s.csv"],
        d,
    );
    assert!(out.status.success());
    let rows = std::fs::read_to_string(d.join("s.csv")).unwrap();
    assert!(rows.contains("p,R,value,eps_quad"));

    // The dimension candidates solve well outside the schedule, so they
    // need a roomier truncation.
    let out = run(&["gen", "--kind", "4^4", "--radius", "28", "--out", "big.json"], d);
    assert!(out.status.success());
    let out = run(
        &["dim", "--graph", "big.json", "--d", "1", "--radii", "4,6,8", "--tau", "1e-8", "--out", "dim.csv"],
        d,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("dim estimate (d=1, tau=1e-8): 3"));
}

#[test]
fn input_errors_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    // Unsupported tiling pattern.
    let out = run(&["gen", "--kind", "5.5.5", "--radius", "3", "--out", "g.json"], d);
    assert_eq!(out.status.code(), Some(2));
    // Missing graph file.
    let out = run(&["curvature", "--graph", "missing.json"], d);
    assert_eq!(out.status.code(), Some(2));
    // Malformed rotation entry names the vertex.
    std::fs::write(
        d.join("bad.json"),
        r#"{ "vertices": 2, "rotation": [[1], [0, 9]], "boundary": [0, 1] }"#,
    )
    .unwrap();
    let out = run(&["curvature", "--graph", "bad.json"], d);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("vertex 1"));
}

#[test]
fn bound_failures_exit_with_code_one() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = run(&["gen", "--kind", "4^4", "--radius", "10", "--out", "g.json"], d);
    assert!(out.status.success());
    // A negative quadrature slack turns the volume bounds unattainable, so
    // the rvc suite must report failure through the exit code.
    let out = run(
        &[
            "verify", "--graph", "g.json", "--suite", "rvc", "--quad-slack=-0.9", "--out",
            "r.csv",
        ],
        d,
    );
    assert_eq!(out.status.code(), Some(1));
    let text = std::fs::read_to_string(d.join("r.csv")).unwrap();
    assert!(text.contains("false"));
}

#[test]
fn verify_skips_gram_on_curved_patches() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    // Five triangles around a hub: positive curvature at the center.
    std::fs::write(
        d.join("cap.json"),
        r#"{ "vertices": 6,
             "rotation": [[1,2,3,4,5],[2,0,5],[3,0,1],[4,0,2],[5,0,3],[1,0,4]],
             "boundary": [1,2,3,4,5] }"#,
    )
    .unwrap();
    let out = run(
        &["verify", "--graph", "cap.json", "--suite", "gram", "--out", "r.csv"],
        d,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(d.join("r.csv")).unwrap();
    assert!(text.contains("# note: gram suite skipped"), "{text}");
}
