//! The `gaudin` binary: golden output, exit codes, error names.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gaudin"))
}

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

#[test]
fn spectrum_matches_golden() {
    let want = std::fs::read_to_string(golden("inhomogeneous_v1v1.out.json")).unwrap();
    for threads in ["1", "4"] {
        let out = bin().args(["spectrum", "--threads", threads, "--spec"]).arg(golden("inhomogeneous_v1v1.json")).output().unwrap();
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(String::from_utf8(out.stdout).unwrap(), want);
    }
}

#[test]
fn spectrum_csv() {
    let out = bin().args(["spectrum", "--format", "csv", "--spec"]).arg(golden("inhomogeneous_v1v1.json")).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "block,line,H1,H2");
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[1], "-2,0,-1.5,-0.5");
}

#[test]
fn exit_codes() {
    let out = bin().args(["verify", "--suite", "psi", "--lie", "A1", "--n", "2", "--samples", "3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("\"psi_reduce(H_i) == H_trig: pass\""));

    let dir = std::env::temp_dir().join(format!("gaudin-cli-it-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("coincident.json");
    std::fs::write(&bad, r#"{"weights": [["1"], ["1"]], "model": "inhomogeneous", "points": ["1/2", "2/4"], "chi": ["1"]}"#).unwrap();
    let out = bin().arg("spectrum").arg("--spec").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("CoincidentPoints"));

    // a boundary point with a broken relation
    let point = dir.join("point.json");
    let z = r#"{"space": "F", "labels": [1, 2, 3], "n": 3, "coords": {"nu": {"1,2": "[1:1]", "2,1": "[-1:1]", "1,3": "[1:1]", "3,1": "[-1:1]", "2,3": "[1:1]", "3,2": "[-1:1]"}, "mu": {"1,2,3": "[1:1]", "1,3,2": "[1:1]", "2,1,3": "[0:1]", "2,3,1": "[1:0]", "3,1,2": "[0:1]", "3,2,1": "[1:0]"}}}"#;
    std::fs::write(&point, format!(r#"{{"point": {z}}}"#)).unwrap();
    let out = bin().args(["moduli", "validate", "--spec"]).arg(&point).output().unwrap();
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));

    let out = bin().args(["verify", "--threads", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
