use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use tempfile::TempDir;

const PHI: &str = "+x -y <= 2\n+x +y <= -1\n-x -z <= -4\n";
const MODES: [&str; 4] = ["scst", "inc-lamu", "m-lamu", "closure"];

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_utvpi")).args(args).output().expect("spawn utvpi");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn file(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_reports_each_verdict_in_every_mode() {
    let dir = TempDir::new().unwrap();
    let sat = file(&dir, "phi", PHI);
    let z = file(&dir, "phi2", &format!("{PHI}-x +z <= 3\n"));
    let q = file(&dir, "q", "+x <= 1\n-x <= -2\n");
    let empty = file(&dir, "empty", "");
    for mode in MODES {
        assert_eq!(run(&["check", s(&sat), "--mode", mode]), (0, "SAT\n".into(), String::new()), "{mode}");
        assert_eq!(run(&["check", s(&empty), "--mode", mode]).1, "SAT\n", "{mode}");
        let (code, out, _) = run(&["check", s(&z), "--mode", mode]);
        assert_eq!((code, out.as_str()), (11, "UNSAT-Z at constraint 4\n"), "{mode}");
        let (code, out, _) = run(&["check", s(&q), "--mode", mode]);
        assert_eq!((code, out.as_str()), (10, "UNSAT-Q at constraint 2\n"), "{mode}");
    }
}

#[test]
fn implies_reports_first_step() {
    let dir = TempDir::new().unwrap();
    let phi = file(&dir, "phi", PHI);
    let q = file(&dir, "q", "-z <= -3\n+y -z <= 0\n+x <= -1\n<= 0\n");
    let expected = "-z <= -3: implied at step 3\n+y -z <= 0: implied at step 3\n+x <= -1: not implied\n<= 0: implied at step 0\nSAT\n";
    for mode in ["scst", "closure"] {
        let (code, out, _) = run(&["implies", s(&phi), s(&q), "--mode", mode]);
        assert_eq!(code, 0);
        assert_eq!(out, expected, "{mode}");
    }
}

#[test]
fn errors_exit_with_two_and_name_the_line() {
    let dir = TempDir::new().unwrap();
    let bad = file(&dir, "bad", "+x <= 1\n+x <=\n");
    let (code, out, err) = run(&["check", s(&bad), "--mode", "scst"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("line 2"), "{err}");

    let missing = dir.path().join("missing");
    assert_eq!(run(&["check", s(&missing)]).0, 2);
    assert_eq!(run(&["check", s(&bad), "--mode", "nope"]).0, 2);
}

#[test]
fn gen_is_reproducible_and_checkable() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for p in [&a, &b] {
        assert_eq!(run(&["gen", "--n", "12", "--m", "30", "--seed", "9", "--out", s(p)]).0, 0);
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    assert_eq!(text.lines().count(), 30);

    let codes: Vec<_> = MODES.iter().map(|m| run(&["check", s(&a), "--mode", m])).collect();
    assert!(codes.windows(2).all(|w| w[0] == w[1]), "{codes:?}");
}
