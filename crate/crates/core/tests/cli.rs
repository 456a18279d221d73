use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use adamsext::resolution::Resolution;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_adamsext"))
        .args(args)
        .env_remove("ADAMSEXT_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_exit_codes() {
    let x = fixture("X.fdmod");
    assert_eq!(code(&run(&["validate", path_str(&x)])), 0);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.fdmod");
    std::fs::write(&bad, "module B {\n  gen a:0\n  gen b:2\n  sq 1 a = b\n}\n").unwrap();
    let out = run(&["validate", path_str(&bad)]);
    assert_eq!(code(&out), 2, "degree mismatch is a parse error");

    let adem = dir.path().join("adem.fdmod");
    std::fs::write(&adem, "module B {\n  gen a:0\n  gen b:1\n  gen c:2\n  sq 1 a = b\n  sq 1 b = c\n}\n").unwrap();
    let out = run(&["validate", path_str(&adem)]);
    assert_eq!(code(&out), 1);
    assert!(!out.stderr.is_empty());

    assert_eq!(code(&run(&["validate", path_str(&dir.path().join("missing.fdmod"))])), 2);
}

#[test]
fn ext_json_eight_stem() {
    let x = fixture("X.fdmod");
    let out = run(&["ext", path_str(&x), path_str(&x), "--format", "json", "--max-s", "6", "--max-t", "20"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let shift = v["shift"].as_i64().unwrap();
    assert_eq!(shift, -3);
    let classes = v["classes"].as_array().unwrap();
    let eight: Vec<u64> = classes
        .iter()
        .filter(|c| c["stem"].as_i64().unwrap() + shift == 8)
        .map(|c| c["s"].as_u64().unwrap())
        .collect();
    assert_eq!(eight, vec![2, 2, 3]);
    let h2_into_11_3 = v["lines"].as_array().unwrap().iter().any(|l| {
        l["kind"] == "h2" && l["from"][0].as_i64().unwrap() + shift == 8 && l["to"][0].as_i64().unwrap() + shift == 11
    });
    assert!(h2_into_11_3);
}

#[test]
fn ext_svg_to_file_and_ascii() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("chart.svg");
    let s = fixture("sphere.fdmod");
    let out = run(&["ext", path_str(&s), "--format", "svg", "--max-s", "4", "--max-t", "12", "--out", path_str(&svg)]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.contains("<svg") && text.trim_end().ends_with("</svg>"));

    let out = run(&["ext", path_str(&s), "--max-s", "4", "--max-t", "12"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("  s |"));
}

#[test]
fn resolve_writes_loadable_file_and_uses_cache() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("y.res");
    let cache = dir.path().join("cache");
    let y = fixture("Y.fdmod");
    let args = [
        "resolve",
        path_str(&y),
        "--max-s",
        "4",
        "--max-t",
        "30",
        "--out",
        path_str(&file),
        "--cache-dir",
        path_str(&cache),
    ];
    let first = run(&args);
    assert_eq!(code(&first), 0);
    let r = Resolution::load(&file).unwrap();
    assert_eq!((r.max_s(), r.max_t()), (4, 30));
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 1);
    let second = run(&args);
    assert_eq!(stdout(&first), stdout(&second));
}

#[test]
fn verify_paper_detects_corrupted_fixture() {
    let dir = tempfile::tempdir().unwrap();
    for entry in std::fs::read_dir(fixture("")).unwrap() {
        let p = entry.unwrap().path();
        std::fs::copy(&p, dir.path().join(p.file_name().unwrap())).unwrap();
    }
    let x = dir.path().join("X.fdmod");
    let text = std::fs::read_to_string(&x).unwrap().replace("sq 2 x13 = x15", "");
    std::fs::write(&x, text).unwrap();

    let out = run(&["verify-paper", "--fixtures", path_str(dir.path())]);
    assert_eq!(code(&out), 1);
    let report = stdout(&out);
    assert!(report.lines().any(|l| l.starts_with("C2  fail")), "{report}");
}

#[test]
fn verify_paper_table() {
    let out = run(&["verify-paper"]);
    let report = stdout(&out);
    for id in ["C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C9"] {
        assert!(report.lines().any(|l| l.starts_with(id)), "{id} missing:\n{report}");
    }
    assert!(report.lines().any(|l| l.starts_with("C2  pass")));
    assert!(report.lines().any(|l| l.starts_with("C7  report-only")));
    let failing = report.lines().filter(|l| l.starts_with('C') && l.contains(" fail ")).count();
    assert_eq!(code(&out), if failing == 0 { 0 } else { 1 });
}
